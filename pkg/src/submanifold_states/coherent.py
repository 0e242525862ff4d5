"""Coherent states: Riesz representatives of evaluation at a point.

For a point ``p`` and unit frame ``xi = phase * e / |e|`` the coherent state
``Theta`` satisfies ``<s, Theta> = h^N(s(p), xi^N)`` for every section ``s``.
In the orthonormal monomial basis this gives

    Theta_k = conj(e_k(p)) * phase^N * (1 + |p|^2)^(-N/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .projective import SectionBasis, _as_points, fs_weight


def frame_pairing(point, N: int, phase: complex = 1.0) -> complex:
    """``h^N(e^N, xi^N)`` for the standard frame ``e`` and ``xi = phase * e / |e|``."""
    phase = complex(phase)
    return np.conj(phase**N) * np.sqrt(fs_weight(point, N))


@dataclass(frozen=True)
class CoherentState:
    basis: SectionBasis
    base_point: np.ndarray
    phase: complex
    coeffs: np.ndarray

    @property
    def power(self) -> int:
        return self.basis.power

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def pair(self, section_coeffs) -> complex:
        """``<s, Theta>`` for a section given in the orthonormal basis."""
        return complex(np.vdot(self.coeffs, np.asarray(section_coeffs, dtype=complex)))


def coherent_state(basis: SectionBasis, p, phase: complex = 1.0, N: int | None = None) -> CoherentState:
    if N is not None and N != basis.power:
        raise ValueError(f"basis is for N={basis.power}, asked for N={N}")
    phase = complex(phase)
    if not np.isclose(abs(phase), 1.0, rtol=0, atol=1e-12):
        raise ValueError(f"phase must have modulus 1, got |phase|={abs(phase)}")
    z = _as_points(p, basis.n)
    if z.ndim != 1:
        raise ValueError("coherent_state takes a single base point")
    coeffs = np.conj(basis.values(z) * frame_pairing(z, basis.power, phase))
    return CoherentState(basis, z, phase, coeffs)


def coherent_vectors(basis: SectionBasis, points) -> np.ndarray:
    """Coefficient vectors of unit-phase coherent states at many points, ``(K, d)``."""
    z = np.atleast_2d(_as_points(points, basis.n))
    return np.conj(basis.values(z)) * np.sqrt(fs_weight(z, basis.power))[:, None]


def product_coherent_state(state1: CoherentState, state2: CoherentState) -> np.ndarray:
    """Coefficients of ``Theta_1 (x) Theta_2`` in the ordering ``(i, j) -> i * d2 + j``."""
    if state1.power != state2.power:
        raise ValueError(f"power mismatch: N={state1.power} vs N={state2.power}")
    return np.kron(state1.coeffs, state2.coeffs)


def bergman_density(basis: SectionBasis, p) -> float:
    """Diagonal Bergman kernel ``sum_k |e_k(p)|^2 h^N(p)``; constant on P^n."""
    z = _as_points(p, basis.n)
    return float(np.sum(np.abs(basis.values(z)) ** 2) * fs_weight(z, basis.power))
