"""Complex projective space with the Fubini-Study structure and the bundle O(N).

Everything lives in the standard affine chart ``C^n`` of ``P^n``. A holomorphic
section of ``O(N)`` is a polynomial of degree ``<= N`` times the standard frame,
whose pointwise hermitian norm is ``(1 + |z|^2)^(-N)``.

Volume convention: ``dV = (1 + |z|^2)^(-(n+1)) dLeb`` on the chart, which is the
Riemannian volume of the hermitian metric ``h_{jk} = d_j dbar_k log(1 + |z|^2)``
(total volume ``pi^n / n!``). Raw section norms depend on this constant; the
restriction states are trace-normalized, so it cancels there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial, lgamma, pi

import numpy as np


@dataclass(frozen=True)
class ManifoldModel:
    """``P^n`` seen through its standard affine chart."""

    n: int
    chart: str = "affine"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"complex dimension must be an integer >= 1, got {self.n!r}")

    @property
    def volume(self) -> float:
        return pi**self.n / factorial(self.n)


def dim_sections(n: int, N: int) -> int:
    """Dimension of H^0(P^n, O(N)), i.e. binomial(N + n, n)."""
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
    return comb(N + n, n)


def multi_indices(n: int, N: int) -> list[tuple[int, ...]]:
    """Exponent vectors ``a`` with ``|a| <= N`` in lexicographic order."""
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
    return [a for a in itertools.product(range(N + 1), repeat=n) if sum(a) <= N]


def _as_points(point, n: int | None = None) -> np.ndarray:
    z = np.asarray(point, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if n is not None and z.shape[-1] != n:
        raise ValueError(f"expected chart coordinates of length {n}, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("chart coordinates must be finite")
    return z


def fs_weight(point, N: int) -> np.ndarray | float:
    """Pointwise norm ``h^N(frame, frame) = (1 + |z|^2)^(-N)``.

    ``point`` has shape ``(..., n)``; a scalar is read as a point of ``P^1``.
    """
    z = _as_points(point)
    w = (1.0 + np.sum(np.abs(z) ** 2, axis=-1)) ** (-N)
    return float(w) if np.ndim(w) == 0 else w


def fs_hermitian_metric(point) -> np.ndarray:
    """Hermitian FS metric ``h_{jk}`` at ``point`` (shape ``(..., n)``) -> ``(..., n, n)``."""
    z = _as_points(point)
    q = 1.0 + np.sum(np.abs(z) ** 2, axis=-1)
    n = z.shape[-1]
    eye = np.eye(n)
    outer = np.conj(z)[..., :, None] * z[..., None, :]
    return (eye * q[..., None, None] - outer) / (q**2)[..., None, None]


def monomial_norm_sq(n: int, N: int, a) -> float:
    """Closed form ``pi^n a! (N - |a|)! / (N + n)!`` of ``||z^a||^2``."""
    a = tuple(int(k) for k in a)
    if len(a) != n:
        raise ValueError(f"multi-index {a} does not have length {n}")
    if any(k < 0 for k in a) or sum(a) > N:
        raise ValueError(f"multi-index {a} is not a section of O({N})")
    log_val = n * np.log(pi) + sum(lgamma(k + 1) for k in a) + lgamma(N - sum(a) + 1) - lgamma(N + n + 1)
    return float(np.exp(log_val))


def monomial_norm(n: int, N: int, a) -> float:
    return float(np.sqrt(monomial_norm_sq(n, N, a)))


@dataclass(frozen=True)
class SectionBasis:
    """Orthonormal monomial basis ``z^a / ||z^a||`` of H^0(P^n, O(N))."""

    model: ManifoldModel
    power: int
    multi_indices: tuple[tuple[int, ...], ...] = field(init=False)
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 1:
            raise ValueError(f"power N must be an integer >= 1, got {self.power!r}")
        idx = tuple(multi_indices(self.model.n, self.power))
        norms = np.array([monomial_norm(self.model.n, self.power, a) for a in idx])
        norms.setflags(write=False)
        object.__setattr__(self, "multi_indices", idx)
        object.__setattr__(self, "norms", norms)

    @classmethod
    def of(cls, n: int, N: int) -> "SectionBasis":
        return cls(ManifoldModel(n), N)

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def size(self) -> int:
        return len(self.multi_indices)

    def __len__(self):
        return self.size

    def values(self, points) -> np.ndarray:
        """Trivialized values of every normalized basis section.

        ``points`` has shape ``(K, n)`` or ``(n,)``; returns ``(K, d)`` or ``(d,)``.
        """
        z = _as_points(points, self.n)
        single = z.ndim == 1
        z = np.atleast_2d(z)
        powers = z[:, :, None] ** np.arange(self.power + 1)  # (K, n, N+1)
        exps = np.array(self.multi_indices)  # (d, n)
        vals = np.ones((z.shape[0], self.size), dtype=complex)
        for k in range(self.n):
            vals *= powers[:, k, exps[:, k]]
        vals /= self.norms
        return vals[0] if single else vals


def evaluate_section(basis: SectionBasis, coeffs, point) -> complex | np.ndarray:
    """Chart value ``sum_k c_k z^{a_k} / ||z^{a_k}||`` of a section at ``point``."""
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (basis.size,):
        raise ValueError(f"expected {basis.size} coefficients, got shape {c.shape}")
    out = basis.values(point) @ c
    return complex(out) if np.ndim(out) == 0 else out
