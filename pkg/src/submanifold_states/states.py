"""Restriction states rho_N = P*P / tr(P*P) and bipartite bookkeeping.

The matrix of ``P*P`` in the orthonormal product basis ``e_i (x) f_j`` is

    G[(i,j), (l,r)] = int_Lambda conj(e_i f_j) e_l f_r h^N dmu,

i.e. ``G[a, b] = <P e_b, P e_a>``. It is assembled straight from quadrature;
neither the image space nor the adjoint is built. Tensor index ``(i, j)`` is
flattened as ``i * d2 + j`` everywhere.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coherent import coherent_vectors
from .projective import SectionBasis, fs_weight
from .quadrature import QuadratureError, QuadratureRule, SubmanifoldSpec, factor_measure

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
CHUNK = 16384


class DegenerateStateError(ValueError):
    """P*P vanishes, so no state can be normalized from it."""


class NumericalError(ArithmeticError):
    """A matrix that must be PSD came out with a clearly negative eigenvalue."""


def _check_dims(matrix: np.ndarray, dims) -> tuple[int, int]:
    d1, d2 = (int(d) for d in dims)
    if matrix.ndim != 2 or matrix.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"matrix of shape {matrix.shape} does not match dims ({d1}, {d2})")
    return d1, d2


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD trace-one matrix on ``C^d1 (x) C^d2``."""

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dims = _check_dims(m, self.dims)
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix has trace {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class GramOperator:
    """Un-normalized ``P*P`` in the orthonormal product basis."""

    matrix: np.ndarray
    dims: tuple[int, int]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def _clean_psd(G: np.ndarray) -> np.ndarray:
    G = 0.5 * (G + G.conj().T)
    tr = np.trace(G).real
    if not tr > 0:
        raise DegenerateStateError("restricted Gram operator has zero trace")
    lam, V = np.linalg.eigh(G)
    if lam[0] < -PSD_TOL * tr:
        raise NumericalError(f"Gram operator has eigenvalue {lam[0]:.3e} (trace {tr:.3e})")
    if lam[0] < 0:
        G = (V * np.clip(lam, 0.0, None)) @ V.conj().T
        G = 0.5 * (G + G.conj().T)
    return G


def _product_values(basis1: SectionBasis, basis2: SectionBasis, z, w) -> np.ndarray:
    v1 = basis1.values(z)
    v2 = basis2.values(w)
    return (v1[:, :, None] * v2[:, None, :]).reshape(len(v1), -1)


def restriction_gram(
    basis1: SectionBasis,
    basis2: SectionBasis,
    spec: SubmanifoldSpec,
    rule: QuadratureRule | None = None,
    workers: int = 1,
) -> GramOperator:
    """Assemble ``P*P`` for the restriction of sections to ``spec``.

    Nodes are processed in fixed-size chunks; with ``workers > 1`` chunks run in
    threads but are still summed in chunk order, so the result does not depend
    on scheduling.
    """
    N = basis1.power
    if basis2.power != N:
        raise ValueError(f"bases disagree on N: {N} vs {basis2.power}")
    if (basis1.n, basis2.n) != (spec.n1, spec.n2):
        raise ValueError(f"bases live on P^{basis1.n} x P^{basis2.n}, spec on P^{spec.n1} x P^{spec.n2}")
    if rule is None:
        rule = spec.rule()
    if rule.dim != spec.dim:
        raise ValueError(f"rule has {rule.dim} parameters, {spec.kind} needs {spec.dim}")

    def chunk_sum(lo: int) -> np.ndarray:
        u = rule.nodes[lo : lo + CHUNK]
        z, w = spec.chart_points(u)
        weight = rule.weights[lo : lo + CHUNK] * spec.densities(u) * fs_weight(z, N) * fs_weight(w, N)
        V = _product_values(basis1, basis2, z, w)
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(weight))):
            bad = ~(np.isfinite(V).all(axis=1) & np.isfinite(weight))
            raise QuadratureError(f"non-finite restricted section at parameter {u[np.argmax(bad)].tolist()}")
        return V.conj().T @ (weight[:, None] * V)

    starts = range(0, rule.size, CHUNK)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk_sum, starts))
    else:
        parts = [chunk_sum(lo) for lo in starts]
    G = parts[0]
    for part in parts[1:]:
        G = G + part
    return GramOperator(_clean_psd(G), (basis1.size, basis2.size))


def factor_gram(basis: SectionBasis, spec: SubmanifoldSpec, factor: int, nodes: int | None = None) -> np.ndarray:
    """Single-factor Gram matrix (``A_N`` for factor 1, ``B_N`` for factor 2) of a product spec."""
    pts, w = factor_measure(spec, factor, nodes)
    V = basis.values(pts)
    weight = w * fs_weight(pts, basis.power)
    A = V.conj().T @ (weight[:, None] * V)
    return 0.5 * (A + A.conj().T)


def coherent_mixture_gram(
    basis1: SectionBasis, basis2: SectionBasis, spec: SubmanifoldSpec, rule: QuadratureRule | None = None
) -> np.ndarray:
    """``sum_k w_k mu_k |Theta_k><Theta_k|`` over product coherent states at the nodes."""
    if rule is None:
        rule = spec.rule()
    out = np.zeros((basis1.size * basis2.size,) * 2, dtype=complex)
    for lo in range(0, rule.size, CHUNK):
        u = rule.nodes[lo : lo + CHUNK]
        z, w = spec.chart_points(u)
        th = coherent_vectors(basis1, z)[:, :, None] * coherent_vectors(basis2, w)[:, None, :]
        th = th.reshape(len(u), -1)
        mu = rule.weights[lo : lo + CHUNK] * spec.densities(u)
        out += np.einsum("k,ka,kb->ab", mu, th, th.conj())
    return out


def rho_from_gram(G: GramOperator) -> DensityMatrix:
    tr = G.trace
    if not tr > 0:
        raise DegenerateStateError("cannot normalize a Gram operator with zero trace")
    m = G.matrix / tr
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m, G.dims)


def restriction_state(n1: int, n2: int, N: int, spec: SubmanifoldSpec, nodes: int | None = None, workers: int = 1) -> DensityMatrix:
    """Convenience: ``rho_N`` for ``spec`` on ``P^n1 x P^n2``."""
    if (spec.n1, spec.n2) != (n1, n2):
        spec = spec.with_(n1=n1, n2=n2)
    b1, b2 = SectionBasis.of(n1, N), SectionBasis.of(n2, N)
    return rho_from_gram(restriction_gram(b1, b2, spec, spec.rule(nodes), workers=workers))


def _as_matrix(rho) -> tuple[np.ndarray, tuple[int, int]]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    raise TypeError(f"expected a DensityMatrix, got {type(rho).__name__}")


def partial_trace_2(rho: DensityMatrix) -> np.ndarray:
    """Trace out the second factor."""
    m, (d1, d2) = _as_matrix(rho)
    return np.einsum("ijkj->ik", m.reshape(d1, d2, d1, d2))


def partial_trace_1(rho: DensityMatrix) -> np.ndarray:
    """Trace out the first factor."""
    m, (d1, d2) = _as_matrix(rho)
    return np.einsum("ijil->jl", m.reshape(d1, d2, d1, d2))


def _check_factor(A: np.ndarray, name: str):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if np.max(np.abs(A - A.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError(f"{name} is not Hermitian")
    if abs(np.trace(A) - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} does not have trace 1")
    if np.linalg.eigvalsh(A)[0] < -PSD_TOL:
        raise ValueError(f"{name} is not positive semidefinite")
    return A


def tensor_product(A, B) -> DensityMatrix:
    A = _check_factor(A, "first factor")
    B = _check_factor(B, "second factor")
    return DensityMatrix(np.kron(A, B), (A.shape[0], B.shape[0]))


def product_factor_residual(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray, float]:
    """Reduced states and ``||rho - rho_1 (x) rho_2||_F``; zero exactly for product states."""
    r1, r2 = partial_trace_2(rho), partial_trace_1(rho)
    residual = float(np.linalg.norm(rho.matrix - np.kron(r1, r2)))
    return r1, r2, residual


def projector(v, dims) -> DensityMatrix:
    """Rank-one state ``|v><v| / <v, v>``."""
    v = np.asarray(v, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), dims)
