"""Entanglement diagnostics for bipartite states.

Entropies are in nats. Entanglement of formation is only computed where it has
a closed form: pure states (it is the entanglement entropy) and two qubits
(Wootters' concurrence formula). Elsewhere a mixed state gets the PPT test and
the product-factor residual.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .states import DensityMatrix, product_factor_residual

PURITY_TOL = 1e-10
PPT_TOL = 1e-10
CLIP_TOL = 1e-10

SEPARABLE = "separable_certified"
ENTANGLED = "entangled_certified"
INCONCLUSIVE = "inconclusive"

_SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


class UnsupportedDimensionError(ValueError):
    pass


def _unit(v, d1: int, d2: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != d1 * d2:
        raise ValueError(f"vector of length {v.size} does not match dims ({d1}, {d2})")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"expected a unit vector, got norm {np.linalg.norm(v)!r}")
    return v


def schmidt(v, d1: int, d2: int) -> np.ndarray:
    """Schmidt coefficients (nonincreasing) of a unit vector in ``C^d1 (x) C^d2``."""
    v = _unit(v, d1, d2)
    return np.linalg.svd(v.reshape(d1, d2), compute_uv=False)


def _entropy_of(probs) -> float:
    p = np.asarray(probs, dtype=float)
    if np.any(p < -CLIP_TOL):
        raise ValueError(f"negative spectral weight {p.min():.3e}")
    p = np.clip(p, 0.0, 1.0)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p))) + 0.0  # no -0.0


def entanglement_entropy(v, d1: int, d2: int) -> float:
    """``-sum lambda ln lambda`` over the squared Schmidt coefficients."""
    return _entropy_of(schmidt(v, d1, d2) ** 2)


def binary_entropy(x: float) -> float:
    return _entropy_of([x, 1.0 - x])


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state.

    The ``lambda_i`` are the singular values of ``Phi^T (sy (x) sy) Phi`` with
    ``rho = Phi Phi^*``, which avoids square roots of tiny eigenvalues.
    """
    if tuple(rho.dims) != (2, 2):
        raise UnsupportedDimensionError(f"concurrence needs 2x2 qubits, got dims {rho.dims}")
    lam, V = np.linalg.eigh(rho.matrix)
    phi = V * np.sqrt(np.clip(lam, 0.0, None))
    s = np.linalg.svd(phi.T @ _SIGMA_YY @ phi, compute_uv=False)
    return float(min(1.0, max(0.0, s[0] - s[1] - s[2] - s[3])))


def wootters_eof(rho: DensityMatrix) -> tuple[float, float]:
    """``(concurrence, entanglement of formation)`` of a two-qubit state."""
    c = concurrence(rho)
    return c, binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose on the second factor."""
    d1, d2 = rho.dims
    return rho.matrix.reshape(d1, d2, d1, d2).transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


def ppt_check(rho: DensityMatrix, tol: float = PPT_TOL) -> tuple[float, str]:
    lam_min = float(np.linalg.eigvalsh(partial_transpose(rho))[0])
    return lam_min, ("NPT" if lam_min < -tol else "PPT")


@dataclass
class EntanglementReport:
    dims: tuple[int, int]
    purity: float
    pure: bool
    entropy: float | None
    schmidt: list[float] | None
    concurrence: float | None
    eof: float | None
    ppt_min_eigenvalue: float
    ppt: str
    product_residual: float
    separable_verdict: str
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        return d


def analyze(rho: DensityMatrix, tol: float = 1e-9) -> EntanglementReport:
    """Gather every applicable diagnostic and a separability verdict.

    Separability is only claimed with a decomposition in hand: a decomposable
    pure state, an exact product ``rho_1 (x) rho_2``, or zero concurrence at
    two qubits (Wootters' construction is explicit).
    """
    d1, d2 = rho.dims
    purity = rho.purity
    pure = abs(purity - 1.0) < PURITY_TOL
    lam_min, ppt = ppt_check(rho)
    _, _, residual = product_factor_residual(rho)

    entropy = sch = conc = eof = None
    if pure:
        lam, V = np.linalg.eigh(rho.matrix)
        v = V[:, -1] / np.linalg.norm(V[:, -1])
        sch_arr = schmidt(v, d1, d2)
        sch = sch_arr.tolist()
        entropy = _entropy_of(sch_arr**2)
        eof = entropy
    if (d1, d2) == (2, 2):
        conc, eof_w = wootters_eof(rho)
        if not pure:
            eof = eof_w

    if pure:
        verdict = SEPARABLE if entropy < tol else ENTANGLED
    elif residual < tol:
        verdict = SEPARABLE
    elif ppt == "NPT" or (eof is not None and eof > tol):
        verdict = ENTANGLED
    elif (d1, d2) == (2, 2):
        verdict = SEPARABLE
    else:
        verdict = INCONCLUSIVE

    return EntanglementReport(
        dims=(d1, d2),
        purity=purity,
        pure=pure,
        entropy=entropy,
        schmidt=sch,
        concurrence=conc,
        eof=eof,
        ppt_min_eigenvalue=lam_min,
        ppt=ppt,
        product_residual=residual,
        separable_verdict=verdict,
        tolerances={"verdict": tol, "purity": PURITY_TOL, "ppt": PPT_TOL, "clip": CLIP_TOL},
    )
