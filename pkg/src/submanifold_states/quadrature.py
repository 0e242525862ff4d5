"""Tensor-product quadrature and parametrized submanifolds of P^n1 x P^n2.

A submanifold is described by a :class:`SubmanifoldSpec`; it knows its parameter
domain, maps parameters to chart coordinates ``(z, w)`` and supplies analytic
tangent vectors, from which the density of the measure induced by the product
Fubini-Study metric is ``sqrt(det G)``.

Periodic parameters use the trapezoid rule, bounded ones Gauss-Legendre.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import pi
from typing import Callable, Sequence

import numpy as np

from .projective import fs_hermitian_metric

TWO_PI = 2.0 * pi


class QuadratureError(ArithmeticError):
    """Integrand or measure could not be evaluated to a finite value."""


class DegenerateSubmanifoldError(ValueError):
    """The parametrization is singular at some node."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    periodic: bool = False

    @property
    def length(self) -> float:
        return self.b - self.a


def circle_domain() -> Interval:
    return Interval(0.0, TWO_PI, periodic=True)


def unit_interval() -> Interval:
    return Interval(0.0, 1.0, periodic=False)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray  # (K, dim)
    weights: np.ndarray  # (K,)
    domain: tuple[Interval, ...]
    nodes_per_dim: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.domain)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def volume(self) -> float:
        return float(np.prod([iv.length for iv in self.domain]))


def _rule_1d(iv: Interval, m: int) -> tuple[np.ndarray, np.ndarray]:
    if iv.periodic:
        x = iv.a + iv.length * np.arange(m) / m
        w = np.full(m, iv.length / m)
    else:
        x, w = np.polynomial.legendre.leggauss(m)
        x = iv.a + 0.5 * iv.length * (x + 1.0)
        w = 0.5 * iv.length * w
    return x, w


def build_rule(domain: Sequence[Interval], nodes_per_dim: int, aperiodic_nodes: int | None = None) -> QuadratureRule:
    """Tensor rule on ``domain``.

    Periodic factors get ``nodes_per_dim`` equispaced nodes, bounded factors
    ``aperiodic_nodes`` Gauss-Legendre nodes (defaults to ``nodes_per_dim``).
    An empty domain yields the one-node rule of a point.
    """
    domain = tuple(domain)
    for iv in domain:
        if not isinstance(iv, Interval):
            raise TypeError(f"unsupported domain descriptor {iv!r}")
        if not iv.b > iv.a:
            raise ValueError(f"empty interval {iv!r}")
    if nodes_per_dim < 2:
        raise ValueError(f"nodes_per_dim must be >= 2, got {nodes_per_dim}")
    m_ap = nodes_per_dim if aperiodic_nodes is None else aperiodic_nodes
    if m_ap < 2:
        raise ValueError(f"aperiodic_nodes must be >= 2, got {m_ap}")

    if not domain:
        return QuadratureRule(np.zeros((1, 0)), np.ones(1), (), ())

    counts = tuple(nodes_per_dim if iv.periodic else m_ap for iv in domain)
    pieces = [_rule_1d(iv, m) for iv, m in zip(domain, counts)]
    grids = np.meshgrid(*[p[0] for p in pieces], indexing="ij")
    wgrids = np.meshgrid(*[p[1] for p in pieces], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return QuadratureRule(nodes, weights, domain, counts)


def integrate(rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray]):
    """``sum_k w_k f(node_k)``; ``f`` is vectorized over the leading node axis."""
    vals = np.asarray(f(rule.nodes))
    if vals.shape[:1] != (rule.size,):
        raise ValueError(f"integrand returned shape {vals.shape} for {rule.size} nodes")
    bad = ~np.isfinite(vals.reshape(rule.size, -1)).all(axis=1)
    if bad.any():
        k = int(np.argmax(bad))
        raise QuadratureError(f"non-finite integrand at node {k}: {rule.nodes[k].tolist()}")
    out = np.tensordot(rule.weights, vals, axes=(0, 0))
    return complex(out) if np.ndim(out) == 0 else out


# --- factor pieces ----------------------------------------------------------
# A piece parametrizes a subset of a single factor P^n: map(params) -> (K, n)
# chart points and jac(params) -> (K, k, n) complex tangent vectors.


@dataclass(frozen=True)
class _Piece:
    n: int

    @property
    def domain(self) -> tuple[Interval, ...]:
        raise NotImplementedError

    def map(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jac(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class _PointPiece(_Piece):
    coords: tuple[complex, ...] = ()

    def __post_init__(self):
        if len(self.coords) != self.n:
            raise ValueError(f"point needs {self.n} chart coordinates, got {len(self.coords)}")

    @property
    def domain(self):
        return ()

    def map(self, u):
        return np.broadcast_to(np.array(self.coords, dtype=complex), (u.shape[0], self.n)).copy()

    def jac(self, u):
        return np.zeros((u.shape[0], 0, self.n), dtype=complex)


@dataclass(frozen=True)
class _CirclePiece(_Piece):
    radius: float = 1.0
    axis: int = 0
    center: complex = 0j

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        if not 0 <= self.axis < self.n:
            raise ValueError(f"axis {self.axis} out of range for P^{self.n}")

    @property
    def domain(self):
        return (circle_domain(),)

    def map(self, u):
        z = np.zeros((u.shape[0], self.n), dtype=complex)
        z[:, self.axis] = self.center + self.radius * np.exp(1j * u[:, 0])
        return z

    def jac(self, u):
        t = np.zeros((u.shape[0], 1, self.n), dtype=complex)
        t[:, 0, self.axis] = 1j * self.radius * np.exp(1j * u[:, 0])
        return t


@dataclass(frozen=True)
class _FullPiece(_Piece):
    """All of P^n minus a measure-zero set.

    Parameters ``(u_1..u_n, theta_1..theta_n)``; ``u`` is collapsed onto the
    simplex ``t_k = u_k prod_{i<k}(1 - u_i)``, then ``|z_k|^2 = t_k / (1 - sum t)``
    and ``arg z_k = theta_k``. For n = 1 this is ``t = r^2 / (1 + r^2)``.
    """

    @property
    def domain(self):
        return (unit_interval(),) * self.n + (circle_domain(),) * self.n

    def _simplex(self, u):
        n = self.n
        one_minus = 1.0 - u[:, :n]
        lead = np.concatenate([np.ones((u.shape[0], 1)), np.cumprod(one_minus, axis=1)[:, :-1]], axis=1)
        t = u[:, :n] * lead
        t0 = np.prod(one_minus, axis=1)
        return t, t0, lead

    def map(self, u):
        t, t0, _ = self._simplex(u)
        s = t / t0[:, None]
        return np.sqrt(s) * np.exp(1j * u[:, self.n :])

    def jac(self, u):
        n = self.n
        K = u.shape[0]
        t, t0, lead = self._simplex(u)
        s = t / t0[:, None]
        phase = np.exp(1j * u[:, n:])
        z = np.sqrt(s) * phase

        # dt_l/du_m: lead_l on the diagonal, -t_l / (1 - u_m) for m < l
        dt = np.zeros((K, n, n))
        for l in range(n):
            dt[:, l, l] = lead[:, l]
            for m in range(l):
                dt[:, l, m] = -t[:, l] / (1.0 - u[:, m])
        # ds_k/dt_l = delta_kl / t0 + t_k / t0^2
        ds_dt = np.eye(n)[None] / t0[:, None, None] + (t / t0[:, None] ** 2)[:, :, None]
        ds_du = ds_dt @ dt  # (K, k, m)

        out = np.zeros((K, 2 * n, n), dtype=complex)
        dz_ds = phase / (2.0 * np.sqrt(s))  # (K, n)
        out[:, :n, :] = np.transpose(dz_ds[:, :, None] * ds_du, (0, 2, 1))
        for k in range(n):
            out[:, n + k, k] = 1j * z[:, k]
        return out

    def volume_density(self, u):
        """Closed-form FS density ``2^-n prod_i (1 - u_i)^(n-1-i)`` in these parameters."""
        n = self.n
        expo = np.arange(n - 1, -1, -1)
        return 0.5**n * np.prod((1.0 - u[:, :n]) ** expo, axis=1)


# --- joint parametrizations of curves in P^n1 x P^n2 ------------------------


def _diagonal_circle(r, k1=1, k2=1):
    def f(th):
        return r * np.exp(1j * k1 * th), r * np.exp(1j * k2 * th)

    def df(th):
        return 1j * k1 * r * np.exp(1j * k1 * th), 1j * k2 * r * np.exp(1j * k2 * th)

    return f, df


def _graph_curve(params):
    r = float(params.get("radius", 1.0))
    k = int(params.get("winding", 2))
    return _diagonal_circle(r, 1, k)


def _conjugate_circle(params):
    r = float(params.get("radius", 1.0))
    return _diagonal_circle(r, 1, -1)


# Custom submanifolds may only name one of these.
CUSTOM_CURVES: dict[str, Callable] = {
    "graph_curve": _graph_curve,
    "conjugate_circle": _conjugate_circle,
}

FACTOR_KINDS = ("point", "circle", "full")
KINDS = ("point", "circle", "torus", "diagonal_circle", "product", "full_product", "custom")


def _coords(value, n: int) -> tuple[complex, ...]:
    """Chart coordinates from JSON: a list of numbers or [re, im] pairs."""
    if value is None:
        return (0j,) * n
    if isinstance(value, (int, float, complex)):
        value = [value]
    out = []
    for c in value:
        if isinstance(c, (list, tuple)):
            if len(c) != 2:
                raise ValueError(f"complex coordinate must be [re, im], got {c!r}")
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(complex(c))
    if len(out) != n:
        raise ValueError(f"expected {n} chart coordinates, got {len(out)}")
    return tuple(out)


def _center(value) -> complex:
    if value is None:
        return 0j
    if isinstance(value, (list, tuple)):
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _factor_piece(desc: dict, n: int) -> _Piece:
    kind = desc.get("kind")
    params = desc.get("params", {})
    if kind == "point":
        return _PointPiece(n, _coords(params.get("coords"), n))
    if kind == "circle":
        return _CirclePiece(n, float(params.get("radius", 1.0)), int(params.get("axis", 0)), _center(params.get("center")))
    if kind == "full":
        return _FullPiece(n)
    raise ValueError(f"unknown factor kind {kind!r}; expected one of {FACTOR_KINDS}")


@dataclass(frozen=True)
class SubmanifoldSpec:
    """A parametrized submanifold of the product chart ``C^n1 x C^n2``.

    ``nodes`` is the node count per periodic parameter; bounded parameters get
    ``nodes // 2`` (so the default gives 256 / 128). ``scale`` multiplies the
    induced measure by a global constant.
    """

    kind: str
    params: dict = field(default_factory=dict)
    nodes: int = 256
    scale: float = 1.0
    n1: int = 1
    n2: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown submanifold kind {self.kind!r}; expected one of {KINDS}")
        if self.nodes < 2:
            raise ValueError(f"nodes must be >= 2, got {self.nodes}")
        if not self.scale > 0:
            raise ValueError(f"measure scale must be positive, got {self.scale}")
        if self.kind == "custom" and self.params.get("name") not in CUSTOM_CURVES:
            raise ValueError(f"custom submanifold must name one of {sorted(CUSTOM_CURVES)}")
        # build once so bad params fail at construction
        self._pieces()

    # -- construction helpers

    @classmethod
    def from_dict(cls, d: dict, n1: int = 1, n2: int = 1) -> "SubmanifoldSpec":
        if "kind" not in d:
            raise ValueError("submanifold spec needs a 'kind'")
        return cls(
            kind=d["kind"],
            params=dict(d.get("params", {})),
            nodes=int(d.get("nodes", 256)),
            scale=float(d.get("scale", 1.0)),
            n1=n1,
            n2=n2,
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "nodes": self.nodes, "scale": self.scale}

    def with_(self, **changes) -> "SubmanifoldSpec":
        return replace(self, **changes)

    @property
    def is_point(self) -> bool:
        return self.dim == 0

    # -- geometry

    def _pieces(self):
        """Either ``("product", piece1, piece2)`` or ``("curve", f, df)``."""
        p, n1, n2 = self.params, self.n1, self.n2
        if self.kind == "point":
            return "product", _PointPiece(n1, _coords(p.get("p1"), n1)), _PointPiece(n2, _coords(p.get("p2"), n2))
        if self.kind == "circle":
            factor = int(p.get("factor", 1))
            if factor not in (1, 2):
                raise ValueError(f"circle factor must be 1 or 2, got {factor}")
            r = float(p.get("radius", 1.0))
            nc, no = (n1, n2) if factor == 1 else (n2, n1)
            circ = _CirclePiece(nc, r, int(p.get("axis", 0)), _center(p.get("center")))
            other = _PointPiece(no, _coords(p.get("other_point"), no))
            return ("product", circ, other) if factor == 1 else ("product", other, circ)
        if self.kind == "torus":
            return (
                "product",
                _CirclePiece(n1, float(p.get("r1", 1.0))),
                _CirclePiece(n2, float(p.get("r2", 1.0))),
            )
        if self.kind == "product":
            return "product", _factor_piece(p["first"], n1), _factor_piece(p["second"], n2)
        if self.kind == "full_product":
            return "product", _FullPiece(n1), _FullPiece(n2)
        if self.kind == "diagonal_circle":
            r = float(p.get("radius", 1.0))
            if not r > 0:
                raise ValueError(f"radius must be positive, got {r}")
            return ("curve", *_diagonal_circle(r))
        if self.kind == "custom":
            return ("curve", *CUSTOM_CURVES[p["name"]](p))
        raise AssertionError(self.kind)

    @property
    def domain(self) -> tuple[Interval, ...]:
        pieces = self._pieces()
        if pieces[0] == "product":
            return pieces[1].domain + pieces[2].domain
        return (circle_domain(),)

    @property
    def dim(self) -> int:
        return len(self.domain)

    def rule(self, nodes: int | None = None) -> QuadratureRule:
        m = self.nodes if nodes is None else nodes
        return build_rule(self.domain, m, max(2, m // 2))

    def chart_points(self, u) -> tuple[np.ndarray, np.ndarray]:
        """Map parameters ``(K, dim)`` to chart points ``z (K, n1)``, ``w (K, n2)``."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        pieces = self._pieces()
        if pieces[0] == "product":
            k1 = len(pieces[1].domain)
            return pieces[1].map(u[:, :k1]), pieces[2].map(u[:, k1:])
        f = pieces[1]
        a, b = f(u[:, 0])
        z = np.zeros((u.shape[0], self.n1), dtype=complex)
        w = np.zeros((u.shape[0], self.n2), dtype=complex)
        z[:, 0], w[:, 0] = a, b
        return z, w

    def tangents(self, u) -> np.ndarray:
        """Tangent vectors ``(K, dim, n1 + n2)`` of the parametrization."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        K = u.shape[0]
        pieces = self._pieces()
        out = np.zeros((K, self.dim, self.n1 + self.n2), dtype=complex)
        if pieces[0] == "product":
            k1 = len(pieces[1].domain)
            out[:, :k1, : self.n1] = pieces[1].jac(u[:, :k1])
            out[:, k1:, self.n1 :] = pieces[2].jac(u[:, k1:])
            return out
        da, db = pieces[2](u[:, 0])
        out[:, 0, 0] = da
        out[:, 0, self.n1] = db
        return out

    def metric_gram(self, u) -> np.ndarray:
        """Real Gram matrix ``G_ab = Re h(T_a, T_b)`` of tangents under the product FS metric."""
        z, w = self.chart_points(u)
        T = self.tangents(u)
        T1, T2 = T[:, :, : self.n1], T[:, :, self.n1 :]
        h1 = fs_hermitian_metric(z)
        h2 = fs_hermitian_metric(w)
        G = np.einsum("kaj,kjl,kbl->kab", T1, h1, np.conj(T1))
        G = G + np.einsum("kaj,kjl,kbl->kab", T2, h2, np.conj(T2))
        return G.real

    def densities(self, u) -> np.ndarray:
        """Induced measure density ``scale * sqrt(det G)`` at each parameter point."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if self.dim == 0:
            return np.full(u.shape[0], self.scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            det = np.linalg.det(self.metric_gram(u))
        bad = ~(det > 0)
        if bad.any():
            k = int(np.argmax(bad))
            raise DegenerateSubmanifoldError(f"singular parametrization at {u[k].tolist()} (det G = {det[k]:.3e})")
        return self.scale * np.sqrt(det)


def induced_density(spec: SubmanifoldSpec, param) -> float:
    """Density of the induced measure at a single parameter point."""
    u = np.asarray(param, dtype=float).reshape(1, -1)
    if u.shape[1] != spec.dim:
        raise ValueError(f"{spec.kind} has {spec.dim} parameters, got {u.shape[1]}")
    return float(spec.densities(u)[0])


def factor_measure(spec: SubmanifoldSpec, factor: int, nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the induced measure on one factor of a product submanifold.

    Returns chart points ``(K, n_factor)`` and weights ``(K,)`` already multiplied
    by the density. The global ``scale`` is carried by factor 1, so the product of
    the two factor measures is the measure of ``spec``.
    """
    pieces = spec._pieces()
    if pieces[0] != "product":
        raise ValueError(f"{spec.kind} is not a product submanifold")
    if factor not in (1, 2):
        raise ValueError(f"factor must be 1 or 2, got {factor}")
    piece = pieces[factor]
    m = spec.nodes if nodes is None else nodes
    rule = build_rule(piece.domain, m, max(2, m // 2))
    pts = piece.map(rule.nodes)
    if piece.domain:
        T = piece.jac(rule.nodes)
        h = fs_hermitian_metric(pts)
        G = np.einsum("kaj,kjl,kbl->kab", T, h, np.conj(T)).real
        det = np.linalg.det(G)
        if not np.all(det > 0):
            raise DegenerateSubmanifoldError(f"singular parametrization of factor {factor}")
        dens = np.sqrt(det)
    else:
        dens = np.ones(rule.size)
    w = rule.weights * dens
    if factor == 1:
        w = w * spec.scale
    return pts, w
