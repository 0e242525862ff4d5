"""Experiment specs (versioned JSON) and the end-to-end pipeline behind the CLI."""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .entanglement import analyze
from .projective import SectionBasis, dim_sections
from .quadrature import SubmanifoldSpec
from .serialize import density_to_dict
from .states import restriction_gram, rho_from_gram

SCHEMA_VERSION = 1
CONVERGENCE_TOL = 1e-6
MATRIX_ELIDE_ABOVE = 16  # d_N above which rho is left out unless asked for


@dataclass
class ExperimentSpec:
    name: str
    n1: int
    n2: int
    Ns: list[int]
    submanifold: SubmanifoldSpec
    nodes: int | None = None
    tol: float = 1e-9
    format: str = "json"
    emit_matrix: bool = False

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"factor dimensions must be >= 1, got ({self.n1}, {self.n2})")
        if not self.Ns or any(int(N) != N or N < 1 for N in self.Ns):
            raise ValueError(f"N must be integers >= 1, got {self.Ns}")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.format!r}")
        if (self.submanifold.n1, self.submanifold.n2) != (self.n1, self.n2):
            self.submanifold = self.submanifold.with_(n1=self.n1, n2=self.n2)

    @classmethod
    def from_dict(cls, d: dict, name: str = "experiment") -> "ExperimentSpec":
        if d.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported spec schema {d.get('schema')!r}; expected {SCHEMA_VERSION}")
        n1, n2 = int(d.get("n1", 1)), int(d.get("n2", 1))
        Ns = d.get("N", 1)
        if isinstance(Ns, dict):
            Ns = list(range(int(Ns["from"]), int(Ns["to"]) + 1))
        elif not isinstance(Ns, list):
            Ns = [Ns]
        if "submanifold" not in d:
            raise ValueError("experiment spec needs a 'submanifold'")
        quad = d.get("quadrature", {})
        out = d.get("output", {})
        return cls(
            name=d.get("name", name),
            n1=n1,
            n2=n2,
            Ns=[int(N) for N in Ns],
            submanifold=SubmanifoldSpec.from_dict(d["submanifold"], n1, n2),
            nodes=quad.get("nodes"),
            tol=float(quad.get("tol", 1e-9)),
            format=out.get("format", "json"),
            emit_matrix=bool(out.get("emit_matrix", False)),
        )

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "n1": self.n1,
            "n2": self.n2,
            "N": list(self.Ns),
            "submanifold": self.submanifold.to_dict(),
            "quadrature": {"nodes": self.nodes, "tol": self.tol},
        }

    @property
    def effective_nodes(self) -> int:
        return self.submanifold.nodes if self.nodes is None else int(self.nodes)

    def with_(self, **changes) -> "ExperimentSpec":
        return replace(self, **changes)


def shipped_experiments() -> list[str]:
    root = resources.files("submanifold_states") / "experiments"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_experiment(ref: str) -> ExperimentSpec:
    """Load a spec from a path, or by name from the shipped corpus."""
    path = Path(ref)
    if path.is_file():
        return ExperimentSpec.from_dict(json.loads(path.read_text()), path.stem)
    stem = ref[:-5] if ref.endswith(".json") else ref
    res = resources.files("submanifold_states") / "experiments" / f"{stem}.json"
    if res.is_file():
        return ExperimentSpec.from_dict(json.loads(res.read_text()), stem)
    raise FileNotFoundError(f"no spec file {ref!r} and no shipped experiment of that name ({', '.join(shipped_experiments())})")


def dims_table(n1: int, n2: int, N: int) -> dict:
    d1, d2 = dim_sections(n1, N), dim_sections(n2, N)
    return {"n1": n1, "n2": n2, "N": N, "d1": d1, "d2": d2, "dN": count_product_sections(n1, n2, N)}


def count_product_sections(n1: int, n2: int, N: int) -> int:
    """d_N by enumerating bidegree-(<=N, <=N) monomials in n1 + n2 chart variables."""
    return sum(
        1
        for a in itertools.product(range(N + 1), repeat=n1 + n2)
        if sum(a[:n1]) <= N and sum(a[n1:]) <= N
    )


def compute_state(exp: ExperimentSpec, N: int, nodes: int | None = None, workers: int = 1):
    m = exp.effective_nodes if nodes is None else nodes
    spec = exp.submanifold
    b1, b2 = SectionBasis.of(exp.n1, N), SectionBasis.of(exp.n2, N)
    return rho_from_gram(restriction_gram(b1, b2, spec, spec.rule(m), workers=workers))


def run_one(exp: ExperimentSpec, N: int, deterministic: bool = True, workers: int = 1) -> dict:
    """rho_N, its report and a node-halving convergence check for a single N."""
    t0 = time.perf_counter()
    w = 1 if deterministic else workers
    d1, d2 = dim_sections(exp.n1, N), dim_sections(exp.n2, N)
    dN = count_product_sections(exp.n1, exp.n2, N)
    if dN != d1 * d2:
        raise AssertionError(f"d_N={dN} differs from d1*d2={d1 * d2}")

    nodes = exp.effective_nodes
    rho = compute_state(exp, N, nodes, w)
    if exp.submanifold.is_point:
        coarse, residual = nodes, 0.0
    else:
        coarse = max(2, nodes // 2)
        residual = float(np.linalg.norm(rho.matrix - compute_state(exp, N, coarse, w).matrix))
    warning = None
    if residual > CONVERGENCE_TOL:
        warning = f"quadrature not converged: residual {residual:.3e} between {coarse} and {nodes} nodes"
    report = analyze(rho, exp.tol)

    out = {
        "N": N,
        "dims": {"d1": d1, "d2": d2, "dN": dN},
        "report": report.to_dict(),
        "convergence": {"nodes": nodes, "coarse_nodes": coarse, "residual": residual, "warning": warning},
    }
    if exp.emit_matrix or dN <= MATRIX_ELIDE_ABOVE:
        out["rho"] = density_to_dict(rho)
    if not deterministic:
        out["wall_time"] = time.perf_counter() - t0
    return out


CSV_FIELDS = [
    "N", "d1", "d2", "dN", "purity", "entropy", "concurrence", "eof", "ppt_min_eigenvalue",
    "ppt", "product_residual", "separable_verdict", "convergence_residual", "warning",
]


def flat_row(result: dict) -> dict:
    rep = result["report"]
    row = {"N": result["N"], **result["dims"]}
    for k in ("purity", "entropy", "concurrence", "eof", "ppt_min_eigenvalue", "ppt", "product_residual", "separable_verdict"):
        row[k] = rep[k]
    row["convergence_residual"] = result["convergence"]["residual"]
    row["warning"] = result["convergence"]["warning"]
    if "wall_time" in result:
        row["wall_time"] = result["wall_time"]
    return row


def set_parameter(exp: ExperimentSpec, name: str, value) -> ExperimentSpec:
    """Copy of ``exp`` with one parameter changed.

    ``N``, ``nodes``, ``n1``, ``n2``, ``scale`` address the experiment; any other
    name is a (dotted) key inside the submanifold params, e.g. ``radius`` or
    ``second.params.radius``.
    """
    if name == "N":
        return exp.with_(Ns=[int(value)])
    if name == "nodes":
        return exp.with_(nodes=int(value))
    if name in ("n1", "n2"):
        return exp.with_(**{name: int(value)})
    sub = exp.submanifold
    if name == "scale":
        return exp.with_(submanifold=sub.with_(scale=float(value)))
    key = name[len("params."):] if name.startswith("params.") else name
    params = json.loads(json.dumps(sub.params))
    node = params
    parts = key.split(".")
    for p in parts[:-1]:
        if p not in node or not isinstance(node[p], dict):
            raise KeyError(f"{exp.submanifold.kind} has no parameter {name!r}")
        node = node[p]
    node[parts[-1]] = value
    return exp.with_(submanifold=sub.with_(params=params))
