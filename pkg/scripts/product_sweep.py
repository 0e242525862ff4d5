"""Point and product submanifolds over N: purity, entropy and product residual.

    python scripts/product_sweep.py --Nmax 5
"""

import argparse

import numpy as np

from submanifold_states import SectionBasis, SubmanifoldSpec, analyze, restriction_gram, rho_from_gram
from submanifold_states.states import factor_gram

SPECS = {
    "point": SubmanifoldSpec("point", {"p1": [[0.3, -0.2]], "p2": [[-0.5, 0.8]]}),
    "point x circle": SubmanifoldSpec("product", {
        "first": {"kind": "point", "params": {"coords": [[0.3, -0.6]]}},
        "second": {"kind": "circle", "params": {"radius": 1.3}}}),
    "circle x circle": SubmanifoldSpec("product", {
        "first": {"kind": "circle", "params": {"radius": 1.0}},
        "second": {"kind": "circle", "params": {"radius": 0.7}}}),
    "torus": SubmanifoldSpec("torus", {"r1": 0.8, "r2": 1.5}),
    "full": SubmanifoldSpec("full_product", nodes=16),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--Nmax", type=int, default=4)
    args = ap.parse_args()
    print(f"{'spec':>16} {'N':>2} {'dN':>4} {'purity':>10} {'residual':>10} {'|G-A(x)B|':>10}  verdict")
    for name, spec in SPECS.items():
        for N in range(1, args.Nmax + 1):
            b = SectionBasis.of(1, N)
            G = restriction_gram(b, b, spec)
            rep = analyze(rho_from_gram(G))
            fac = np.linalg.norm(G.matrix - np.kron(factor_gram(b, spec, 1), factor_gram(b, spec, 2)))
            print(f"{name:>16} {N:>2} {b.size**2:>4} {rep.purity:>10.6f} {rep.product_residual:>10.2e} "
                  f"{fac:>10.2e}  {rep.separable_verdict}")


if __name__ == "__main__":
    main()
