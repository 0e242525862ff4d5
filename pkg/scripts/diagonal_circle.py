"""Diagonal circle {(z, z) : |z| = r} in P^1 x P^1: entanglement of rho_N over r.

Prints concurrence / PPT / product residual for a grid of radii, and checks that
rho_N equals the mixture of product coherent projectors along the circle.

    python scripts/diagonal_circle.py --N 1 --radii 0.25,0.5,1,2,4
"""

import argparse

import numpy as np

from submanifold_states import SectionBasis, SubmanifoldSpec, analyze, restriction_gram, rho_from_gram
from submanifold_states.states import coherent_mixture_gram


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--radii", default="0.25,0.5,1,2,4")
    ap.add_argument("--nodes", type=int, default=256)
    args = ap.parse_args()

    b = SectionBasis.of(1, args.N)
    print(f"{'r':>6} {'purity':>10} {'concurrence':>12} {'eof':>10} {'ppt_min':>11} {'residual':>9} {'mixture':>9}  verdict")
    for r in (float(x) for x in args.radii.split(",")):
        spec = SubmanifoldSpec("diagonal_circle", {"radius": r}, nodes=args.nodes)
        G = restriction_gram(b, b, spec)
        rep = analyze(rho_from_gram(G))
        mix = np.linalg.norm(G.matrix - coherent_mixture_gram(b, b, spec))
        conc = "-" if rep.concurrence is None else f"{rep.concurrence:.2e}"
        eof = "-" if rep.eof is None else f"{rep.eof:.2e}"
        print(f"{r:>6.3g} {rep.purity:>10.6f} {conc:>12} {eof:>10} {rep.ppt_min_eigenvalue:>11.2e} "
              f"{rep.product_residual:>9.4f} {mix:>9.1e}  {rep.separable_verdict}")


if __name__ == "__main__":
    main()
