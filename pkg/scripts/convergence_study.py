"""Root drift of delta_n(y0; E) with iteration count, and the finite-difference error order."""

import argparse
import math

import mpmath
import numpy as np

from aimtrig.aim_engine import eigenvalues_numeric
from aimtrig.potentials import spec_from_params
from aimtrig.reference_oracle import GridProblem, convergence_order, extrapolated_eigenvalues, problem_from_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", default="sine2")
    ap.add_argument("--mu", default="1")
    ap.add_argument("--v1", default="1")
    ap.add_argument("--v2", default="-1/8")
    ap.add_argument("--level", type=int, default=0)
    ap.add_argument("--iterations", type=int, nargs="+", default=[6, 10, 14, 18, 22, 26, 30])
    args = ap.parse_args()
    params = {"mu": args.mu} if args.potential in ("sine2", "tan2") else {"v1": args.v1, "v2": args.v2}
    spec = spec_from_params(args.potential, params)

    ref = eigenvalues_numeric(spec, levels=args.level + 1, digits=30, precision=60, max_iter=80)[args.level].energy
    print(f"reference E_{args.level} = {mpmath.nstr(ref, 30)}")
    print(f"{'max_iter':>8} {'|E - ref|':>12}")
    for n in args.iterations:
        res = eigenvalues_numeric(spec, levels=args.level + 1, digits=8, precision=60, max_iter=n)
        if len(res) > args.level:
            print(f"{n:>8} {mpmath.nstr(abs(res[args.level].energy - ref), 3):>12}")
        else:
            print(f"{n:>8} {'unstable':>12}")

    if not spec.complex:
        box = GridProblem(0.0, math.pi, 100, lambda x: np.zeros_like(x))
        print(f"finite-difference order on the empty box: {convergence_order(box, 0, exact=1.0):.3f}")
        fd = extrapolated_eigenvalues(problem_from_spec(spec, N=1000), args.level + 1)[args.level]
        print(f"Richardson value {fd.value:.12f}, |FD - AIM| = {abs(fd.value - float(ref)):.2e}")


if __name__ == "__main__":
    main()
