"""Regenerate the three reference tables and report digit-by-digit agreement."""

import argparse
import time

import mpmath

from aimtrig import tables


def table1():
    got = tables.compute_table1()
    bad = 0
    print(f"{'mu':>5} {'n':>2} {'computed':>16} {'printed':>16} iter (printed)")
    for mu in tables.TABLE1_MU:
        printed_it = tables.TABLE1_ITERATIONS.get(mu, (None,) * 6)
        for n, (e, it) in enumerate(got[mu]):
            ref = tables.TABLE1[mu][n]
            s = tables.fmt(e, tables.places(ref))
            bad += s != ref
            print(f"{mu:>5} {n:>2} {s:>16} {ref:>16} {it:>3} ({printed_it[n]})")
    return bad


def table2():
    bad = 0
    for level, row in tables.compute_table2().items():
        for mu, (q, s) in zip(tables.TABLE2_MU, row):
            ref = tables.TABLE2[level][tables.TABLE2_MU.index(mu)]
            bad += s != ref
            print(f"n={level} mu={mu:>4} {s:>14} {ref:>14}  {q}")
    return bad


def table3(boundary):
    bad = 0
    for n, (e, it) in enumerate(tables.compute_table3(boundary=boundary)):
        ref = tables.TABLE3[n]
        s = tables.fmt(e, tables.places(ref))
        bad += s != ref
        print(f"n={n} {s:>18} {ref:>18} iter {it} ({tables.TABLE3_ITERATIONS[n]})")
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("which", nargs="*", type=int, default=[1, 2, 3])
    ap.add_argument("--boundary", default="dirichlet", choices=("dirichlet", "neumann"))
    args = ap.parse_args()
    mpmath.mp.dps = 50
    for w in args.which:
        t = time.time()
        print(f"== table {w}")
        bad = {1: table1, 2: table2, 3: lambda: table3(args.boundary)}[w]()
        print(f"-- {bad} mismatching entries, {time.time() - t:.1f} s\n")


if __name__ == "__main__":
    main()
