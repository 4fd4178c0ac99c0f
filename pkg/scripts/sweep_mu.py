"""Sine-squared levels across a range of couplings, AIM against the truncated mu series.

Writes CSV to stdout.
"""

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor

import mpmath

from aimtrig.aim_engine import eigenvalues_numeric
from aimtrig.exact_algebra import to_mp
from aimtrig.perturbation import perturbation_series, series_eval
from aimtrig.potentials import build_sine_squared


def solve(mu: str, levels: int):
    res = eigenvalues_numeric(build_sine_squared(mu), levels=levels, digits=14, precision=50)
    return [mpmath.nstr(r.energy, 16) for r in res]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", nargs="+", default=["0.1", "0.25", "0.5", "1", "2", "5", "10"])
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--order", type=int, default=2, help="perturbation order for the comparison column")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    series = [perturbation_series(build_sine_squared(1), n, args.order) for n in range(args.levels)]
    with ProcessPoolExecutor(args.workers) as pool:
        rows = list(pool.map(solve, args.mu, [args.levels] * len(args.mu)))
    w = csv.writer(sys.stdout)
    w.writerow(["mu", "n", "aim", f"series_K{args.order}", "difference"])
    with mpmath.workdps(30):
        for mu, energies in zip(args.mu, rows):
            for n, e in enumerate(energies):
                s = to_mp(series_eval(series[n], mu))
                w.writerow([mu, n, e, mpmath.nstr(s, 16), mpmath.nstr(mpmath.mpf(e) - s, 3)])


if __name__ == "__main__":
    main()
