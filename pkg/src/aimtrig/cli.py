"""Command-line front end.

Settings are resolved as: command-line flags, then ``--config FILE``, then
built-in defaults.  The default working precision comes from the
``AIMTRIG_PRECISION`` environment variable (50 digits if unset).

Exit codes: 0 success, 1 configuration or input error, 2 partial
convergence, 3 perturbation order not determined, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from . import tables
from .aim_engine import certify_spectrum, eigenvalues_numeric, spectrum_from_certificate, wavefunction_eval
from .exact_algebra import AlgebraError, PoleError, as_exact, to_mp
from .perturbation import (
    AmbiguityError,
    ExpansionError,
    ZeroDivisorError,
    alpha_correction,
    alpha_integral,
    decimal_string,
    perturbation_series,
    series_eval,
)
from .potentials import (
    BUILDERS,
    ConfigError,
    build_double_cosine,
    cotangent_ladder,
    load_config,
    quasi_exact_condition_double_cosine,
    spec_from_params,
    tan2_alpha,
    tan2_energy,
)
from .series_jets import DEFAULT_PRECISION

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_AMBIGUOUS, EXIT_MISMATCH = 0, 1, 2, 3, 4

PARAM_KEYS = ("mu", "v1", "v2", "boundary", "alpha", "v", "a")
DEFAULTS = {"potential": "sine2", "levels": 6, "digits": 12, "max_iter": 40, "precision": None, "y0": None}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    potential: str = "sine2"
    params: dict = field(default_factory=dict)
    levels: int = 6
    digits: int = 12
    max_iter: int = 40
    precision: int = DEFAULT_PRECISION
    y0: str | None = None
    fmt: str = "pretty"
    out: str | None = None

    def validate(self):
        if self.potential not in BUILDERS:
            raise UsageError(f"unknown potential {self.potential!r}; expected one of {', '.join(BUILDERS)}")
        if self.levels < 1:
            raise UsageError("levels must be >= 1")
        if self.digits > self.precision - 10:
            raise UsageError(f"digits ({self.digits}) must be <= precision - 10 ({self.precision - 10})")
        if self.max_iter < 1:
            raise UsageError("max_iter must be >= 1")
        return self


def resolve(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(load_config(args.config))
    for key in list(DEFAULTS) + list(PARAM_KEYS):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    params = {k: merged[k] for k in PARAM_KEYS if merged.get(k) is not None}
    return RunConfig(
        subcommand=args.command,
        potential=merged["potential"],
        params=params,
        levels=int(merged["levels"]),
        digits=int(merged["digits"]),
        max_iter=int(merged["max_iter"]),
        precision=int(merged["precision"] or DEFAULT_PRECISION),
        y0=None if merged["y0"] is None else str(merged["y0"]),
        fmt=args.format,
        out=args.out,
    ).validate()


# ---------------------------------------------------------------------------
# output


def _emit(cfg: RunConfig, rows: list[dict], header: str | None = None, meta: dict | None = None):
    if cfg.fmt == "json":
        text = json.dumps({"config": _config_json(cfg), **(meta or {}), "rows": rows}, indent=2) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        text = buf.getvalue()
    else:
        lines = [header] if header else []
        if rows:
            cols = list(rows[0])
            width = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
            lines.append("  ".join(c.ljust(width[c]) for c in cols))
            lines += ["  ".join(str(r[c]).ljust(width[c]) for c in cols) for r in rows]
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_json(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["params"] = {k: str(v) for k, v in cfg.params.items()}
    return d


def _num(e, digits: int) -> str:
    if isinstance(e, Fraction):
        return str(e)
    return mpmath.nstr(e, digits, strip_zeros=False)


# ---------------------------------------------------------------------------
# solve


def _solve_rows(potential: str, params: dict, levels: int, digits: int, max_iter: int, precision: int, y0):
    """Worker-safe solve: everything in and out is plain data."""
    spec = spec_from_params(potential, params)
    with mpmath.workdps(precision):
        res = eigenvalues_numeric(spec, levels=levels, digits=digits, max_iter=max_iter, precision=precision,
                                  y0=None if y0 is None else Fraction(y0))
        rows = [
            {
                "n": r.node_index,
                "energy": mpmath.nstr(r.energy, precision, strip_zeros=False),
                "iterations": r.iterations_used,
                "digits_stable": r.digits_stable,
            }
            for r in res
        ]
    return rows, res.complete, res.diagnostics


def cmd_solve(cfg: RunConfig, mu_list=None, workers=None) -> int:
    spec_check = spec_from_params(cfg.potential, cfg.params)
    if spec_check.complex:
        raise UsageError(f"{cfg.potential} is complex; use `exact` for its quasi-exact ladder")
    runs = []
    if mu_list:
        jobs = [dict(cfg.params, mu=m) for m in mu_list]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_rows, cfg.potential, p, cfg.levels, cfg.digits, cfg.max_iter,
                                   cfg.precision, cfg.y0) for p in jobs]
            runs = [(m, f.result()) for m, f in zip(mu_list, futures)]
    else:
        runs = [(cfg.params.get("mu"), _solve_rows(cfg.potential, cfg.params, cfg.levels, cfg.digits,
                                                   cfg.max_iter, cfg.precision, cfg.y0))]
    rows, complete, notes = [], True, []
    for m, (rs, ok, diag) in runs:
        for r in rs:
            rows.append({"mu": str(m), **r} if mu_list else r)
        complete &= ok
        notes += diag
    if cfg.fmt == "pretty":
        for r in rows:
            r["energy"] = mpmath.nstr(mpmath.mpf(r["energy"]), cfg.digits + 2)
    _emit(cfg, rows, header=f"{cfg.potential} {cfg.params}", meta={"complete": complete, "diagnostics": notes})
    for d in notes:
        print(f"warning: {d}", file=sys.stderr)
    return EXIT_OK if complete else EXIT_PARTIAL


def cmd_verify(path: str) -> int:
    """Re-run a stored JSON solve and compare every energy string."""
    with open(path) as fh:
        data = json.load(fh)
    c = data["config"]
    rows, _, _ = _solve_rows(c["potential"], c["params"], c["levels"], c["digits"], c["max_iter"], c["precision"], c["y0"])
    stored = data["rows"]
    bad = [(a, b) for a, b in zip(stored, rows) if a["energy"] != b["energy"]]
    if len(stored) != len(rows) or bad:
        for a, b in bad:
            print(f"mismatch at n={a['n']}: stored {a['energy']} vs recomputed {b['energy']}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"verified {len(rows)} energies")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perturbation


def cmd_perturb(cfg: RunConfig, level: int, order: int, eval_mu) -> int:
    if cfg.potential != "sine2":
        raise UsageError("the mu expansion is available for sine2 only")
    spec = spec_from_params("sine2", {"mu": 1})
    try:
        series = perturbation_series(spec, level, order)
    except (AmbiguityError, ZeroDivisorError, ExpansionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    rows = [{"k": k, "nu": str(c), "depth": d} for k, (c, d) in enumerate(zip(series.coeffs, series.depths))]
    sums = []
    for m in eval_mu or []:
        q = series_eval(series, m)
        sums.append({"mu": m, "partial_sum": str(q), "decimal": decimal_string(q, cfg.digits)})
    if cfg.fmt == "json":
        _emit(cfg, rows, meta={"level": level, "order": order, "partial_sums": sums})
        return EXIT_OK
    _emit(cfg, rows, header=f"level {level}: energy coefficients nu_k")
    if sums:
        _emit(RunConfig("perturb", fmt=cfg.fmt, out=None), sums, header="partial sums")
    return EXIT_OK


# ---------------------------------------------------------------------------
# exact


def cmd_exact(cfg: RunConfig) -> int:
    p, n = cfg.params, cfg.levels
    rows, header = [], ""
    if cfg.potential == "tan2":
        alpha = Fraction(str(p["alpha"])) if "alpha" in p else tan2_alpha(p.get("mu", 0))
        header = f"tan2: a^2 E_n = n^2 + (2n+1)(2 alpha + 1), alpha = {_num(alpha, cfg.digits)}"
        if isinstance(alpha, Fraction):
            spec = spec_from_params("tan2", {"alpha": alpha})
            cert = certify_spectrum(spec, n)
            got = spectrum_from_certificate(cert, n)
            rows = [{"n": i, "energy": str(e), "closed_form": str(tan2_energy(i, alpha)), "certified": True}
                    for i, e in enumerate(got)]
        else:
            with mpmath.workdps(cfg.precision):
                rows = [{"n": i, "energy": _num(tan2_energy(i, alpha), cfg.digits), "closed_form": "", "certified": False}
                        for i in range(n)]
    elif cfg.potential == "cot_complex":
        v, a = p.get("v", 0), p.get("a", 1)
        header = "cot_complex: alpha = -n, beta = i v a^2 / (2(alpha - 1)), a^2 E = (alpha - 1)^2 - beta^2"
        for lv in cotangent_ladder(v, n, a):
            rows.append({"n": lv.n, "alpha": str(lv.alpha), "beta": str(lv.beta), "energy": str(lv.energy),
                         "g": lv.g.dump(), "flagged": lv.flagged})
    elif cfg.potential == "sine2":
        if Fraction(str(p.get("mu", 0))) != 0:
            raise UsageError("sine2 is exactly solvable only at mu = 0; use `solve` or `perturb`")
        cert = certify_spectrum(spec_from_params("sine2", {"mu": 0}), n)
        header = "sine2 at mu = 0: a^2 E_n = (n+1)^2"
        rows = [{"n": i, "energy": str(e)} for i, e in enumerate(spectrum_from_certificate(cert, n))]
    elif cfg.potential == "double_cosine":
        v1 = p.get("v1", 1)
        v2, e0 = quasi_exact_condition_double_cosine(v1)
        if "v2" in p and Fraction(str(p["v2"])) != v2:
            raise UsageError(f"double_cosine has an exact ground state only for v2 = -v1^2/8 = {v2}")
        cert = certify_spectrum(build_double_cosine(v1, v2), 1)
        exact = spectrum_from_certificate(cert)
        header = "double_cosine: v2 = -v1^2/8, E0 = 1/4 - v1/2 + v2"
        rows = [{"v1": str(Fraction(str(v1))), "v2": str(v2), "E0": str(e0),
                 "certified": bool(exact) and exact[0] == e0}]
    else:
        raise UsageError(f"no exact path for {cfg.potential}")
    _emit(cfg, rows, header=header)
    return EXIT_OK


# ---------------------------------------------------------------------------
# tables


def cmd_table(cfg: RunConfig, which: int, boundary: str) -> int:
    rows = []
    if which == 1:
        got = tables.compute_table1(precision=max(cfg.precision, 50))
        for mu in tables.TABLE1_MU:
            for n, (e, it) in enumerate(got[mu]):
                ref = tables.TABLE1[mu][n]
                val = tables.fmt(e, tables.places(ref))
                rows.append({"mu": mu, "n": n, "energy": val, "printed": ref, "match": val == ref, "iterations": it})
    elif which == 2:
        got = tables.compute_table2()
        for level, row in got.items():
            for mu, (q, s) in zip(tables.TABLE2_MU, row):
                ref = tables.TABLE2[level][tables.TABLE2_MU.index(mu)]
                rows.append({"n": level, "mu": mu, "energy": s, "printed": ref, "match": s == ref, "exact": str(q)})
    elif which == 3:
        got = tables.compute_table3(boundary=boundary, precision=max(cfg.precision, 50))
        for n, (e, it) in enumerate(got):
            ref = tables.TABLE3[n]
            val = tables.fmt(e, tables.places(ref))
            rows.append({"n": n, "energy": val, "printed": ref, "match": val == ref, "iterations": it})
    else:
        raise UsageError("table must be 1, 2 or 3")
    _emit(cfg, rows, header=f"table {which}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# wavefunction


def cmd_wavefunction(cfg: RunConfig, level: int, energy, samples: int, perturb_order: int) -> int:
    spec = spec_from_params(cfg.potential, cfg.params)
    if energy is None:
        res = eigenvalues_numeric(spec, levels=level + 1, digits=cfg.digits, max_iter=cfg.max_iter,
                                  precision=cfg.precision)
        if len(res) <= level:
            print(f"error: level {level} did not converge", file=sys.stderr)
            return EXIT_PARTIAL
        energy = res[level].energy
    pts = wavefunction_eval(spec, level, energy, samples=samples)
    corrections = []
    if perturb_order:
        if cfg.potential != "sine2":
            raise UsageError("perturbative factors are available for sine2 only")
        series = perturbation_series(spec_from_params("sine2", {"mu": 1}), level, perturb_order)
        corrections = [alpha_correction(spec, level, k, series) for k in range(1, perturb_order + 1)]
    mu = to_mp(as_exact(str(cfg.params.get("mu", 0))))
    rows = []
    for p in pts:
        row = {"x": repr(p.x), "y": repr(p.y), "psi": repr(p.psi), "flagged": p.flagged}
        if corrections:
            total = mpmath.mpf(0)
            for ak in corrections:
                try:
                    total += mu**ak.k * alpha_integral(ak, Fraction(repr(p.y)))
                    row[f"factor_{ak.k}"] = mpmath.nstr(mpmath.exp(-total), 15)
                except PoleError:
                    row[f"factor_{ak.k}"] = "pole"
                    row["flagged"] = True
        rows.append(row)
    _emit(cfg, rows, header=f"{cfg.potential} level {level} at E = {_num(energy, cfg.digits)}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, potential=True):
    p.add_argument("--config", help="potential file (key = value, TOML syntax)")
    p.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
    p.add_argument("--out", help="write to this path instead of stdout")
    p.add_argument("--precision", type=int, help=f"working digits (default {DEFAULT_PRECISION}, env AIMTRIG_PRECISION)")
    p.add_argument("--digits", type=int, help="requested stable digits")
    if potential:
        p.add_argument("--potential", choices=BUILDERS)
        p.add_argument("--mu", help="coupling for sine2 / tan2")
        p.add_argument("--v1")
        p.add_argument("--v2")
        p.add_argument("--boundary", choices=("dirichlet", "neumann"))
        p.add_argument("--alpha", help="tan2 boundary exponent (instead of --mu)")
        p.add_argument("--v", help="cot_complex coupling v a^2")
        p.add_argument("--a", help="cot_complex length scale")
        p.add_argument("--levels", type=int)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--y0")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aimtrig",
        description=__doc__.split("\n\n")[0],
        epilog="Precedence: flags > --config file > defaults. "
               "Exit codes: 0 ok, 1 config error, 2 partial convergence, 3 perturbation ambiguity, 4 verify mismatch.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="numeric eigenvalues")
    _common(p)
    p.add_argument("--mu-list", help="comma-separated mu values solved in parallel")
    p.add_argument("--workers", type=int)
    p = sub.add_parser("perturb", help="exact energy coefficients of the mu expansion")
    _common(p)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--eval-mu", action="append", help="evaluate the partial sum here (repeatable)")
    p = sub.add_parser("exact", help="closed-form spectra with termination certificates")
    _common(p)
    p = sub.add_parser("table", help="regenerate a published table")
    _common(p, potential=False)
    p.add_argument("which", type=int, choices=(1, 2, 3))
    p.add_argument("--boundary", choices=("dirichlet", "neumann"), default="dirichlet", help="walls for table 3")
    p = sub.add_parser("wavefunction", help="sampled eigenfunction as CSV")
    _common(p)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--energy", help="skip the solve and use this energy")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--perturb-order", type=int, default=0)
    p = sub.add_parser("verify", help="re-run a `solve --format json` file and compare")
    p.add_argument("path")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for bad usage; 2 is reserved for partial convergence here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "verify":
            return cmd_verify(args.path)
        if args.command == "table":
            args.boundary_table = args.boundary
            args.boundary = None
        cfg = resolve(args)
        if args.command == "solve":
            mus = [m.strip() for m in args.mu_list.split(",")] if args.mu_list else None
            return cmd_solve(cfg, mus, args.workers)
        if args.command == "perturb":
            if args.digits is None:
                cfg.digits = 10
            return cmd_perturb(cfg, args.level, args.order, args.eval_mu)
        if args.command == "exact":
            if args.levels is None:
                cfg.levels = 4
            return cmd_exact(cfg)
        if args.command == "table":
            return cmd_table(cfg, args.which, args.boundary_table)
        if args.command == "wavefunction":
            return cmd_wavefunction(cfg, args.level, args.energy, args.samples, args.perturb_order)
    except (UsageError, ConfigError, FileNotFoundError, KeyError, ValueError, AlgebraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
