"""Command-line interface: ``hankelpade <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .exact import as_rational, format_fixed, format_rational
from .hankel import EXACT, FLOAT, HankelResult, HankelSpec, hankel_roots, hankel_sequence
from .highprec import DEFAULT_DIGITS
from .hill import HillResult, hill_sequence
from .numerov import EVEN, ODD, ShootingConfig, numerov_with_error
from .potentials import potential_from_config
from .reproduce import TARGETS, Reproduction, run as run_reproduction
from .sequences import HANKEL, HILL, RootSequence, convergence_report, scan_width_parameter, select_nearest, tracking_target
from .series import SeriesParams, coefficients_json, generate_series

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_MISMATCH = 0, 2, 3, 4

PRESETS = {
    "quartic": {"kind": "polynomial", "v": ["0", "1"]},
    "harmonic": {"kind": "polynomial", "v": ["1"]},
}


def potential_doc(text: str) -> dict:
    """``quartic``, ``harmonic``, ``poly:v1,v2,...``, ``rational:lambda,g``
    or a JSON object."""
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]
    if text.startswith("{"):
        return json.loads(text)
    kind, _, rest = text.partition(":")
    parts = [p.strip() for p in rest.split(",") if p.strip()]
    if kind == "poly" and parts:
        return {"kind": "polynomial", "v": parts}
    if kind == "rational" and len(parts) == 2:
        return {"kind": "rational", "lambda": parts[0], "g": parts[1]}
    raise ConfigError(f"cannot parse potential {text!r}")


def _digits(tol: Fraction) -> int:
    return max(1, math.ceil(-math.log10(tol)))


def _width(b) -> str:
    return "0" if b is None else f"{float(b.width):.3e}"


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def hill_rows(results: list[HillResult], tol: Fraction) -> list[list]:
    n = _digits(tol)
    rows = []
    for res in results:
        lo, hi = (format_rational(x) for x in res.interval)
        if not res.roots:
            rows.append([res.M, "", "", lo, hi])
        for r in res.roots:
            rows.append([res.M, format_fixed(r.value, n), "0" if r.exact else _width(r.bracket), lo, hi])
    return rows


HILL_HEADER = ["M", "root", "bracket_width", "interval_lo", "interval_hi"]
HANKEL_HEADER = ["D", "d", "root", "bracket_width", "backend", "exact_confirmed"]


def hankel_rows(results: list[HankelResult], tol: Fraction) -> list[list]:
    n = _digits(tol)
    return [
        [res.spec.D, res.spec.d, format_fixed(r.value, n), _width(r.bracket), r.backend, str(r.exact_confirmed).lower()]
        for res in results
        for r in res.roots
    ]


def report_json(method: str, per_index: dict, reference, digits: int) -> dict:
    """Convergence report for the tracked sequence of one method."""
    target = tracking_target(per_index)
    doc = {"method": method, "tracked_target": None if target is None else format_fixed(target, digits)}
    if target is None:
        return doc
    chosen = {k: v for k, v in select_nearest(per_index, target).items() if v is not None}
    doc["selected"] = {str(k): format_fixed(v, digits) for k, v in chosen.items()}
    if len(chosen) < 3:
        return doc
    seq = RootSequence(method, tuple(chosen), tuple(chosen.values()), 0)
    rep = convergence_report(seq, reference)
    fmt = lambda x: "-inf" if x == -math.inf else f"{x:.6f}"  # noqa: E731
    doc["convergence"] = {
        "limit_estimate": format_fixed(rep.limit_estimate, digits),
        "stable_digits": rep.stable_digits,
        "self_diffs": [fmt(x) for x in rep.self_diffs],
        "rate_slope": f"{rep.rate_slope:.6f}",
        "reference_error": None if rep.reference_error is None else [fmt(x) for x in rep.reference_error],
        "converged_exactly": rep.converged_exactly,
    }
    return doc


def _table(doc: dict, a, s: int, J: int):
    return generate_series(potential_from_config(doc, J), SeriesParams(a=as_rational(a), s=s, J=J))


def _run_hill(table, M_lo: int, M_hi: int, lo, hi, tol) -> list[HillResult]:
    return hill_sequence(table, range(M_lo, M_hi + 1), lo, hi, tol)


def _run_hankel(table, D_lo, D_hi, d, lo, hi, tol, backend, precision, grid_n) -> list[HankelResult]:
    if backend == EXACT:
        return [
            hankel_roots(table, HankelSpec(D, d), lo, hi, grid_n, tol, EXACT, precision) for D in range(D_lo, D_hi + 1)
        ]
    return hankel_sequence(table, range(D_lo, D_hi + 1), d, lo, hi, grid_n, tol, precision)


def solve(cfg: RunConfig) -> dict:
    """Run the configured method(s); write CSV and JSON under ``cfg.output``."""
    table = generate_series(cfg.potential(), SeriesParams(a=cfg.a, s=cfg.s, J=cfg.J))
    lo, hi = cfg.interval
    digits = _digits(cfg.tol)
    report = {"config": {"a": format_rational(cfg.a), "s": cfg.s, "method": cfg.method}, "results": []}
    if cfg.M_range:
        hill = _run_hill(table, *cfg.M_range, lo, hi, cfg.tol)
        write_csv(cfg.output / "hill.csv", HILL_HEADER, hill_rows(hill, cfg.tol))
        report["results"].append(report_json(HILL, {r.M: r.values for r in hill}, cfg.reference, digits))
    if cfg.D_range:
        hk = _run_hankel(table, *cfg.D_range, cfg.d, lo, hi, cfg.tol, cfg.backend, cfg.precision, cfg.grid_n)
        write_csv(cfg.output / "hankel.csv", HANKEL_HEADER, hankel_rows(hk, cfg.tol))
        report["results"].append(report_json(HANKEL, {r.spec.D: r.values for r in hk}, cfg.reference, digits))
    write_json(cfg.output / "report.json", report)
    return report


def _emit(rows, header, output: str | None) -> None:
    if output:
        write_csv(Path(output), header, rows)
        return
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def cmd_series(args) -> int:
    table = _table(potential_doc(args.potential), args.a, args.s, args.J)
    doc = coefficients_json(table)
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_hill(args) -> int:
    tol = as_rational(args.tol)
    table = _table(potential_doc(args.potential), args.a, args.s, args.M_max)
    results = _run_hill(table, args.M_min, args.M_max, args.lo, args.hi, tol)
    _emit(hill_rows(results, tol), HILL_HEADER, args.output)
    return EXIT_OK


def cmd_hankel(args) -> int:
    tol = as_rational(args.tol)
    J = 2 * args.D_max + args.d - 1
    table = _table(potential_doc(args.potential), args.a, args.s, J)
    results = _run_hankel(
        table, args.D_min, args.D_max, args.d, as_rational(args.lo), as_rational(args.hi), tol, args.backend, args.precision, args.grid_n
    )
    _emit(hankel_rows(results, tol), HANKEL_HEADER, args.output)
    return EXIT_OK


def _a_grid(text: str) -> list[Fraction]:
    if ":" in text:
        lo, hi, step = (as_rational(x) for x in text.split(":"))
        if step <= 0:
            raise ConfigError("a-grid step must be positive")
        n = int((hi - lo) / step)
        return [lo + k * step for k in range(n + 1)]
    return [as_rational(x) for x in text.split(",")]


def cmd_scan_a(args) -> int:
    doc = potential_doc(args.potential)
    pot = potential_from_config(doc, args.M)
    scan = scan_width_parameter(args.method, pot, args.M, _a_grid(args.a_grid), args.reference, args.lo, args.hi)
    rows = [
        [format_rational(a), scan.M, "no-root" if e is None else ("-inf" if e == -math.inf else f"{e:.6f}")]
        for a, e in zip(scan.a_grid, scan.errors)
    ]
    _emit(rows, ["a", "M", "log_error"], args.output)
    print(f"best_a={'none' if scan.best_a is None else format_rational(scan.best_a)}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = potential_doc(args.potential)
    pot = potential_from_config(doc, 1)
    cfg = ShootingConfig(as_rational(args.x_max), as_rational(args.h), args.parity, args.precision)
    res = numerov_with_error(pot.closed_form, cfg, (as_rational(args.lo), as_rational(args.hi)))
    print(f"E={format_fixed(res.E, 15)}")
    print(f"h={format_rational(res.h)}")
    print(f"x_max={format_rational(res.x_max)}")
    print(f"error_estimate={float(res.error_estimate):.3e}")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg = dataclasses.replace(cfg, output=Path(args.output))
    report = solve(cfg)
    for res in report["results"]:
        conv = res.get("convergence")
        limit = conv["limit_estimate"] if conv else res.get("tracked_target")
        print(f"{res['method']}: {limit}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    targets = TARGETS if args.target == "all" else (args.target,)
    out = Path(args.out)
    ok = True
    for t in targets:
        rep: Reproduction = run_reproduction(t)
        for name, (header, rows) in rep.tables.items():
            write_csv(out / name, header, rows)
        if rep.rows:
            write_csv(
                out / f"{t}_comparison.csv",
                ["target", "column", "index", "published", "computed", "pass"],
                [[r.target, r.column, r.index, r.published or "", r.computed or "", str(r.passed).lower()] for r in rep.rows],
            )
        failed = [r for r in rep.rows if not r.passed]
        print(f"{t}: {len(rep.rows) - len(failed)}/{len(rep.rows)} comparisons within one unit of the last printed digit")
        for r in failed:
            print(f"  mismatch {r.column} {r.index}: printed {r.published or '-'} computed {r.computed or '-'}")
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hankelpade", description="Hill and Hankel-Pade eigenvalues of even 1D potentials.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, orders: str | None = None):
        sp.add_argument("--potential", default="quartic", help="quartic | harmonic | poly:v1,v2 | rational:lambda,g | JSON")
        sp.add_argument("--a", default="1", help="width parameter (exact rational string)")
        sp.add_argument("--s", type=int, choices=(0, 1), default=0)
        sp.add_argument("--output", "-o")
        if orders:
            sp.add_argument("--lo", required=True)
            sp.add_argument("--hi", required=True)
            sp.add_argument("--tol", default="1/10000000000000000000000000")

    sp = sub.add_parser("series", help="dump c_j(E) as exact rationals")
    common(sp)
    sp.add_argument("--J", type=int, required=True)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("hill", help="roots of c_M(E)")
    common(sp, "M")
    sp.add_argument("--M-min", type=int, required=True)
    sp.add_argument("--M-max", type=int, required=True)
    sp.set_defaults(func=cmd_hill)

    sp = sub.add_parser("hankel", help="roots of H_D^d(E)")
    common(sp, "D")
    sp.add_argument("--D-min", type=int, required=True)
    sp.add_argument("--D-max", type=int, required=True)
    sp.add_argument("--d", type=int, default=0)
    sp.add_argument("--backend", choices=(EXACT, FLOAT), default=FLOAT)
    sp.add_argument("--precision", type=int, default=DEFAULT_DIGITS)
    sp.add_argument("--grid-n", type=int, default=200)
    sp.set_defaults(func=cmd_hankel)

    sp = sub.add_parser("scan-a", help="error against a reference as a function of a")
    sp.add_argument("--method", choices=(HILL, HANKEL), default=HILL)
    sp.add_argument("--potential", default="quartic")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--a-grid", required=True, help="comma list or lo:hi:step")
    sp.add_argument("--reference", required=True)
    sp.add_argument("--lo", default="1/2")
    sp.add_argument("--hi", default="3/2")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_scan_a)

    sp = sub.add_parser("oracle", help="Numerov shooting eigenvalue")
    sp.add_argument("--potential", default="quartic")
    sp.add_argument("--lo", required=True)
    sp.add_argument("--hi", required=True)
    sp.add_argument("--x-max", default="12")
    sp.add_argument("--h", default="1/200")
    sp.add_argument("--parity", choices=(EVEN, ODD), default=EVEN)
    sp.add_argument("--precision", type=int, default=30)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("solve", help="run a JSON configuration")
    sp.add_argument("config")
    sp.add_argument("--output", "-o", help="output directory (overrides the config)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reproduce", help="re-run a published table or figure")
    sp.add_argument("target", choices=(*TARGETS, "all"))
    sp.add_argument("--out", default="reproduction")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
