"""
Command-line front end.

    cantor-energy gen haar --n 10 --out haar.msr
    cantor-energy energy haar.msr --s 0.5 --method all
    cantor-energy dim pattern.msr --tol 0.015625 --format json

Exit codes: 0 success, 2 usage or validation error, 3 inconclusive
dimension estimate, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time

import numpy as np

from . import __version__
from .dimension import (
    EPS_BOUNDED,
    EPS_FIT,
    box_counting_dim,
    dim_lower_bound,
    fourier_series_check,
    scaling_diagnostic,
)
from .energy import METHODS, NAIVE_MAX_LEVELS, energy, potential, relative_deviation
from .errors import InconclusiveError, UsageError
from .fileformat import ENCODINGS, read_measure, write_measure
from .group import CylinderId
from .kernel import check_exponent, full_coefficient, quadrature_coefficients, truncated_coefficient
from .measure import (
    bernoulli_product,
    cylinder_uniform,
    haar,
    level_masses,
    pattern_measure,
    random_measure,
    spectrum,
)

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_INVARIANT = 0, 2, 3, 4
SELF_CHECK_TOL = 1e-8
TIMING_COLUMNS = ("seconds", "median_seconds", "throughput")
GEN_KINDS = ("haar", "cylinder", "pattern", "bernoulli", "random")


class InvariantViolation(RuntimeError):
    pass


# --------------------------------------------------------------------- parsing


def _int_range(text: str):
    """'a..b' (inclusive) or a single integer."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}")
    if b < a or a < 0:
        raise argparse.ArgumentTypeError(f"empty or negative range {text!r}")
    return a, b


def _float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (report file; for gen, the measure file)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="cantor-energy", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a measure file")
    g.add_argument("kind", choices=GEN_KINDS)
    g.add_argument("--n", type=int, required=True, help="resolution (number of coordinates)")
    g.add_argument("--zeros", type=_int_list, help="pattern: 1-based coordinates forced to 0")
    g.add_argument("--level", type=int, help="cylinder: level m")
    g.add_argument("--index", type=int, help="cylinder: index in [0, 2**m)")
    g.add_argument("--p", type=_float_list, help="bernoulli: one probability, or one per coordinate")
    g.add_argument("--sparsity", type=float, help="random: probability that a cell is empty")
    g.add_argument("--encoding", choices=ENCODINGS, default="f64le")

    sp = sub.add_parser("spectrum", parents=[common], help="Walsh coefficients of a measure")
    sp.add_argument("input")
    sp.add_argument("--k", type=_int_range, help="index range a..b (default: all)")

    k = sub.add_parser("kernel", parents=[common], help="kernel Walsh-Fourier coefficients")
    k.add_argument("--s", type=float, required=True)
    k.add_argument("--trunc", type=int, help="truncation level (default: untruncated kernel)")
    k.add_argument("--k", type=_int_range, default=(0, 15), help="index range a..b")
    k.add_argument("--oracle", action="store_true", help="add a brute-force quadrature column")

    pt = sub.add_parser("potential", parents=[common], help="cylinder-averaged potential")
    pt.add_argument("input")
    pt.add_argument("--s", type=float, required=True)
    pt.add_argument("--truncation", type=int)

    e = sub.add_parser("energy", parents=[common], help="s-energy by one or all methods")
    e.add_argument("input")
    e.add_argument("--s", type=_float_list, required=True, help="one or more exponents")
    e.add_argument("--method", choices=METHODS + ("all",), default="all")
    e.add_argument("--truncation", type=int)

    d = sub.add_parser("dim", parents=[common], help="dimension lower bound from energy growth")
    d.add_argument("input")
    d.add_argument("--tol", type=float, default=2.0 ** -6)
    d.add_argument("--window", type=int, help="levels used in the increment fit")
    d.add_argument("--eps-b", type=float, default=EPS_BOUNDED, help="decay margin for 'bounded'")
    d.add_argument("--eps-d", type=float, default=EPS_FIT, help="max slope standard error")
    d.add_argument("--fourier-s", type=float, help="also report the Fourier series check at this s")

    b = sub.add_parser("bench", parents=[common], help="time the three energy methods")
    b.add_argument("--n", type=_int_range, default=(8, 12), help="resolution range a..b")
    b.add_argument("--s", type=float, default=0.5)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--methods", default=",".join(METHODS))
    return p


def validate(args) -> None:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.command == "gen":
        allowed = {
            "haar": set(),
            "cylinder": {"level", "index"},
            "pattern": {"zeros"},
            "bernoulli": {"p"},
            "random": {"sparsity"},
        }[args.kind]
        for opt in ("zeros", "level", "index", "p", "sparsity"):
            if getattr(args, opt) is not None and opt not in allowed:
                raise UsageError(f"--{opt} conflicts with 'gen {args.kind}'")
        if args.kind == "cylinder" and (args.level is None or args.index is None):
            raise UsageError("'gen cylinder' needs both --level and --index")
        if args.kind == "bernoulli" and args.p is None:
            raise UsageError("'gen bernoulli' needs --p")
        if args.out is None:
            raise UsageError("'gen' needs --out for the measure file")
    elif args.command == "kernel":
        check_exponent(args.s)
        if args.oracle and args.trunc is None:
            raise UsageError("--oracle conflicts with an untruncated kernel; add --trunc")
    elif args.command in ("energy",):
        for s in args.s:
            check_exponent(s)
    elif args.command == "bench":
        if args.repeats < 1:
            raise UsageError("--repeats must be >= 1")
        for m in args.methods.split(","):
            if m not in METHODS:
                raise UsageError(f"unknown method {m!r} in --methods")
    elif args.command == "dim":
        if args.fourier_s is not None:
            check_exponent(args.fourier_s)


# --------------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _header(args, resolution=None) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    return {
        "tool": "cantor-energy",
        "version": __version__,
        "command": args.command,
        "flags": json.dumps(flags, sort_keys=True, default=list),
        "resolution": resolution,
    }


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def render(header: dict, rows, fmt: str, summary=None) -> str:
    if fmt == "json":
        doc = {"header": header, "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows]}
        if summary is not None:
            doc["summary"] = {k: _jsonable(v) for k, v in summary.items()}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for key, val in header.items():
        buf.write(f"# {key}: {_fmt(val)}\n")
    if summary:
        for key, val in summary.items():
            buf.write(f"# {key}: {_fmt(val) if not isinstance(val, (list, tuple)) else json.dumps(_jsonable(val))}\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0].keys())
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def emit(args, text: str) -> None:
    if args.command != "gen" and args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------- commands


def cmd_gen(args):
    n = args.n
    if args.kind == "haar":
        mu = haar(n)
    elif args.kind == "cylinder":
        mu = cylinder_uniform(CylinderId(args.level, args.index), n)
    elif args.kind == "pattern":
        mu = pattern_measure(args.zeros or [], n)
    elif args.kind == "bernoulli":
        p = args.p * n if len(args.p) == 1 else args.p
        if len(p) != n:
            raise UsageError(f"--p needs 1 or {n} probabilities, got {len(p)}")
        mu = bernoulli_product(p)
    else:
        mu = random_measure(args.seed, n, args.sparsity or 0.0)
    write_measure(mu, args.out, args.encoding)
    rows = [{"path": args.out, "kind": args.kind, "total_mass": mu.total_mass,
             "support_size": mu.support_size}]
    return render(_header(args, n), rows, args.format), EXIT_OK


def cmd_spectrum(args):
    mu = read_measure(args.input)
    coeffs = spectrum(mu).coeffs
    a, b = args.k if args.k else (0, mu.size - 1)
    b = min(b, mu.size - 1)
    rows = [{"k": k, "coefficient": float(coeffs[k])} for k in range(a, b + 1)]
    return render(_header(args, mu.n_levels), rows, args.format), EXIT_OK


def cmd_kernel(args):
    a, b = args.k
    oracle = None
    if args.oracle:
        levels = max(args.trunc, b.bit_length(), 1)
        if levels > 16:
            raise UsageError("--oracle is limited to indices and truncations below 2**16")
        oracle = quadrature_coefficients(args.s, args.trunc, levels)
    rows = []
    for k in range(a, b + 1):
        if args.trunc is None:
            value = full_coefficient(args.s, k)
        else:
            value = truncated_coefficient(args.s, args.trunc, k)
        row = {"k": k, "value": value, "block": k.bit_length()}
        if oracle is not None:
            row["oracle"] = float(oracle[k])
        rows.append(row)
    return render(_header(args), rows, args.format), EXIT_OK


def cmd_potential(args):
    mu = read_measure(args.input)
    field = potential(mu, args.s, args.truncation)
    rows = [{"index": i, "potential": float(v)} for i, v in enumerate(field.values)]
    return render(_header(args, mu.n_levels), rows, args.format), EXIT_OK


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def cmd_energy(args):
    mu = read_measure(args.input)
    n = mu.n_levels
    methods = METHODS if args.method == "all" else (args.method,)
    if args.method == "naive" and n > NAIVE_MAX_LEVELS:
        raise UsageError(
            f"naive energy is capped at N = {NAIVE_MAX_LEVELS} (input has N = {n}); "
            "use --method hierarchical or spectral"
        )
    rows, worst = [], 0.0
    for s in args.s:
        values = []
        for m in methods:
            if m == "naive" and n > NAIVE_MAX_LEVELS:
                rows.append({"s": s, "n": n, "method": m, "value": None, "seconds": None,
                             "status": "skipped: N above naive cap"})
                continue
            res, dt = _timed(lambda: energy(mu, s, args.truncation, m, args.threads))
            values.append(res.value)
            rows.append({"s": s, "n": n, "method": m, "value": res.value, "seconds": dt,
                         "status": "ok"})
        if len(values) > 1:
            worst = max(worst, relative_deviation(values))
    summary = {"truncation": args.truncation}
    if args.method == "all":
        summary["max_relative_deviation"] = worst
    text = render(_header(args, n), rows, args.format, summary)
    if args.method == "all" and not worst <= SELF_CHECK_TOL:
        sys.stderr.write(
            f"invariant violation: energy methods disagree (relative deviation {worst:.3e})\n"
        )
        return text, EXIT_INVARIANT
    return text, EXIT_OK


def cmd_dim(args):
    mu = read_measure(args.input)
    table = level_masses(mu)
    box = box_counting_dim(table)
    try:
        est = dim_lower_bound(table, args.tol, args.window, args.eps_b, args.eps_d)
    except InconclusiveError as exc:
        summary = {"lower_bound": None, "bracket": None, "box_dim": box, "resolved": False,
                   "error": str(exc)}
        return render(_header(args, mu.n_levels), exc.diagnostics, args.format, summary), EXIT_INCONCLUSIVE
    summary = {
        "lower_bound": est.lower_bound,
        "bracket": list(est.bracket),
        "box_dim": box,
        "resolved": est.resolved,
        "scaling_sup": scaling_diagnostic(table, max(est.lower_bound, 2.0 ** -10)).supremum,
    }
    if args.fourier_s is not None:
        fc = fourier_series_check(mu, args.fourier_s)
        summary["fourier_s"] = args.fourier_s
        summary["fourier_power_sum"] = float(fc.power_partial[-1]) if fc.power_partial.size else 0.0
        summary["fourier_kernel_sum"] = float(fc.kernel_partial[-1]) if fc.kernel_partial.size else 0.0
    rows = [v.as_dict() for v in est.diagnostics]
    code = EXIT_OK if est.resolved else EXIT_INCONCLUSIVE
    return render(_header(args, mu.n_levels), rows, args.format, summary), code


def cmd_bench(args):
    lo, hi = args.n
    methods = args.methods.split(",")
    rows = []
    for n in range(lo, hi + 1):
        mu = random_measure(args.seed, n)
        values = {}
        timings = {}
        for m in methods:
            if m == "naive" and n > NAIVE_MAX_LEVELS:
                continue
            times = []
            for _ in range(args.repeats):
                res, dt = _timed(lambda: energy(mu, args.s, None, m, args.threads))
                times.append(dt)
                if m in values and values[m] != res.value:
                    raise InvariantViolation(f"{m} energy changed between repeats at N = {n}")
                values[m] = res.value
            timings[m] = statistics.median(times)
        ref = values.get("hierarchical", next(iter(values.values()), None))
        for m in methods:
            if m not in values:
                rows.append({"n": n, "method": m, "value": None, "deviation": None,
                             "median_seconds": None, "throughput": None, "status": "refused"})
                continue
            dev = relative_deviation([values[m], ref])
            t = timings[m]
            rows.append({"n": n, "method": m, "value": values[m], "deviation": dev,
                         "median_seconds": t, "throughput": (1 << n) / t if t > 0 else None,
                         "status": "ok"})
    return render(_header(args), rows, args.format), EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "potential": cmd_potential,
    "energy": cmd_energy,
    "dim": cmd_dim,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        validate(args)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"cantor-energy {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except InvariantViolation as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    emit(args, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
