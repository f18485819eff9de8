"""Command-line entry point: eval, run, sweep, oracle, fit, report.

Exit codes: 0 success, 1 optimum not reached within budget, 2 usage, 3 I/O.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .core import Bitstring, RandomStream, count_zeros
from .experiments import (SweepConfig, default_budget, format_tsv, loglog_fit, report_rows,
                          resolve_delta, resolve_pm, run_sweep)
from .landscape import EvalCounter, HurdleProblem, UnitationTable, evaluate, is_local_optimum
from .metaheuristics import RunSpec
from .oracle import ea_expected_runtime
from .records import ALGORITHMS, read_records

EXIT_BUDGET, EXIT_USAGE, EXIT_IO = 1, 2, 3


class UsageError(Exception):
    pass


def _pm(text: str):
    if text in ("1/n", "w/n"):
        return text
    try:
        p = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid mutation rate {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError("mutation rate must lie in [0, 1]")
    return p


def _hurdle(args) -> HurdleProblem:
    if args.n is None or args.w is None:
        raise UsageError("--n and --w are required")
    try:
        return HurdleProblem(args.n, args.w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args) -> int:
    problem = _hurdle(args)
    if args.bits is not None:
        try:
            x = Bitstring(args.bits)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if x.n != problem.n:
            raise UsageError(f"--bits has length {x.n}, expected {problem.n}")
    else:
        if not 0 <= args.zeros <= problem.n:
            raise UsageError(f"--zeros must lie in 0..{problem.n}")
        x = Bitstring.with_zeros(problem.n, args.zeros)
    fit = evaluate(problem, x, EvalCounter())
    z = count_zeros(x)
    local = is_local_optimum(problem, z)
    line = (f"zeros={z} scaled={fit.value} scale={fit.scale} f={fit} "
            f"local_optimum={'true' if local else 'false'}")
    if z == 0:
        line += " global=true"
    print(line)
    return 0


def cmd_run(args) -> int:
    problem = _hurdle(args)
    n, w = problem.n, problem.w
    pm = None if args.algo.startswith("ls-") else resolve_pm(args.pm, n, w)
    delta = None if args.algo == "ea" else resolve_delta(args.delta, n)
    budget = args.budget if args.budget is not None else default_budget(args.algo, n, w)
    if budget < 1:
        raise UsageError("--budget must be positive")
    record = RunSpec(args.algo, problem, pm, delta, budget)(RandomStream(args.seed))
    print(json.dumps(record.to_dict()))
    return 0 if record.success else EXIT_BUDGET


def cmd_sweep(args) -> int:
    try:
        config = SweepConfig.from_json(args.config)
    except OSError:
        raise
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad sweep config: {exc}") from None
    records = run_sweep(config, args.out, workers=args.threads)
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    if args.algo != "ea":
        raise UsageError("the exact oracle covers the (1+1) EA only (--algo ea)")
    if args.table:
        problem = UnitationTable.from_file(args.table)
        w = None
    else:
        problem = _hurdle(args)
        w = problem.w
    pm = resolve_pm(args.pm, problem.n, w if w is not None else 1)
    if not 0.0 < pm < 1.0:
        raise UsageError("the oracle needs 0 < pm < 1")
    out = {"algorithm": "ea", "problem": problem.descriptor(), "n": problem.n, "w": w, "pm": pm}
    out.update(ea_expected_runtime(problem, pm))
    print(json.dumps(out))
    return 0


def cmd_fit(args) -> int:
    records = read_records(args.inp)
    try:
        fits = loglog_fit(records, args.group, args.x, args.y, level=args.level,
                          resamples=args.resamples, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = ["group\tslope\tintercept\tr2\tci_lo\tci_hi\tpoints\tedge_case"]
    for f in fits:
        lines.append(f"{f.group}\t{f.slope:.6g}\t{f.intercept:.6g}\t{f.r2:.6g}\t"
                     f"{f.ci[0]:.6g}\t{f.ci[1]:.6g}\t{f.points}\t{int(f.edge_case)}")
    print("\n".join(lines))
    return 0


def cmd_report(args) -> int:
    records = read_records(args.inp)
    try:
        rows = report_rows(records, args.group, theory=args.theory, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(format_tsv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurdlelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="Hurdle fitness of one point")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--w", type=int, required=True)
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--bits")
    g.add_argument("--zeros", type=int)
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("run", help="single run, JSON record on stdout")
    r.add_argument("--algo", choices=ALGORITHMS, required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--w", type=int, required=True)
    r.add_argument("--pm", type=_pm, default="1/n", help="decimal, 1/n or w/n (default 1/n)")
    r.add_argument("--delta", default="n", help="local search depth (default n)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--budget", type=int, help="evaluation cap (default 100 x theory)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a SweepConfig JSON file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help=".csv or .jsonl")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="exact expected runtime (EA only)")
    o.add_argument("--algo", default="ea")
    o.add_argument("--n", type=int)
    o.add_argument("--w", type=int)
    o.add_argument("--pm", type=_pm, default="1/n")
    o.add_argument("--table", help="UnitationTable file instead of Hurdle")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("fit", help="log-log slope per group")
    f.add_argument("--in", dest="inp", required=True)
    f.add_argument("--group", default="algo,w")
    f.add_argument("--x", default="n", choices=("n", "w"))
    f.add_argument("--y", default="evaluations", choices=("evaluations", "generations"))
    f.add_argument("--level", type=float, default=0.95)
    f.add_argument("--resamples", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_fit)

    rp = sub.add_parser("report", help="plot-ready TSV of cell means")
    rp.add_argument("--in", dest="inp", required=True)
    rp.add_argument("--group", default="algo,w")
    rp.add_argument("--theory", action="store_true", help="fill theory and ratio columns")
    rp.add_argument("--seed", type=int, default=0)
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"hurdlelab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hurdlelab {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"hurdlelab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
