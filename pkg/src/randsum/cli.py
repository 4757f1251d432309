"""Command-line entry point: ``randsum {bound,simulate,sweep,verify}``.

Exit codes: 0 success, 1 a bound was violated or a property failed, 2 usage error.
The resolved configuration is echoed to stderr before any output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import bounds, montecarlo, suites
from .errors import ExactUnavailable, RandsumError
from .specs import parse_index, parse_summand

THEOREM_CHOICES = bounds.THEOREMS
COUPLING_CHOICES = ("poisson-shift", "drop-one", "marked-ball", "quantile", "identity", "infdiv", "conv-single")

SWEEP_COLUMNS = (
    "index_params", "summand", "reps", "seed", "d_k_emp", "d_k_band",
    "d_w_emp", "bound_id", "bound_total", "verdict",
)

PRESETS = {
    "standard": (
        [("poisson:lambda=25", "exp:rate=1"), ("poisson:lambda=100", "exp:rate=1"), ("poisson:lambda=400", "exp:rate=1")]
        + [(idx, "bern:p=0.3") for idx in ("binomial:n=100,p=0.3", "binomial:n=400,p=0.1")]
        + [("hyper:n=20,r=100,s=300", "twopoint:x0=-1,x1=1,p=0.5")]
        + [(f"dirac:n={n}", "twopoint:x0=-1,x1=1,p=0.5") for n in (100, 10_000)]
    ),
    "rate": [(f"poisson:lambda={lam}", "exp:rate=1") for lam in (25, 100, 400, 1600)],
}


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON with every float written at 17 significant digits; non-finite floats become null."""
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[\n" + ",\n".join(f"{inner}{dumps(v, indent, level + 1)}" for v in obj) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randsum", description="Normal approximation bounds for random sums.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, reps):
        p.add_argument("--coupling", choices=COUPLING_CHOICES)
        p.add_argument("--reps", type=int, default=reps)
        p.add_argument("--seed", type=int, default=montecarlo.DEFAULT_SEED)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out")
        p.add_argument("--ck", type=float, default=0.4748)
        p.add_argument("--exact-2ck", action="store_true", help="use 2*C_K instead of substituting 1")

    p = sub.add_parser("bound", help="evaluate a bound")
    p.add_argument("--index", required=True)
    p.add_argument("--summand", required=True)
    p.add_argument("--theorem", choices=THEOREM_CHOICES, default=None)
    p.add_argument("--metric", choices=("kolmogorov", "wasserstein", "both"), default="both")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--k-const", type=float, default=1.0)
    common(p, 0)

    p = sub.add_parser("simulate", help="run one validation experiment")
    p.add_argument("--index", required=True)
    p.add_argument("--summand", required=True)
    p.add_argument("--theorem", choices=THEOREM_CHOICES, action="append")
    p.add_argument("--metric", choices=("kolmogorov", "wasserstein", "both"), default="both")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common(p, 1_000_000)

    p = sub.add_parser("sweep", help="run experiments over a grid, emit CSV")
    p.add_argument("--index", action="append", default=[])
    p.add_argument("--summand", action="append", default=[])
    p.add_argument("--preset", choices=tuple(PRESETS))
    p.add_argument("--theorem", choices=THEOREM_CHOICES, action="append")
    p.add_argument("--metric", choices=("kolmogorov", "wasserstein", "both"), default="both")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p, 100_000)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=(*suites.SUITES, "all"), default="all")
    p.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def _echo(config: dict):
    print("# config " + json.dumps(config, sort_keys=True, default=str), file=sys.stderr)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _constants(args) -> bounds.BoundConstants:
    return bounds.BoundConstants(args.ck, use_2ck_as_one=not args.exact_2ck)


def _bound_table(reports) -> str:
    lines = [f"{'theorem':<8} {'metric':<12} {'term':<60} value"]
    for r in reports:
        for label, value in r.terms:
            lines.append(f"{r.theorem:<8} {r.metric:<12} {label:<60} {value:.6g}")
        lines.append(f"{r.theorem:<8} {r.metric:<12} {'TOTAL':<60} {r.total:.6g}")
    return "\n".join(lines) + "\n"


def _bound_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("theorem", "metric", "label", "value"))
    for r in reports:
        for label, value in r.terms:
            w.writerow((r.theorem, r.metric, label, _fmt(value)))
        w.writerow((r.theorem, r.metric, "total", _fmt(r.total)))
    return buf.getvalue()


def cmd_bound(args) -> int:
    index, summand = parse_index(args.index), parse_summand(args.summand)
    theorem = args.theorem
    if theorem is None:
        try:
            theorem = bounds.specialization_for(index)
        except bounds.NoSpecialization:
            theorem = "thm3a"
    config = {"command": "bound", "index": args.index, "summand": args.summand, "theorem": theorem, "metric": args.metric,
              "coupling": args.coupling, "ck": args.ck, "exact_2ck": args.exact_2ck, "seed": args.seed}
    _echo(config)
    stats = None
    if theorem in ("thm3a", "thm3b", "general"):
        from . import biasing

        cp = biasing.make_coupling(index, args.coupling)
        # --reps > 0 asks for Monte Carlo statistics; otherwise exact unless the support is too large
        stats = None
        if args.reps <= 0:
            try:
                stats = biasing.coupling_statistics(cp)
            except ExactUnavailable:
                pass
        if stats is None:
            stats = biasing.coupling_statistics(cp, "mc", reps=args.reps or 100_000, seed=args.seed)
    reports = bounds.evaluate(theorem, index, summand, args.metric, _constants(args), stats, args.k_const)
    if args.format == "table":
        text = _bound_table(reports)
    elif args.format == "csv":
        text = _bound_csv(reports)
    else:
        text = dumps([r.to_json() for r in reports]) + "\n"
    _emit(text, args.out)
    return 0


def _experiment_config(args, index, summand) -> montecarlo.ExperimentConfig:
    theorems = tuple(args.theorem) if args.theorem else ("auto",)
    return montecarlo.ExperimentConfig(
        index, summand, args.coupling, args.reps, args.seed, montecarlo.DEFAULT_CHUNK, theorems, args.jobs, args.out,
        args.ck, args.exact_2ck,
    )


def _keep(report, metric):
    return metric == "both" or report.metric == metric


def cmd_simulate(args) -> int:
    config = _experiment_config(args, args.index, args.summand)
    _echo({"command": "simulate", **asdict(config), "metric": args.metric})
    rep = montecarlo.run_experiment(config)
    verdicts = [v for v in rep.verdicts if args.metric == "both" or v.metric == args.metric]
    if args.format == "json":
        payload = rep.to_json()
        payload["verdicts"] = [asdict(v) for v in verdicts]
        text = dumps(payload) + "\n"
    else:
        text = _sweep_text([(args.index, args.summand, config, rep, verdicts)], args.format)
    _emit(text, args.out)
    return 1 if any(v.verdict == "violated" for v in verdicts) else 0


def _sweep_rows(points):
    for index, summand, config, rep, verdicts in points:
        for v in verdicts:
            yield (
                index, summand, config.reps, config.seed, _fmt(rep.d_k.value), _fmt(rep.d_k.conf_band),
                _fmt(rep.d_w.value), f"{v.theorem}:{v.metric}", _fmt(v.bound), v.verdict,
            )


def _sweep_text(points, fmt) -> str:
    if fmt == "table":
        lines = ["  ".join(SWEEP_COLUMNS)]
        for row in _sweep_rows(points):
            lines.append("  ".join(f"{float(x):.6g}" if isinstance(x, str) and x[:1].isdigit() else str(x) for x in row))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return dumps([dict(zip(SWEEP_COLUMNS, row)) for row in _sweep_rows(points)]) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(_sweep_rows(points))
    return buf.getvalue()


def cmd_sweep(args) -> int:
    grid = list(PRESETS[args.preset]) if args.preset else []
    if args.index or args.summand:
        if not (args.index and args.summand):
            raise UsageError("sweep needs both --index and --summand (or --preset)")
        grid += [(i, s) for i in args.index for s in args.summand]
    if not grid:
        raise UsageError("sweep needs a grid: --preset or --index/--summand")
    _echo({"command": "sweep", "grid": grid, "reps": args.reps, "seed": args.seed, "jobs": args.jobs,
           "theorem": args.theorem, "metric": args.metric, "coupling": args.coupling})
    points = []
    for index, summand in grid:
        config = _experiment_config(args, index, summand)
        rep = montecarlo.run_experiment(config)
        verdicts = [v for v in rep.verdicts if args.metric == "both" or v.metric == args.metric]
        points.append((index, summand, config, rep, verdicts))
    _emit(_sweep_text(points, args.format), args.out)
    return 1 if any(v.verdict == "violated" for *_, vs in points for v in vs) else 0


def cmd_verify(args) -> int:
    names = tuple(suites.SUITES) if args.suite == "all" else (args.suite,)
    _echo({"command": "verify", "suites": names})
    results = suites.run_suites(names)
    if args.format == "json":
        text = dumps([{"suite": s, "name": c.name, "passed": c.passed, "detail": c.detail} for s, c in results]) + "\n"
    else:
        text = "".join(f"{'PASS' if c.passed else 'FAIL'}  {s:<7} {c.name}  {c.detail}\n" for s, c in results)
    sys.stdout.write(text)
    return 0 if all(c.passed for _, c in results) else 1


COMMANDS = {"bound": cmd_bound, "simulate": cmd_simulate, "sweep": cmd_sweep, "verify": cmd_verify}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"randsum: error: {exc}", file=sys.stderr)
        return 2
    except (RandsumError, ValueError) as exc:
        print(f"randsum: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
