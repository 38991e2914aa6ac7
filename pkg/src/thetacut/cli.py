"""Command-line front end.

Exit codes: 0 success, 1 parse/usage error, 2 solver failure, 3 size guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import bench
from .cutloop import GROUPS, LoopAbort, LoopConfig, compute_bounds
from .exact import GuardError, exact_alpha, exact_chi
from .generators import FAMILIES, GenSpec
from .graph import GraphError, read_dimacs, write_dimacs
from .model import Problem, build_model
from .solver import SolverConfig, solve

EXIT_PARSE = 1
EXIT_SOLVER = 2
EXIT_GUARD = 3
SDP_MAX_N = 400

log = logging.getLogger("thetacut")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is our solver-failure code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver and loop")
    g.add_argument("--feastol", type=float, default=1e-8)
    g.add_argument("--gaptol", type=float, default=1e-8)
    g.add_argument("--threshold", type=float, default=0.025)
    g.add_argument("--cap-factor", type=int, default=2)
    g.add_argument("--max-iters", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--time-limit", type=float, default=None, help="seconds per phase")
    g.add_argument("--families", default=",".join(GROUPS),
                   help=f"comma-separated subset of {','.join(GROUPS)}")
    g.add_argument("--cycle-lengths", default="5", help="odd cycle lengths for the cycle-vertex cuts")
    g.add_argument("--maximal-only", action="store_true", help="use only maximal cliques")
    g.add_argument("--purge-slack", type=float, default=None,
                   help="drop pooled cuts with slack above this value (off by default)")
    o = p.add_argument_group("output")
    o.add_argument("--out", type=Path, default=None)
    o.add_argument("--format", choices=("text", "json", "csv", "md"), default="text")
    o.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _graph_flags(p: argparse.ArgumentParser, positional: bool = True) -> None:
    if positional:
        p.add_argument("graph", nargs="?", type=Path, help="DIMACS file")
    p.add_argument("--family", choices=sorted(FAMILIES))
    for name, typ in (("n", int), ("p", float), ("r", int), ("d", int), ("levels", int), ("length", int)):
        p.add_argument(f"--{name}", type=typ)


def _problem_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=[x.value for x in Problem], default=Problem.STABLE.value)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="thetacut", description="Strengthened theta bounds for stable sets and coloring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="write a generated graph as DIMACS")
    _graph_flags(p, positional=False)

    p = sub.add_parser("exact", parents=[common], help="exact alpha or chi for small graphs")
    _graph_flags(p)
    _problem_flag(p)

    p = sub.add_parser("theta", parents=[common], help="Lovasz theta (of the complement for coloring)")
    _graph_flags(p)
    _problem_flag(p)

    p = sub.add_parser("bound", parents=[common], help="theta, BOUND 1 and BOUND 2")
    _graph_flags(p)
    _problem_flag(p)
    p.add_argument("--phase2", action=argparse.BooleanOptionalAction, default=True,
                   help="run the second phase (default on)")

    p = sub.add_parser("reproduce", parents=[common], help="recompute rows of the reference tables")
    p.add_argument("which", help="table1..table7 or all")
    p.add_argument("--instances-dir", type=Path, default=None)
    p.add_argument("--max-n", type=int, default=bench.DESK_MAX_N,
                   help="skip generated rows above this size")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("report", parents=[common], help="tabulate BoundReport JSON files")
    p.add_argument("reports", nargs="+", type=Path)
    return parser


# -- helpers ------------------------------------------------------------------------

def _load_graph(args):
    if getattr(args, "graph", None) is not None:
        if args.family:
            raise UsageError("give either a DIMACS file or --family, not both")
        return read_dimacs(args.graph)
    if not args.family:
        raise UsageError("no graph: pass a DIMACS file or --family with its parameters")
    params = {k: getattr(args, k) for k in ("n", "p", "r", "d", "levels", "length")
              if getattr(args, k) is not None}
    return GenSpec(args.family, params, args.seed).build()


def _loop_config(args, problem: Problem | None = None) -> LoopConfig:
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    try:
        lengths = tuple(int(x) for x in args.cycle_lengths.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad --cycle-lengths {args.cycle_lengths!r}") from None
    try:
        return LoopConfig(
            problem=problem or Problem(getattr(args, "problem", "stable")),
            threshold=args.threshold,
            cap_factor=args.cap_factor,
            max_iters=args.max_iters,
            solver=SolverConfig(feastol=args.feastol, gaptol=args.gaptol),
            families=families,
            seed=args.seed,
            cycle_lengths=lengths,
            maximal_only=args.maximal_only,
            time_limit=args.time_limit,
            purge_slack=args.purge_slack,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _size_guard(g) -> None:
    if g.n > SDP_MAX_N:
        raise GuardError(f"n = {g.n} exceeds the dense SDP limit {SDP_MAX_N}")


# -- commands -----------------------------------------------------------------------

def cmd_generate(args) -> int:
    g = _load_graph(args)
    data = write_dimacs(g, comment=f"{g.name} generated by thetacut")
    if args.out is None:
        sys.stdout.buffer.write(data)
    else:
        args.out.write_bytes(data)
    return 0


def cmd_exact(args) -> int:
    g = _load_graph(args)
    problem = Problem(args.problem)
    value = exact_alpha(g) if problem is Problem.STABLE else exact_chi(g)
    key = "alpha" if problem is Problem.STABLE else "chi"
    if args.format == "json":
        _emit(json.dumps({"graph": g.name, "n": g.n, "m": g.m, key: value}) + "\n", args.out)
    else:
        _emit(f"{g.name or 'graph'}: {key} = {value}\n", args.out)
    return 0


def cmd_theta(args) -> int:
    g = _load_graph(args)
    _size_guard(g)
    problem = Problem(args.problem)
    sol = solve(build_model(g, problem), SolverConfig(feastol=args.feastol, gaptol=args.gaptol))
    if not sol.usable:
        log.error("solver failed: %s", sol.status.value)
        return EXIT_SOLVER
    if args.format == "json":
        _emit(json.dumps({"graph": g.name, "n": g.n, "m": g.m, "problem": problem.value,
                          "theta": sol.objective, "status": sol.status.value}) + "\n", args.out)
    else:
        _emit(f"{g.name or 'graph'}: theta = {sol.objective:.6f} ({sol.status.value})\n", args.out)
    return 0


def cmd_bound(args) -> int:
    g = _load_graph(args)
    _size_guard(g)
    cfg = _loop_config(args)
    if not args.phase2:
        cfg = LoopConfig(**{**cfg.__dict__, "families": tuple(f for f in cfg.families if f in ("nonneg", "tri"))})
    try:
        report = compute_bounds(g, cfg)
    except LoopAbort as exc:
        log.error("%s", exc)
        if exc.report is not None and args.out is not None:
            args.out.write_text(json.dumps(exc.report.to_dict(), indent=2) + "\n")
        return EXIT_SOLVER
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out is not None:
        args.out.write_text(text)
    if args.format == "json":
        if args.out is None:
            sys.stdout.write(text)
    else:
        sys.stdout.write(bench.render(bench.REPORT_COLUMNS, bench.report_rows([report]), args.format))
    return 0


def cmd_reproduce(args) -> int:
    cfg = _loop_config(args, Problem.STABLE)
    try:
        rows = bench.reproduce(args.which, cfg, args.instances_dir, args.max_n, args.jobs)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0] if exc.args else exc)) from None
    for r in rows:
        if r.status == "skipped":
            print(f"skipped {r.name}: {r.note}", file=sys.stderr)
    if args.format == "json":
        text = json.dumps([asdict(r) for r in rows], indent=2) + "\n"
    else:
        fmt = "csv" if args.format == "text" else args.format
        text = bench.render(bench.REPRO_COLUMNS, bench.repro_table(rows), fmt)
    _emit(text, args.out)
    return 0


def cmd_report(args) -> int:
    try:
        reports = [bench.load_report(p) for p in args.reports]
    except (OSError, json.JSONDecodeError, bench.SchemaError) as exc:
        print(f"thetacut report: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    else:
        text = bench.render(bench.REPORT_COLUMNS, bench.report_rows(reports), args.format)
    _emit(text, args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "exact": cmd_exact,
    "theta": cmd_theta,
    "bound": cmd_bound,
    "reproduce": cmd_reproduce,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, GraphError) as exc:
        print(f"thetacut {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GuardError as exc:
        print(f"thetacut {args.command}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"thetacut {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
