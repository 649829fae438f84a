#!/usr/bin/env python3
"""
cli.py - Entry point for ANDERMEANS
Run, compare and benchmark Lloyd and Anderson-accelerated K-Means.
"""

try:
    import argparse
    import sys
    import time
    from pathlib import Path
    from typing import NoReturn, Optional
    from pydantic import ValidationError
    from rich.console import Console
    from rich.markup import escape
    import andermeans as pkg
    from . import logger
    from .config import AAConfig, AndermeansConfig, OutputConfig, SolverConfig, resolve_config
    from .errors import InvalidInputError, InvariantViolation
    from .harness.compare import bench_compare
    from .harness.datasets import save_dataset
    from .harness.reports import render_comparison, render_for, render_records, write_report
    from .harness.runner import BenchRecord, RunSpec, SolverKind, run
    from .harness.synthetic import SyntheticKind, gen_synthetic_with_truth
    from .matrix_io import write_numeric_matrix
    from .seeding import Seeder
except ImportError as e:
    print(f"Error: Missing required dependency: {e}")
    print("Please install required dependencies: pip install -r requirements.txt")
    raise SystemExit(1)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3
EXIT_INVARIANT = 4

_CLI_SESSION_START_MONOTONIC = time.monotonic()


class UsageError(Exception):
    """Bad flag values that argparse itself cannot detect."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        _ui_error(message)
        raise SystemExit(EXIT_USAGE)


def _ui_info(message: str) -> None:
    console.print(f"[cyan][INFO][/cyan] {escape(message)}")


def _ui_warn(message: str) -> None:
    console.print(f"[yellow][WARNING][/yellow] {escape(message)}")


def _ui_error(message: str) -> None:
    console.print(f"[red][ERROR][/red] {escape(message)}")


def _format_elapsed_runtime(seconds: float) -> str:
    if seconds < 60:
        return f"{seconds:.1f}s"
    if seconds < 3_600:
        return f"{seconds / 60:.1f}m"
    return f"{seconds / 3_600:.1f}h"


def _int_list(value: str) -> list[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from exc


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for args, kwargs in (
        (("-c", "--config"), {"metavar": "PATH", "help": "Path to andermeans.toml (file or directory)"}),
        (("--log",), {"metavar": "PATH", "help": "Also write the session log to this file"}),
        (("--debug",), {"action": "store_true", "help": "Per-iteration trace and seed digests"}),
        (("-q", "--quiet"), {"action": "store_true", "help": "Only errors on the console"}),
        (("--workers",), {"type": int, "metavar": "N", "help": "Data-parallel workers per solve (0 = auto)"}),
        (("--jobs",), {"type": int, "default": 1, "metavar": "N", "help": "Repetitions solved concurrently"}),
    ):
        common.add_argument(*args, **kwargs)

    solve_opts = argparse.ArgumentParser(add_help=False)
    for args, kwargs in (
        (("--data",), {"required": True, "metavar": "PATH", "help": "Dataset file (comma/whitespace delimited)"}),
        (("--k",), {"required": True, "type": int, "help": "Number of clusters"}),
        (("--init",), {"default": "kmeanspp", "metavar": "KIND", "help": "random | kmeanspp | file:PATH"}),
        (("--seed",), {"type": int, "default": 0, "help": "First seed (default 0)"}),
        (("--seeds",), {"type": _int_list, "metavar": "A,B,..", "help": "Explicit seeds, one per repetition"}),
        (("--reps",), {"type": int, "metavar": "R", "help": "Repetitions (seeds seed..seed+R-1)"}),
        (("--m-max",), {"type": int, "dest": "m_max", "help": "Maximum history depth"}),
        (("--eps1",), {"type": float, "help": "Shrink m below this energy-decrease ratio"}),
        (("--eps2",), {"type": float, "help": "Grow m above this energy-decrease ratio"}),
        (("--normalize",), {"action": "store_true", "help": "Z-score every dimension before clustering"}),
        (("--max-iters",), {"type": int, "dest": "max_iters", "help": "Iteration cap per solve"}),
        (("--engine",), {"choices": ["bounded", "naive"], "help": "Assignment engine"}),
        (("--empty-policy",), {"choices": ["keep-previous", "reseed-farthest"], "dest": "empty_policy"}),
        (("--format",), {"choices": ["json", "csv"], "help": "Report format"}),
        (("--out",), {"metavar": "PATH", "help": "Report path (default: stdout)"}),
        (("--trace",), {"action": "store_true", "default": None, "help": "Include energy and m traces"}),
        (("--strict",), {"action": "store_true", "default": None, "help": "Exit 3 if any solve did not converge"}),
    ):
        solve_opts.add_argument(*args, **kwargs)

    parser = _Parser(
        prog="andermeans",
        description=f"ANDERMEANS v{getattr(pkg, '__version__', '0.0.0')} - Anderson-accelerated K-Means",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_parser = sub.add_parser("run", parents=[common, solve_opts], help="Run one solver")
    run_parser.add_argument(
        "--solver", choices=[kind.value for kind in SolverKind], default=SolverKind.AA_DYNAMIC.value
    )
    run_parser.add_argument("--m0", type=int, help="Initial history depth")

    bench_parser = sub.add_parser("bench", parents=[common, solve_opts], help="Compare solvers from shared seeds")
    bench_parser.add_argument(
        "--solver",
        action="append",
        choices=[kind.value for kind in SolverKind],
        help="Repeat to add solvers; the first one is the baseline (default: lloyd, aa-dynamic)",
    )
    bench_parser.add_argument("--m0", type=_int_list, metavar="M[,M..]", help="Initial history depth(s)")

    gen_parser = sub.add_parser("gen", parents=[common], help="Generate a synthetic dataset")
    for args, kwargs in (
        (("--kind",), {"choices": [kind.value for kind in SyntheticKind], "default": "gaussian-mixture"}),
        (("--n",), {"type": int, "required": True, "help": "Samples"}),
        (("--d",), {"type": int, "required": True, "help": "Dimension"}),
        (("--components",), {"type": int, "required": True, "help": "Mixture components / grid cells"}),
        (("--spread",), {"type": float, "default": 10.0, "help": "Mean range (mixture) or lattice spacing (grid)"}),
        (("--jitter",), {"type": float, "default": 1.0, "help": "Gaussian standard deviation around each mean"}),
        (("--seed",), {"type": int, "default": 0}),
        (("--out",), {"required": True, "metavar": "PATH", "help": "Dataset CSV to write"}),
        (("--means-out",), {"metavar": "PATH", "dest": "means_out", "help": "Also write component means"}),
    ):
        gen_parser.add_argument(*args, **kwargs)
    return parser


def _overrides(args: argparse.Namespace, mapping: dict[str, str]) -> dict:
    return {field: getattr(args, attr) for attr, field in mapping.items() if getattr(args, attr, None) is not None}


def _validated(model: type, base, overrides: dict):
    try:
        return model(**{**base.model_dump(), **overrides})
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_configs(args: argparse.Namespace, config: AndermeansConfig) -> tuple[SolverConfig, AAConfig, OutputConfig]:
    solver_overrides = _overrides(
        args, {"max_iters": "max_iters", "workers": "workers", "engine": "engine", "empty_policy": "empty_cluster_policy"}
    )
    aa_overrides = _overrides(args, {"m_max": "m_max", "eps1": "eps1", "eps2": "eps2"})
    if isinstance(args.m0, int):
        aa_overrides["m0"] = args.m0
    output_overrides = _overrides(args, {"format": "format", "trace": "trace", "strict": "strict"})
    return (
        _validated(SolverConfig, config.solver, solver_overrides),
        _validated(AAConfig, config.anderson, aa_overrides),
        _validated(OutputConfig, config.output, output_overrides),
    )


def _seeds(args: argparse.Namespace) -> tuple[int, list[int]]:
    if args.seeds:
        if args.reps is not None and args.reps != len(args.seeds):
            raise UsageError(f"--reps {args.reps} does not match {len(args.seeds)} --seeds value(s)")
        return len(args.seeds), list(args.seeds)
    reps = args.reps if args.reps is not None else 1
    if reps < 1:
        raise UsageError("--reps must be at least 1")
    return reps, [args.seed + i for i in range(reps)]


def _make_spec(args, solver: SolverKind, solver_cfg, aa_cfg, output: OutputConfig, label: str | None = None) -> RunSpec:
    reps, seeds = _seeds(args)
    try:
        seeder = Seeder.parse(args.init, seed=args.seed)
    except (InvalidInputError, ValidationError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        return RunSpec(
            dataset_path=Path(args.data).expanduser(),
            k=args.k,
            solver=solver,
            seeder=seeder,
            anderson=aa_cfg,
            solver_config=solver_cfg,
            normalize=args.normalize,
            repetitions=reps,
            seeds=seeds,
            output_format=output.format,
            label=label,
        )
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc


def _finish(records: list[BenchRecord], output: OutputConfig, out: Optional[str], text: str) -> int:
    path = write_report(text, Path(out).expanduser() if out else None)
    if path is not None:
        _ui_info(f"Report written to {path}")
    unconverged = [r for r in records if not r.converged]
    if unconverged:
        _ui_warn(f"{len(unconverged)} solve(s) hit the iteration cap before converging")
        if output.strict:
            return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_run(args: argparse.Namespace, config: AndermeansConfig) -> int:
    solver_cfg, aa_cfg, output = _resolve_configs(args, config)
    spec = _make_spec(args, SolverKind(args.solver), solver_cfg, aa_cfg, output)
    records = run(spec, jobs=args.jobs)
    if not args.quiet:
        render_records(console, records)
    return _finish(records, output, args.out, render_for(spec, records, trace=output.trace))


def _cmd_bench(args: argparse.Namespace, config: AndermeansConfig) -> int:
    solver_cfg, aa_cfg, output = _resolve_configs(args, config)
    solvers = [SolverKind(s) for s in (args.solver or ["lloyd", "aa-dynamic"])]
    depths = args.m0 or [aa_cfg.m0]
    specs: list[RunSpec] = []
    for solver in solvers:
        if solver is SolverKind.LLOYD:
            specs.append(_make_spec(args, solver, solver_cfg, aa_cfg, output))
            continue
        for m0 in depths:
            label = f"{solver.value}@m0={m0}" if len(depths) > 1 else None
            specs.append(_make_spec(args, solver, solver_cfg, _validated(AAConfig, aa_cfg, {"m0": m0}), output, label))
    if len(specs) < 2:
        raise UsageError("bench needs at least two solver variants (repeat --solver or pass several --m0 values)")

    table = bench_compare(specs, jobs=args.jobs)
    if not args.quiet:
        render_records(console, table.records)
        render_comparison(console, table)
    text = render_for(specs[0], table.records, comparison=table, trace=output.trace)
    return _finish(table.records, output, args.out, text)


def _cmd_gen(args: argparse.Namespace, _config: AndermeansConfig) -> int:
    generated = gen_synthetic_with_truth(
        args.kind, args.n, args.d, args.components, spread=args.spread, seed=args.seed, jitter=args.jitter
    )
    path = save_dataset(Path(args.out).expanduser(), generated.dataset)
    _ui_info(f"Wrote {generated.dataset.n} x {generated.dataset.dim} {args.kind} samples to {path}")
    if args.means_out:
        means_path = write_numeric_matrix(Path(args.means_out).expanduser(), generated.means)
        _ui_info(f"Wrote {args.components} component means to {means_path}")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point"""
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = resolve_config(args.config)

    session = logger.AndermeansLogger(
        log_file=Path(args.log).expanduser() if args.log else None,
        debug=args.debug,
        quiet=args.quiet,
    )
    logger.set_logger(session)
    try:
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        _ui_error(str(e))
        return EXIT_USAGE
    except (InvalidInputError, OSError) as e:
        _ui_error(f"Data error: {e}")
        return EXIT_DATA
    except InvariantViolation as e:
        _ui_error(f"Solver invariant violated: {e}")
        return EXIT_INVARIANT
    except KeyboardInterrupt:
        elapsed = max(0.0, time.monotonic() - _CLI_SESSION_START_MONOTONIC)
        _ui_info(f"Interrupted after {_format_elapsed_runtime(elapsed)}")
        return EXIT_USAGE
    finally:
        session.close()


if __name__ == "__main__":
    sys.exit(main())
