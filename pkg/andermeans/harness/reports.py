"""JSON / CSV benchmark reports and the console comparison table."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path

from rich.console import Console
from rich.table import Table

from andermeans.harness.compare import ComparisonTable
from andermeans.harness.runner import BenchRecord, RunSpec

FORMAT_TAG = "andermeans.bench/1"

RECORD_COLUMNS = (
    "dataset",
    "solver",
    "seed",
    "k",
    "accepted_iters",
    "total_iters",
    "elapsed_seconds",
    "mse",
    "final_energy",
    "converged",
    "init_digest",
)
TRACE_COLUMNS = ("energy_trace", "m_trace")


def _record_dict(record: BenchRecord, trace: bool) -> dict:
    data = asdict(record)
    return {column: data[column] for column in (*RECORD_COLUMNS, *(TRACE_COLUMNS if trace else ()))}


def to_json(records: list[BenchRecord], comparison: ComparisonTable | None = None, trace: bool = False) -> str:
    payload: dict = {
        "format": FORMAT_TAG,
        "records": [_record_dict(record, trace) for record in records],
    }
    if comparison is not None:
        payload["comparison"] = {
            "solvers": comparison.solvers,
            "seeds": comparison.seeds,
            "max_relative_mse_discrepancy": comparison.max_relative_mse_discrepancy,
            "against_baseline": [asdict(item) for item in comparison.comparisons],
        }
    return json.dumps(payload, indent=2) + "\n"


def _csv_cell(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ";".join(_csv_cell(item) for item in value)
    return str(value)


def to_csv(records: list[BenchRecord], trace: bool = False) -> str:
    columns = ("format", *RECORD_COLUMNS, *(TRACE_COLUMNS if trace else ()))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        row = _record_dict(record, trace)
        writer.writerow([FORMAT_TAG, *(_csv_cell(row[column]) for column in columns[1:])])
    return buffer.getvalue()


def render(records: list[BenchRecord], fmt: str, comparison: ComparisonTable | None = None, trace: bool = False) -> str:
    if fmt == "csv":
        return to_csv(records, trace)
    return to_json(records, comparison, trace)


def render_for(spec: RunSpec, records: list[BenchRecord], comparison: ComparisonTable | None = None, trace: bool = False) -> str:
    """Report text in the spec's output_format."""
    return render(records, spec.output_format, comparison, trace)


def write_report(text: str, out: Path | None) -> Path | None:
    """Write to `out`, or to stdout when no path is given."""
    if out is None:
        print(text, end="", flush=True)
        return None
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    return out


def render_records(console: Console, records: list[BenchRecord]) -> None:
    table = Table(title="Runs")
    table.add_column("Solver", style="cyan", no_wrap=True)
    table.add_column("Seed", justify="right")
    table.add_column("#Iter (a/b)", style="green", justify="right")
    table.add_column("Time (s)", justify="right")
    table.add_column("MSE", style="yellow", justify="right")
    table.add_column("Converged")
    for record in records:
        table.add_row(
            record.solver,
            str(record.seed),
            f"{record.accepted_iters}/{record.total_iters}",
            f"{record.elapsed_seconds:.3f}",
            f"{record.mse:.6g}",
            "yes" if record.converged else "no",
        )
    console.print(table)


def render_comparison(console: Console, comparison: ComparisonTable) -> None:
    table = Table(title=f"Against {comparison.solvers[0]}")
    table.add_column("Solver", style="cyan", no_wrap=True)
    table.add_column("Fewer iters", style="green", justify="right")
    table.add_column("Less time", style="green", justify="right")
    table.add_column("Mean iter reduction", justify="right")
    table.add_column("Median iter reduction", justify="right")
    table.add_column("Mean time reduction", justify="right")
    for item in comparison.comparisons:
        table.add_row(
            item.solver,
            f"{item.iteration_wins}/{item.pairs}",
            f"{item.time_wins}/{item.pairs}",
            f"{item.mean_iteration_reduction:.1%}",
            f"{item.median_iteration_reduction:.1%}",
            f"{item.mean_time_reduction:.1%}",
        )
    console.print(table)
    console.print(f"Max relative MSE discrepancy across solvers: {comparison.max_relative_mse_discrepancy:.3g}")
