"""Benchmark harness: datasets, runs, paired comparisons, reports."""

from .compare import ComparisonTable, SolverComparison, bench_compare
from .datasets import load_dataset, save_dataset
from .runner import BenchRecord, RunSpec, SolverKind, run
from .synthetic import SyntheticKind, gen_synthetic, gen_synthetic_with_truth

__all__ = [
    "BenchRecord",
    "ComparisonTable",
    "RunSpec",
    "SolverComparison",
    "SolverKind",
    "SyntheticKind",
    "bench_compare",
    "gen_synthetic",
    "gen_synthetic_with_truth",
    "load_dataset",
    "run",
    "save_dataset",
]
