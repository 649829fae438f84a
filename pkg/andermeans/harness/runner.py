"""Single benchmark jobs: seed once per repetition, solve, record."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from andermeans import logger
from andermeans.anderson import aa_kmeans_solve
from andermeans.config import AAConfig, SolverConfig
from andermeans.harness.datasets import load_dataset
from andermeans.lloyd import lloyd_solve
from andermeans.model.types import CentroidSet, Dataset
from andermeans.seeding import Seeder
from andermeans.solver_report import SolverReport


class SolverKind(str, Enum):
    LLOYD = "lloyd"
    AA_FIXED = "aa-fixed"
    AA_DYNAMIC = "aa-dynamic"


class RunSpec(BaseModel):
    dataset_path: Path
    k: int = Field(ge=1)
    solver: SolverKind = SolverKind.AA_DYNAMIC
    seeder: Seeder = Field(default_factory=Seeder)
    anderson: AAConfig = Field(default_factory=AAConfig)
    solver_config: SolverConfig = Field(default_factory=SolverConfig)
    normalize: bool = False
    repetitions: int = Field(default=1, ge=1)
    seeds: list[int] | None = None
    output_format: Literal["json", "csv"] = "json"
    label: str | None = Field(default=None, description="Solver id shown in reports (defaults to the solver kind)")

    @model_validator(mode="after")
    def _check_seeds(self) -> "RunSpec":
        if self.seeds is not None and len(self.seeds) != self.repetitions:
            raise ValueError(f"{len(self.seeds)} seed(s) given for {self.repetitions} repetition(s)")
        return self

    @property
    def solver_id(self) -> str:
        return self.label or self.solver.value

    def resolved_seeds(self) -> list[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return [self.seeder.seed + i for i in range(self.repetitions)]

    def accelerator_config(self) -> AAConfig:
        return self.anderson.model_copy(update={"dynamic": self.solver is SolverKind.AA_DYNAMIC})

    def dataset_key(self) -> tuple[str, bool]:
        return str(self.dataset_path.expanduser().resolve()), self.normalize


@dataclass
class BenchRecord:
    dataset: str
    solver: str
    seed: int
    accepted_iters: int
    total_iters: int
    elapsed_seconds: float
    mse: float
    converged: bool
    k: int
    init_digest: str
    final_energy: float
    energy_trace: list[float] = field(default_factory=list)
    m_trace: list[int] = field(default_factory=list)


def solve(spec: RunSpec, data: Dataset, init: CentroidSet) -> SolverReport:
    if spec.solver is SolverKind.LLOYD:
        return lloyd_solve(data, init, spec.solver_config)
    return aa_kmeans_solve(data, init, spec.solver_config, spec.accelerator_config())


def _record(spec: RunSpec, seed: int, init: CentroidSet, report: SolverReport) -> BenchRecord:
    return BenchRecord(
        dataset=spec.dataset_path.stem,
        solver=spec.solver_id,
        seed=seed,
        accepted_iters=report.accepted_iters,
        total_iters=report.total_iters,
        elapsed_seconds=round(report.elapsed_seconds, 3),
        mse=report.final_energy.mse,
        converged=report.converged,
        k=spec.k,
        init_digest=init.digest(),
        final_energy=report.final_energy.total,
        energy_trace=[e.total for e in report.energy_trace],
        m_trace=list(report.m_trace),
    )


def seed_all(spec: RunSpec, data: Dataset) -> dict[int, CentroidSet]:
    initial = {seed: spec.seeder.seed_centroids(data, spec.k, seed) for seed in spec.resolved_seeds()}
    for seed, cents in initial.items():
        logger.debug(f"seed {seed}: initial centroids {spec.seeder.describe()} digest {cents.digest()}")
    return initial


def run(
    spec: RunSpec,
    *,
    data: Dataset | None = None,
    initial: dict[int, CentroidSet] | None = None,
    jobs: int = 1,
) -> list[BenchRecord]:
    """One record per repetition. Pass `initial` to reuse centroids seeded for
    another solver so paired runs start from the same place."""
    data = data if data is not None else load_dataset(spec.dataset_path, spec.normalize)
    initial = initial if initial is not None else seed_all(spec, data)
    seeds = spec.resolved_seeds()
    log = logger.get_logger()

    def _one(seed: int) -> BenchRecord:
        init = initial[seed]
        log.debug(f"{spec.solver_id} seed {seed}: start digest {init.digest()}")
        return _record(spec, seed, init, solve(spec, data, init))

    if jobs <= 1 or len(seeds) <= 1:
        records = []
        for idx, seed in enumerate(seeds, start=1):
            log.status(f"[{spec.solver_id}] repetition {idx} of {len(seeds)} (seed {seed})")
            records.append(_one(seed))
        log.clear_status()
        return records

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_one, seed) for seed in seeds]
        return [future.result() for future in futures]
