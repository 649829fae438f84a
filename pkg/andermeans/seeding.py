"""Initial centroids: uniform sample choice, K-Means++ and file import.

Random seeders use numpy's default generator (PCG64) seeded with the given
integer; a seed reproduces the same centroids within this implementation.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.spatial.distance import cdist

from andermeans import logger
from andermeans.errors import InvalidInputError
from andermeans.matrix_io import read_numeric_matrix
from andermeans.model.types import CentroidSet, Dataset


class SeederKind(str, Enum):
    RANDOM = "random"
    KMEANSPP = "kmeanspp"
    FILE = "file"


class Seeder(BaseModel):
    kind: SeederKind = SeederKind.KMEANSPP
    seed: int = 0
    path: Path | None = None

    @model_validator(mode="after")
    def _check_path(self) -> "Seeder":
        if self.kind is SeederKind.FILE and self.path is None:
            raise ValueError("file seeding requires a path")
        return self

    @classmethod
    def parse(cls, value: str, seed: int = 0) -> "Seeder":
        """'random', 'kmeanspp' or 'file:PATH'."""
        if value.startswith("file:"):
            return cls(kind=SeederKind.FILE, seed=seed, path=Path(value[len("file:"):]).expanduser())
        try:
            return cls(kind=SeederKind(value), seed=seed)
        except ValueError as exc:
            raise InvalidInputError(f"Unknown initializer '{value}'. Use random, kmeanspp or file:PATH.") from exc

    def describe(self) -> str:
        return f"file:{self.path}" if self.kind is SeederKind.FILE else self.kind.value

    def seed_centroids(self, data: Dataset, k: int, seed: int | None = None) -> CentroidSet:
        seed = self.seed if seed is None else seed
        if self.kind is SeederKind.RANDOM:
            return init_random(data, k, seed)
        if self.kind is SeederKind.KMEANSPP:
            return init_kmeanspp(data, k, seed)
        return init_from_file(self.path, k, data.dim)


def _check_k(data: Dataset, k: int) -> None:
    if k < 1:
        raise InvalidInputError(f"k must be at least 1, got {k}")
    if k > data.n:
        raise InvalidInputError(f"k = {k} exceeds the number of samples N = {data.n}")


def init_random(data: Dataset, k: int, seed: int) -> CentroidSet:
    """k distinct samples chosen uniformly without replacement."""
    _check_k(data, k)
    rng = np.random.default_rng(seed)
    return CentroidSet(data.points[rng.choice(data.n, size=k, replace=False)])


def kmeanspp_indices(points: np.ndarray, k: int, rng: np.random.Generator, first: int | None = None) -> np.ndarray:
    """Sample indices chosen by D^2 weighting; `first` pins the opening pick.

    When every remaining sample coincides with a chosen center before k picks
    are made, the rest are drawn uniformly from the unchosen samples.
    """
    n = points.shape[0]
    chosen = [int(rng.integers(n)) if first is None else int(first)]
    nearest = cdist(points, points[chosen[-1]][None, :], "sqeuclidean")[:, 0]
    while len(chosen) < k:
        total = float(nearest.sum())
        if total > 0.0:
            pick = int(rng.choice(n, p=nearest / total))
        else:
            remaining = np.setdiff1d(np.arange(n), np.array(chosen), assume_unique=False)
            logger.debug(f"Only {len(chosen)} distinct centers available; filling uniformly")
            pick = int(rng.choice(remaining))
        chosen.append(pick)
        np.minimum(nearest, cdist(points, points[pick][None, :], "sqeuclidean")[:, 0], out=nearest)
    return np.array(chosen, dtype=np.int64)


def init_kmeanspp(data: Dataset, k: int, seed: int) -> CentroidSet:
    """K-Means++ seeding (plain D^2 rule, one candidate per round)."""
    _check_k(data, k)
    rng = np.random.default_rng(seed)
    return CentroidSet(data.points[kmeanspp_indices(data.points, k, rng)])


def init_from_file(path: Path | str, expected_k: int, expected_d: int) -> CentroidSet:
    """Centroids produced elsewhere, validated against the expected K x d shape."""
    path = Path(path)
    matrix = read_numeric_matrix(path)
    if matrix.shape != (expected_k, expected_d):
        raise InvalidInputError(
            f"{path}: expected {expected_k} centroid row(s) of {expected_d} value(s), "
            f"found {matrix.shape[0]} row(s) of {matrix.shape[1]}"
        )
    return CentroidSet(matrix)
