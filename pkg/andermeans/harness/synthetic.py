"""Synthetic clustering datasets: random Gaussian mixtures and Birch-style grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import islice, product

import numpy as np

from andermeans.errors import InvalidInputError
from andermeans.model.types import Dataset


class SyntheticKind(str, Enum):
    GAUSSIAN_MIXTURE = "gaussian-mixture"
    GRID = "grid"


@dataclass(frozen=True)
class SyntheticData:
    dataset: Dataset
    means: np.ndarray
    labels: np.ndarray


def _component_means(kind: SyntheticKind, d: int, components: int, spread: float, rng: np.random.Generator) -> np.ndarray:
    if kind is SyntheticKind.GAUSSIAN_MIXTURE:
        return rng.uniform(0.0, 1.0, size=(components, d)) * spread
    side = max(1, math.ceil(components ** (1.0 / d) - 1e-9))
    while side ** d < components:
        side += 1
    lattice = islice(product(range(side), repeat=d), components)
    return np.array(list(lattice), dtype=np.float64) * spread


def gen_synthetic_with_truth(
    kind: SyntheticKind | str,
    n: int,
    d: int,
    components: int,
    spread: float = 10.0,
    seed: int = 0,
    jitter: float = 1.0,
) -> SyntheticData:
    """Samples plus the component means and memberships they were drawn from."""
    kind = SyntheticKind(kind)
    if components < 1 or n < components:
        raise InvalidInputError(f"Need n >= components >= 1, got n={n}, components={components}")
    if d < 1:
        raise InvalidInputError(f"Dimension must be at least 1, got {d}")
    if spread < 0 or jitter < 0:
        raise InvalidInputError(f"spread and jitter must be nonnegative, got spread={spread}, jitter={jitter}")

    rng = np.random.default_rng(seed)
    means = _component_means(kind, d, components, spread, rng)
    # Every component gets at least one sample.
    labels = rng.permutation(np.arange(n) % components)
    points = means[labels] + jitter * rng.standard_normal((n, d))
    return SyntheticData(dataset=Dataset(points), means=means, labels=labels)


def gen_synthetic(
    kind: SyntheticKind | str,
    n: int,
    d: int,
    components: int,
    spread: float = 10.0,
    seed: int = 0,
    jitter: float = 1.0,
) -> Dataset:
    return gen_synthetic_with_truth(kind, n, d, components, spread, seed, jitter).dataset
