"""Shared fixtures: the four-point toy problem and seeded mixtures."""

from pathlib import Path

import numpy as np
import pytest

from andermeans import logger
from andermeans.harness.synthetic import gen_synthetic
from andermeans.model import CentroidSet, Dataset


@pytest.fixture(autouse=True)
def quiet_logger():
    logger.set_logger(logger.AndermeansLogger(quiet=True))
    yield
    logger.set_logger(logger.AndermeansLogger(quiet=True))


@pytest.fixture
def toy() -> Dataset:
    return Dataset(np.array([0.0, 1.0, 4.0, 5.0]))


@pytest.fixture
def toy_init() -> CentroidSet:
    return CentroidSet(np.array([0.0, 5.0]))


@pytest.fixture
def toy_file(tmp_path: Path) -> Path:
    path = tmp_path / "toy.csv"
    path.write_text("0\n1\n4\n5\n")
    return path


@pytest.fixture
def toy_seed_file(tmp_path: Path) -> Path:
    path = tmp_path / "toy_seeds.csv"
    path.write_text("0\n5\n")
    return path


@pytest.fixture
def make_mixture():
    def _make(n: int, d: int, components: int, seed: int, spread: float = 10.0, jitter: float = 1.0) -> Dataset:
        return gen_synthetic("gaussian-mixture", n, d, components, spread=spread, seed=seed, jitter=jitter)

    return _make


@pytest.fixture
def mixture_file(tmp_path: Path, make_mixture) -> Path:
    from andermeans.harness.datasets import save_dataset

    return save_dataset(tmp_path / "mixture.csv", make_mixture(600, 3, 4, seed=11, spread=6.0))
