"""Dataset files."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from andermeans import logger
from andermeans.matrix_io import read_numeric_matrix, write_numeric_matrix
from andermeans.model.types import Dataset


def zscore(points: np.ndarray) -> np.ndarray:
    """Zero mean and unit (population) variance per column; constant columns
    are only centered."""
    centered = points - points.mean(axis=0)
    scale = centered.std(axis=0)
    scale[scale == 0.0] = 1.0
    return centered / scale


def load_dataset(path: Path | str, normalize: bool = False) -> Dataset:
    points = read_numeric_matrix(path)
    if normalize:
        points = zscore(points)
    logger.info(
        f"Loaded {path}: N={points.shape[0]}, d={points.shape[1]}, "
        f"normalize={'z-score' if normalize else 'off'}"
    )
    return Dataset(points)


def save_dataset(path: Path | str, data: Dataset) -> Path:
    return write_numeric_matrix(path, data.points)
