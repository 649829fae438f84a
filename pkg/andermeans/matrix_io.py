"""Plain-text numeric matrices: one row per line, comma or whitespace delimited,
optional non-numeric header line.

A line containing a comma is split on commas only, so every comma delimits a
cell and an empty cell is an error. Other lines are split on runs of
whitespace.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from andermeans.errors import DataParseError


def _split(line: str) -> list[str]:
    if "," in line:
        return [cell.strip() for cell in line.strip().split(",")]
    return line.split()


def _parses(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_numeric_matrix(path: Path | str) -> np.ndarray:
    """Parse a delimited numeric matrix. Blank lines are ignored; the first
    non-blank line is skipped when none of its cells is a number."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataParseError(f"not a UTF-8 text file ({exc.reason})", path) from exc

    rows: list[list[float]] = []
    width: int | None = None
    header_checked = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        cells = _split(raw)
        if not header_checked:
            header_checked = True
            if not any(_parses(cell) for cell in cells):
                continue
        for col_no, cell in enumerate(cells, start=1):
            if not cell:
                raise DataParseError("empty value", path, line_no, col_no)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataParseError(f"ragged row: expected {width} values, found {len(cells)}", path, line_no)
        row: list[float] = []
        for col_no, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError as exc:
                raise DataParseError(f"non-numeric value '{cell}'", path, line_no, col_no) from exc
            if not math.isfinite(value):
                raise DataParseError(f"non-finite value '{cell}'", path, line_no, col_no)
            row.append(value)
        rows.append(row)

    if not rows:
        raise DataParseError("file contains no numeric rows", path)
    return np.array(rows, dtype=np.float64)


def write_numeric_matrix(path: Path | str, matrix: np.ndarray) -> Path:
    """CSV with round-trip exact floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt="%.17g")
    return path
