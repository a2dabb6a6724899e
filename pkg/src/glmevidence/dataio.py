"""Flat-file input and output: headerless CSVs, truth metadata, config files.

Numbers are written with ``repr`` (shortest round-trip form) and files end
with a single trailing newline, so identical computations produce byte-
identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import Dataset
from .errors import InvalidResponse, ParseError, ShapeMismatch
from .families import get_family


def _parse_matrix(path: str | Path) -> np.ndarray:
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip("\r\n").strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(
                    f"{path}:{lineno}: expected {width} columns, found {len(cells)}"
                )
            parsed = []
            for col, cell in enumerate(cells, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}:{col}: cannot parse {cell.strip()!r} as a number"
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(f"{path}:{lineno}:{col}: non-finite value {cell.strip()!r}")
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: file contains no data rows")
    return np.asarray(rows, dtype=np.float64)


def load_dataset(design_path: str | Path, response_path: str | Path, family: str) -> Dataset:
    """Parse headerless comma-separated design and response files."""
    X = _parse_matrix(design_path)
    Ym = _parse_matrix(response_path)
    if Ym.shape[1] != 1:
        raise ParseError(f"{response_path}: expected one value per row, found {Ym.shape[1]}")
    Y = Ym[:, 0]
    if Y.shape[0] != X.shape[0]:
        raise ShapeMismatch(
            f"response has {Y.shape[0]} rows but design has {X.shape[0]}"
        )
    fam = get_family(family)
    if fam.kind == "logistic" and not np.all((Y == 0.0) | (Y == 1.0)):
        bad = Y[~((Y == 0.0) | (Y == 1.0))][0]
        raise InvalidResponse(f"logistic response must be 0/1, found {bad!r}")
    if fam.kind == "poisson" and (np.any(Y < 0) or np.any(np.abs(Y - np.round(Y)) > 1e-9)):
        raise InvalidResponse("poisson response must be nonnegative integers")
    return Dataset.create(X, Y, fam)


def fmt(value) -> str:
    """Canonical text form: shortest round-trip repr for floats."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_matrix_csv(path: str | Path, M: np.ndarray) -> None:
    M = np.atleast_2d(np.asarray(M))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in M:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_truth_json(path: str | Path, beta0: np.ndarray, support: Sequence[int], seed: int, config: dict) -> None:
    payload = {
        "beta0": [float(v) for v in beta0],
        "J0": [int(j) for j in support],
        "seed": int(seed),
        "config": config,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` config, UTF-8, # comments, later keys win."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ParseError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
            key, value = stripped.split("=", 1)
            out[key.strip()] = value.strip()
    return out
