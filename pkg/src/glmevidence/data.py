"""Immutable dataset and model-index types.

Covariates are numbered 1..p externally (file formats, CLI, reports);
``ModelIndex.cols`` translates to 0-based column positions internally.
Coefficient vectors are plain float64 arrays whose entries line up with
the sorted indices of their model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .families import Family, get_family


@dataclass(frozen=True)
class ModelIndex:
    """A submodel: a strictly increasing tuple of 1-based covariate indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(j) for j in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(j < 1 for j in idx):
            raise ContractViolation(f"model indices must be >= 1, got {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ContractViolation(
                f"model indices must be strictly increasing, got {idx}"
            )

    @classmethod
    def of(cls, *indices: int) -> "ModelIndex":
        return cls(tuple(sorted(int(j) for j in indices)))

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def cols(self) -> np.ndarray:
        """0-based column positions into the design matrix."""
        return np.asarray(self.indices, dtype=np.intp) - 1

    def contains(self, other: "ModelIndex") -> bool:
        return set(other.indices) <= set(self.indices)

    def label(self) -> str:
        """Semicolon-joined 1-based indices; empty string for the null model."""
        return ";".join(str(j) for j in self.indices)

    def __str__(self) -> str:
        return "{" + ",".join(str(j) for j in self.indices) + "}"


EMPTY_MODEL = ModelIndex(())


@dataclass(frozen=True)
class Dataset:
    """Fixed design matrix, response vector, and family tag.

    Arrays are copied and marked read-only, so a Dataset can be shared
    freely across threads or worker processes.
    """

    X: np.ndarray
    Y: np.ndarray
    family: Family

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        Y = np.array(self.Y, dtype=np.float64, copy=True)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ContractViolation(f"design must be a n x p matrix with n,p >= 1, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ContractViolation("design matrix contains non-finite entries")
        if Y.ndim != 1 or Y.shape[0] != X.shape[0]:
            raise ContractViolation(
                f"response length {Y.shape} does not match {X.shape[0]} design rows"
            )
        if not np.all(np.isfinite(Y)):
            raise ContractViolation("response contains non-finite entries")
        if self.family.kind == "logistic":
            if not np.all((Y == 0.0) | (Y == 1.0)):
                raise ContractViolation("logistic response must be 0/1")
        elif self.family.kind == "poisson":
            if np.any(Y < 0.0) or np.any(np.abs(Y - np.round(Y)) > 1e-9):
                raise ContractViolation(
                    "poisson response must be nonnegative integers (within 1e-9)"
                )
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @classmethod
    def create(cls, X, Y, family: str | Family) -> "Dataset":
        if isinstance(family, str):
            family = get_family(family)
        return cls(X=X, Y=Y, family=family)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def columns(self, J: ModelIndex) -> np.ndarray:
        """The n x |J| active submatrix (C-contiguous copy)."""
        if J.size and J.indices[-1] > self.p:
            raise ContractViolation(
                f"model {J} references column {J.indices[-1]} but p={self.p}"
            )
        return np.ascontiguousarray(self.X[:, J.cols])


def check_conforms(J: ModelIndex, beta: np.ndarray) -> np.ndarray:
    """Validate that ``beta`` is a finite coefficient vector for model ``J``."""
    beta = np.asarray(beta, dtype=np.float64)
    if beta.ndim != 1 or beta.shape[0] != J.size:
        raise ContractViolation(
            f"coefficient vector of length {beta.shape} does not conform to |J|={J.size}"
        )
    if beta.size and not np.all(np.isfinite(beta)):
        raise ContractViolation("coefficient vector contains non-finite entries")
    return beta
