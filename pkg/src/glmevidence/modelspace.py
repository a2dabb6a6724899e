"""The q-sparse model lattice and the gamma-binomial prior over it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .data import ModelIndex
from .errors import ContractViolation


def enumerate_models(p: int, q: int) -> Iterator[ModelIndex]:
    """All J with |J| <= q, ordered by size then lexicographically."""
    if not (0 <= q <= p):
        raise ContractViolation(f"need 0 <= q <= p, got q={q}, p={p}")
    for k in range(q + 1):
        for combo in combinations(range(1, p + 1), k):
            yield ModelIndex(combo)


def count_models(p: int, q: int) -> int:
    """sum_{k<=q} C(p, k), the size of the q-sparse lattice."""
    if not (0 <= q <= p):
        raise ContractViolation(f"need 0 <= q <= p, got q={q}, p={p}")
    return sum(math.comb(p, k) for k in range(q + 1))


@dataclass(frozen=True)
class ModelPrior:
    """P_gamma(J) proportional to C(p, |J|)^-gamma on models with |J| <= q_max.

    gamma = 0 is uniform over models, gamma = 1 uniform over model sizes.
    Scores stay unnormalized; the normalizer cancels in every argmax.
    """

    gamma: float
    q_max: int
    p: int

    def __post_init__(self):
        if self.gamma < 0:
            raise ContractViolation(f"gamma must be >= 0, got {self.gamma}")
        if not (0 <= self.q_max <= self.p):
            raise ContractViolation(
                f"need 0 <= q_max <= p, got q_max={self.q_max}, p={self.p}"
            )


def log_binomial(p: int, k: int) -> float:
    """log C(p, k) through log-Gamma, usable for p in the thousands."""
    return math.lgamma(p + 1) - math.lgamma(k + 1) - math.lgamma(p - k + 1)


def log_model_prior(mp: ModelPrior, J: ModelIndex) -> float:
    """Unnormalized log P_gamma(J); -inf outside the q_max support."""
    k = J.size
    if k > mp.p:
        raise ContractViolation(f"|J|={k} exceeds p={mp.p}")
    if k > mp.q_max:
        return -math.inf
    return -mp.gamma * log_binomial(mp.p, k)
