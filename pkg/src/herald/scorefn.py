"""Score functions and the exponential-mechanism matching distribution."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError


class ScoreKind(str, enum.Enum):
    LINEAR = "lin"
    LOGARITHMIC = "log"

    @classmethod
    def parse(cls, value: "str | ScoreKind") -> "ScoreKind":
        if isinstance(value, cls):
            return value
        aliases = {"lin": cls.LINEAR, "linear": cls.LINEAR, "log": cls.LOGARITHMIC,
                   "ln": cls.LOGARITHMIC, "logarithmic": cls.LOGARITHMIC}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise DomainError(f"unknown score kind {value!r}") from None


@dataclass(frozen=True)
class MatchingDistribution:
    probs: tuple[float, ...]
    epsilon: float
    kind: ScoreKind

    def __len__(self) -> int:
        return len(self.probs)


def sensitivity(kind: ScoreKind, b_max: float) -> float:
    """Sensitivity of the (bid-normalised) score: (b_max-1)/b_max or ln b_max."""
    kind = ScoreKind.parse(kind)
    if not b_max > 1:
        raise DomainError(f"b_max must exceed 1, got {b_max}")
    if kind is ScoreKind.LINEAR:
        return (b_max - 1.0) / b_max
    return math.log(b_max)


def log_weights(bids: Sequence[float], kind: ScoreKind, epsilon: float, b_max: float) -> np.ndarray:
    """Unnormalised log-probabilities of each worker being matched."""
    b = np.asarray(bids, dtype=float)
    if kind is ScoreKind.LINEAR:
        return -epsilon * b / (2.0 * (b_max - 1.0))
    return -epsilon * np.log(b / b_max) / (2.0 * math.log(b_max))


def matching_probabilities(bids: Sequence[float], kind: ScoreKind | str, epsilon: float,
                           b_max: float) -> MatchingDistribution:
    """Probability that each worker is matched to any given subset.

    Linear: ``exp(-eps*b / (2(b_max-1)))``; logarithmic:
    ``exp(-eps*ln(b/b_max) / (2 ln b_max))``; both normalised over all
    workers.
    """
    kind = ScoreKind.parse(kind)
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not b_max > 1:
        raise DomainError(f"b_max must exceed 1, got {b_max}")
    b = np.asarray(getattr(bids, "bids", bids), dtype=float)
    if b.size == 0:
        raise DomainError("need at least one bid")
    if np.any(b < 1.0) or np.any(b > b_max):
        raise DomainError(f"bids must lie in [1, {b_max}]")
    z = log_weights(b, kind, epsilon, b_max)
    z = z - z.max()
    w = np.exp(z)
    p = w / w.sum()
    return MatchingDistribution(tuple(float(x) for x in p), float(epsilon), kind)
