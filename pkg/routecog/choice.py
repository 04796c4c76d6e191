"""
Route choice: utilities, Logit and Kirchhoff distributions, sampling.

Utility is the reciprocal of general cost. Logit weights routes by
exp(mu * U), Kirchhoff by U ** k. Kirchhoff is Logit over log-utilities,
which is how both are computed here: in log space, shifted by the maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ChoiceError
from .network import Route
from .rng import SeededStream

MODELS = ("logit", "kirchhoff")

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ChoiceParams:
    model: str = "kirchhoff"
    sensitivity: float = 3.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ChoiceError(f"choice model must be one of {', '.join(MODELS)}, got '{self.model}'")
        if not math.isfinite(self.sensitivity):
            raise ChoiceError(f"sensitivity must be finite, got {self.sensitivity}")
        if self.model == "logit" and not self.sensitivity > 0:
            raise ChoiceError(f"logit sensitivity must be > 0, got {self.sensitivity}")
        if self.model == "kirchhoff" and not self.sensitivity >= 0:
            raise ChoiceError(f"kirchhoff sensitivity must be >= 0, got {self.sensitivity}")


@dataclass(frozen=True)
class ChoiceSet:
    routes: Tuple[Route, ...]
    costs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(self.routes))
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        if not self.routes:
            raise ChoiceError("empty choice set")
        if len(self.routes) != len(self.costs):
            raise ChoiceError(f"{len(self.routes)} routes but {len(self.costs)} costs")
        for index, cost in enumerate(self.costs):
            if not (math.isfinite(cost) and cost > 0):
                raise ChoiceError(f"cost at index {index} must be finite and > 0, got {cost}")


def _vector(values: Sequence[float], what: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim != 1 or array.size == 0:
        raise ChoiceError(f"{what} must be a non-empty vector")
    bad = np.flatnonzero(~np.isfinite(array))
    if bad.size:
        raise ChoiceError(f"{what} at index {bad[0]} is not finite")
    return array


def utilities(costs: Sequence[float]) -> np.ndarray:
    """U_j = 1 / C_j"""
    array = _vector(costs, "cost")
    bad = np.flatnonzero(array <= 0)
    if bad.size:
        raise ChoiceError(f"cost at index {bad[0]} must be > 0, got {array[bad[0]]}")
    return 1.0 / array


def _logit(values: np.ndarray, scale: float) -> np.ndarray:
    exponents = scale * values
    exponents -= exponents.max()
    weights = np.exp(exponents)
    return weights / weights.sum()


def logit_probabilities(utilities: Sequence[float], mu: float) -> np.ndarray:
    values = _vector(utilities, "utility")
    if not (math.isfinite(mu) and mu > 0):
        raise ChoiceError(f"logit sensitivity must be > 0, got {mu}")
    return _logit(values, mu)


def _log_utilities(utilities: Sequence[float], k: float) -> np.ndarray:
    values = _vector(utilities, "utility")
    bad = np.flatnonzero(values <= 0)
    if bad.size:
        raise ChoiceError(f"utility at index {bad[0]} must be > 0, got {values[bad[0]]}")
    if not (math.isfinite(k) and k >= 0):
        raise ChoiceError(f"kirchhoff sensitivity must be >= 0, got {k}")
    return np.log(values)


def kirchhoff_probabilities(utilities: Sequence[float], k: float) -> np.ndarray:
    """p_j = U_j**k / sum_i U_i**k, evaluated as exp(k log U) with a max shift."""
    logs = _log_utilities(utilities, k)
    exponents = k * logs
    exponents -= exponents.max()
    weights = np.exp(exponents)
    return weights / weights.sum()


def kirchhoff_as_logit(utilities: Sequence[float], k: float) -> np.ndarray:
    """Logit over log-utilities with mu = k. Cross-check for kirchhoff_probabilities."""
    return _logit(_log_utilities(utilities, k), k)


def choice_probabilities(costs: Sequence[float], params: ChoiceParams) -> np.ndarray:
    values = utilities(costs)
    if params.model == "logit":
        return logit_probabilities(values, params.sensitivity)
    return kirchhoff_probabilities(values, params.sensitivity)


def sample_route(probabilities: Sequence[float], stream: SeededStream) -> int:
    """Inverse-CDF sample of an index using one draw from ``stream``."""
    p = _vector(probabilities, "probability")
    negative = np.flatnonzero(p < 0)
    if negative.size:
        raise ChoiceError(f"probability at index {negative[0]} is negative")
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ChoiceError(f"probabilities sum to {total!r}, expected 1")
    draw = stream.random()
    index = int(np.searchsorted(np.cumsum(p), draw, side="right"))
    if index >= p.size:
        # cumulative sum fell short of the draw by rounding
        index = int(np.flatnonzero(p > 0)[-1])
    return index
