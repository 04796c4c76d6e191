"""
Run configuration.

SimulationConfig starts from the defaults below, may be overlaid by a JSON
run-configuration document (load_config) and then by command-line flags
(with_overrides). Unknown document keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .choice import ChoiceParams
from .cognition import EnvironmentEvent
from .costs import CostWeights, VolumeDelayParams
from .errors import ConfigError, InputError
from .rng import check_seed

AVERAGING = ("none", "successive")
MODES = ("flat", "peak")

DEFAULT_WEIGHTS: Dict[str, CostWeights] = {
    "default": CostWeights(1.0, 0.01, 60.0, 100.0, "default"),
    "experienced": CostWeights(1.0, 0.01, 60.0, 100.0, "experienced"),
    "novice": CostWeights(1.0, 0.01, 60.0, 300.0, "novice"),
    "urgent": CostWeights(2.0, 0.0, 30.0, 50.0, "urgent"),
}

DOCUMENT_KEYS = (
    "choice", "weights", "volume_delay", "k_routes", "work_period", "max_iterations", "epsilon",
    "averaging", "mode", "peak_factor", "cognition", "seed", "packets_per_od",
    "reference_class", "stop_on_convergence", "events",
)


@dataclass(frozen=True)
class SimulationConfig:
    choice: ChoiceParams = ChoiceParams("kirchhoff", 3.0)
    weights: Mapping[str, CostWeights] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    volume_delay: VolumeDelayParams = VolumeDelayParams()
    k_routes: int = 5
    work_period: float = 120.0
    max_iterations: int = 100
    epsilon: float = 1e-3
    averaging: str = "successive"
    mode: str = "flat"
    peak_factor: float = 1.5
    cognition: bool = True
    seed: int = 42
    packets_per_od: int = 8
    reference_class: str = "default"
    stop_on_convergence: bool = True
    events: Tuple[EnvironmentEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(sorted(self.events, key=lambda event: event.at)))
        if "default" not in self.weights:
            raise ConfigError("weights must define the 'default' class")
        if self.reference_class not in self.weights:
            raise ConfigError(f"reference_class '{self.reference_class}' has no weights")
        _positive_int(self.k_routes, "k_routes")
        _positive_int(self.max_iterations, "max_iterations")
        _positive_int(self.packets_per_od, "packets_per_od")
        if not (math.isfinite(self.work_period) and self.work_period > 0):
            raise ConfigError(f"work_period must be > 0, got {self.work_period}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.averaging not in AVERAGING:
            raise ConfigError(f"averaging must be one of {', '.join(AVERAGING)}, got '{self.averaging}'")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got '{self.mode}'")
        if not (math.isfinite(self.peak_factor) and self.peak_factor >= 1):
            raise ConfigError(f"peak_factor must be >= 1, got {self.peak_factor}")
        check_seed(self.seed)

    def weights_for(self, driver_class: str) -> CostWeights:
        return self.weights.get(driver_class, self.weights["default"])

    @property
    def demand_factor(self) -> float:
        return self.peak_factor if self.mode == "peak" else 1.0

    def with_overrides(self, **changes: Any) -> SimulationConfig:
        """Copy with non-None ``changes`` applied (None means "not given")."""
        changes = {name: value for name, value in changes.items() if value is not None}
        if not changes:
            return self
        names = {f.name for f in fields(self)}
        choice = self.choice
        if "model" in changes or "sensitivity" in changes:
            choice = _choice(changes.pop("model", choice.model), changes.pop("sensitivity", choice.sensitivity))
            changes["choice"] = choice
        for name in changes:
            if name not in names:
                raise ConfigError(f"unknown setting '{name}'")
        return replace(self, **changes)


def _positive_int(value: Any, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")


def _choice(model: str, sensitivity: float) -> ChoiceParams:
    try:
        return ChoiceParams(model, float(sensitivity))
    except (InputError, TypeError, ValueError) as e:
        raise ConfigError(f"choice: {e}") from e


def _weights(document: Mapping[str, Any]) -> Dict[str, CostWeights]:
    if not isinstance(document, Mapping):
        raise ConfigError("weights must be an object keyed by driver class")
    weights = dict(DEFAULT_WEIGHTS)
    for driver_class, values in document.items():
        if not isinstance(values, Mapping):
            raise ConfigError(f"weights.{driver_class} must be an object")
        unknown = set(values) - {"alpha", "beta", "gamma", "delta"}
        if unknown:
            raise ConfigError(f"unknown key 'weights.{driver_class}.{sorted(unknown)[0]}'")
        base = weights.get(driver_class, weights["default"])
        try:
            weights[driver_class] = CostWeights(
                float(values.get("alpha", base.alpha)),
                float(values.get("beta", base.beta)),
                float(values.get("gamma", base.gamma)),
                float(values.get("delta", base.delta)),
                driver_class,
            )
        except (InputError, TypeError, ValueError) as e:
            raise ConfigError(f"weights.{driver_class}: {e}") from e
    return weights


def config_from_mapping(document: Mapping[str, Any],
                        base: Optional[SimulationConfig] = None) -> SimulationConfig:
    """Overlay a parsed run-configuration document on ``base`` (defaults if None)."""
    base = base or SimulationConfig()
    if not isinstance(document, Mapping):
        raise ConfigError("run configuration must be a JSON object")
    for key in document:
        if key not in DOCUMENT_KEYS:
            raise ConfigError(f"unknown configuration key '{key}'")

    changes: Dict[str, Any] = {}
    if "choice" in document:
        choice = document["choice"]
        if not isinstance(choice, Mapping) or set(choice) - {"model", "sensitivity"}:
            raise ConfigError("choice must be an object with keys model, sensitivity")
        changes["choice"] = _choice(choice.get("model", base.choice.model),
                                    choice.get("sensitivity", base.choice.sensitivity))
    if "weights" in document:
        changes["weights"] = _weights(document["weights"])
    if "volume_delay" in document:
        params = document["volume_delay"]
        if not isinstance(params, Mapping) or set(params) - {"a", "b"}:
            raise ConfigError("volume_delay must be an object with keys a, b")
        try:
            changes["volume_delay"] = VolumeDelayParams(float(params.get("a", 0.15)), float(params.get("b", 4.0)))
        except (InputError, TypeError, ValueError) as e:
            raise ConfigError(f"volume_delay: {e}") from e
    if "cognition" in document:
        if document["cognition"] not in ("on", "off", True, False):
            raise ConfigError(f"cognition must be 'on' or 'off', got {document['cognition']!r}")
        changes["cognition"] = document["cognition"] in ("on", True)
    if "events" in document:
        if not isinstance(document["events"], list):
            raise ConfigError("events must be an array")
        changes["events"] = tuple(EnvironmentEvent.from_mapping(event) for event in document["events"])
    for key in ("k_routes", "max_iterations", "seed", "packets_per_od"):
        if key in document:
            changes[key] = document[key]
    for key in ("work_period", "epsilon", "peak_factor"):
        if key in document:
            value = document[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number, got {value!r}")
            changes[key] = float(value)
    for key in ("averaging", "mode", "reference_class"):
        if key in document:
            changes[key] = document[key]
    if "stop_on_convergence" in document:
        if not isinstance(document["stop_on_convergence"], bool):
            raise ConfigError("stop_on_convergence must be true or false")
        changes["stop_on_convergence"] = document["stop_on_convergence"]
    return replace(base, **changes)


def load_config(path: Union[str, Path], base: Optional[SimulationConfig] = None) -> SimulationConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration file {path}: {e.strerror}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"configuration file {path} is not valid JSON: {e}") from e
    return config_from_mapping(document, base)
