"""Run configuration: one flat record, JSON-loadable, with named presets.

Thresholds left unset are derived from the analytic click matrix through
the security pipeline, so a bare preset is immediately runnable.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from . import detection, discrimination, security
from .detection import DetectorModel
from .optics import db_to_transmittance
from .protocol import ChannelModel, ProtocolParams


class ConfigError(ValueError):
    pass


_GRID_DEFAULT = tuple(float(x) for x in range(1, 12))


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical, protocol, and run parameters for the CLI and simulations."""

    alpha_sq: float = 1.0
    multiport_loss_db: float = 0.0
    receiver_loss_db: float = 0.0
    interferometer_loss_db: float = 0.0
    detector_efficiency: float = 1.0
    dark_rate_hz: float = 0.0
    gate_ns: float = 2.0
    detection_visibility: float = 1.0
    multiport_visibility: float = 1.0
    clock_hz: float = 100e6
    length: int = 1_000_000
    auth_threshold: float | None = None
    verify_threshold: float | None = None
    null_abort_fraction: float | None = None
    epsilon: float = 1e-5
    security_level: float = 1e-4
    sweep_grid: tuple[float, ...] = _GRID_DEFAULT
    seed: int = 12345
    trials: int = 100

    def __post_init__(self):
        checks = [
            ("alpha_sq", self.alpha_sq >= 0),
            ("multiport_loss_db", self.multiport_loss_db >= 0),
            ("receiver_loss_db", self.receiver_loss_db >= 0),
            ("interferometer_loss_db", self.interferometer_loss_db >= 0),
            ("detector_efficiency", 0.0 <= self.detector_efficiency <= 1.0),
            ("dark_rate_hz", self.dark_rate_hz >= 0),
            ("gate_ns", self.gate_ns > 0),
            ("detection_visibility", 0.0 <= self.detection_visibility <= 1.0),
            ("multiport_visibility", 0.0 <= self.multiport_visibility <= 1.0),
            ("clock_hz", self.clock_hz > 0),
            ("length", self.length >= 1),
            ("epsilon", self.epsilon >= 0),
            ("security_level", 0.0 < self.security_level < 1.0),
            ("sweep_grid", len(self.sweep_grid) > 0 and all(x >= 0 for x in self.sweep_grid)),
            ("trials", self.trials >= 0),
        ]
        for name, ok in checks:
            if not ok:
                raise ConfigError(f"invalid value for field '{name}': {getattr(self, name)!r}")
        if self.auth_threshold is not None or self.verify_threshold is not None:
            if self.auth_threshold is None or self.verify_threshold is None:
                raise ConfigError(
                    "fields 'auth_threshold' and 'verify_threshold' must be set together"
                )
            if not 0.0 <= self.auth_threshold < self.verify_threshold < 1.0:
                raise ConfigError(
                    "field 'auth_threshold' must satisfy "
                    "0 <= auth_threshold < verify_threshold < 1, got "
                    f"{self.auth_threshold} and {self.verify_threshold}"
                )
        if self.null_abort_fraction is not None and not 0.0 <= self.null_abort_fraction <= 1.0:
            raise ConfigError(
                f"invalid value for field 'null_abort_fraction': {self.null_abort_fraction!r}"
            )

    # -------------------------------------------------------------- derived

    @property
    def dark_click_prob(self) -> float:
        return self.dark_rate_hz * self.gate_ns * 1e-9

    def detector(self) -> DetectorModel:
        return DetectorModel(
            efficiency=self.detector_efficiency,
            dark_click_prob=self.dark_click_prob,
            visibility=self.detection_visibility,
        )

    def channel(self) -> ChannelModel:
        return ChannelModel(
            multiport_transmittance=db_to_transmittance(self.multiport_loss_db),
            receiver_transmittance=db_to_transmittance(self.receiver_loss_db),
            interferometer_transmittance=db_to_transmittance(self.interferometer_loss_db),
            multiport_visibility=self.multiport_visibility,
        )

    def receiver_intensity(self, alpha_sq: float | None = None) -> float:
        a2 = self.alpha_sq if alpha_sq is None else alpha_sq
        ch = self.channel()
        return a2 * ch.total_transmittance * (1.0 + ch.multiport_visibility) / 2.0

    def analytic_click_matrix(self):
        return detection.phase_click_matrix(self.receiver_intensity(), self.detector())

    def resolve_thresholds(self, cost_matrix=None) -> tuple[float, float]:
        """Configured thresholds, or equalizing ones derived from a matrix.

        Derivation uses ``cost_matrix`` when given (a measured matrix
        should govern the thresholds it will be tested against), else the
        analytic click matrix.
        """
        if self.auth_threshold is not None:
            return self.auth_threshold, self.verify_threshold
        entries = (
            cost_matrix.entries
            if isinstance(cost_matrix, security.CostMatrix)
            else cost_matrix
        )
        if entries is None:
            entries = self.analytic_click_matrix()
        dec = security.decompose(entries)
        bounds = security.bound_min_cost(
            dec, discrimination.min_error_probability(self.alpha_sq)
        )
        return security.choose_thresholds(dec.p_honest, bounds.g_lower)

    def protocol_params(self, cost_matrix=None) -> ProtocolParams:
        s_a, s_v = self.resolve_thresholds(cost_matrix)
        r = self.null_abort_fraction
        if r is None:
            r = self.dark_click_prob + 2.0 * self.epsilon
        return ProtocolParams(
            length=self.length,
            auth_threshold=s_a,
            verify_threshold=s_v,
            alpha_sq=self.alpha_sq,
            null_abort_fraction=r,
            epsilon=self.epsilon,
            channel=self.channel(),
            detector=self.detector(),
        )

    # -------------------------------------------------------------- (de)serialization

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["sweep_grid"] = list(self.sweep_grid)
        return d

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)


_FIELD_NAMES = {f.name for f in dataclasses.fields(ExperimentConfig)}
_INT_FIELDS = {"length", "seed", "trials"}


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"configuration must be a mapping, got {type(data).__name__}")
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown configuration field(s): {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key == "sweep_grid":
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"field 'sweep_grid' must be a list, got {value!r}")
            kwargs[key] = tuple(float(x) for x in value)
        elif key in _INT_FIELDS:
            if value != int(value):
                raise ConfigError(f"field '{key}' must be an integer, got {value!r}")
            kwargs[key] = int(value)
        elif key in ("auth_threshold", "verify_threshold", "null_abort_fraction"):
            kwargs[key] = None if value is None else float(value)
        else:
            try:
                kwargs[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"field '{key}' must be a number, got {value!r}") from None
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    """Read a JSON configuration file (flat keys, see ExperimentConfig)."""
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return config_from_dict(data)


# Named parameter sets. "paper-2014" is the tabletop demonstration the
# bundled reference matrix came from: itemized losses 7.7/5.1/9.1 dB,
# 40.5% efficient detectors, 320 dark counts per second in 2 ns gates,
# 80.9% receiver and 99.7% multiport visibility, 100 MHz clock.
PRESETS: dict[str, dict] = {
    "ideal": {},
    "paper-2014": {
        "alpha_sq": 1.0,
        "multiport_loss_db": 7.7,
        "receiver_loss_db": 5.1,
        "interferometer_loss_db": 9.1,
        "detector_efficiency": 0.405,
        "dark_rate_hz": 320.0,
        "gate_ns": 2.0,
        "detection_visibility": 0.809,
        "multiport_visibility": 0.997,
        "clock_hz": 100e6,
        "security_level": 1e-4,
    },
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return config_from_dict(PRESETS[name])
