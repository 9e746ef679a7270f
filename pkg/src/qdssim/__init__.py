"""Simulator and security analyzer for a measure-and-store signature
scheme built on phase-encoded weak coherent pulses.

Submodules: ``optics`` (amplitude algebra), ``detection`` (threshold
detectors), ``discrimination`` (four-state limits), ``protocol`` (the
two-stage exchange), ``adversary`` (cheating parties), ``security``
(finite-size bounds), ``config`` (presets and JSON configs), ``cli``.
"""

from . import adversary, cli, config, detection, discrimination, optics, protocol, security
from .config import ExperimentConfig, preset
from .detection import DetectorModel, measurement_rates
from .discrimination import min_error_probability
from .protocol import ChannelModel, Outcome, ProtocolParams, run_honest_exchange
from .security import CostMatrix, NoProvableSecurityError, SecurityReport, analyze

__version__ = "0.1.0"

__all__ = [
    "adversary",
    "cli",
    "config",
    "detection",
    "discrimination",
    "optics",
    "protocol",
    "security",
    "ExperimentConfig",
    "preset",
    "DetectorModel",
    "measurement_rates",
    "min_error_probability",
    "ChannelModel",
    "Outcome",
    "ProtocolParams",
    "run_honest_exchange",
    "CostMatrix",
    "NoProvableSecurityError",
    "SecurityReport",
    "analyze",
    "__version__",
]
