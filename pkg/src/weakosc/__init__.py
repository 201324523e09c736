"""Numerical laboratory for weakly damped forced oscillators x'' + p x' + w^2 x = f."""

from ._accel import BACKEND
from .coeffs import (DampingFamily, ForcingSpec, bessel_family, constant_family, parse_family,
                     parse_forcing, power_family, residual_potential, tail_Q, validate_hypotheses,
                     weight_logA)
from .errors import (ConfigError, DomainError, IntegrationError, OverflowSentinel,
                     PreconditionError, TailDivergenceError, WeakOscError)
from .integrate import Grid, SystemSpec, Trajectory, integrate_forced, integrate_undamped

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DampingFamily",
    "DomainError",
    "ForcingSpec",
    "Grid",
    "IntegrationError",
    "OverflowSentinel",
    "PreconditionError",
    "SystemSpec",
    "TailDivergenceError",
    "Trajectory",
    "WeakOscError",
    "bessel_family",
    "constant_family",
    "integrate_forced",
    "integrate_undamped",
    "parse_family",
    "parse_forcing",
    "power_family",
    "residual_potential",
    "tail_Q",
    "validate_hypotheses",
    "weight_logA",
]
