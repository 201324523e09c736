"""Exponential filter cascade y1 = e * f, y2 = e * y1 with e(t) = exp(-w^2 t).

Three independent routes to the filters are provided so they can be checked
against each other: the ODE cascade carried by :func:`integrate_forced`,
direct quadrature of the convolutions, and the reconstruction of y2 from the
solution x through the kernel K3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .coeffs import ForcingSpec
from .errors import PreconditionError

METHODS = ("ode-cascade", "direct-quadrature", "k3-reconstruction")


def h_kernel(t, omega: float):
    """h(t) = t exp(-w^2 t), the self-convolution of exp(-w^2 t)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PreconditionError("h is defined for t >= 0")
    return t * np.exp(-omega * omega * t)


def h_prime(t, omega: float):
    w2 = omega * omega
    t = np.asarray(t, dtype=float)
    return (1.0 - w2 * t) * np.exp(-w2 * t)


def h_second(t, omega: float):
    w2 = omega * omega
    t = np.asarray(t, dtype=float)
    return (w2 * w2 * t - 2.0 * w2) * np.exp(-w2 * t)


@dataclass(frozen=True, eq=False)
class FilterOracleResult:
    times: np.ndarray
    values: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise PreconditionError(f"unknown method {self.method!r}")


def y_filters_quadrature(forcing: ForcingSpec, omega: float, t_grid
                         ) -> tuple[FilterOracleResult, FilterOracleResult]:
    """y1 and y2 by 3-point Gauss-Legendre on every grid interval, started at ``t_grid[0]``.

    y2 uses the kernel h, so y2(t) = integral of (t - s) e^{-w^2 (t-s)} f(s).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size < 2 or np.any(np.diff(t) <= 0):
        raise PreconditionError("t_grid must be strictly increasing with >= 2 points")
    if np.max(np.diff(t)) > 0.1 / (omega * omega) * (1 + 1e-12):
        raise PreconditionError("grid spacing must resolve the kernel scale 0.1/w^2")
    a, dt = t[:-1], np.diff(t)
    s_nodes = (a[:, None] + dt[:, None] * kernels.GL3_NODES[None, :]).ravel()
    wf = (dt[:, None] * kernels.GL3_WEIGHTS[None, :]).ravel() * forcing.eval_f(s_nodes)
    y1, y2 = kernels.exp_filters(t, s_nodes, wf, float(omega))
    return (FilterOracleResult(t, y1, "direct-quadrature"),
            FilterOracleResult(t, y2, "direct-quadrature"))


def cascade_filters(trajectory) -> tuple[FilterOracleResult, FilterOracleResult]:
    """The ODE-cascade filters carried by a trajectory."""
    return (FilterOracleResult(trajectory.times, trajectory.y1, "ode-cascade"),
            FilterOracleResult(trajectory.times, trajectory.y2, "ode-cascade"))


def y2_from_x(trajectory, family=None, omega: float | None = None, stride: int = 10
              ) -> FilterOracleResult:
    """y2 = x + integral of K3(t, s) x(s) ds, at every ``stride``-th grid point.

    Only valid for solutions started from rest; the grid must be uniform.
    """
    family = family if family is not None else trajectory.family
    omega = float(trajectory.omega if omega is None else omega)
    if trajectory.spec.xi0 != 0.0 or trajectory.spec.xi1 != 0.0:
        raise PreconditionError("K3 reconstruction requires zero initial conditions")
    t = trajectory.times
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]:
        raise PreconditionError("K3 reconstruction requires a uniform grid")
    idx = np.arange(0, t.size, stride, dtype=np.int64)
    vals = kernels.k3_reconstruct(t, trajectory.x, family.eval_p(t), family.eval_dp(t), omega, idx)
    return FilterOracleResult(t[idx], vals, "k3-reconstruction")
