"""Time integration of the forced oscillator and its augmented channels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .coeffs import DampingFamily, ForcingSpec
from .errors import IntegrationError, OverflowSentinel, PreconditionError

TOL_MIN = 1e-13
TOL_MAX = 1e-6
MAX_STEPS = 50_000_000
MIN_SAMPLES_PER_PERIOD = 40

CSV_HEADER = "t,x,dx,y1,y2,logA,U1,V1,U2,V2"


@dataclass(frozen=True)
class SystemSpec:
    omega: float
    xi0: float = 0.0
    xi1: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if self.omega == 0 or not math.isfinite(self.omega):
            raise PreconditionError("omega must be a finite non-zero number")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / abs(self.omega)


@dataclass(frozen=True)
class Grid:
    t_start: float
    t_end: float
    output_points: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise PreconditionError("grid needs t_end > t_start")
        if self.output_points < 2:
            raise PreconditionError("grid needs at least two output points")

    @classmethod
    def per_period(cls, t_start: float, t_end: float, omega: float, samples: int = 64) -> "Grid":
        """Uniform grid with at least ``samples`` points per oscillation period."""
        period = 2.0 * math.pi / abs(omega)
        n = int(math.ceil((t_end - t_start) / period * samples)) + 1
        return cls(t_start, t_end, max(n, 2))

    @classmethod
    def spacing(cls, t_start: float, t_end: float, dt: float) -> "Grid":
        n = int(math.ceil((t_end - t_start) / dt - 1e-9)) + 1
        return cls(t_start, t_end, max(n, 2))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.output_points)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.output_points - 1)

    def check_resolution(self, omega: float) -> None:
        limit = 2.0 * math.pi / abs(omega) / MIN_SAMPLES_PER_PERIOD
        if self.dt > limit * (1 + 1e-12):
            raise PreconditionError(
                f"output spacing {self.dt:.4g} exceeds period/{MIN_SAMPLES_PER_PERIOD} = {limit:.4g}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Output of :func:`integrate_forced`; every channel shares ``times``.

    ``U*``/``V*`` are the normalised weighted integrals (1/A) * int cos/sin(ws) A y ds
    for y = y1, y2 and f; ``Ic_run``/``Is_run`` are the raw weighted integrals of y2.
    """

    times: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    logA: np.ndarray
    U1: np.ndarray
    V1: np.ndarray
    U2: np.ndarray
    V2: np.ndarray
    Uf: np.ndarray
    Vf: np.ndarray
    Ic_run: np.ndarray
    Is_run: np.ndarray
    spec: SystemSpec
    family: DampingFamily
    forcing: ForcingSpec
    tol: float

    @property
    def omega(self) -> float:
        return self.spec.omega

    @property
    def A(self) -> np.ndarray:
        return np.exp(self.logA)

    def __len__(self) -> int:
        return self.times.shape[0]

    def to_csv(self, path) -> Path:
        path = Path(path)
        cols = np.column_stack([self.times, self.x, self.dx, self.y1, self.y2, self.logA,
                                self.U1, self.V1, self.U2, self.V2])
        with path.open("w", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in cols:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return path


def _check_tol(tol: float) -> None:
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise PreconditionError(f"tol={tol} outside [{TOL_MIN}, {TOL_MAX}]")


def _check_start(spec: SystemSpec, family: DampingFamily, grid: Grid) -> None:
    for name, val in (("system", spec.t0), ("grid", grid.t_start)):
        if abs(val - family.t0) > 1e-12 * max(1.0, abs(family.t0)):
            raise PreconditionError(f"{name} start {val} differs from family t0={family.t0}")


def run_kernel(mode: int, family: DampingFamily, forcing: ForcingSpec | None, omega: float,
               y0: np.ndarray, times: np.ndarray, tol: float, loga_index: int = -1) -> np.ndarray:
    """Call the Dormand-Prince kernel and translate its status into exceptions."""
    if forcing is None:
        fkind, frc = kernels.FORCE_ZERO, np.array([0.0, 0.0, 0.0, omega])
    else:
        fkind, frc = forcing.kind, np.asarray(forcing.params, dtype=float)
    period = 2.0 * math.pi / abs(omega)
    h0 = min(1e-3 * period, float(times[-1] - times[0]))
    Y, status, t_last, _, _ = kernels.dopri5(
        mode, family.params, fkind, frc, float(omega), np.asarray(y0, dtype=float),
        np.ascontiguousarray(times, dtype=float), tol, tol, h0, MAX_STEPS, loga_index)
    if status == kernels.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow (stiff or singular coefficient)", t_last)
    if status == kernels.STATUS_MAX_STEPS:
        raise IntegrationError("step budget exhausted", t_last)
    if status == kernels.STATUS_OVERFLOW:
        raise OverflowSentinel(f"logA exceeded {kernels.LOGA_LIMIT:g}", t_last)
    return Y


def integrate_forced(spec: SystemSpec, family: DampingFamily, forcing: ForcingSpec, grid: Grid,
                     tol: float = 1e-10) -> Trajectory:
    """Integrate x'' + p x' + w^2 x = f together with the filter and weighted-integral channels."""
    _check_tol(tol)
    _check_start(spec, family, grid)
    grid.check_resolution(spec.omega)
    y0 = np.zeros(kernels.N_FORCED)
    y0[kernels.IX] = spec.xi0
    y0[kernels.IDX] = spec.xi1
    times = grid.times
    Y = run_kernel(kernels.MODE_FORCED, family, forcing, spec.omega, y0, times, tol,
                   loga_index=kernels.ILOGA)
    cols = [np.ascontiguousarray(Y[:, k]) for k in range(kernels.N_FORCED)]
    return Trajectory(times, *cols, spec=spec, family=family, forcing=forcing, tol=tol)


def integrate_undamped(spec: SystemSpec, family: DampingFamily, forcing: ForcingSpec, grid: Grid,
                       tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate u'' + (w^2 + q) u = f A with logA carried alongside.

    Returns ``(u, du, logA)`` on the grid.
    """
    _check_tol(tol)
    _check_start(spec, family, grid)
    p0 = float(family.eval_p(spec.t0))
    # x = rho u and x' = rho (u' - p u / 2) at t0, where rho(t0) = 1
    y0 = np.array([spec.xi0, spec.xi1 + 0.5 * p0 * spec.xi0, 0.0])
    Y = run_kernel(kernels.MODE_UNDAMPED, family, forcing, spec.omega, y0, grid.times, tol,
                   loga_index=2)
    return Y[:, 0].copy(), Y[:, 1].copy(), Y[:, 2].copy()


def integrate_undamped_crosscheck(spec: SystemSpec, family: DampingFamily, forcing: ForcingSpec,
                                  grid: Grid, tol: float = 1e-10,
                                  reference: Trajectory | None = None) -> float:
    """Max discrepancy between rho*u from the transformed equation and x from the forced one.

    The forced run uses ``tol/100`` (floored at the minimum tolerance) unless a
    reference trajectory on the same grid is supplied.
    """
    u, _, logA = integrate_undamped(spec, family, forcing, grid, tol)
    if reference is None:
        reference = integrate_forced(spec, family, forcing, grid, max(tol / 100.0, TOL_MIN))
    x_tilde = np.exp(-logA) * u
    return float(np.max(np.abs(x_tilde - reference.x)))
