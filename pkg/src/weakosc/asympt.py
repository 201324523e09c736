"""Envelope fitting of A(t) x(t), preservation classification and the converse check."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .conditions import (LimitEstimate, dyadic_windows, predicted_constants, w_channel,
                         window_sups)
from .errors import PreconditionError

FIT_CSV_HEADER = ["scenario", "window_lo", "window_hi", "c_sin", "c_cos", "amplitude", "phase",
                  "residual_rms"]
MIN_FIT_PERIODS = 10.0
AMPLITUDE_RTOL = 0.05
PHASE_ATOL = 0.05
TREND_FINAL_RATIO = 0.1
TREND_MIN_WINDOWS = 3


@dataclass(frozen=True)
class EnvelopeFit:
    window: tuple[float, float]
    c_sin: float
    c_cos: float
    residual_rms: float

    @property
    def amplitude(self) -> float:
        return math.hypot(self.c_sin, self.c_cos)

    @property
    def phase(self) -> float:
        """phi with c_sin sin(wt) + c_cos cos(wt) = amplitude sin(wt + phi)."""
        return math.atan2(self.c_cos, self.c_sin)

    def csv_row(self, scenario: str) -> list[str]:
        vals = (self.window[0], self.window[1], self.c_sin, self.c_cos, self.amplitude,
                self.phase, self.residual_rms)
        return [scenario] + [f"{v:.17g}" for v in vals]


def fit_sinusoid(times, values, omega: float, window: tuple[float, float]) -> EnvelopeFit:
    """Least-squares fit of ``values`` onto sin(wt), cos(wt) over the window."""
    lo, hi = float(window[0]), float(window[1])
    period = 2.0 * math.pi / abs(omega)
    if hi - lo < MIN_FIT_PERIODS * period * (1 - 1e-9):
        raise PreconditionError(f"window [{lo}, {hi}] spans fewer than {MIN_FIT_PERIODS:g} periods")
    t = np.asarray(times, dtype=float)
    if lo < t[0] - 1e-9 or hi > t[-1] + 1e-9:
        raise PreconditionError(f"window [{lo}, {hi}] outside data range [{t[0]}, {t[-1]}]")
    m = (t >= lo) & (t <= hi)
    tw = t[m]
    y = np.asarray(values, dtype=float)[m]
    basis = np.column_stack([np.sin(omega * tw), np.cos(omega * tw)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    return EnvelopeFit((lo, hi), float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid ** 2))))


def envelope_fit(trajectory, window: tuple[float, float]) -> EnvelopeFit:
    """Fit A(t) x(t) ~ c_sin sin(wt) + c_cos cos(wt) on the window."""
    return fit_sinusoid(trajectory.times, trajectory.A * trajectory.x, trajectory.omega, window)


def default_windows(trajectory) -> list[tuple[float, float]]:
    t_end = float(trajectory.times[-1])
    return [(t_end / 4.0, t_end / 2.0), (t_end / 2.0, t_end)]


def phase_gap(a: float, b: float) -> float:
    """Smallest absolute angle between two phases."""
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def fits_agree(f1: EnvelopeFit, f2: EnvelopeFit, floor: float = 1e-12) -> tuple[float, float]:
    """Relative amplitude change and phase gap between two fits (zeros if both vanish)."""
    if f1.amplitude <= floor and f2.amplitude <= floor:
        return 0.0, 0.0
    rel = abs(f1.amplitude - f2.amplitude) / max(f1.amplitude, floor)
    return rel, phase_gap(f1.phase, f2.phase)


@dataclass(frozen=True)
class PreservationReport:
    preserved: bool
    reasons: tuple[str, ...]
    fits: tuple[EnvelopeFit, EnvelopeFit]
    amplitude_change: float
    phase_drift: float
    trend_sups: np.ndarray
    trend_ok: bool
    predicted_c: tuple[float, float] | None
    observed_w_fit: EnvelopeFit | None

    @property
    def classification(self) -> str:
        return "preserved" if self.preserved else "not preserved"

    @property
    def w_amplitude_error(self) -> float:
        """Relative amplitude mismatch between fitted A W and the predicted sinusoid."""
        if self.predicted_c is None or self.observed_w_fit is None:
            return math.nan
        pred = math.hypot(*self.predicted_c)
        obs = self.observed_w_fit.amplitude
        if pred == 0.0:
            return 0.0 if obs <= 1e-12 else math.inf
        return abs(obs - pred) / pred


def decay_trend(times, values, windows) -> tuple[np.ndarray, bool]:
    """Window sups decrease across >= 3 windows and the last is below 0.1 of the first."""
    sups = window_sups(np.asarray(times), np.asarray(values), windows)
    if len(windows) < TREND_MIN_WINDOWS:
        return sups, False
    if np.all(sups <= 1e-300):
        return sups, True
    mono = bool(np.all(sups[1:] <= sups[:-1]))
    return sups, mono and sups[-1] < TREND_FINAL_RATIO * sups[0]


def preservation_check(trajectory, est: LimitEstimate,
                       windows: Sequence[tuple[float, float]] | None = None) -> PreservationReport:
    """Classify whether the forced solution keeps the unforced leading-order shape.

    A run whose weighted y2 integrals have not converged is classified as not
    preserved rather than rejected.
    """
    tr = trajectory
    period = 2.0 * math.pi / abs(tr.omega)
    wins = list(windows) if windows is not None else default_windows(tr)
    f1, f2 = envelope_fit(tr, wins[0]), envelope_fit(tr, wins[-1])
    amp, ph = fits_agree(f1, f2)
    dy = dyadic_windows(float(tr.times[0]), float(tr.times[-1]), period)
    sups, trend_ok = decay_trend(tr.times, tr.A * tr.y2, dy)
    reasons = []
    if not est.converged:
        reasons.append("weighted y2 integrals not converged")
    if not trend_ok:
        reasons.append("A|y2| window sups do not decay")
    if amp >= AMPLITUDE_RTOL:
        reasons.append(f"amplitude change {amp:.3g} between windows")
    if ph >= PHASE_ATOL:
        reasons.append(f"phase drift {ph:.3g} rad between windows")
    pred = obs = None
    if est.converged:
        pred = predicted_constants(est, tr.omega)
        obs = fit_sinusoid(tr.times, w_channel(tr), tr.omega, wins[-1])
    return PreservationReport(not reasons, tuple(reasons), (f1, f2), amp, ph, sups, trend_ok,
                              pred, obs)


@dataclass(frozen=True)
class ConverseResult:
    sin_limit_converged: bool
    cos_limit_converged: bool
    tail_increments: np.ndarray  # rows: windows; columns: sin, cos
    windows: tuple[tuple[float, float], ...]

    def __iter__(self):
        return iter((self.sin_limit_converged, self.cos_limit_converged, self.tail_increments))


def _increments(times, running, windows) -> np.ndarray:
    out = np.empty(len(windows))
    for k, (lo, hi) in enumerate(windows):
        m = (times >= lo) & (times <= hi)
        seg = running[m]
        out[k] = np.max(np.abs(seg - seg[0])) if seg.size else 0.0
    return out


def _shrinking(inc: np.ndarray, windows, scale: float) -> bool:
    if np.all(inc <= 1e-13 * max(1.0, scale)):
        return True
    if not np.all(inc[1:] <= inc[:-1] * 1.05):
        return False
    mids = np.array([0.5 * (lo + hi) for lo, hi in windows])
    slope = np.polyfit(np.log(mids), np.log(np.maximum(inc, 1e-300)), 1)[0]
    # windows double in length, so slope <= -1 means at least halving per doubling
    return bool(slope <= -1.0)


def converse_from_running(times, sin_running, cos_running, omega: float,
                          late_windows: int = 5) -> ConverseResult:
    """Converse check from running integrals sampled on ``times``."""
    t = np.asarray(times, dtype=float)
    period = 2.0 * math.pi / abs(omega)
    wins = dyadic_windows(float(t[0]), float(t[-1]), period)[-late_windows:]
    if len(wins) < 3:
        raise PreconditionError("horizon too short for the converse check")
    s_run = np.asarray(sin_running, dtype=float)
    c_run = np.asarray(cos_running, dtype=float)
    inc_s = _increments(t, s_run, wins)
    inc_c = _increments(t, c_run, wins)
    return ConverseResult(_shrinking(inc_s, wins, abs(s_run[-1])),
                          _shrinking(inc_c, wins, abs(c_run[-1])),
                          np.column_stack([inc_s, inc_c]), tuple(wins))


def converse_check(trajectory) -> ConverseResult:
    """Do the sin/cos weighted integrals of A y2 settle at dyadic checkpoints?"""
    tr = trajectory
    return converse_from_running(tr.times, tr.Is_run, tr.Ic_run, tr.omega)


def write_fits_csv(rows: Sequence[tuple[str, EnvelopeFit]], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(FIT_CSV_HEADER)
        for scenario, fit in rows:
            wr.writerow(fit.csv_row(scenario))
    return path
