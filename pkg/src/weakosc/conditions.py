"""Leading-order kernels, oscillation-matrix algebra, limit estimates and verdicts."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import PreconditionError

VERDICT_CSV_HEADER = ["scenario", "statement", "result", "evidence_json"]
STATEMENTS = ("A", "B", "C", "D", "S", "T")


# --------------------------------------------------------------------------
# leading-order kernels, functions of tau = t - s
# --------------------------------------------------------------------------

def L1(tau, omega: float):
    wt = omega * np.asarray(tau, dtype=float)
    return omega * np.sin(wt) + np.cos(wt)


def L2(tau, omega: float):
    wt = omega * np.asarray(tau, dtype=float)
    return omega * omega * np.cos(wt) - omega * np.sin(wt)


def L3(tau, omega: float):
    wt = omega * np.asarray(tau, dtype=float)
    return (omega ** 3 - omega) * np.sin(wt) + 2.0 * omega * omega * np.cos(wt)


def F(tau, omega: float):
    """Antiderivative of L1 in s: dF/ds = L1 when tau = t - s."""
    wt = omega * np.asarray(tau, dtype=float)
    return np.cos(wt) - np.sin(wt) / omega


@dataclass(frozen=True)
class LeadingKernels:
    omega: float

    def L1(self, tau):
        return L1(tau, self.omega)

    def L2(self, tau):
        return L2(tau, self.omega)

    def L3(self, tau):
        return L3(tau, self.omega)

    def F(self, tau):
        return F(tau, self.omega)


# --------------------------------------------------------------------------
# algebra
# --------------------------------------------------------------------------

def oscillation_matrix(omega: float, t: float) -> tuple[np.ndarray, float]:
    """Matrix mapping (U, V) to the two leading-kernel integrals, and its determinant."""
    w = omega
    sn, cs = math.sin(w * t), math.cos(w * t)
    M = np.array([[w * sn + cs, sn - w * cs],
                  [w * w * cs - w * sn, w * w * sn + w * cs]])
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return M, float(det)


def forcing_transform_matrix(omega: float) -> np.ndarray:
    if omega == 0:
        raise PreconditionError("omega must be non-zero")
    return np.array([[omega * omega, omega], [-omega, omega * omega]])


def forcing_transform_det(omega: float) -> float:
    """Determinant of the map between f-weighted and y1-weighted integrals."""
    M = forcing_transform_matrix(omega)
    return float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def c_coefficients(omega: float, t):
    w = omega
    wt = w * np.asarray(t, dtype=float)
    a = w ** 3 - w
    b = 2.0 * w * w
    C1 = a * np.sin(wt) + b * np.cos(wt)
    C2 = -a * np.cos(wt) + b * np.sin(wt)
    if np.ndim(C1) == 0:
        return float(C1), float(C2)
    return C1, C2


# --------------------------------------------------------------------------
# limits of the weighted y2 integrals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitEstimate:
    Ic: float
    Is: float
    tail_bound: float
    converged: bool
    abs_tail: float = math.nan  # last-decade share of the integral of A|y2|, evidence only


def _trapezoid(y, x) -> float:
    return float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))


def estimate_limits(trajectory) -> LimitEstimate:
    """Final running values of the cos/sin weighted y2 integrals.

    The tail bound is the largest excursion of either running integral from its
    final value over the last half of the run.  For integrands that oscillate
    with a decaying envelope this tracks the remaining tail; for a plateauing
    envelope it grows with the horizon.
    """
    t = trajectory.times
    ic, is_ = trajectory.Ic_run, trajectory.Is_run
    Ic, Is = float(ic[-1]), float(is_[-1])
    late = t >= t[0] + 0.5 * (t[-1] - t[0])
    tail = float(max(np.max(np.abs(ic[late] - Ic)), np.max(np.abs(is_[late] - Is))))
    converged = tail < 0.01 * max(abs(Ic), abs(Is), 1.0)
    ay2 = np.abs(trajectory.A * trajectory.y2)
    total = _trapezoid(ay2, t)
    dec = t >= max(t[0], t[-1] / 10.0)
    last = _trapezoid(ay2[dec], t[dec])
    share = last / total if total > 0 else 0.0
    return LimitEstimate(Ic, Is, tail, bool(converged), share)


def predicted_constants(est: LimitEstimate, omega: float) -> tuple[float, float]:
    """Coefficients (c1, c2) of the limiting sinusoid c1 sin(wt) + c2 cos(wt) of A W."""
    if not est.converged:
        raise PreconditionError("limit estimate has not converged")
    a = omega ** 3 - omega
    b = 2.0 * omega * omega
    return a * est.Ic + b * est.Is, b * est.Ic - a * est.Is


def w_channel(trajectory) -> np.ndarray:
    """A(t) W(t) assembled from the weighted y2 channels."""
    C1, C2 = c_coefficients(trajectory.omega, trajectory.times)
    return C1 * trajectory.Ic_run + C2 * trajectory.Is_run


def w_direct(trajectory, idx: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """A(t) W(t) by Simpson quadrature of L3(t - s) A(s) y2(s) at grid indices ``idx``.

    Requires a uniform grid.  Returns ``(idx, values)``.
    """
    t = trajectory.times
    if idx is None:
        idx = np.arange(0, t.size, 10)
    idx = np.asarray(idx, dtype=np.int64)
    ay2 = trajectory.A * trajectory.y2
    return idx, kernels.l3_quadrature(t, ay2, float(trajectory.omega), idx)


# --------------------------------------------------------------------------
# window decay tests and verdicts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VerdictThresholds:
    conv_ratio: float = 1e-3   # final sup below this fraction of the first: holds
    div_ratio: float = 0.5     # final sup above this fraction of the first: candidate fail
    hold_slope: float = -0.2   # log-log decay slope at or below this: holds
    fail_slope: float = -0.05  # slope at or above this (with div_ratio): fails
    monotone_slack: float = 0.05
    min_windows: int = 3
    zero_floor: float = 1e-12
    min_periods: float = 20.0
    settle_periods: float = 2.0


def dyadic_windows(t_start: float, t_end: float, period: float,
                   settle_periods: float = 2.0) -> list[tuple[float, float]]:
    """Windows [T/2, T] halving back from ``t_end``, earliest first.

    Windows starting before ``t_start + settle_periods * period`` are dropped.
    """
    lo_limit = t_start + settle_periods * period
    out = []
    hi = t_end
    while hi / 2.0 >= lo_limit and hi / 2.0 > 0:
        out.append((hi / 2.0, hi))
        hi /= 2.0
    return out[::-1]


def window_sups(times: np.ndarray, values: np.ndarray, windows) -> np.ndarray:
    av = np.abs(values)
    return np.array([float(np.max(av[(times >= lo) & (times <= hi)], initial=0.0))
                     for lo, hi in windows])


def decay_test(times: np.ndarray, values: np.ndarray, windows,
               thr: VerdictThresholds) -> tuple[str, dict[str, float]]:
    """Three-valued decay verdict from the window sups of |values|."""
    if len(windows) < thr.min_windows:
        return "inconclusive", {"windows": float(len(windows))}
    sups = window_sups(times, values, windows)
    first, final = float(sups[0]), float(sups[-1])
    ev = {"windows": float(len(windows)), "first_sup": first, "final_sup": final}
    if np.all(sups <= thr.zero_floor):
        ev["slope"] = 0.0
        return "holds", ev
    mids = np.array([0.5 * (lo + hi) for lo, hi in windows])
    safe = np.maximum(sups, 1e-300)
    slope = float(np.polyfit(np.log(mids), np.log(safe), 1)[0])
    monotone = bool(np.all(sups[1:] <= sups[:-1] * (1.0 + thr.monotone_slack)))
    ev["slope"] = slope
    ev["monotone"] = float(monotone)
    if monotone and (slope <= thr.hold_slope or final < thr.conv_ratio * first):
        return "holds", ev
    if slope >= thr.fail_slope and final > thr.div_ratio * first:
        return "fails", ev
    return "inconclusive", ev


def _combine(results: Sequence[str]) -> str:
    if "fails" in results:
        return "fails"
    if all(r == "holds" for r in results):
        return "holds"
    return "inconclusive"


@dataclass(frozen=True)
class ConditionVerdict:
    statement: str
    result: str
    evidence: dict = field(default_factory=dict)

    def evidence_json(self) -> str:
        return json.dumps(self.evidence, sort_keys=True, separators=(",", ":"))


def statement_channels(trajectory) -> dict[str, dict[str, np.ndarray]]:
    """Channels whose decay each statement asserts."""
    tr = trajectory
    w = tr.omega
    sn, cs = np.sin(w * tr.times), np.cos(w * tr.times)
    # leading-kernel integrals of y1 through the oscillation matrix
    I1 = (w * sn + cs) * tr.U1 + (sn - w * cs) * tr.V1
    I2 = (w * w * cs - w * sn) * tr.U1 + (w * w * sn + w * cs) * tr.V1
    xd = {"x": tr.x, "dx": tr.dx}
    return {
        "A": {"y1": tr.y1, "I1": I1, "I2": I2},
        "B": xd,
        "C": {"y1": tr.y1, "U1": tr.U1, "V1": tr.V1},
        "D": xd,
        "S": {"U1": tr.U1, "V1": tr.V1},
        "T": {"Uf": tr.Uf, "Vf": tr.Vf},
    }


def statement_verdicts(trajectory, thresholds: VerdictThresholds | None = None) -> list[ConditionVerdict]:
    thr = thresholds or VerdictThresholds()
    tr = trajectory
    period = 2.0 * math.pi / abs(tr.omega)
    t0, t_end = float(tr.times[0]), float(tr.times[-1])
    windows = dyadic_windows(t0, t_end, period, thr.settle_periods)
    short = (t_end - t0) < thr.min_periods * period
    out = []
    for name, chans in statement_channels(tr).items():
        if short:
            out.append(ConditionVerdict(name, "inconclusive", {"periods": (t_end - t0) / period}))
            continue
        results, ev = [], {}
        for cname, vals in chans.items():
            r, e = decay_test(tr.times, vals, windows, thr)
            results.append(r)
            for k, v in e.items():
                ev[f"{cname}.{k}"] = v
            ev[f"{cname}.result"] = r
        out.append(ConditionVerdict(name, _combine(results), ev))
    return out


EQUIVALENT_PAIRS = (("A", "B"), ("C", "D"), ("S", "T"))


def contradictions(verdicts: Sequence[ConditionVerdict]) -> list[tuple[str, str]]:
    """Equivalent statement pairs that received opposite definite verdicts."""
    by = {v.statement: v.result for v in verdicts}
    bad = []
    for a, b in EQUIVALENT_PAIRS:
        if {by.get(a), by.get(b)} == {"holds", "fails"}:
            bad.append((a, b))
    return bad


def write_verdicts_csv(rows: Sequence[tuple[str, ConditionVerdict]], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(VERDICT_CSV_HEADER)
        for scenario, v in rows:
            wr.writerow([scenario, v.statement, v.result, v.evidence_json()])
    return path
