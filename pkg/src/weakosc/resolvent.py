"""Green's function of the undamped equation, the resolvent and derived kernels.

With u'' + (w^2 + q) u = g the Green's function G(t, s) solves the homogeneous
equation in t with G(s, s) = 0, G_t(s, s) = 1.  Its s-derivative solves the
same equation with data (-1, 0), so one four-channel integration from ``s``
yields G, G_t, G_s and G_st for every later t.  The resolvent of the damped
equation is R = E G with E(t, s) = A(s)/A(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate as sint

from . import kernels
from .coeffs import DampingFamily, residual_potential, tail_Q
from .conditions import L1, L3
from .errors import PreconditionError
from .integrate import run_kernel

KERNEL_CSV_HEADER = "t,s,G,R,K1,K2,K4,P1,P4"
FD_DISAGREEMENT_LIMIT = 1e-4


def _q_horizon(s: float, t_hint: float = 0.0) -> float:
    return max(t_hint, 1e3 * (abs(s) + 1.0))


def green_system(family: DampingFamily, omega: float, s: float, t_grid,
                 tol: float = 1e-11) -> np.ndarray:
    """Columns G, G_t, G_s, G_st at each point of ``t_grid`` (all >= s)."""
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if t.size == 0:
        return np.zeros((0, 4))
    if np.any(t < s) or np.any(np.diff(t) < 0):
        raise PreconditionError("t_grid must be sorted with every t >= s")
    if s < family.t0:
        raise PreconditionError(f"s={s} precedes t0={family.t0}")
    lead = t[0] > s
    times = np.concatenate([[s], t]) if lead else t
    if times[-1] == times[0]:
        out = np.zeros((t.size, 4))
        out[:, 1] = 1.0
        out[:, 2] = -1.0
        return out
    # repeated points break the dense-output walk; evaluate on unique times
    uniq, inv = np.unique(times, return_inverse=True)
    Y = run_kernel(kernels.MODE_GREEN, family, None, omega, np.array([0.0, 1.0, -1.0, 0.0]),
                   uniq, tol)
    Y = Y[inv]
    return Y[1:] if lead else Y


def green_direct(family: DampingFamily, omega: float, s: float, t_grid,
                 tol: float = 1e-11) -> np.ndarray:
    """G(t, s) on ``t_grid`` from the initial-value problem in t."""
    return green_system(family, omega, s, t_grid, tol)[:, 0]


def green_picard(family: DampingFamily, omega: float, s: float, t: float, iterations: int,
                 nodes: int | None = None) -> float:
    """Picard iterate of the Volterra equation for G, returned at ``t``.

    The integral operator is applied on a uniform Nystrom grid over [s, t]
    using the separable form of sin(w(t - tau)) and cumulative Simpson sums.
    """
    if iterations < 1:
        raise PreconditionError("iterations must be >= 1")
    if t < s:
        raise PreconditionError("need t >= s")
    if t == s:
        return 0.0
    period = 2.0 * math.pi / abs(omega)
    if nodes is None:
        nodes = max(4001, int(math.ceil(400.0 * (t - s) / period)) + 1)
    nodes += (nodes + 1) % 2
    tau = np.linspace(s, t, nodes)
    q = np.asarray(residual_potential(family, tau), dtype=float)
    ws = omega * (tau - s)
    sn, cs = np.sin(ws), np.cos(ws)
    g0 = sn / omega
    g = g0
    for _ in range(iterations):
        # sin(w(t-tau)) = sin(w(t-s))cos(w(tau-s)) - cos(w(t-s))sin(w(tau-s))
        ic = sint.cumulative_simpson(cs * q * g, x=tau, initial=0.0)
        is_ = sint.cumulative_simpson(sn * q * g, x=tau, initial=0.0)
        g = g0 - (sn * ic - cs * is_) / omega
    return float(g[-1])


def certify_gronwall(family: DampingFamily, omega: float, s: float, t_grid,
                     tol: float = 1e-11) -> float:
    """max |G(t, s)| * w * exp(-Q(s)/w) over the grid; the bound holds iff <= 1."""
    t = np.asarray(t_grid, dtype=float)
    G = green_direct(family, omega, s, t, tol)
    Q = tail_Q(family, s, _q_horizon(s, float(t[-1])))
    return float(np.max(np.abs(G)) * abs(omega) * math.exp(-Q / abs(omega)))


class ExpansionCheck(NamedTuple):
    actual: float
    bound: float

    @property
    def passed(self) -> bool:
        # integration error of G (tol ~1e-12) is the floor below which E is noise
        return abs(self.actual) <= self.bound + 1e-9

    @property
    def margin(self) -> float:
        return self.bound - abs(self.actual)


def first_order_integral(family: DampingFamily, omega: float, s: float, t: float) -> float:
    """Integral over [s, t] of sin(w(t - tau)) sin(w(tau - s)) q(tau) dtau."""
    if t <= s:
        return 0.0

    def qf(x):
        return residual_potential(family, x)

    # product to sum: 1/2 [cos(2 w tau - w(t+s)) - cos(w(t-s))]
    phase = omega * (t + s)
    span_cos, _ = sint.quad(qf, s, t, weight="cos", wvar=2.0 * omega, limit=500)
    span_sin, _ = sint.quad(qf, s, t, weight="sin", wvar=2.0 * omega, limit=500)
    plain, _ = sint.quad(qf, s, t, limit=500, epsabs=1e-15, epsrel=1e-12)
    osc = span_cos * math.cos(phase) + span_sin * math.sin(phase)
    return 0.5 * (osc - math.cos(omega * (t - s)) * plain)


def certify_expansion_error(family: DampingFamily, omega: float, s: float, t: float,
                            tol: float = 1e-12) -> ExpansionCheck:
    """Remainder of the first-order expansion of G against its Q-bound."""
    if t < s:
        raise PreconditionError("need t >= s")
    G = float(green_direct(family, omega, s, [t], tol)[0])
    w = abs(omega)
    actual = G - math.sin(omega * (t - s)) / omega + first_order_integral(family, omega, s, t) / omega ** 2
    Q = tail_Q(family, s, _q_horizon(s, t))
    bound = math.exp(Q / w) * Q * Q / (2.0 * w ** 3)
    return ExpansionCheck(actual, bound)


@dataclass(frozen=True)
class KernelSet:
    t: float
    s: float
    G: float
    G_t: float
    G_s: float
    R: float
    R_t: float
    R_s: float
    R_ts: float
    K1: float
    K2: float
    K4: float
    P1: float
    P4: float
    E: float
    K4_fd: float = math.nan
    fd_disagreement: float = math.nan

    @property
    def fd_ok(self) -> bool:
        return not (self.fd_disagreement > FD_DISAGREEMENT_LIMIT)

    def csv_row(self) -> str:
        vals = (self.t, self.s, self.G, self.R, self.K1, self.K2, self.K4, self.P1, self.P4)
        return ",".join(f"{v:.17g}" for v in vals)


def _assemble(family: DampingFamily, omega: float, s: float, t: np.ndarray,
              st: np.ndarray) -> dict[str, np.ndarray]:
    G, Gt, Gs, Gts = st[:, 0], st[:, 1], st[:, 2], st[:, 3]
    w2 = omega * omega
    ps = float(family.eval_p(s))
    dps = float(family.eval_dp(s))
    pt = family.eval_p(t)
    qs = float(residual_potential(family, s))
    E = np.exp(family.log_weight(s) - family.log_weight(t))
    Gss = -(w2 + qs) * G
    R = E * G
    R_s = E * (0.5 * ps * G + Gs)
    R_t = E * (-0.5 * pt * G + Gt)
    R_ts = E * (0.5 * ps * (-0.5 * pt * G + Gt) - 0.5 * pt * Gs + Gts)
    R_ss = E * (0.5 * ps * (0.5 * ps * G + Gs) + 0.5 * dps * G + 0.5 * ps * Gs + Gss)
    K1 = w2 * R - R_s
    K2 = w2 * R_t - R_ts
    K4 = w2 * w2 * R - 2.0 * w2 * R_s + R_ss
    tau = t - s
    return dict(G=G, G_t=Gt, G_s=Gs, R=R, R_t=R_t, R_s=R_s, R_ts=R_ts, K1=K1, K2=K2, K4=K4,
                P1=K1 - E * L1(tau, omega), P4=K4 - E * L3(tau, omega), E=E)


def _k1_at(family, omega, t, s, tol):
    st = green_system(family, omega, s, [t], tol)
    return float(_assemble(family, omega, s, np.array([t]), st)["K1"][0])


def kernels_at(family: DampingFamily, omega: float, t: float, s: float,
               fd_step: float | None = None, tol: float = 1e-11,
               fd_check: bool = True) -> KernelSet:
    """All kernels at one (t, s) pair.

    K4 uses the exact identity G_ss = -(w^2 + q(s)) G.  When ``fd_check`` is set
    and the stencil fits inside [t0, t], K4 is also formed as w^2 K1 - dK1/ds
    by Richardson-extrapolated central differences and the gap is recorded.
    """
    if not t >= s >= family.t0:
        raise PreconditionError(f"need t >= s >= t0, got t={t}, s={s}")
    st = green_system(family, omega, s, [t], tol)
    vals = {k: float(v[0]) for k, v in _assemble(family, omega, s, np.array([t]), st).items()}
    k4_fd = gap = math.nan
    h = 1e-4 * 2.0 * math.pi / abs(omega) if fd_step is None else fd_step
    if fd_check and s - h >= family.t0 and s + h <= t:
        k1 = {d: _k1_at(family, omega, t, s + d, tol) for d in (-h, -h / 2, h / 2, h)}
        d_h = (k1[h] - k1[-h]) / (2 * h)
        d_h2 = (k1[h / 2] - k1[-h / 2]) / h
        d_rich = d_h2 + (d_h2 - d_h) / 3.0
        k4_fd = omega * omega * vals["K1"] - d_rich
        gap = abs(d_h2 - d_h) / max(1.0, abs(d_rich))
    return KernelSet(t=t, s=s, K4_fd=k4_fd, fd_disagreement=gap, **vals)


def kernel_sweep(family: DampingFamily, omega: float, s_values: Sequence[float],
                 t_values: Sequence[float], tol: float = 1e-11) -> list[KernelSet]:
    """Kernels on the lattice of pairs with t >= s, one integration per s."""
    t_all = np.sort(np.asarray(t_values, dtype=float))
    out: list[KernelSet] = []
    for s in sorted(float(v) for v in s_values):
        t = t_all[t_all >= s]
        if t.size == 0:
            continue
        cols = _assemble(family, omega, s, t, green_system(family, omega, s, t, tol))
        for i, ti in enumerate(t):
            out.append(KernelSet(t=float(ti), s=s, **{k: float(v[i]) for k, v in cols.items()}))
    return out


def write_kernel_csv(rows: Sequence[KernelSet], path) -> Path:
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        fh.write(KERNEL_CSV_HEADER + "\n")
        for r in rows:
            fh.write(r.csv_row() + "\n")
    return path


@dataclass(frozen=True)
class L1Weights:
    w1: float
    w2: float
    w3: float
    p_t0: float

    def __iter__(self):
        return iter((self.w1, self.w2, self.w3))

    @property
    def margins(self) -> tuple[float, float, float]:
        return (2.0 - self.w1, 2.0 - self.w2, self.p_t0 - self.w3)

    @property
    def passed(self) -> bool:
        return min(self.margins) >= 0.0


def certify_L1_weights(family: DampingFamily, omega: float, t: float) -> L1Weights:
    """The three weighted integrals of E(t, s) over s in [t0, t]."""
    t0 = family.t0
    if t < t0:
        raise PreconditionError(f"t={t} precedes t0={t0}")
    p0 = float(family.eval_p(t0))
    if t == t0:
        return L1Weights(0.0, 0.0, 0.0, p0)
    lt = float(family.log_weight(t))

    def E(s):
        return math.exp(float(family.log_weight(s)) - lt)

    def quad(fn):
        edges = np.unique(np.concatenate([np.geomspace(max(t0, 1e-3) if t0 > 0 else 1e-3, t, 40), [t0, t]]))
        edges = edges[(edges >= t0) & (edges <= t)]
        return sum(sint.quad(fn, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)[0]
                   for a, b in zip(edges[:-1], edges[1:]))

    w1 = quad(lambda s: E(s) * float(family.eval_p(s)))
    w2 = float(family.eval_p(t)) * quad(E)
    w3 = quad(lambda s: E(s) * abs(residual_potential(family, s)))
    return L1Weights(w1, w2, w3, p0)


@dataclass(frozen=True)
class KernelBoundTrend:
    t: np.ndarray
    sup_K1: np.ndarray
    sup_K2: np.ndarray
    slope_K1: float
    slope_K2: float

    @property
    def bounded(self) -> bool:
        return self.slope_K1 < 0.05 and self.slope_K2 < 0.05


def kernel_bound_trend(family: DampingFamily, omega: float, horizon: float, n_s: int = 48,
                       n_t: int = 24, tol: float = 1e-9) -> KernelBoundTrend:
    """Running sup over s of |K1|/E and |K2|/E, with its log-log growth slope.

    The slope is fitted over the later half of the checkpoints; the kernels are
    considered uniformly bounded when both slopes stay below 0.05.
    """
    t0 = family.t0
    base = t0 + 2.0 * math.pi / abs(omega)
    t_chk = np.geomspace(max(base, 1.0), horizon, n_t)
    s_vals = np.concatenate([[t0], np.geomspace(max(t0, 1e-2) if t0 > 0 else 1e-2, horizon, n_s - 1)])
    sup1 = np.zeros(n_t)
    sup2 = np.zeros(n_t)
    period = 2.0 * math.pi / abs(omega)
    for s in s_vals:
        # dense sampling in t so the sup over oscillations is resolved
        t_dense = np.arange(s, horizon + period / 32, period / 32)
        t_dense = t_dense[t_dense <= horizon]
        if t_dense.size < 2:
            continue
        c = _assemble(family, omega, s, t_dense, green_system(family, omega, s, t_dense, tol))
        a1 = np.abs(c["K1"] / c["E"])
        a2 = np.abs(c["K2"] / c["E"])
        run1 = np.maximum.accumulate(a1)
        run2 = np.maximum.accumulate(a2)
        idx = np.searchsorted(t_dense, t_chk, side="right") - 1
        ok = idx >= 0
        sup1[ok] = np.maximum(sup1[ok], run1[idx[ok]])
        sup2[ok] = np.maximum(sup2[ok], run2[idx[ok]])
    half = n_t // 2
    lt = np.log(t_chk[half:])
    s1 = float(np.polyfit(lt, np.log(sup1[half:]), 1)[0])
    s2 = float(np.polyfit(lt, np.log(sup2[half:]), 1)[0])
    return KernelBoundTrend(t_chk, sup1, sup2, s1, s2)


def wronskian_deviation(family: DampingFamily, omega: float, s: float, span: float = 100.0,
                        samples: int = 2001, tol: float = 1e-12) -> float:
    """max |G G_st - G_s G_t - 1| on [s, s + span]."""
    t = np.linspace(s, s + span, samples)
    st = green_system(family, omega, s, t, tol)
    w = st[:, 0] * st[:, 3] - st[:, 2] * st[:, 1]
    return float(np.max(np.abs(w - 1.0)))
