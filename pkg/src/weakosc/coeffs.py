"""Damping families, forcing functions, the envelope weight and hypothesis checks.

The damping coefficient always has the parametric form

    p(t) = alpha * (t + shift)**(-beta) + const,

which covers the power-law family ``alpha/(1+t)**beta``, the Bessel damping
``1/t`` on ``[1, inf)`` and constant degenerate families used in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import kernels
from .errors import DomainError, PreconditionError, TailDivergenceError

# divergence heuristic on the last decade [H/10, H] of an improper integral
DIVERGENT_SHARE = 0.20
CONVERGENT_SHARE = 0.01


@dataclass(frozen=True)
class DampingFamily:
    alpha: float
    beta: float
    shift: float = 1.0
    const: float = 0.0
    t0: float = 0.0
    descriptor: str = ""

    def __post_init__(self):
        if self.t0 + self.shift <= 0 and self.alpha != 0:
            raise DomainError(f"p is singular at t0={self.t0} (shift={self.shift})")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.shift, self.const], dtype=float)

    def eval_p(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha * (t + self.shift) ** (-self.beta) + self.const

    def eval_dp(self, t):
        t = np.asarray(t, dtype=float)
        return -self.alpha * self.beta * (t + self.shift) ** (-self.beta - 1.0)

    def eval_d2p(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha * self.beta * (self.beta + 1.0) * (t + self.shift) ** (-self.beta - 2.0)

    def primitive(self, t):
        """Closed form of the integral of p from t0 to t."""
        t = np.asarray(t, dtype=float)
        a, b, c = self.alpha, self.beta, self.shift
        if b == 1.0:
            core = a * (np.log(t + c) - math.log(self.t0 + c))
        else:
            core = a * ((t + c) ** (1.0 - b) - (self.t0 + c) ** (1.0 - b)) / (1.0 - b)
        return core + self.const * (t - self.t0)

    def log_weight(self, t):
        """logA(t) = half the integral of p from t0, in closed form."""
        return 0.5 * self.primitive(t)


def power_family(alpha: float = 1.0, beta: float = 1.0, shift: float = 1.0, t0: float = 0.0) -> DampingFamily:
    return DampingFamily(alpha, beta, shift, 0.0, t0, f"power:a={alpha:g},b={beta:g}")


def bessel_family() -> DampingFamily:
    """p(t) = 1/t, started at t0 = 1 to avoid the singularity at the origin."""
    return DampingFamily(1.0, 1.0, 0.0, 0.0, 1.0, "bessel")


def constant_family(c: float = 0.0, t0: float = 0.0) -> DampingFamily:
    return DampingFamily(0.0, 1.0, 1.0, c, t0, f"const:c={c:g}")


@dataclass(frozen=True)
class ForcingSpec:
    kind: int
    params: np.ndarray = field(repr=False)
    descriptor: str = "zero"

    def eval_f(self, t):
        t = np.asarray(t, dtype=float)
        c, g, rate, w = self.params
        if self.kind == kernels.FORCE_ZERO:
            return np.zeros_like(t)
        if self.kind == kernels.FORCE_POWER:
            return c * (1.0 + t) ** (-g)
        if self.kind == kernels.FORCE_RESONANT:
            env = (1.0 + t) ** (-g)
            return c * (-w * np.sin(w * t) * env - g * np.cos(w * t) * env / (1.0 + t)
                        + w * w * np.cos(w * t) * env)
        if self.kind == kernels.FORCE_EXP:
            return c * np.exp(-rate * t)
        if self.kind == kernels.FORCE_CONST:
            return np.full_like(t, c)
        raise DomainError(f"unknown forcing kind {self.kind}")

    @property
    def is_zero(self) -> bool:
        return self.kind == kernels.FORCE_ZERO or self.params[0] == 0.0

    def analytic_y1(self, t, t0: float):
        """Closed-form first filter started from zero at ``t0``, or None."""
        t = np.asarray(t, dtype=float)
        c, g, rate, w = self.params
        w2 = w * w
        decay = np.exp(-w2 * (t - t0))
        if self.kind == kernels.FORCE_ZERO:
            return np.zeros_like(t)
        if self.kind == kernels.FORCE_CONST:
            return c * (1.0 - decay) / w2
        if self.kind == kernels.FORCE_EXP:
            if rate == w2:
                return c * (t - t0) * np.exp(-w2 * t)
            return c * (np.exp(-rate * t) - np.exp(-rate * t0) * decay) / (w2 - rate)
        if self.kind == kernels.FORCE_RESONANT:
            # f = y* ' + w^2 y* exactly, so y1 = y* minus its launch transient
            star = c * np.cos(w * t) * (1.0 + t) ** (-g)
            star0 = c * math.cos(w * t0) * (1.0 + t0) ** (-g)
            return star - star0 * decay
        return None


def _descriptor_args(desc: str) -> tuple[str, dict[str, float]]:
    name, _, rest = desc.strip().partition(":")
    args: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise DomainError(f"descriptor {desc!r}: expected key=value, got {item!r}")
        try:
            args[key.strip()] = float(val)
        except ValueError:
            raise DomainError(f"descriptor {desc!r}: {key.strip()} is not a number") from None
    return name.strip().lower(), args


def _take(args: dict[str, float], desc: str, **defaults: float) -> list[float]:
    unknown = set(args) - set(defaults)
    if unknown:
        raise DomainError(f"descriptor {desc!r}: unknown parameter(s) {sorted(unknown)}")
    return [args.get(k, v) for k, v in defaults.items()]


def parse_family(desc: str) -> DampingFamily:
    """Build a damping family from ``"power:a=1,b=1"``, ``"bessel"`` or ``"const:c=0.5"``."""
    name, args = _descriptor_args(desc)
    if name == "bessel":
        _take(args, desc)
        return bessel_family()
    if name == "power":
        a, b, shift, t0 = _take(args, desc, a=1.0, b=1.0, shift=1.0, t0=0.0)
        fam = DampingFamily(a, b, shift, 0.0, t0, desc.strip())
        return fam
    if name == "const":
        c, t0 = _take(args, desc, c=0.0, t0=0.0)
        return DampingFamily(0.0, 1.0, 1.0, c, t0, desc.strip())
    raise DomainError(f"unknown damping family {desc!r}")


def parse_forcing(desc: str | None, omega: float) -> ForcingSpec:
    """Build a forcing from ``"zero"``, ``"powerdecay:g=2"``, ``"resonant:g=0.5"``,
    ``"exp:rate=1"`` (rate defaults to omega^2) or ``"const:c=1"``."""
    if desc is None or not desc.strip():
        desc = "zero"
    name, args = _descriptor_args(desc)
    w = float(omega)
    if name == "zero":
        _take(args, desc)
        return ForcingSpec(kernels.FORCE_ZERO, np.array([0.0, 0.0, 0.0, w]), "zero")
    if name == "powerdecay":
        g, c = _take(args, desc, g=2.0, c=1.0)
        return ForcingSpec(kernels.FORCE_POWER, np.array([c, g, 0.0, w]), desc.strip())
    if name == "resonant":
        g, c = _take(args, desc, g=0.5, c=1.0)
        return ForcingSpec(kernels.FORCE_RESONANT, np.array([c, g, 0.0, w]), desc.strip())
    if name == "exp":
        rate, c = _take(args, desc, rate=w * w, c=1.0)
        return ForcingSpec(kernels.FORCE_EXP, np.array([c, 0.0, rate, w]), desc.strip())
    if name == "const":
        (c,) = _take(args, desc, c=1.0)
        return ForcingSpec(kernels.FORCE_CONST, np.array([c, 0.0, 0.0, w]), desc.strip())
    raise DomainError(f"unknown forcing {desc!r}")


def zero_forcing(omega: float) -> ForcingSpec:
    return parse_forcing("zero", omega)


# --------------------------------------------------------------------------
# residual potential and the envelope weight
# --------------------------------------------------------------------------

def residual_potential(family: DampingFamily, t):
    """q(t) = -p(t)^2/4 - p'(t)/2, the potential left after removing damping."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < family.t0):
        raise DomainError(f"t={t} precedes the family start t0={family.t0}")
    p = family.eval_p(ta)
    q = -0.25 * p * p - 0.5 * family.eval_dp(ta)
    return float(q) if q.ndim == 0 else q


@dataclass(frozen=True)
class WeightState:
    times: np.ndarray
    logA: np.ndarray

    @property
    def A(self) -> np.ndarray:
        return np.exp(self.logA)

    @property
    def rho(self) -> np.ndarray:
        return np.exp(-self.logA)


_GL5_X, _GL5_W = np.polynomial.legendre.leggauss(5)


def weight_logA(family: DampingFamily, grid) -> WeightState:
    """Cumulative 5-point Gauss-Legendre quadrature of p/2 along the grid."""
    t = np.asarray(getattr(grid, "times", grid), dtype=float)
    if abs(t[0] - family.t0) > 1e-12 * max(1.0, abs(family.t0)):
        raise PreconditionError(f"grid starts at {t[0]}, family at t0={family.t0}")
    a, b = t[:-1], t[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * _GL5_X[None, :]
    pieces = half * (family.eval_p(nodes) @ _GL5_W)
    logA = np.concatenate([[0.0], np.cumsum(0.5 * pieces)])
    return WeightState(t, logA)


# --------------------------------------------------------------------------
# improper integrals
# --------------------------------------------------------------------------

def _log_breaks(lo: float, hi: float, per_decade: int = 8) -> np.ndarray:
    base = lo if lo > 0 else min(1.0, hi / 10.0)
    k = max(2, int(math.ceil(per_decade * math.log10(hi / base))) + 1)
    pts = np.geomspace(base, hi, k)
    if lo < base:
        pts = np.concatenate([[lo], pts])
    return pts


def _piecewise_quad(fn, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    edges = _log_breaks(lo, hi) if lo >= 0 else np.linspace(lo, hi, 17)
    edges = edges[(edges >= lo) & (edges <= hi)]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(fn, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)
        total += val
    return total


def _decade_flag(total: float, last_decade: float) -> str:
    if total == 0.0:
        return "convergent"
    share = abs(last_decade) / abs(total)
    if share > DIVERGENT_SHARE:
        return "divergent"
    if share < CONVERGENT_SHARE:
        return "convergent"
    return "inconclusive"


@dataclass(frozen=True)
class ImproperIntegral:
    value: float
    last_decade: float
    flag: str  # divergent | convergent | inconclusive


@dataclass(frozen=True)
class HypothesisReport:
    descriptor: str
    horizon: float
    positive: bool
    decreasing: bool
    int_p: ImproperIntegral
    int_p2: ImproperIntegral
    int_abs_q: ImproperIntegral
    p_limit: float
    dp_start: float
    dp_limit: float

    @property
    def p_not_integrable(self) -> bool:
        return self.int_p.flag == "divergent"

    @property
    def p2_integrable(self) -> bool:
        return self.int_p2.flag == "convergent"

    @property
    def q_integrable(self) -> bool:
        return self.int_abs_q.flag == "convergent"

    @property
    def dp_vanishes(self) -> bool:
        return abs(self.dp_limit) <= 1e-3 * abs(self.dp_start)

    @property
    def violated(self) -> list[str]:
        """Hypotheses that are definitely contradicted (inconclusive flags excluded)."""
        out = []
        if not self.positive:
            out.append("p > 0")
        if not self.decreasing:
            out.append("p decreasing")
        if self.int_p.flag == "convergent":
            out.append("p not integrable")
        if self.int_p2.flag == "divergent":
            out.append("p^2 integrable")
        if self.int_abs_q.flag == "divergent":
            out.append("q integrable")
        return out

    @property
    def all_hold(self) -> bool:
        return (self.positive and self.decreasing and self.p_not_integrable
                and self.p2_integrable and self.q_integrable)


def _improper(fn, t0: float, horizon: float) -> ImproperIntegral:
    split = max(t0, horizon / 10.0)
    head = _piecewise_quad(fn, t0, split)
    tail = _piecewise_quad(fn, split, horizon)
    total = head + tail
    return ImproperIntegral(total, tail, _decade_flag(total, tail))


def validate_hypotheses(family: DampingFamily, horizon: float, samples: int = 1000) -> HypothesisReport:
    """Check the damping hypotheses numerically on ``[t0, horizon]``.

    Failed checks are reported in the returned record, never raised.
    """
    if horizon <= family.t0:
        raise PreconditionError("horizon must exceed t0")
    if samples < 100:
        raise PreconditionError("at least 100 samples are required")
    t0 = family.t0
    span = horizon - t0
    ts = t0 + np.concatenate([[0.0], np.geomspace(span * 1e-6, span, samples - 1)])
    p = family.eval_p(ts)
    dp = family.eval_dp(ts)

    def fp(t):
        return float(family.eval_p(t))

    def fp2(t):
        return float(family.eval_p(t)) ** 2

    def fq(t):
        return abs(residual_potential(family, t))

    return HypothesisReport(
        descriptor=family.descriptor,
        horizon=horizon,
        positive=bool(np.all(p > 0)),
        decreasing=bool(np.all(dp < 0)),
        int_p=_improper(fp, t0, horizon),
        int_p2=_improper(fp2, t0, horizon),
        int_abs_q=_improper(fq, t0, horizon),
        p_limit=float(p[-1]),
        dp_start=float(dp[0]),
        dp_limit=float(dp[-1]),
    )


def tail_Q(family: DampingFamily, s: float, horizon: float) -> float:
    """Q(s): integral of |q| from s to infinity.

    Quadrature covers ``[s, horizon]``; beyond the horizon |q| is extrapolated
    as a power law fitted on the last decade.
    """
    if s < family.t0 or s > horizon:
        raise PreconditionError(f"need t0 <= s <= horizon, got s={s}")
    head = _piecewise_quad(lambda t: abs(residual_potential(family, t)), s, horizon)
    return head + _q_tail_beyond(family, horizon)


def _q_tail_beyond(family: DampingFamily, horizon: float) -> float:
    lo = max(family.t0, horizon / 10.0)
    ts = np.geomspace(lo if lo > 0 else horizon / 10.0, horizon, 21)
    aq = np.abs(residual_potential(family, ts))
    # q is a difference of two O(p^2) terms; rounding residue counts as zero
    floor = 1e-12 * np.abs(0.25 * family.eval_p(ts) ** 2 - 0.5 * family.eval_dp(ts)) + 1e-300
    if np.all(aq <= floor):
        return 0.0
    if np.any(aq <= floor):
        raise TailDivergenceError("|q| vanishes intermittently on the last decade; cannot extrapolate")
    # the families are power laws in u = t + shift
    u = ts + family.shift
    slope = np.polyfit(np.log(u), np.log(aq), 1)[0]
    k = -slope
    if k <= 1.0:
        raise TailDivergenceError(f"|q| decays like t^-{k:.3f}; tail integral does not converge")
    return float(aq[-1] * u[-1] / (k - 1.0))
