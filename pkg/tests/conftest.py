import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from weakosc.coeffs import bessel_family, parse_family, parse_forcing
from weakosc.integrate import Grid, SystemSpec, integrate_forced

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

J0_1 = 0.765197686557966551449717526103
J1_1 = 0.440050585744933515959682203719


def j0_series(t: float, dps: int = 40) -> float:
    """J0 by its power series in extended precision (independent of scipy)."""
    with mp.workdps(dps + int(t)):
        x = mp.mpf(t) / 2
        term = mp.mpf(1)
        total = mp.mpf(1)
        k = 0
        while abs(term) > mp.mpf(10) ** (-dps):
            k += 1
            term *= -(x * x) / (k * k)
            total += term
        return float(total)


def bessel_green(t: float, s: float) -> float:
    """G(t, s) = (pi/2) sqrt(ts) [J0(s) Y0(t) - J0(t) Y0(s)] for u'' + (1 + 1/(4t^2)) u = 0."""
    with mp.workdps(30):
        return float(mp.pi / 2 * mp.sqrt(t * s)
                     * (mp.besselj(0, s) * mp.bessely(0, t) - mp.besselj(0, t) * mp.bessely(0, s)))


SCENARIOS = {
    "bessel-unforced": ("bessel", 1.0, "zero", J0_1, -J1_1),
    "bessel-expdecay": ("bessel", 1.0, "exp:rate=1", 0.0, 0.0),
    "power-decay": ("power:a=1,b=1", 1.0, "powerdecay:g=2", 0.0, 0.0),
    "power-slow-unforced": ("power:a=1,b=0.75", 1.5, "zero", 1.0, 0.0),
    "resonant-counterexample": ("power:a=1,b=1", 1.0, "resonant:g=0.5", 0.0, 0.0),
}


def build(name: str):
    fd, w, fr, a, b = SCENARIOS[name]
    fam = parse_family(fd)
    return fam, parse_forcing(fr, w), SystemSpec(w, a, b, fam.t0)


_CACHE: dict = {}


def scenario_run(name: str, periods: float = 400.0, tol: float = 1e-10):
    """Full-horizon trajectory for a built-in scenario, cached per session."""
    key = (name, periods, tol)
    if key not in _CACHE:
        fam, forcing, spec = build(name)
        horizon = fam.t0 + periods * 2 * math.pi / spec.omega
        _CACHE[key] = integrate_forced(spec, fam, forcing,
                                       Grid.per_period(fam.t0, horizon, spec.omega), tol)
    return _CACHE[key]


@pytest.fixture(scope="session")
def bessel():
    return bessel_family()


@pytest.fixture(scope="session")
def bessel_run():
    fam = bessel_family()
    return integrate_forced(SystemSpec(1.0, J0_1, -J1_1, 1.0), fam, parse_forcing("zero", 1.0),
                            Grid.per_period(1.0, 100.0, 1.0, 64), 1e-10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
