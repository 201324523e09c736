import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SCENARIOS, build
from weakosc.coeffs import parse_forcing, power_family
from weakosc.errors import PreconditionError
from weakosc.filters import (FilterOracleResult, cascade_filters, h_kernel, h_prime, h_second,
                             y2_from_x, y_filters_quadrature)
from weakosc.integrate import Grid, SystemSpec, integrate_forced


def test_h_kernel_values():
    assert h_kernel(0.0, 2.0) == 0.0
    assert h_kernel(1.0, 1.0) == pytest.approx(np.exp(-1.0))
    with pytest.raises(PreconditionError):
        h_kernel(-1.0, 1.0)


@given(st.floats(0.01, 20.0), st.floats(0.3, 3.0))
def test_h_derivatives_match_finite_differences(t, w):
    d = 1e-5
    fd1 = (h_kernel(t + d, w) - h_kernel(t - d, w)) / (2 * d)
    fd2 = (h_prime(t + d, w) - h_prime(t - d, w)) / (2 * d)
    assert h_prime(t, w) == pytest.approx(fd1, abs=1e-8)
    assert h_second(t, w) == pytest.approx(fd2, abs=1e-7)


def test_quadrature_constant_forcing_closed_form():
    w = 1.2
    t = np.arange(0.0, 30.0 + 1e-12, 0.05)
    y1, y2 = y_filters_quadrature(parse_forcing("const", w), w, t)
    w2 = w * w
    np.testing.assert_allclose(y1.values, (1 - np.exp(-w2 * t)) / w2, atol=1e-12)
    exact2 = (1 - np.exp(-w2 * t) * (1 + w2 * t)) / w2 ** 2
    np.testing.assert_allclose(y2.values, exact2, atol=1e-12)
    assert y1.method == "direct-quadrature"


def test_quadrature_exponential_forcing_closed_form():
    w = 1.0
    t = np.arange(0.0, 20.0 + 1e-12, 0.05)
    y1, y2 = y_filters_quadrature(parse_forcing("exp", w), w, t)
    np.testing.assert_allclose(y1.values, t * np.exp(-t), atol=1e-12)
    np.testing.assert_allclose(y2.values, 0.5 * t * t * np.exp(-t), atol=1e-12)


def test_quadrature_grid_checks():
    f = parse_forcing("const", 1.0)
    with pytest.raises(PreconditionError):
        y_filters_quadrature(f, 1.0, [0.0, 1.0])
    with pytest.raises(PreconditionError):
        y_filters_quadrature(f, 1.0, [0.0])
    with pytest.raises(PreconditionError):
        y_filters_quadrature(f, 1.0, [0.0, 0.05, 0.05])


def test_unknown_method_rejected():
    with pytest.raises(PreconditionError):
        FilterOracleResult(np.zeros(1), np.zeros(1), "guess")


def _fine_pair(name):
    fam, forcing, spec = build(name)
    dt = min(0.01, 0.1 / spec.omega ** 2)
    grid = Grid.spacing(fam.t0, 50.0, dt)
    tr = integrate_forced(spec, fam, forcing, grid, 1e-12)
    rest = integrate_forced(SystemSpec(spec.omega, 0.0, 0.0, fam.t0), fam, forcing, grid, 1e-12)
    return tr, rest, forcing


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_three_filter_routes_agree(name):
    tr, rest, forcing = _fine_pair(name)
    c1, c2 = cascade_filters(tr)
    q1, q2 = y_filters_quadrature(forcing, tr.omega, tr.times)
    rec = y2_from_x(rest)
    assert np.max(np.abs(c1.values - q1.values)) < 1e-6
    assert np.max(np.abs(c2.values - q2.values)) < 1e-6
    assert np.max(np.abs(rec.values - c2.values[::10])) < 1e-6
    assert np.array_equal(rec.times, tr.times[::10])


def test_reconstruction_requires_rest_start():
    tr, _, _ = _fine_pair("bessel-unforced")
    with pytest.raises(PreconditionError):
        y2_from_x(tr)


def test_reconstruction_requires_uniform_grid():
    fam = power_family(1, 1)
    w = 1.0
    t = np.concatenate([np.linspace(0, 5, 501), np.linspace(5.02, 10, 250)])

    class G:
        t_start, t_end = 0.0, 10.0
        times = t

        def check_resolution(self, omega):
            pass

    tr = integrate_forced(SystemSpec(w), fam, parse_forcing("const", w), G(), 1e-10)
    with pytest.raises(PreconditionError):
        y2_from_x(tr)
