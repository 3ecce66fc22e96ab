import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decaykit import (AnalyticCertificate, FrequencyDomain, IntegrandFailure, Peak, QuadSpec, SpectralDensity,
                      Strategy, integrate, oscillatory_integrate)
from decaykit.timedomain import fullline_amplitude


def test_polynomial_exact():
    r = integrate(lambda x: 3 * x**2, FrequencyDomain.interval(0, 2))
    assert r.converged and r.value == pytest.approx(8.0, abs=1e-14)


def test_semi_infinite_rational():
    r = integrate(lambda x: 1 / (1 + x * x), FrequencyDomain.half_line())
    assert r.converged and r.value.real == pytest.approx(math.pi / 2, abs=1e-12)


def test_full_line_gaussian():
    r = integrate(lambda x: np.exp(-x * x), FrequencyDomain.full_line())
    assert r.converged and r.value.real == pytest.approx(math.sqrt(math.pi), abs=1e-12)


def test_error_estimate_is_honest():
    r = integrate(lambda x: 1 / (1 + x * x), FrequencyDomain.full_line(), QuadSpec(1e-6, 1e-6))
    assert abs(r.value - math.pi) <= r.error_estimate


def test_narrow_peak_needs_hint():
    h = 1e-4
    f = lambda x: (h / math.pi) / ((x - 3) ** 2 + h * h)
    r = integrate(f, FrequencyDomain.half_line(), peaks=[Peak(3.0, h)])
    assert r.converged and r.value.real == pytest.approx(0.5 + math.atan(3 / h) / math.pi, abs=1e-10)


def test_nan_integrand_raises():
    with pytest.raises(IntegrandFailure) as e:
        integrate(lambda x: np.where(x > 0.5, np.nan, x), FrequencyDomain.interval(0, 1))
    assert e.value.abscissa > 0.5


def test_budget_exhaustion_flags_unconverged():
    r = integrate(lambda x: np.sin(1 / (x + 1e-3)), FrequencyDomain.interval(0, 1), QuadSpec(1e-14, 1e-14, 20))
    assert not r.converged
    assert r.error_estimate > 0


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadSpec(max_subdivisions=0)
    with pytest.raises(ValueError):
        FrequencyDomain.interval(2, 1)
    with pytest.raises(ValueError):
        Peak(0, 0)


@pytest.mark.parametrize("strategy, t", [(s, t) for s in Strategy for t in (0.1, 1.0, 7.5)
                                          if not (s is Strategy.TAN_MAP and t > 3)])
def test_fourier_of_lorentzian(strategy, t):
    d = SpectralDensity.single(5.0, 1.0)
    spec = QuadSpec(oscillatory_strategy=strategy)
    r = oscillatory_integrate(d, t, FrequencyDomain.full_line(), spec, d.peaks(), d.certificate())
    assert r.converged
    assert abs(r.value - fullline_amplitude(d, t)) < 1e-9


def test_contour_shift_needs_certificate():
    d = SpectralDensity.single(5.0, 1.0)
    with pytest.raises(ValueError):
        oscillatory_integrate(d, 3.0, FrequencyDomain.half_line(), QuadSpec(oscillatory_strategy="ContourShift"))


def test_filon_large_frequency_interval():
    # int_0^1 x e^{i s x} dx, closed form
    s = 400.0
    exact = (np.exp(1j * s) * (1 - 1j * s) - 1) / (1j * s) ** 2 * -1
    exact = np.exp(1j * s) / (1j * s) - (np.exp(1j * s) - 1) / (1j * s) ** 2
    r = oscillatory_integrate(lambda x: x, s, FrequencyDomain.interval(0, 1), sign=+1)
    assert r.converged and r.value == pytest.approx(exact, abs=1e-12)


@given(t=st.floats(0.05, 30.0), omega0=st.floats(-5, 5), gamma=st.floats(0.2, 3))
def test_strategies_agree_on_halfline(t, omega0, gamma):
    d = SpectralDensity.single(omega0, gamma)
    dom = FrequencyDomain.half_line()
    a = oscillatory_integrate(d, t, dom, QuadSpec(), d.peaks(), d.certificate())
    b = oscillatory_integrate(d, t, dom, QuadSpec(oscillatory_strategy="ContourShift"), d.peaks(),
                              d.certificate())
    assert abs(a.value - b.value) <= 5 * (a.error_estimate + b.error_estimate) + 1e-12


def test_deterministic():
    d = SpectralDensity.single(5.0, 1.0)
    a = oscillatory_integrate(d, 3.3, FrequencyDomain.half_line(), peaks=d.peaks())
    b = oscillatory_integrate(d, 3.3, FrequencyDomain.half_line(), peaks=d.peaks())
    assert a == b


def test_certificate_residues_reproduce_density():
    d = SpectralDensity.single(2.0, 0.6)
    z = 1.3 + 0.2j
    # a Lorentzian is the sum of its two simple-pole terms
    total = sum(r / (z - p) for p, r in d.certificate().poles)
    assert total == pytest.approx(d(np.array([z]))[0], rel=1e-13)


@pytest.mark.parametrize("omega0", [0.0, 1e-300, 0.3, -0.2])
def test_contour_shift_pole_next_to_ray(omega0):
    # pole straight below the endpoint 0: the ray has to tilt
    d = SpectralDensity.single(omega0, 1.0)
    dom = FrequencyDomain.half_line()
    a = oscillatory_integrate(d, 2.0, dom, QuadSpec(), d.peaks())
    b = oscillatory_integrate(d, 2.0, dom, QuadSpec(oscillatory_strategy="ContourShift"), d.peaks(),
                              d.certificate())
    assert abs(a.value - b.value) < 1e-9


@pytest.mark.parametrize("t", [3.0, 40.0])
def test_contour_shift_on_interval(t):
    d = SpectralDensity.single(1.0, 0.4)
    dom = FrequencyDomain.interval(-2.0, 3.0)
    a = oscillatory_integrate(d, t, dom, QuadSpec(), d.peaks())
    b = oscillatory_integrate(d, t, dom, QuadSpec(oscillatory_strategy="ContourShift"), d.peaks(),
                              d.certificate())
    assert a.converged and b.converged
    assert abs(a.value - b.value) < 1e-9


@given(tol=st.sampled_from([1e-4, 1e-6, 1e-8]), c=st.floats(0.1, 3.0))
def test_error_estimates_bound_true_error(tol, c):
    r = integrate(lambda x: c / (c * c + x * x), FrequencyDomain.full_line(), QuadSpec(tol, tol))
    assert abs(r.value - math.pi) <= r.error_estimate + 1e-15


def test_tan_map_is_honest_when_oscillation_wins():
    d = SpectralDensity.single(5.0, 1.0)
    r = oscillatory_integrate(d, 10.0, FrequencyDomain.full_line(), QuadSpec(oscillatory_strategy="TanMap"),
                              d.peaks())
    assert not r.converged
    assert abs(r.value - fullline_amplitude(d, 10.0)) <= r.error_estimate
