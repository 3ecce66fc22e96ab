import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from decaykit import (BlaschkePair, FrequencyDomain, Mode, QuadSpec, ResonanceParams, SMatrixModel,
                      SpectralDensity, TimeGrid, survival, survival_closed_form_fullline, tau_time_residues,
                      tau_time_transform)
from decaykit.errors import CutoffTooSmall, TZero
from decaykit.timedomain import SHIFT_THRESHOLD


def test_e1_oracle_agrees_with_brute_force():
    for t in (0.5, 3.0):
        assert oracles.halfline_amplitude(5, 1, t) == pytest.approx(
            oracles.halfline_amplitude_bruteforce(5, 1, t), abs=1e-12)


def test_fullline_closed_form():
    d = SpectralDensity.single(5.0, 1.0)
    g = TimeGrid.linear(0, 20, 81)
    c = survival(d, FrequencyDomain.full_line(), g)
    ref = survival_closed_form_fullline(ResonanceParams(5.0, 1.0), g.points)
    assert c.converged.all()
    np.testing.assert_allclose(c.amplitude, ref, rtol=1e-8)
    assert c.probability[np.searchsorted(g.points, 2.0)] == pytest.approx(math.exp(-2), rel=1e-9)


def test_t_zero_row_is_norm_squared():
    d = SpectralDensity.single(5.0, 1.0)
    c = survival(d, FrequencyDomain.half_line(), TimeGrid([0.0, 1.0]))
    n = 0.5 + math.atan(10) / math.pi
    assert c.probability[0] == pytest.approx(n * n, rel=1e-12)
    r = survival(d, FrequencyDomain.half_line(), TimeGrid([0.0, 1.0]), renormalize=True)
    assert r.probability[0] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("t", [0.01, 0.7, 3.0, 15.0, 39.0, 41.0, 200.0, 2000.0])
def test_halfline_vs_oracle(t):
    d = SpectralDensity.single(5.0, 1.0)
    c = survival(d, FrequencyDomain.half_line(), TimeGrid([t]))
    ref = oracles.halfline_amplitude(5.0, 1.0, t)
    assert c.converged[0]
    assert abs(c.amplitude[0] - ref) <= max(1e-10, 1e-9 * abs(ref))


def test_halfline_khalfin_tail_level():
    # P(t) -> (w(0)/t)^2 far out
    d = SpectralDensity.single(5.0, 1.0)
    w0 = float(d(0.0))
    t = 5000.0
    c = survival(d, FrequencyDomain.half_line(), TimeGrid([t]))
    assert c.probability[0] == pytest.approx((w0 / t) ** 2, rel=1e-3)


def test_workers_do_not_change_output():
    d = SpectralDensity((ResonanceParams(2, 0.5), ResonanceParams(6, 1.0)), (0.4, 0.6))
    g = TimeGrid.log(0.01, 500, 60)
    a = survival(d, FrequencyDomain.half_line(), g, workers=1)
    b = survival(d, FrequencyDomain.half_line(), g, workers=8)
    assert np.array_equal(a.amplitude, b.amplitude)
    assert np.array_equal(a.error_estimate, b.error_estimate)


def test_failed_points_are_isolated():
    d = SpectralDensity.single(5.0, 1.0)
    spec = QuadSpec(abs_tol=1e-16, rel_tol=1e-16, max_subdivisions=30)
    c = survival(d, FrequencyDomain.half_line(), TimeGrid([0.5, 3.0, 60.0]), spec)
    assert c.amplitude.shape == (3,)
    assert not c.converged.all()


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid([1.0, 0.5])
    with pytest.raises(ValueError):
        TimeGrid([-1.0, 0.5])
    with pytest.raises(ValueError):
        TimeGrid.log(0, 1, 5)


def test_shift_threshold_switch_is_seamless():
    d = SpectralDensity.single(5.0, 1.0)
    eps = 1e-6
    g = TimeGrid([SHIFT_THRESHOLD - eps, SHIFT_THRESHOLD + eps])
    c = survival(d, FrequencyDomain.half_line(), g)
    assert abs(c.amplitude[1] - c.amplitude[0]) < 1e-9


def unitary(pairs):
    return SMatrixModel(tuple(BlaschkePair(w, g) for w, g in pairs))


def test_residue_series_closed_form():
    m = unitary([(2.0, 1.0)])
    t = np.array([0.5, 1.0, 2.0])
    s = tau_time_residues(m, TimeGrid(t))
    np.testing.assert_allclose(s.residue_value, 2 * np.cos(2 * t) * np.exp(-t / 2), rtol=1e-14)
    np.testing.assert_allclose(s.averaged_envelope, np.exp(-t), rtol=1e-15)


def test_residue_requires_positive_t():
    with pytest.raises(TZero):
        tau_time_residues(unitary([(2.0, 1.0)]), TimeGrid([0.0, 1.0]))


def test_pole_only_rejected_for_tau_time():
    m = SMatrixModel((BlaschkePair(2, 1),), Mode.POLE_ONLY)
    with pytest.raises(ValueError):
        tau_time_residues(m, TimeGrid([1.0]))


def test_transform_matches_residues():
    m = unitary([(2.0, 1.0), (5.0, 0.4)])
    g = TimeGrid.log(0.1, 10.0, 15)
    res = tau_time_residues(m, g)
    tr = tau_time_transform(m, g, cutoff=2000.0)
    assert tr.converged.all()
    assert np.all(np.abs(tr.values - res.residue_value) <= tr.errors)


def test_cutoff_checks():
    m = unitary([(2.0, 1.0)])
    with pytest.raises(CutoffTooSmall):
        tau_time_transform(m, TimeGrid([1.0]), cutoff=2.5)
    with pytest.raises(CutoffTooSmall):
        tau_time_transform(m, TimeGrid([0.01]), cutoff=10.0)


@given(pairs=st.lists(st.tuples(st.floats(0.2, 10), st.floats(0.05, 3)), min_size=1, max_size=3,
                      unique_by=lambda p: p))
def test_envelope_log_convex(pairs):
    m = unitary(pairs)
    t = np.linspace(0.05, 20, 200)
    env = tau_time_residues(m, TimeGrid(t)).averaged_envelope
    gam = np.array([g for _, g in pairs])
    np.testing.assert_array_equal(env, np.exp(-np.outer(t, gam)).sum(axis=1))
    second = np.diff(np.log(env), 2)
    assert np.all(second >= -1e-12)


@given(t=st.floats(0.01, 50.0), omega0=st.floats(0.5, 20), gamma=st.floats(0.1, 4))
def test_fullline_survival_property(t, omega0, gamma):
    d = SpectralDensity.single(omega0, gamma)
    c = survival(d, FrequencyDomain.full_line(), TimeGrid([t]))
    ref = survival_closed_form_fullline(ResonanceParams(omega0, gamma), t)
    assert abs(c.amplitude[0] - ref) <= max(c.error_estimate[0], 1e-13)
