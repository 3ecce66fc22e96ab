import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decaykit import (BlaschkePair, ContourSpec, Disk, HalfPlane, Mode, SMatrixModel, TimeGrid, count_zeros_poles,
                      log_residue_integral, tau_time_residues, winding_integral)
from decaykit.contour import log_residue_quad, residue_sum
from decaykit.errors import GuardViolation, NonInteger


def unitary(*pairs):
    return SMatrixModel(tuple(BlaschkePair(w, g) for w, g in pairs))


def test_rectangle_around_upper_zeros():
    r = winding_integral(unitary((2, 1)), ContourSpec.rectangle(-5, 5, 0.01, 5))
    assert r.n_minus_p == 2
    assert r.integral_value.real == pytest.approx(4 * math.pi, abs=1e-8)
    assert abs(r.integral_value.imag) < 1e-9
    assert (r.zeros_found, r.poles_found) == (2, 0)


def test_empty_rectangle():
    r = winding_integral(unitary((2, 1)), ContourSpec.rectangle(-5, 5, 1, 5))
    assert r.n_minus_p == 0 and r.raw == pytest.approx(0, abs=1e-9)


def test_pole_only_dipped_rectangle():
    m = SMatrixModel((BlaschkePair(2, 1),), Mode.POLE_ONLY)
    r = winding_integral(m, ContourSpec.rectangle(1, 3, -1, 0.5))
    assert r.n_minus_p == -1 and r.poles_found == 1


def test_semicircle_and_real_axis_lift():
    m = unitary((2, 1), (5, 0.2))
    c = ContourSpec.semicircle_upper(20)
    assert c.resolved(m.gamma_min).params[1] == pytest.approx(1e-3 * 0.2)
    assert winding_integral(m, c).n_minus_p == 4
    lifted = ContourSpec.rectangle(-10, 10, 0, 10).resolved(m.gamma_min)
    assert lifted.params[2] == pytest.approx(2e-4)


def test_balanced_disk_inventory():
    m = unitary((2, 1), (5, 0.2))
    inv = count_zeros_poles(m, Disk(0, 1e3 * 5))
    assert inv.n_zeros == inv.n_poles == 4
    assert count_zeros_poles(m, HalfPlane(True)).n_zeros == 4
    assert count_zeros_poles(m, HalfPlane(False)).n_poles == 4
    assert count_zeros_poles(m, HalfPlane(False)).n_zeros == 0


def test_full_rectangle_balanced():
    assert winding_integral(unitary((2, 1)), ContourSpec.rectangle(-6, 6, -6, 6)).n_minus_p == 0


def test_guard_violation():
    m = unitary((2, 1))
    with pytest.raises(GuardViolation):
        winding_integral(m, ContourSpec.rectangle(-5, 2, 0.01, 5))  # right edge runs through 2 + 0.5i


def test_weighted_residue_identity():
    m = unitary((2, 1))
    c = ContourSpec.rectangle(1, 3, 0, 2)
    assert log_residue_integral(lambda z: z, m, c) == pytest.approx(2 + 0.5j, abs=1e-10)
    assert log_residue_integral(lambda z: np.ones_like(z), m, c) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_weighted_residue_is_tau_of_t(t):
    m = unitary((2, 1), (4, 0.5))
    c = ContourSpec.rectangle(-8, 8, 0, 8)
    q = log_residue_quad(lambda z: np.exp(1j * z * t), m, c)
    ref = tau_time_residues(m, TimeGrid([t])).residue_value[0]
    assert abs(q.value - ref) <= q.error_estimate + 1e-12


def test_nonInteger_on_under_resolved():
    m = unitary((2, 1))
    with pytest.raises(NonInteger):
        # a contour hugging a zero with a crippled quadrature budget
        from decaykit import QuadSpec
        winding_integral(m, ContourSpec.rectangle(1.9, 2.1, 0.4999, 0.6), QuadSpec(1e-3, 1e-3, 1))


def test_contour_validation():
    with pytest.raises(ValueError):
        ContourSpec.rectangle(1, 0, 0, 1)
    with pytest.raises(ValueError):
        ContourSpec("Circle", (1,))
    with pytest.raises(ValueError):
        ContourSpec.semicircle_upper(-1)


models = st.lists(st.tuples(st.floats(0.3, 8), st.floats(0.1, 2)), min_size=1, max_size=3, unique_by=lambda p: p)
boxes = st.tuples(st.floats(-12, 12), st.floats(0.5, 20), st.floats(-4, 4), st.floats(0.5, 8))


def _admissible(m, c):
    c = c.resolved(m.gamma_min)
    sing = np.concatenate([m.zeros, m.poles])
    return all(c.distance(p) > 0.02 for p in sing)


@given(pairs=models, box=boxes)
def test_winding_equals_inventory(pairs, box):
    m = unitary(*pairs)
    x0, w, y0, h = box
    c = ContourSpec.rectangle(x0, x0 + w, y0, y0 + h)
    if not _admissible(m, c):
        return
    r = winding_integral(m, c)
    inv = count_zeros_poles(m, c)
    assert r.n_minus_p == inv.n_zeros - inv.n_poles
    assert abs(r.raw - r.n_minus_p) < 1e-6
    assert abs(r.integral_value.imag) < 1e-9 * max(1.0, abs(r.integral_value))


@given(pairs=models, split=st.floats(0.1, 0.9))
def test_additivity(pairs, split):
    m = unitary(*pairs)
    whole = ContourSpec.rectangle(-10, 10, -3, 3)
    xm = -10 + 20 * split
    left = ContourSpec.rectangle(-10, xm, -3, 3)
    right = ContourSpec.rectangle(xm, 10, -3, 3)
    if not all(_admissible(m, c) for c in (whole, left, right)):
        return
    a, b, c = (winding_integral(m, k) for k in (left, right, whole))
    assert abs(a.raw + b.raw - c.raw) < 2e-6


@given(pairs=models)
def test_deformation_invariance(pairs):
    m = unitary(*pairs)
    top = max(w for w, _ in pairs) + 3
    r1 = winding_integral(m, ContourSpec.rectangle(-top, top, 0, 5))
    r2 = winding_integral(m, ContourSpec.semicircle_upper(2 * top))
    assert abs(r1.raw - r2.raw) < 2e-6


@given(pairs=models, box=boxes)
def test_unit_weight_reproduces_winding(pairs, box):
    m = unitary(*pairs)
    x0, w, y0, h = box
    c = ContourSpec.rectangle(x0, x0 + w, y0, y0 + h)
    if not _admissible(m, c):
        return
    r = winding_integral(m, c)
    v = log_residue_integral(lambda z: np.ones_like(z), m, c)
    assert v.real == pytest.approx(r.raw, rel=1e-9, abs=1e-9)


@given(pairs=models, box=boxes)
def test_weight_z_matches_residue_sum(pairs, box):
    m = unitary(*pairs)
    x0, w, y0, h = box
    c = ContourSpec.rectangle(x0, x0 + w, y0, y0 + h)
    if not _admissible(m, c):
        return
    v = log_residue_integral(lambda z: z * z, m, c)
    assert v == pytest.approx(residue_sum(lambda z: z * z, m, c), abs=1e-7)
