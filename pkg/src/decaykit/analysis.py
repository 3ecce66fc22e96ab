"""Exponential fits and deviation detection on survival curves.

All fitting happens in log space: decay curves span many decades and log
residuals weight them equally.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InsufficientPoints, NonPositiveProbability, NoExponentialWindow
from .timedomain import SurvivalCurve

__all__ = ["ExpFit", "DeviationReport", "fit_exponential", "detect_deviations", "P_FLOOR"]

P_FLOOR = 1e-300
_MIN_WINDOW = 5
_MIN_TAIL = 8
_TAIL_R2 = 0.99
_TAIL_DOMINANCE = 1e-3  # exponential model at most this fraction of P
_RESOLVED = 0.1


@dataclass(frozen=True)
class ExpFit:
    gamma_fit: float
    amplitude_fit: float
    window: tuple[float, float]
    rms_log_residual: float

    def to_dict(self):
        return {
            "gamma_fit": self.gamma_fit,
            "amplitude_fit": self.amplitude_fit,
            "window": list(self.window),
            "rms_log_residual": self.rms_log_residual,
        }


@dataclass(frozen=True)
class DeviationReport:
    exp_window: tuple[float, float]
    short_time_deviation: float
    tail_exponent: float | None
    tail_onset: float | None
    gamma_ref: float
    tol: float
    offset: float
    tail_r2: float | None = None
    covers_grid: bool = False

    @property
    def deviations(self) -> list[dict]:
        """Departures from the exponential law, earliest first."""
        out = []
        if self.short_time_deviation > self.tol:
            out.append({"kind": "short_time", "t_hi": self.exp_window[0],
                        "max_relative_deviation": self.short_time_deviation})
        if self.tail_exponent is not None:
            out.append({"kind": "tail", "t_lo": self.tail_onset, "exponent": self.tail_exponent,
                        "r2": self.tail_r2})
        return out

    def to_dict(self):
        return {
            "exp_window": list(self.exp_window),
            "covers_grid": self.covers_grid,
            "short_time_deviation": self.short_time_deviation,
            "tail_exponent": self.tail_exponent,
            "tail_onset": self.tail_onset,
            "tail_r2": self.tail_r2,
            "gamma_ref": self.gamma_ref,
            "tol": self.tol,
            "offset": self.offset,
            "deviations": self.deviations,
        }


def _line_fit(x, y):
    """Least squares y = a + b x with centred x. Returns (a, b, residuals)."""
    xm = x.mean()
    xc = x - xm
    b = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    a_c = float(y.mean())
    resid = y - (a_c + b * xc)
    return a_c - b * xm, b, resid


def _usable(c: SurvivalCurve):
    # converged, finite and resolved: the amplitude must exceed its own error bar
    p = c.probability
    err = np.asarray(c.error_estimate, float)
    resolved = err <= _RESOLVED * np.abs(c.amplitude)
    return np.asarray(c.converged, bool) & np.isfinite(p) & resolved


def fit_exponential(c: SurvivalCurve, window: tuple[float, float]) -> ExpFit:
    """Fit P = A exp(-gamma t) by least squares on log P over ``window``.

    Points outside the closed window, or flagged as unconverged, are ignored.
    """
    lo, hi = window
    t = c.t
    sel = (t >= lo) & (t <= hi) & _usable(c)
    if sel.sum() < _MIN_WINDOW:
        raise InsufficientPoints(
            f"window [{lo}, {hi}] holds {int(sel.sum())} usable points; {_MIN_WINDOW} are needed")
    p = c.probability[sel]
    if np.any(p <= P_FLOOR):
        bad = float(t[sel][np.argmax(p <= P_FLOOR)])
        raise NonPositiveProbability(f"P(t={bad}) <= {P_FLOOR}: cannot take its logarithm")
    a, b, resid = _line_fit(t[sel], np.log(p))
    return ExpFit(-b, math.exp(a), (float(lo), float(hi)), float(np.sqrt(np.mean(resid**2))))


def _widest_window(t, r, width):
    """Widest (in t) contiguous run with max(r) - min(r) <= width.

    Two pointers with monotone deques; ties go to the earlier window.
    """
    best = (-1.0, 0, -1)
    hi_q: deque = deque()
    lo_q: deque = deque()
    i = 0
    for j in range(len(r)):
        while hi_q and r[hi_q[-1]] <= r[j]:
            hi_q.pop()
        hi_q.append(j)
        while lo_q and r[lo_q[-1]] >= r[j]:
            lo_q.pop()
        lo_q.append(j)
        while r[hi_q[0]] - r[lo_q[0]] > width:
            i += 1
            if hi_q[0] < i:
                hi_q.popleft()
            if lo_q[0] < i:
                lo_q.popleft()
        if j - i + 1 >= _MIN_WINDOW and t[j] - t[i] > best[0]:
            best = (t[j] - t[i], i, j)
    return best[1], best[2]


def detect_deviations(c: SurvivalCurve, gamma_ref: float | None = None, tol: float = 1e-6) -> DeviationReport:
    """Locate the exponential regime of ``c`` and characterise what lies outside it.

    The exponential window is the widest contiguous run of grid points on
    which log P + gamma_ref t stays within +/- tol of a constant. Before it,
    the largest relative deviation from that exponential is reported. After
    it, points where the exponential has fallen below 1e-3 of P are fitted
    by a power law in log-log space; the exponent is only reported with at
    least 8 points and R^2 > 0.99, together with the time where the two laws
    cross.

    ``gamma_ref`` defaults to a fit over the middle third of the grid.
    """
    t_all = c.t
    if t_all[0] <= 0 or t_all[-1] / t_all[0] < 1e3 * (1 - 1e-12):
        raise ValueError("detect_deviations needs a grid with t > 0 spanning at least 3 decades")
    if not tol > 0:
        raise ValueError("tol must be positive")
    keep = _usable(c) & (c.probability > P_FLOOR)
    t = t_all[keep]
    p = c.probability[keep]
    if t.size < _MIN_WINDOW:
        raise NoExponentialWindow(f"only {t.size} usable points on the curve")
    if gamma_ref is None:
        n = t_all.size
        third = (float(t_all[n // 3]), float(t_all[(2 * n) // 3]))
        gamma_ref = fit_exponential(c, third).gamma_fit

    r = np.log(p) + gamma_ref * t
    i, j = _widest_window(t, r, 2.0 * tol)
    if j < 0:
        raise NoExponentialWindow(f"no {_MIN_WINDOW}-point window follows exp(-{gamma_ref:g} t) within {tol:g}")
    c0 = 0.5 * (r[i:j + 1].max() + r[i:j + 1].min())
    short = float(np.max(np.abs(np.expm1(r[:i] - c0)))) if i > 0 else 0.0

    exponent = onset = r2 = None
    after = np.arange(j + 1, t.size)
    model = c0 - gamma_ref * t[after]
    tail = after[model <= np.log(_TAIL_DOMINANCE) + np.log(p[after])]
    if tail.size >= _MIN_TAIL:
        x = np.log(t[tail])
        y = np.log(p[tail])
        b, s, resid = _line_fit(x, y)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        fit_r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
        if fit_r2 > _TAIL_R2:
            exponent, r2 = s, fit_r2

            def gap(tt):
                return c0 - gamma_ref * tt - (b + s * math.log(tt))

            lo_t, hi_t = float(t[j]), float(t[tail[0]])
            if gap(lo_t) > 0 > gap(hi_t):
                onset = brentq(gap, lo_t, hi_t, xtol=1e-12 * hi_t, rtol=1e-14)
            else:
                onset = hi_t
    return DeviationReport(
        exp_window=(float(t[i]), float(t[j])),
        short_time_deviation=short,
        tail_exponent=exponent,
        tail_onset=onset,
        gamma_ref=float(gamma_ref),
        tol=float(tol),
        offset=float(c0),
        tail_r2=r2,
        covers_grid=bool(i == 0 and j == t.size - 1 and keep.all()),
    )
