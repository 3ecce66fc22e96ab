"""Survival amplitudes and time-domain durations.

Fourier conventions (fixed everywhere):

* amplitude  L(t) = int w(omega) exp(-i omega t) d omega
* duration   tau(t) = (1/2pi) int tau(omega) exp(+i omega t) d omega
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import CutoffTooSmall, DecayKitError, TZero
from .quadrature import (FrequencyDomain, Peak, QuadResult, QuadSpec, Strategy, integrate,
                         oscillatory_integrate)
from .smatrix import Mode, SMatrixModel, durations
from .spectral import ResonanceParams, SpectralDensity

__all__ = [
    "TimeGrid",
    "SurvivalCurve",
    "TauTimeSeries",
    "TauTransform",
    "survival",
    "survival_closed_form_fullline",
    "fullline_amplitude",
    "tau_time_residues",
    "tau_time_transform",
    "SHIFT_THRESHOLD",
]

# gamma * t beyond which half-line amplitudes are computed by contour shift
SHIFT_THRESHOLD = 40.0


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("time grid is empty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("time grid contains non-finite values")
        if np.any(pts < 0):
            raise ValueError("time grid must be non-negative")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("time grid must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def linear(cls, t_min, t_max, n):
        return cls(np.linspace(t_min, t_max, n))

    @classmethod
    def log(cls, t_min, t_max, n):
        if t_min <= 0:
            raise ValueError("log-spaced grids need t_min > 0")
        return cls(np.geomspace(t_min, t_max, n))

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class SurvivalCurve:
    grid: TimeGrid
    amplitude: np.ndarray
    probability: np.ndarray
    domain_used: FrequencyDomain
    converged: np.ndarray
    error_estimate: np.ndarray
    renormalized: bool = False

    @classmethod
    def from_probability(cls, t, p, domain=None):
        """Wrap synthetic probabilities (amplitude = sqrt(P), all converged)."""
        p = np.asarray(p, dtype=float)
        return cls(TimeGrid(t), np.sqrt(np.clip(p, 0, None)).astype(complex), p,
                   domain or FrequencyDomain.full_line(), np.ones(p.size, bool), np.zeros(p.size))

    @property
    def t(self):
        return self.grid.points

    @property
    def converged_fraction(self) -> float:
        return float(np.mean(self.converged))


@dataclass(frozen=True)
class TauTimeSeries:
    grid: TimeGrid
    residue_value: np.ndarray
    averaged_envelope: np.ndarray
    transform_value: np.ndarray | None = None
    transform_error: np.ndarray | None = None


@dataclass(frozen=True)
class TauTransform:
    values: np.ndarray
    errors: np.ndarray
    tail_bounds: np.ndarray
    converged: np.ndarray


def survival_closed_form_fullline(r: ResonanceParams, t):
    """exp(-i omega0 t - gamma |t| / 2): the full-line transform of one resonance."""
    t = np.asarray(t, dtype=float)
    out = np.exp(-1j * r.omega0 * t - 0.5 * r.gamma * np.abs(t))
    return out if out.ndim else complex(out)


def fullline_amplitude(d: SpectralDensity, t):
    """Weighted sum of :func:`survival_closed_form_fullline` over the mixture."""
    t = np.asarray(t, dtype=float)
    out = sum(w * survival_closed_form_fullline(r, t) for r, w in zip(d.resonances, d.weights))
    return out if np.ndim(out) else complex(out)


def _amplitude_point(d, dom, t, spec, peaks, cert):
    if t == 0.0:
        return integrate(d, dom, spec, peaks)
    use = spec
    lo, hi = dom.bounds
    if (math.isfinite(lo) or math.isfinite(hi)) and d.gamma_min * t > SHIFT_THRESHOLD:
        use = replace(spec, oscillatory_strategy=Strategy.CONTOUR_SHIFT)
    return oscillatory_integrate(d, t, dom, use, peaks, certificate=cert, sign=-1)


def _map(fn, items, workers):
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def survival(d: SpectralDensity, dom: FrequencyDomain, grid: TimeGrid, spec: QuadSpec | None = None,
             renormalize: bool = False, workers: int | None = 1) -> SurvivalCurve:
    """Amplitude L(t) and probability |L(t)|^2 on ``grid``.

    With ``renormalize`` the amplitude is divided by the weight of ``d`` on
    ``dom`` so that P(0) = 1; by default it is not, and P(0) equals that
    weight squared.

    Each time point is independent: a point whose quadrature fails or does not
    converge is flagged in ``converged`` (failed points carry NaN) and the rest
    of the curve is still returned. Output order follows ``grid`` for any
    ``workers``.
    """
    spec = spec or QuadSpec()
    peaks = d.peaks()
    cert = d.certificate()

    def point(t):
        try:
            return _amplitude_point(d, dom, float(t), spec, peaks, cert)
        except DecayKitError:
            return QuadResult(complex(math.nan, math.nan), math.inf, 0, False)

    results = _map(point, list(grid.points), workers)
    amp = np.array([r.value for r in results], dtype=complex)
    err = np.array([r.error_estimate for r in results])
    ok = np.array([bool(r.converged) for r in results])
    if renormalize:
        n = integrate(d, dom, spec, peaks)
        amp = amp / n.value.real
        err = err / n.value.real
        ok = ok & bool(n.converged)
    prob = np.abs(amp) ** 2
    return SurvivalCurve(grid, amp, prob, dom, ok, err, renormalize)


def _check_tau_model(m: SMatrixModel):
    if m.mode is not Mode.UNITARY_PAIR:
        raise ValueError("time-domain durations need a UnitaryPair model")


def tau_time_residues(m: SMatrixModel, grid: TimeGrid) -> TauTimeSeries:
    """tau(t) from the residue sum over upper half-plane zeros.

    For t > 0 the transform closes above the real axis, where only the zeros
    of S sit; each simple zero z_k adds exp(i z_k t). For a pair this is
    2 cos(omega_n t) exp(-gamma_n t / 2). ``averaged_envelope`` drops the
    oscillating phases and keeps sum_n exp(-gamma_n t).
    """
    _check_tau_model(m)
    t = grid.points
    if np.any(t == 0):
        raise TZero("t = 0 is on the grid: contour closure is undefined there")
    zeros = m.zeros
    residue = np.exp(1j * np.outer(t, zeros)).sum(axis=1)
    gam = np.array([p.gamma_n for p in m.pairs])
    envelope = np.exp(-np.outer(t, gam)).sum(axis=1)
    return TauTimeSeries(grid, residue, envelope)


def _tail_bound(m: SMatrixModel, cutoff: float, t: float) -> float:
    # For |w| >= c, 0 <= tau(w) <= A / w^2 with A = sum 2 g_n / (1 - w_n/c)^2,
    # and tau decreases there. Both tails together contribute at most
    # (1/pi) min(A / c, 2 A / (c^2 t)).
    a = sum(2.0 * p.gamma_n / (1.0 - p.omega_n / cutoff) ** 2 for p in m.pairs)
    bound = a / cutoff
    if t > 0:
        bound = min(bound, 2.0 * a / (cutoff * cutoff * t))
    return bound / math.pi


def tau_time_transform(m: SMatrixModel, grid: TimeGrid, cutoff: float, spec: QuadSpec | None = None,
                       tail_tol: float = 1e-3, workers: int | None = 1) -> TauTransform:
    """Direct numerical transform of tau(omega) over [-cutoff, cutoff].

    ``errors`` combine the quadrature estimate and a rigorous bound on the
    discarded tails (``tail_bounds``). Raises :class:`CutoffTooSmall` when a
    tail bound exceeds ``tail_tol``.
    """
    _check_tau_model(m)
    spec = spec or QuadSpec()
    top = max(p.omega_n + p.gamma_n for p in m.pairs)
    if cutoff <= top:
        raise CutoffTooSmall(f"cutoff {cutoff} must exceed max(omega_n + gamma_n) = {top}")
    tails = np.array([_tail_bound(m, cutoff, float(t)) for t in grid.points])
    if np.any(tails > tail_tol):
        i = int(np.argmax(tails))
        raise CutoffTooSmall(
            f"tail beyond cutoff {cutoff} may contribute {tails[i]:.3g} at t={grid.points[i]} "
            f"(allowed {tail_tol:.3g})")
    peaks = []
    for p in m.pairs:
        peaks += [Peak(p.omega_n, 0.5 * p.gamma_n), Peak(-p.omega_n, 0.5 * p.gamma_n)]
    dom = FrequencyDomain.interval(-cutoff, cutoff)

    def tau(w):
        return durations(m, w)

    def point(t):
        return oscillatory_integrate(tau, float(t), dom, spec, peaks, sign=+1)

    results = _map(point, list(grid.points), workers)
    vals = np.array([r.value for r in results]) / (2.0 * math.pi)
    errs = np.array([r.error_estimate for r in results]) / (2.0 * math.pi) + tails
    ok = np.array([bool(r.converged) for r in results])
    return TauTransform(vals, errs, tails, ok)
