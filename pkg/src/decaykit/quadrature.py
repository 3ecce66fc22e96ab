"""Adaptive quadrature engine.

Three building blocks:

* ``integrate`` - globally adaptive Gauss-Kronrod (7/15) on finite pieces.
  Semi-infinite pieces split into a tangent-mapped core around a peak hint
  and geometrically growing tail panels summed until they die out.
* ``oscillatory_integrate`` - envelope times ``exp(sign * i * omega * t)``.
  Strategies: plain ``TanMap`` (the above on the product), ``PanelFilon``
  (Legendre-Filon panels with exact Fourier moments plus an asymptotic
  end-correction), ``ContourShift`` (rotate the path into the half-plane
  where the kernel decays; needs an :class:`AnalyticCertificate`).

Everything runs single-threaded with a fixed evaluation order, so results are
bitwise reproducible for a given :class:`QuadSpec`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import IntegrandFailure
from .kernels import legendre_fourier_moments

__all__ = [
    "Strategy",
    "FrequencyDomain",
    "QuadSpec",
    "QuadResult",
    "Peak",
    "AnalyticCertificate",
    "integrate",
    "oscillatory_integrate",
]

_EPS = np.finfo(float).eps


class Strategy(str, enum.Enum):
    TAN_MAP = "TanMap"
    PANEL_FILON = "PanelFilon"
    CONTOUR_SHIFT = "ContourShift"


@dataclass(frozen=True)
class FrequencyDomain:
    """Integration domain: ``FullLine``, ``HalfLine`` ([0, inf)) or ``Interval``."""

    kind: str
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.kind not in ("FullLine", "HalfLine", "Interval"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "Interval":
            if self.a is None or self.b is None:
                raise ValueError("Interval needs both endpoints")
            if not (math.isfinite(self.a) and math.isfinite(self.b)):
                raise ValueError("Interval endpoints must be finite")
            if not self.a < self.b:
                raise ValueError(f"Interval requires a < b, got a={self.a}, b={self.b}")

    @classmethod
    def full_line(cls):
        return cls("FullLine")

    @classmethod
    def half_line(cls):
        return cls("HalfLine")

    @classmethod
    def interval(cls, a, b):
        return cls("Interval", float(a), float(b))

    @property
    def bounds(self) -> tuple[float, float]:
        if self.kind == "FullLine":
            return -math.inf, math.inf
        if self.kind == "HalfLine":
            return 0.0, math.inf
        return self.a, self.b

    def to_dict(self):
        if self.kind == "Interval":
            return {"kind": "Interval", "a": self.a, "b": self.b}
        return {"kind": self.kind}


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200_000
    oscillatory_strategy: Strategy = Strategy.PANEL_FILON

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        object.__setattr__(self, "oscillatory_strategy", Strategy(self.oscillatory_strategy))

    def scaled(self, factor: float) -> "QuadSpec":
        """Same spec with both tolerances multiplied by ``factor``."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )

    def scale(self, c: complex) -> "QuadResult":
        return QuadResult(self.value * c, self.error_estimate * abs(c), self.evaluations, self.converged)


@dataclass(frozen=True)
class Peak:
    """Location and half-width of a narrow feature of the integrand."""

    center: float
    halfwidth: float

    def __post_init__(self):
        if not self.halfwidth > 0:
            raise ValueError("peak halfwidth must be positive")


@dataclass(frozen=True)
class AnalyticCertificate:
    """Caller's promise about the envelope's continuation off the real axis.

    The envelope accepts complex arguments, is analytic and decays to zero in
    the half-plane the contour is shifted into, except for the listed simple
    poles given as ``(location, residue)`` pairs.
    """

    poles: tuple[tuple[complex, complex], ...] = ()


_ZERO = QuadResult(0j, 0.0, 0, True)

# --------------------------------------------------------------------------
# Gauss-Kronrod 7/15 rule
# --------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_GK_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_GK_WK = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GK_WG = np.zeros(15)
_GK_WG[[1, 3, 5]] = _WG[:3]
_GK_WG[7] = _WG[3]
_GK_WG[[9, 11, 13]] = _WG[2::-1]


def _checked(f, x):
    y = np.asarray(f(x))
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if bad.any():
        where = x[bad].ravel()[0]
        raise IntegrandFailure(f"integrand is not finite at x = {where!r}", where)
    return y


def _gk_panels(f, a, b):
    """Kronrod value, error estimate and |f| integral for each panel."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _GK_NODES[None, :]
    y = _checked(f, x)
    k = (y @ _GK_WK) * h
    g = (y @ _GK_WG) * h
    absy = np.abs(y)
    resabs = (absy @ _GK_WK) * np.abs(h)
    mean = k / (2.0 * h)
    resasc = (np.abs(y - mean[:, None]) @ _GK_WK) * np.abs(h)
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    return k.astype(np.complex128), err, 15 * len(a), floor


# --------------------------------------------------------------------------
# Legendre-Filon panel for  int_a^b g(w) exp(i*s*w) dw   (s real)
# --------------------------------------------------------------------------

_FILON_N = 24
_GL_X, _GL_W = npleg.leggauss(_FILON_N)
# coefficient projection: c_k = (2k+1)/2 sum_j w_j g(x_j) P_k(x_j)
_PROJ = np.array([npleg.legval(_GL_X, np.eye(_FILON_N)[k]) for k in range(_FILON_N)])
_PROJ = _PROJ * _GL_W[None, :] * ((2 * np.arange(_FILON_N) + 1) / 2.0)[:, None]
_K = np.arange(_FILON_N, dtype=float)
_DP1 = _K * (_K + 1) / 2.0
_DDP1 = (_K - 1) * _K * (_K + 1) * (_K + 2) / 8.0
_PARITY = (-1.0) ** _K


def _filon_coeffs(g, a, b):
    m = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = m[:, None] + h[:, None] * _GL_X[None, :]
    y = _checked(g, x).astype(np.complex128)
    return y @ _PROJ.T, y, m, h


def _filon_panels(g, s):
    def panels(a, b):
        coef, y, m, h = _filon_coeffs(g, a, b)
        kappa = s * h
        mom = legendre_fourier_moments(np.ascontiguousarray(kappa), _FILON_N)
        val = h * np.exp(1j * s * m) * np.sum(coef * mom, axis=1)
        bound = np.minimum(2.0, 2.0 / np.maximum(np.abs(kappa), 1e-300))
        err = np.abs(h) * bound * np.sum(np.abs(coef[:, -4:]), axis=1)
        # roundoff in the projected coefficients: about eps * (2k+1)/2 * max|y| each
        ymax = np.max(np.abs(y), axis=1)
        floor = np.maximum(4.0 * _EPS * np.abs(h) * (np.abs(y) @ _GL_W),
                           64.0 * _EPS * np.abs(h) * bound * ymax)
        err = np.maximum(err, floor)
        return val, err, _FILON_N * len(a), floor
    return panels


# --------------------------------------------------------------------------
# Globally adaptive bisection over a list of panels
# --------------------------------------------------------------------------

@dataclass
class _Adaptive:
    value: complex
    error: float
    evaluations: int
    converged: bool
    panels: int


def _adaptive(panel_rule, breaks, abs_tol, rel_tol, max_panels):
    """Bisect the worst panels until the summed error meets the tolerance.

    ``panel_rule(a, b)`` returns per-panel values, error estimates, the number
    of evaluations and a roundoff floor. Panels whose error sits at the floor
    are never split again; if only such panels remain, the result comes back
    unconverged instead of burning the whole budget.
    """
    breaks = np.asarray(breaks, dtype=float)
    a = breaks[:-1].copy()
    b = breaks[1:].copy()
    val, err, nev, floor = panel_rule(a, b)
    while True:
        total = val.sum()
        tol = max(abs_tol, rel_tol * abs(total))
        etot = err.sum()
        if etot <= tol:
            return _Adaptive(total, float(etot), nev, True, len(a))
        room = max_panels - len(a)
        width = b - a
        scale = np.maximum(np.abs(a), np.abs(b))
        live = (err > 2.0 * floor) & (width > 256.0 * _EPS * scale)
        if room <= 0 or not live.any():
            return _Adaptive(total, float(etot), nev, False, len(a))
        cand = np.flatnonzero(live)
        order = cand[np.argsort(-err[cand], kind="stable")]
        need = etot - 0.5 * tol
        cum = np.cumsum(err[order])
        k = int(np.searchsorted(cum, need)) + 1
        k = max(1, min(k, room, order.size))
        pick = order[:k]
        keep = np.ones(len(a), dtype=bool)
        keep[pick] = False
        m = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], m])
        nb = np.concatenate([m, b[pick]])
        nval, nerr, n, nfloor = panel_rule(na, nb)
        nev += n
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
        floor = np.concatenate([floor[keep], nfloor])


# --------------------------------------------------------------------------
# integrate
# --------------------------------------------------------------------------

_CORE_WIDTHS = 64.0
_MAX_TAIL_PANELS = 96


def _peak_breaks(lo, hi, peaks, multiples=(0.0, 1.0, 4.0, 16.0)):
    pts = {lo, hi}
    for p in peaks:
        for m in multiples:
            for x in (p.center - m * p.halfwidth, p.center + m * p.halfwidth):
                if lo < x < hi:
                    pts.add(x)
    return np.array(sorted(pts))


def _core_range(lo, hi, peaks):
    if peaks:
        left = min(p.center - _CORE_WIDTHS * p.halfwidth for p in peaks)
        right = max(p.center + _CORE_WIDTHS * p.halfwidth for p in peaks)
    else:
        anchor = lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0)
        left, right = anchor - _CORE_WIDTHS, anchor + _CORE_WIDTHS
    if math.isfinite(lo):
        left = lo
        right = max(right, lo + _CORE_WIDTHS * (peaks[0].halfwidth if peaks else 1.0))
    if math.isfinite(hi):
        right = hi
        left = min(left, hi - _CORE_WIDTHS * (peaks[0].halfwidth if peaks else 1.0))
    return left, right


def _tan_core(f, left, right, peaks, abs_tol, rel_tol, max_panels):
    if peaks:
        primary = min(peaks, key=lambda p: p.halfwidth)
        c, h = primary.center, primary.halfwidth
    else:
        c, h = 0.5 * (left + right), 0.5 * (right - left) / _CORE_WIDTHS

    def g(theta):
        return f(c + h * np.tan(theta)) * (h / np.cos(theta) ** 2)

    th_lo = math.atan((left - c) / h)
    th_hi = math.atan((right - c) / h)
    breaks = {th_lo, th_hi}
    for x in _peak_breaks(left, right, peaks):
        th = math.atan((x - c) / h)
        if th_lo < th < th_hi:
            breaks.add(th)
    # a few uniform splits so the first sweep sees the whole range
    for th in np.linspace(th_lo, th_hi, 9)[1:-1]:
        breaks.add(float(th))
    return _adaptive(_gk_rule(g), sorted(breaks), abs_tol, rel_tol, max_panels)


def _gk_rule(f):
    return lambda a, b: _gk_panels(f, a, b)


def _geometric_tail(panel_integral, start, step, direction, budget):
    """Sum panels [start + step(2^k - 1), start + step(2^(k+1) - 1)] (mirrored
    when direction = -1) until the contributions have died out.

    ``panel_integral(a, b, tol)`` returns an ``_Adaptive`` for one panel.
    When successive contributions shrink by a steady real ratio the remainder
    is summed as a geometric series; otherwise its size is only bounded.
    """
    total = 0j
    err = 0.0
    nev = 0
    ok = True
    prev = None
    prev_ratio = None
    for k in range(_MAX_TAIL_PANELS):
        x0 = start + direction * step * (2.0**k - 1.0)
        x1 = start + direction * step * (2.0 ** (k + 1) - 1.0)
        a, b = (x0, x1) if direction > 0 else (x1, x0)
        res = panel_integral(a, b, budget * 0.075 * 0.85**k)
        total += res.value
        err += res.error
        nev += res.evaluations
        ok = ok and res.converged
        cur = complex(res.value)
        if prev is not None:
            if cur == 0:
                return total, err, nev, ok
            ratio = cur / prev if prev != 0 else 0j
            mag = abs(ratio)
            if mag <= 0.75:
                q = max(mag, 0.25)
                # the ratio may still creep up towards its limit: keep a factor 2 in hand
                bound = 2.0 * abs(cur) * q / (1.0 - q)
                steady = (prev_ratio is not None and abs(ratio.imag) < 1e-3 * mag
                          and abs(ratio - prev_ratio) < 1e-2 * mag)
                if steady:
                    extra = cur * ratio / (1.0 - ratio)
                    # a drift d in the ratio moves the sum by about d / (r (1 - r)) relative;
                    # the factor 2 covers the drift still to come
                    drift = abs(ratio - prev_ratio) / (mag * (1.0 - mag))
                    rem_err = abs(extra) * (2.0 * drift + 1e-3)
                    if rem_err <= budget / 2.0:
                        return total + extra, err + rem_err, nev, ok
                if bound <= budget / 2.0:
                    return total, err + bound, nev, ok
            prev_ratio = ratio
        prev = cur
    return total, err + 10.0 * abs(prev or 0.0), nev, False


def integrate(f: Callable[[np.ndarray], np.ndarray], dom: FrequencyDomain,
              spec: QuadSpec | None = None, peaks: Sequence[Peak] = ()) -> QuadResult:
    """Integrate a vectorised ``f`` over ``dom``.

    ``f`` receives float arrays of any shape and must return an array of the
    same shape (real or complex). ``peaks`` lists narrow features; for
    semi-infinite domains the narrowest one centres the tangent map.

    Non-convergence is reported through ``converged=False``; a NaN or Inf from
    ``f`` raises :class:`IntegrandFailure`.
    """
    spec = spec or QuadSpec()
    peaks = tuple(peaks)
    lo, hi = dom.bounds
    if math.isfinite(lo) and math.isfinite(hi):
        res = _adaptive(_gk_rule(f), _peak_breaks(lo, hi, peaks), spec.abs_tol, spec.rel_tol,
                        spec.max_subdivisions)
        return QuadResult(complex(res.value), res.error, res.evaluations, res.converged)

    left, right = _core_range(lo, hi, peaks)
    core = _tan_core(f, left, right, peaks, spec.abs_tol / 3.0, spec.rel_tol / 3.0,
                     spec.max_subdivisions)
    target = max(spec.abs_tol, spec.rel_tol * abs(core.value))
    budget = target / 6.0
    used = [core.panels]

    def panel(a, b, tol):
        room = max(16, spec.max_subdivisions - used[0])
        res = _adaptive(_gk_rule(f), _peak_breaks(a, b, peaks), tol, spec.rel_tol * 0.1, room)
        used[0] += res.panels
        return res

    value = core.value
    error = core.error
    nev = core.evaluations
    ok = core.converged
    step = right - left
    if not math.isfinite(hi):
        v, e, n, c = _geometric_tail(panel, right, step, +1, budget)
        value, error, nev, ok = value + v, error + e, nev + n, ok and c
    if not math.isfinite(lo):
        v, e, n, c = _geometric_tail(panel, left, step, -1, budget)
        value, error, nev, ok = value + v, error + e, nev + n, ok and c
    ok = ok and error <= max(spec.abs_tol, spec.rel_tol * abs(value))
    return QuadResult(complex(value), float(error), nev, ok)


# --------------------------------------------------------------------------
# oscillatory_integrate
# --------------------------------------------------------------------------

def _filon_endpoint(g, a, b, side):
    """g, g', g'' at the right (side=+1) or left (side=-1) end of [a, b]."""
    coef, _, _, h = _filon_coeffs(g, np.array([a]), np.array([b]))
    c = coef[0]
    h = h[0]
    if side > 0:
        return c.sum(), (c * _DP1).sum() / h, (c * _DDP1).sum() / h**2
    return (c * _PARITY).sum(), -(c * _PARITY * _DP1).sum() / h, (c * _PARITY * _DDP1).sum() / h**2


def _filon_integrate(envelope, s, dom, spec, peaks):
    lo, hi = dom.bounds
    rule = _filon_panels(envelope, s)
    if math.isfinite(lo) and math.isfinite(hi):
        breaks = _filon_breaks(lo, hi, peaks, s)
        res = _adaptive(rule, breaks, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
        return QuadResult(complex(res.value), res.error, res.evaluations, res.converged)

    left, right = _core_range(lo, hi, peaks)
    core = _adaptive(rule, _filon_breaks(left, right, peaks, s), spec.abs_tol / 3.0,
                     spec.rel_tol / 3.0, spec.max_subdivisions)
    target = max(spec.abs_tol, spec.rel_tol * abs(core.value))
    budget = target / 6.0
    total = QuadResult(complex(core.value), core.error, core.evaluations, core.converged)
    step = right - left
    if not math.isfinite(hi):
        total = total + _filon_tail(envelope, rule, right, step, +1, s, budget, spec)
    if not math.isfinite(lo):
        total = total + _filon_tail(envelope, rule, left, step, -1, s, budget, spec)
    ok = total.converged and total.error_estimate <= max(spec.abs_tol, spec.rel_tol * abs(total.value))
    return replace(total, converged=ok)


def _filon_breaks(lo, hi, peaks, s):
    pts = set(_peak_breaks(lo, hi, peaks).tolist())
    # keep panels no wider than a handful of core widths initially
    for x in np.linspace(lo, hi, 9)[1:-1]:
        pts.add(float(x))
    return np.array(sorted(pts))


def _filon_tail(envelope, rule, start, step, direction, s, budget, spec):
    total = 0j
    err = 0.0
    nev = 0
    ok = True
    a_s = 1j * s
    for k in range(_MAX_TAIL_PANELS):
        x0 = start + direction * step * (2.0**k - 1.0)
        x1 = start + direction * step * (2.0 ** (k + 1) - 1.0)
        a, b = (x0, x1) if direction > 0 else (x1, x0)
        res = _adaptive(rule, [a, b], budget * 0.15 * 0.85**k, spec.rel_tol * 0.1, 4096)
        total += res.value
        err += res.error
        nev += res.evaluations
        ok = ok and res.converged
        edge = x1
        if abs(edge * s) < 20.0:
            continue
        g0, g1, g2 = _filon_endpoint(envelope, a, b, direction)
        nev += _FILON_N
        # int_X^inf g e^{i s w} = -e^{i s X} [g/(is) - g'/(is)^2 + g''/(is)^3 - ...]
        # int_-inf^Y g e^{i s w} =  e^{i s Y} [g/(is) - g'/(is)^2 + g''/(is)^3 - ...]
        series = g0 / a_s - g1 / a_s**2 + g2 / a_s**3
        rem = -direction * np.exp(a_s * edge) * series
        rem_err = abs(g2 / a_s**3) + 64.0 * _EPS * abs(series)
        if rem_err <= budget:
            return QuadResult(total + rem, err + rem_err, nev, ok)
    return QuadResult(total, err + abs(total), nev, False)


_TILTS = (0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0)  # multiples of pi/12
_MIN_SEPARATION = math.pi / 12


def _ray_angle(e, poles, up):
    """Direction of the shifted ray from endpoint ``e``.

    Vertical unless a pole sits within 15 degrees of it; then the ray is
    tilted (by multiples of 15 degrees, at most 60) to keep clear of poles.
    """
    base = 0.5 * math.pi if up else -0.5 * math.pi
    angles = [math.atan2((p - e).imag, (p - e).real) for p in poles]
    best, best_sep = base, -1.0
    for k in _TILTS:
        phi = base + k * math.pi / 12
        sep = min((abs(a - phi) for a in angles), default=math.pi)
        if sep >= _MIN_SEPARATION:
            return phi
        if sep > best_sep:
            best, best_sep = phi, sep
    return best


def _contour_shift(envelope, t, s, dom, spec, cert):
    lo, hi = dom.bounds
    up = s > 0  # kernel exp(i s w) decays for Im w > 0 when s > 0
    orient = 1.0 if up else -1.0
    poles = [(complex(p), complex(r)) for p, r in cert.poles]
    side = [(p, r) for p, r in poles if p.imag != 0 and (p.imag > 0) == up]

    def ray(e, phi):
        # int_0^inf envelope(e + d u) exp(i s (e + d u)) d du along d = exp(i phi)
        d = complex(math.cos(phi), math.sin(phi))
        rate = abs(s) * abs(d.imag)
        extra = []
        for p, _ in poles:
            u = (p - e) / d
            if u.real > 0:
                extra.append(Peak(u.real, max(abs(u.imag), 1e-12)))
        peaks = (Peak(0.0, 1.0 / rate),) + tuple(extra)
        res = integrate(lambda u: envelope(e + d * u) * np.exp(1j * s * d * u),
                        FrequencyDomain.half_line(), spec.scaled(0.5), peaks)
        return res.scale(d * np.exp(1j * s * e))

    phi_lo = _ray_angle(lo, [p for p, _ in side], up) if math.isfinite(lo) else None
    phi_hi = _ray_angle(hi, [p for p, _ in side], up) if math.isfinite(hi) else None
    residues = 0j
    for p, r in side:
        # enclosed: right of the lo ray and left of the hi ray (mirrored below the axis)
        inside = True
        if phi_lo is not None:
            inside &= abs(math.atan2((p - lo).imag, (p - lo).real)) < abs(phi_lo)
        if phi_hi is not None:
            inside &= abs(math.atan2((p - hi).imag, (p - hi).real)) > abs(phi_hi)
        if inside:
            residues += r * np.exp(1j * s * p)
    total = _ZERO + QuadResult(orient * 2j * math.pi * residues, 16 * _EPS * abs(residues), 0, True)
    if phi_lo is not None:
        total = total + ray(lo, phi_lo)
    if phi_hi is not None:
        total = total + ray(hi, phi_hi).scale(-1.0)
    return total


def oscillatory_integrate(envelope: Callable[[np.ndarray], np.ndarray], freq: float,
                          dom: FrequencyDomain, spec: QuadSpec | None = None,
                          peaks: Sequence[Peak] = (), certificate: AnalyticCertificate | None = None,
                          sign: int = -1) -> QuadResult:
    """Integrate ``envelope(w) * exp(sign * 1j * w * freq)`` over ``dom``.

    ``sign=-1`` is the amplitude convention; time-domain durations use
    ``sign=+1``. For small ``|freq| * span`` the plain tangent-mapped rule is
    used whatever the strategy, since there is nothing to oscillate.

    ``Strategy.CONTOUR_SHIFT`` requires ``certificate``; the envelope must then
    accept complex arguments.
    """
    spec = spec or QuadSpec()
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    t = float(freq)
    s = sign * t
    strategy = spec.oscillatory_strategy
    if strategy is Strategy.CONTOUR_SHIFT and certificate is None:
        raise ValueError("ContourShift needs an AnalyticCertificate for the envelope")
    lo, hi = dom.bounds
    span = hi - lo
    if t == 0.0:
        return integrate(envelope, dom, spec, peaks)
    if strategy is Strategy.TAN_MAP or abs(t) * span <= 2.0 * math.pi:
        return integrate(lambda w: envelope(w) * np.exp(1j * s * w), dom, spec, peaks)
    if strategy is Strategy.PANEL_FILON:
        return _filon_integrate(envelope, s, dom, spec, tuple(peaks))
    return _contour_shift(envelope, t, s, dom, spec, certificate)
