"""Argument-principle integrals of S-matrix models over closed contours.

Two independent routes count zeros minus poles inside a contour:

* phase accumulation: the contour is sampled finely enough that every step
  changes arg S by less than pi/4, and the increments are summed;
* quadrature of tau(z) = -i S'(z)/S(z) along the contour, which gives
  2 pi (N - P) directly.

They must agree with each other and with the inventory read off the model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GuardViolation, NonInteger
from .quadrature import FrequencyDomain, Peak, QuadResult, QuadSpec, integrate
from .smatrix import SMatrixModel, evaluate, log_derivative

__all__ = [
    "ContourSpec",
    "HalfPlane",
    "Disk",
    "WindingResult",
    "ZeroPoleInventory",
    "winding_integral",
    "log_residue_integral",
    "log_residue_quad",
    "residue_sum",
    "count_zeros_poles",
    "CONTOUR_GUARD",
    "BASELINE_OFFSET",
]

CONTOUR_GUARD = 1e-9  # times gamma_min
BASELINE_OFFSET = 1e-3  # times gamma_min

_MAX_REFINE = 60
_MAX_NODES = 2_000_000


# --------------------------------------------------------------------------
# Contour pieces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Line:
    z0: complex
    z1: complex

    def point(self, s):
        return self.z0 + (self.z1 - self.z0) * s

    def deriv(self, s):
        return np.full(np.shape(s), self.z1 - self.z0, dtype=complex)

    @property
    def length(self):
        return abs(self.z1 - self.z0)

    def distance(self, p):
        d = self.z1 - self.z0
        u = ((p - self.z0) * d.conjugate()).real / abs(d) ** 2
        u = min(max(u, 0.0), 1.0)
        return abs(p - self.point(u))

    def project(self, p):
        """Parameter of the closest point and the distance in parameter units."""
        d = self.z1 - self.z0
        u = ((p - self.z0) * d.conjugate()).real / abs(d) ** 2
        return u, self.distance(p) / abs(d)


@dataclass(frozen=True)
class _Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, s):
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * np.exp(1j * th)

    def deriv(self, s):
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)

    @property
    def length(self):
        return abs(self.theta1 - self.theta0) * self.radius

    def _param(self, p):
        th = math.atan2((p - self.center).imag, (p - self.center).real)
        lo, hi = sorted((self.theta0, self.theta1))
        while th < lo - math.pi:
            th += 2 * math.pi
        while th > hi + math.pi:
            th -= 2 * math.pi
        return (th - self.theta0) / (self.theta1 - self.theta0)

    def distance(self, p):
        u = self._param(p)
        if 0.0 <= u <= 1.0:
            return abs(abs(p - self.center) - self.radius)
        return min(abs(p - self.point(0.0)), abs(p - self.point(1.0)))

    def project(self, p):
        return self._param(p), self.distance(p) / self.length


# --------------------------------------------------------------------------
# Regions and contours
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlane:
    """Open half-plane Im z > 0 (``upper=True``) or Im z < 0."""

    upper: bool = True

    def contains(self, z: complex) -> bool:
        return z.imag > 0 if self.upper else z.imag < 0


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius


@dataclass(frozen=True)
class ContourSpec:
    """Positively oriented closed contour.

    ``Rectangle`` params are (x0, x1, y0, y1); ``SemicircleUpper`` params are
    (radius, eps) with eps the height of the baseline (None picks
    1e-3 * gamma_min of the model). A rectangle edge lying exactly on the real
    axis is lifted to +1e-3 * gamma_min, i.e. S is sampled at omega + i eps.
    """

    kind: str
    params: tuple
    samples: int = 256

    def __post_init__(self):
        if self.kind not in ("Rectangle", "SemicircleUpper"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.samples < 4:
            raise ValueError("samples must be at least 4")
        if self.kind == "Rectangle":
            x0, x1, y0, y1 = (float(v) for v in self.params)
            if not (x0 < x1 and y0 < y1):
                raise ValueError("rectangle needs x0 < x1 and y0 < y1")
            object.__setattr__(self, "params", (x0, x1, y0, y1))
        else:
            radius, eps = self.params
            if not radius > 0:
                raise ValueError("semicircle radius must be positive")
            if eps is not None and not (0 <= eps < radius):
                raise ValueError("baseline offset must lie in [0, radius)")
            object.__setattr__(self, "params", (float(radius), None if eps is None else float(eps)))

    @classmethod
    def rectangle(cls, x0, x1, y0, y1, samples=256):
        return cls("Rectangle", (x0, x1, y0, y1), samples)

    @classmethod
    def semicircle_upper(cls, radius, eps=None, samples=256):
        return cls("SemicircleUpper", (radius, eps), samples)

    def resolved(self, gamma_min: float) -> "ContourSpec":
        """The contour actually traversed for a model with this gamma_min."""
        eps = BASELINE_OFFSET * gamma_min
        if self.kind == "Rectangle":
            x0, x1, y0, y1 = self.params
            y0 = eps if y0 == 0.0 else y0
            y1 = eps if y1 == 0.0 else y1
            if y1 <= y0:
                raise ValueError("rectangle collapses after lifting its real-axis edge")
            return ContourSpec("Rectangle", (x0, x1, y0, y1), self.samples)
        radius, e = self.params
        return ContourSpec("SemicircleUpper", (radius, eps if e is None else e), self.samples)

    def pieces(self):
        if self.kind == "Rectangle":
            x0, x1, y0, y1 = self.params
            c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
            return [_Line(c[i], c[(i + 1) % 4]) for i in range(4)]
        radius, eps = self.params
        eps = eps or 0.0
        base = complex(0.0, eps)
        return [_Line(base - radius, base + radius), _Arc(base, radius, 0.0, math.pi)]

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if self.kind == "Rectangle":
            x0, x1, y0, y1 = self.params
            return x0 < z.real < x1 and y0 < z.imag < y1
        radius, eps = self.params
        eps = eps or 0.0
        return z.imag > eps and abs(z - complex(0.0, eps)) < radius

    def distance(self, z: complex) -> float:
        return min(p.distance(complex(z)) for p in self.pieces())

    def to_dict(self):
        return {"kind": self.kind, "params": list(self.params), "samples": self.samples}


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroPoleInventory:
    zeros: tuple[tuple[complex, int], ...] = ()
    poles: tuple[tuple[complex, int], ...] = ()

    @property
    def n_zeros(self) -> int:
        return sum(k for _, k in self.zeros)

    @property
    def n_poles(self) -> int:
        return sum(k for _, k in self.poles)

    def to_dict(self):
        return {
            "zeros": [{"re": z.real, "im": z.imag, "multiplicity": k} for z, k in self.zeros],
            "poles": [{"re": z.real, "im": z.imag, "multiplicity": k} for z, k in self.poles],
        }


@dataclass(frozen=True)
class WindingResult:
    integral_value: complex
    n_minus_p: int
    raw: float
    zeros_found: int
    poles_found: int
    raw_phase: float = 0.0
    error_estimate: float = 0.0
    inventory: ZeroPoleInventory = field(default_factory=ZeroPoleInventory)

    def to_dict(self):
        return {
            "integral_value": [self.integral_value.real, self.integral_value.imag],
            "n_minus_p": self.n_minus_p,
            "raw": self.raw,
            "raw_phase": self.raw_phase,
            "error_estimate": self.error_estimate,
            "zeros_found": self.zeros_found,
            "poles_found": self.poles_found,
            "inventory": self.inventory.to_dict(),
        }


# --------------------------------------------------------------------------

def count_zeros_poles(m: SMatrixModel, region) -> ZeroPoleInventory:
    """Zeros and poles of ``m`` inside ``region`` (anything with ``contains``).

    Read directly from the model: no root finding. A :class:`ContourSpec` is
    resolved against the model first, so its interior is the one traversed by
    :func:`winding_integral`.
    """
    if isinstance(region, ContourSpec):
        region = region.resolved(m.gamma_min)
    zeros = tuple((complex(z), 1) for z in m.zeros if region.contains(complex(z)))
    poles = tuple((complex(p), 1) for p in m.poles if region.contains(complex(p)))
    return ZeroPoleInventory(zeros, poles)


def _singularities(m: SMatrixModel) -> np.ndarray:
    return np.concatenate([m.zeros, m.poles])


def _check_guard(m: SMatrixModel, c: ContourSpec):
    radius = CONTOUR_GUARD * m.gamma_min
    for p in _singularities(m):
        d = c.distance(complex(p))
        if d < radius:
            raise GuardViolation(
                f"contour passes within {d:.3g} of the singularity at {complex(p)!r} "
                f"(guard radius {radius:.3g})")


def _phase_winding(m: SMatrixModel, c: ContourSpec) -> float:
    """Sum of arg S increments around ``c`` divided by 2 pi.

    Each piece is bisected until every step moves arg S by less than pi/4 and
    is no longer than half the distance to the nearest zero or pole.
    """
    sing = _singularities(m)
    total = 0.0
    pieces = c.pieces()
    perimeter = sum(p.length for p in pieces)
    for piece in pieces:
        n = max(4, int(math.ceil(c.samples * piece.length / perimeter)))
        s = np.linspace(0.0, 1.0, n + 1)
        for _ in range(_MAX_REFINE):
            z = piece.point(s)
            v = np.atleast_1d(evaluate(m, z))
            inc = np.angle(v[1:] / v[:-1])
            chord = np.abs(np.diff(z))
            mid = piece.point(0.5 * (s[1:] + s[:-1]))
            dist = np.min(np.abs(mid[:, None] - sing[None, :]), axis=1)
            bad = (np.abs(inc) >= 0.25 * math.pi) | (chord > 0.5 * dist)
            if not bad.any():
                break
            if s.size > _MAX_NODES:
                raise NonInteger("phase sampling did not resolve the contour")
            s = np.sort(np.concatenate([s, 0.5 * (s[:-1] + s[1:])[bad]]))
        else:
            raise NonInteger("phase sampling did not resolve the contour")
        total += float(inc.sum())
    return total / (2.0 * math.pi)


def _piece_peaks(piece, sing):
    peaks = []
    for p in sing:
        u, h = piece.project(complex(p))
        if -1.0 < u < 2.0:
            peaks.append(Peak(float(u), max(float(h), 1e-12)))
    return peaks


def log_residue_quad(weight: Callable, m: SMatrixModel, c: ContourSpec,
                     spec: QuadSpec | None = None) -> QuadResult:
    """(1/(2 pi i)) times the contour integral of weight(z) S'(z)/S(z)."""
    spec = spec or QuadSpec()
    c = c.resolved(m.gamma_min)
    _check_guard(m, c)
    sing = _singularities(m)
    total = QuadResult(0j, 0.0, 0, True)
    unit = FrequencyDomain.interval(0.0, 1.0)
    for piece in c.pieces():
        def f(s, piece=piece):
            z = piece.point(s)
            flat = np.ascontiguousarray(np.ravel(z))
            dlog = np.asarray(log_derivative(m, flat)).reshape(np.shape(z))
            return np.asarray(weight(z)) * dlog * piece.deriv(s)
        total = total + integrate(f, unit, spec, _piece_peaks(piece, sing))
    return total.scale(1.0 / (2j * math.pi))


def log_residue_integral(weight: Callable, m: SMatrixModel, c: ContourSpec,
                         spec: QuadSpec | None = None) -> complex:
    """Weighted logarithmic residue: sum of weight at enclosed zeros minus at poles.

    ``weight`` must be analytic on and inside ``c`` and accept complex arrays.
    """
    return complex(log_residue_quad(weight, m, c, spec).value)


def residue_sum(weight: Callable, m: SMatrixModel, region) -> complex:
    """Exact right-hand side: sum n_k weight(a_k) - sum p_k weight(b_k)."""
    inv = count_zeros_poles(m, region)
    out = 0j
    for z, k in inv.zeros:
        out += k * complex(np.asarray(weight(np.array([z])))[0])
    for p, k in inv.poles:
        out -= k * complex(np.asarray(weight(np.array([p])))[0])
    return out


def _one(z):
    return np.ones(np.shape(z), dtype=complex)


def winding_integral(m: SMatrixModel, c: ContourSpec, spec: QuadSpec | None = None) -> WindingResult:
    """Contour integral of tau(z) around ``c``; equals 2 pi (N - P).

    ``raw`` comes from quadrature of tau along the contour and is checked
    against the phase-accumulation count and the model inventory. Raises
    :class:`NonInteger` when raw is not within 1e-6 of an integer (after one
    retry at tighter tolerance) or the three counts disagree.
    """
    spec = spec or QuadSpec()
    resolved = c.resolved(m.gamma_min)
    _check_guard(m, resolved)
    inv = count_zeros_poles(m, resolved)

    # tau = -i S'/S, so  int tau dz = -i * 2 pi i * (log-residue) = 2 pi * (log-residue)
    res = log_residue_quad(_one, m, c, spec)
    raw = float(res.value.real)
    nearest = round(raw)
    if abs(raw - nearest) > 1e-3:
        raise NonInteger(f"winding raw value {raw!r} is not near an integer", raw)
    if abs(raw - nearest) > 1e-6:
        res = log_residue_quad(_one, m, c, spec.scaled(1e-3))
        raw = float(res.value.real)
        nearest = round(raw)
        if abs(raw - nearest) > 1e-6:
            raise NonInteger(f"winding raw value {raw!r} did not settle within 1e-6 of an integer", raw)
    raw_phase = _phase_winding(m, resolved)
    if round(raw_phase) != nearest or abs(raw_phase - nearest) > 1e-6:
        raise NonInteger(f"phase count {raw_phase!r} disagrees with quadrature {raw!r}", raw)
    if nearest != inv.n_zeros - inv.n_poles:
        raise NonInteger(
            f"winding {nearest} disagrees with the inventory N - P = {inv.n_zeros - inv.n_poles}", raw)
    return WindingResult(
        integral_value=complex(2.0 * math.pi * res.value),
        n_minus_p=int(nearest),
        raw=raw,
        zeros_found=inv.n_zeros,
        poles_found=inv.n_poles,
        raw_phase=raw_phase,
        error_estimate=2.0 * math.pi * res.error_estimate,
        inventory=inv,
    )
