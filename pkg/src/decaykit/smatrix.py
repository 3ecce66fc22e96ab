"""Blaschke-product S-matrix models and the complex duration tau(omega).

Sign convention: poles sit in the lower half-plane at +/-omega_n - i gamma_n/2
and zeros in the upper half-plane at +/-omega_n + i gamma_n/2, so S is
analytic above the real axis (causal) and each unitary factor has positive
delay.

Two modes:

``UnitaryPair``
    S(z) = c * prod_n (z - w_n - i g_n/2)(z + w_n - i g_n/2)
                    / ((z - w_n + i g_n/2)(z + w_n + i g_n/2)).
    |S| = 1 on the real axis and tau1 at a peak is 4/g (plus the mirror term).

``PoleOnly``
    S(z) = c * prod_n (-i g_n/2) / (z - w_n + i g_n/2).
    One pole per resonance, no zeros; reproduces the single-pole delay
    g/2 / ((w - w_n)^2 + g^2/4) and formation (w - w_n) / (...) exactly, i.e.
    half the delay of a full unitary factor.

tau(z) = (1/i) d/dz ln S(z) is always evaluated from the partial-fraction sum
over zeros and poles, never by numerical differentiation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import PoleProximity, UnwrapAmbiguity
from .spectral import ResonanceParams

__all__ = [
    "Mode",
    "BlaschkePair",
    "SMatrixModel",
    "DelayValue",
    "PhaseModulus",
    "evaluate",
    "phase_modulus",
    "duration",
    "durations",
    "single_pole_tau1",
    "single_pole_tau2",
]

GUARD = 1e-12


class Mode(str, enum.Enum):
    POLE_ONLY = "PoleOnly"
    UNITARY_PAIR = "UnitaryPair"


@dataclass(frozen=True)
class BlaschkePair:
    omega_n: float
    gamma_n: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_n) and self.omega_n > 0):
            raise ValueError(f"omega_n must be positive, got {self.omega_n}")
        if not (math.isfinite(self.gamma_n) and self.gamma_n > 0):
            raise ValueError(f"gamma_n must be positive, got {self.gamma_n}")


@dataclass(frozen=True)
class DelayValue:
    tau1: float
    tau2: float

    @property
    def complex(self) -> complex:
        return complex(self.tau1, self.tau2)


@dataclass(frozen=True)
class PhaseModulus:
    phase: float
    log_modulus: float


@dataclass(frozen=True)
class SMatrixModel:
    pairs: tuple[BlaschkePair, ...]
    mode: Mode = Mode.UNITARY_PAIR
    prefactor: complex = 1.0 + 0j
    threshold_p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "prefactor", complex(self.prefactor))
        if not self.pairs:
            raise ValueError("an S-matrix model needs at least one pair")
        if abs(abs(self.prefactor) - 1.0) > 1e-12:
            raise ValueError(f"prefactor must have unit modulus, got |c| = {abs(self.prefactor)!r}")
        if self.threshold_p != 0:
            raise ValueError("only threshold_p = 0 is supported: |omega|^-p is not analytic")
        seen = set()
        for p in self.pairs:
            key = (p.omega_n, p.gamma_n)
            if key in seen:
                raise ValueError(f"duplicate pair {key}: only simple zeros and poles are supported")
            seen.add(key)

    @classmethod
    def from_resonance(cls, r: ResonanceParams, mode=Mode.POLE_ONLY) -> "SMatrixModel":
        return cls((BlaschkePair(r.omega0, r.gamma),), mode)

    @property
    def zeros(self) -> np.ndarray:
        if self.mode is Mode.POLE_ONLY:
            return np.zeros(0, dtype=np.complex128)
        out = []
        for p in self.pairs:
            out += [complex(p.omega_n, 0.5 * p.gamma_n), complex(-p.omega_n, 0.5 * p.gamma_n)]
        return np.array(out, dtype=np.complex128)

    @property
    def poles(self) -> np.ndarray:
        out = []
        for p in self.pairs:
            out.append(complex(p.omega_n, -0.5 * p.gamma_n))
            if self.mode is Mode.UNITARY_PAIR:
                out.append(complex(-p.omega_n, -0.5 * p.gamma_n))
        return np.array(out, dtype=np.complex128)

    @property
    def gamma_min(self) -> float:
        return min(p.gamma_n for p in self.pairs)

    @property
    def gamma_max(self) -> float:
        return max(p.gamma_n for p in self.pairs)

    def _constant(self) -> complex:
        c = self.prefactor
        if self.mode is Mode.POLE_ONLY:
            for p in self.pairs:
                c *= -0.5j * p.gamma_n
        return c

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "prefactor": [self.prefactor.real, self.prefactor.imag],
            "threshold_p": self.threshold_p,
            "pairs": [{"omega_n": p.omega_n, "gamma_n": p.gamma_n} for p in self.pairs],
        }


def _guard(m: SMatrixModel, z: np.ndarray, include_zeros: bool):
    pts = m.poles
    if include_zeros and m.zeros.size:
        pts = np.concatenate([pts, m.zeros])
    g = np.array([p.gamma_n for p in m.pairs])
    radius = GUARD * g.min()
    d = np.abs(z.ravel()[:, None] - pts[None, :])
    if (d < radius).any():
        i = int(np.argwhere(d < radius)[0, 0])
        raise PoleProximity(f"z = {z.ravel()[i]!r} is within {radius:.3g} of a singularity of S")


def evaluate(m: SMatrixModel, z):
    """S at real or complex ``z`` (scalar or array)."""
    arr = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(arr.ravel())
    _guard(m, flat, include_zeros=False)
    out = m._constant() * kernels.rational_product(flat, m.zeros, m.poles)
    out = out.reshape(arr.shape)
    return out if arr.ndim else complex(out[()])


def log_derivative(m: SMatrixModel, z):
    """d/dz ln S at ``z``; singular at both zeros and poles."""
    arr = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(arr.ravel())
    _guard(m, flat, include_zeros=True)
    out = kernels.logderiv_sum(flat, m.zeros, m.poles).reshape(arr.shape)
    return out if arr.ndim else complex(out[()])


def durations(m: SMatrixModel, omega) -> np.ndarray:
    """Complex tau = tau1 + i tau2 at real or complex points, vectorised."""
    return -1j * np.asarray(log_derivative(m, omega))


def duration(m: SMatrixModel, omega: float) -> DelayValue:
    tau = complex(durations(m, float(omega)))
    return DelayValue(tau.real, tau.imag)


def phase_modulus(m: SMatrixModel, omegas: Sequence[float]) -> list[PhaseModulus]:
    """Unwrapped phase and ln|S| along an increasing real grid.

    The branch is continued from the previous sample; the first phase lies in
    (-pi, pi]. Raises :class:`UnwrapAmbiguity` when an increment is too large
    to resolve, judged both from the sampled values and from the analytic
    delay integrated across the step.
    """
    w = np.asarray(omegas, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("omegas must be a non-empty 1-D grid")
    if np.any(np.diff(w) <= 0):
        raise ValueError("omegas must be strictly increasing")
    s = np.atleast_1d(evaluate(m, w.astype(np.complex128)))
    phases, _ = kernels.unwrap_phase(np.ascontiguousarray(s))
    if phases[0] <= -math.pi + 1e-12:
        # roundoff put a real negative S just below the cut
        phases = phases + 2.0 * math.pi
    if w.size > 1:
        mid = 0.5 * (w[1:] + w[:-1])
        t_lo = np.real(durations(m, w[:-1]))
        t_mid = np.real(durations(m, mid))
        t_hi = np.real(durations(m, w[1:]))
        predicted = np.diff(w) * (t_lo + 4 * t_mid + t_hi) / 6.0
        inc = np.diff(phases)
        bad = (np.abs(predicted) >= math.pi) | (np.abs(inc) >= math.pi) | (np.abs(inc - predicted) > 0.5 * math.pi)
        if bad.any():
            i = int(np.argmax(bad))
            raise UnwrapAmbiguity(
                f"phase step between omega={w[i]!r} and {w[i + 1]!r} is ambiguous "
                f"(sampled {inc[i]:.3f}, predicted {predicted[i]:.3f}); refine the grid")
    logmod = np.log(np.abs(s))
    return [PhaseModulus(float(p), float(l)) for p, l in zip(phases, logmod)]


def single_pole_tau1(r: ResonanceParams, omega):
    """Delay duration of a single pole: (gamma/2) / ((omega - omega0)^2 + gamma^2/4)."""
    d = np.asarray(omega, dtype=float) - r.omega0
    out = 0.5 * r.gamma / (d * d + 0.25 * r.gamma**2)
    return out if out.ndim else float(out)


def single_pole_tau2(r: ResonanceParams, omega):
    """Formation duration of a single pole: (omega - omega0) / ((omega - omega0)^2 + gamma^2/4)."""
    d = np.asarray(omega, dtype=float) - r.omega0
    out = d / (d * d + 0.25 * r.gamma**2)
    return out if out.ndim else float(out)
