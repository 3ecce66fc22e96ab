"""Breit-Wigner spectral densities and their norms.

Units: hbar = 1, so energies and frequencies share one unit and times are
its inverse. A resonance (omega0, gamma) has density

    w(omega) = (1/pi) * (gamma/2) / ((omega - omega0)^2 + gamma^2/4)
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import QuadratureFailure
from .quadrature import AnalyticCertificate, FrequencyDomain, Peak, QuadSpec, integrate

__all__ = [
    "ResonanceParams",
    "SpectralDensity",
    "BelowThresholdWarning",
    "density_value",
    "norm",
    "norm_closed_form",
    "halfline_norm_closed_form",
]

_WEIGHT_SUM_TOL = 1e-12


class BelowThresholdWarning(UserWarning):
    """Resonance centre at or below zero: the half-line clips most of it."""


@dataclass(frozen=True)
class ResonanceParams:
    omega0: float
    gamma: float

    def __post_init__(self):
        if not math.isfinite(self.omega0):
            raise ValueError(f"omega0 must be finite, got {self.omega0}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be a positive finite number, got {self.gamma}")

    @property
    def below_threshold(self) -> bool:
        return self.omega0 <= 0


@dataclass(frozen=True)
class SpectralDensity:
    """Weighted mixture of Breit-Wigner resonances.

    Weights must be positive and sum to one; nothing is renormalised.
    """

    resonances: tuple[ResonanceParams, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "resonances", tuple(self.resonances))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.resonances:
            raise ValueError("a spectral density needs at least one resonance")
        if len(self.weights) != len(self.resonances):
            raise ValueError("one weight per resonance is required")
        if any(not (w > 0 and math.isfinite(w)) for w in self.weights):
            raise ValueError(f"weights must be positive, got {self.weights}")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 (got {total!r}); normalise them explicitly")

    @classmethod
    def single(cls, omega0: float, gamma: float) -> "SpectralDensity":
        return cls((ResonanceParams(omega0, gamma),), (1.0,))

    @property
    def centers(self) -> np.ndarray:
        return np.array([r.omega0 for r in self.resonances])

    @property
    def halfwidths(self) -> np.ndarray:
        return np.array([0.5 * r.gamma for r in self.resonances])

    @property
    def weight_array(self) -> np.ndarray:
        return np.array(self.weights)

    @property
    def gamma_min(self) -> float:
        return min(r.gamma for r in self.resonances)

    def __call__(self, omega):
        """Density at real or complex ``omega`` (scalar or array of any shape)."""
        x = np.asarray(omega)
        complex_in = np.iscomplexobj(x)
        flat = np.ascontiguousarray(x.ravel(), dtype=np.complex128 if complex_in else np.float64)
        out = kernels.lorentz_sum(flat, self.centers, self.halfwidths, self.weight_array)
        out = out.reshape(x.shape)
        return out if x.ndim else out[()]

    def peaks(self) -> list[Peak]:
        return [Peak(r.omega0, 0.5 * r.gamma) for r in self.resonances]

    def certificate(self) -> AnalyticCertificate:
        """Poles of the continued density with their residues.

        Each resonance contributes poles at omega0 -/+ i gamma/2 with residues
        +/- i w / (2 pi).
        """
        poles = []
        for r, w in zip(self.resonances, self.weights):
            h = 0.5 * r.gamma
            poles.append((complex(r.omega0, -h), 1j * w / (2.0 * math.pi)))
            poles.append((complex(r.omega0, h), -1j * w / (2.0 * math.pi)))
        return AnalyticCertificate(tuple(poles))

    def to_dict(self):
        return {
            "resonances": [
                {"omega0": r.omega0, "gamma": r.gamma, "weight": w}
                for r, w in zip(self.resonances, self.weights)
            ]
        }


def density_value(d: SpectralDensity, omega):
    """Sum of weighted Lorentzians at ``omega``; strictly positive on the real line."""
    return d(omega)


def halfline_norm_closed_form(r: ResonanceParams) -> float:
    """Weight of one resonance on [0, inf): 1/2 + arctan(2 omega0 / gamma) / pi."""
    return 0.5 + math.atan(2.0 * r.omega0 / r.gamma) / math.pi


def norm_closed_form(d: SpectralDensity, dom: FrequencyDomain) -> float:
    """Exact weight of ``d`` over ``dom`` from arctangent differences."""
    lo, hi = dom.bounds
    total = 0.0
    for r, w in zip(d.resonances, d.weights):
        h = 0.5 * r.gamma
        upper = math.pi / 2 if math.isinf(hi) else math.atan((hi - r.omega0) / h)
        lower = -math.pi / 2 if math.isinf(lo) else math.atan((lo - r.omega0) / h)
        total += w * (upper - lower) / math.pi
    return total


def norm(d: SpectralDensity, dom: FrequencyDomain, spec: QuadSpec | None = None) -> float:
    """Numerical weight of ``d`` over ``dom``.

    Raises :class:`QuadratureFailure` (with the best estimate attached) if the
    requested tolerance is not reached.
    """
    if dom.kind == "HalfLine" and any(r.below_threshold for r in d.resonances):
        warnings.warn("resonance centre at or below 0: the half-line clips most of the line shape",
                      BelowThresholdWarning, stacklevel=2)
    res = integrate(d, dom, spec or QuadSpec(), d.peaks())
    if not res.converged:
        raise QuadratureFailure(
            f"norm did not converge (estimate {res.value.real!r}, error {res.error_estimate:.3g})",
            res.value.real, res.error_estimate)
    return res.value.real
