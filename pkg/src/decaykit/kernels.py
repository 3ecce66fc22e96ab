"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version. The public name points at one of them depending on
``DECAYKIT_NUMBA`` (see :mod:`decaykit._accel`). Both variants stay importable
as ``<name>_nb`` / ``<name>_np`` for tests and ``benchmarks/bench_kernels.py``.

All kernels take contiguous 1-D float64/complex128 arrays.
"""
import math

import numpy as np
from scipy.special import spherical_jn

from ._accel import USE_NUMBA, njit

__all__ = [
    "lorentz_sum",
    "logderiv_sum",
    "rational_product",
    "unwrap_phase",
    "legendre_fourier_moments",
    "USE_NUMBA",
]

_INV_PI = 1.0 / math.pi


# --------------------------------------------------------------------------
# Lorentzian mixture  sum_k w_k / pi * h_k / ((x - c_k)^2 + h_k^2)
# Works for complex x as the analytic continuation of the rational function.
# --------------------------------------------------------------------------

# The numpy variants accumulate term by term in the same order as the loops.
# Real sums then match bit for bit; complex division and the Bessel
# recurrences round differently, so other kernels agree to ~1e-13 relative.

def lorentz_sum_np(x, centers, halfwidths, weights):
    acc = np.zeros_like(x)
    for k in range(centers.shape[0]):
        d = x - centers[k]
        h = halfwidths[k]
        acc += weights[k] * h / (d * d + h * h)
    return acc * _INV_PI


@njit(cache=True)
def lorentz_sum_nb(x, centers, halfwidths, weights):
    out = np.zeros_like(x)
    for i in range(x.shape[0]):
        acc = out[i]
        for k in range(centers.shape[0]):
            d = x[i] - centers[k]
            h = halfwidths[k]
            acc += weights[k] * h / (d * d + h * h)
        out[i] = acc * _INV_PI
    return out


# --------------------------------------------------------------------------
# Logarithmic derivative of a rational function with simple zeros and poles:
#   sum_a 1/(z - a) - sum_b 1/(z - b)
# --------------------------------------------------------------------------

def logderiv_sum_np(z, zeros, poles):
    out = np.zeros(z.shape[0], dtype=np.complex128)
    for a in zeros:
        out += 1.0 / (z - a)
    for b in poles:
        out -= 1.0 / (z - b)
    return out


@njit(cache=True)
def logderiv_sum_nb(z, zeros, poles):
    out = np.zeros(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        acc = 0j
        for k in range(zeros.shape[0]):
            acc += 1.0 / (z[i] - zeros[k])
        for k in range(poles.shape[0]):
            acc -= 1.0 / (z[i] - poles[k])
        out[i] = acc
    return out


# --------------------------------------------------------------------------
# prod_a (z - a) / prod_b (z - b), interleaved so magnitudes stay O(1)
# --------------------------------------------------------------------------

def rational_product_np(z, zeros, poles):
    n = max(zeros.shape[0], poles.shape[0])
    out = np.ones(z.shape[0], dtype=np.complex128)
    for k in range(n):
        if k < zeros.shape[0]:
            out *= z - zeros[k]
        if k < poles.shape[0]:
            out /= z - poles[k]
    return out


@njit(cache=True)
def rational_product_nb(z, zeros, poles):
    out = np.ones(z.shape[0], dtype=np.complex128)
    nz = zeros.shape[0]
    npole = poles.shape[0]
    n = max(nz, npole)
    for i in range(z.shape[0]):
        acc = 1.0 + 0j
        for k in range(n):
            if k < nz:
                acc *= z[i] - zeros[k]
            if k < npole:
                acc /= z[i] - poles[k]
        out[i] = acc
    return out


# --------------------------------------------------------------------------
# Nearest-branch phase continuation. First phase lies in (-pi, pi].
# Returns (phases, largest |increment|).
# --------------------------------------------------------------------------

def unwrap_phase_np(values):
    raw = np.angle(values)
    if raw.shape[0] == 0:
        return raw, 0.0
    if raw[0] == -math.pi:
        raw[0] = math.pi
    inc = np.angle(values[1:] / values[:-1])
    phases = np.empty_like(raw)
    phases[0] = raw[0]
    phases[1:] = raw[0] + np.cumsum(inc)
    big = float(np.max(np.abs(inc))) if inc.shape[0] else 0.0
    return phases, big


@njit(cache=True)
def unwrap_phase_nb(values):
    n = values.shape[0]
    phases = np.empty(n, dtype=np.float64)
    big = 0.0
    if n == 0:
        return phases, big
    p = math.atan2(values[0].imag, values[0].real)
    if p == -math.pi:
        p = math.pi
    phases[0] = p
    for i in range(1, n):
        r = values[i] / values[i - 1]
        inc = math.atan2(r.imag, r.real)
        if abs(inc) > big:
            big = abs(inc)
        p += inc
        phases[i] = p
    return phases, big


# --------------------------------------------------------------------------
# Legendre-Fourier moments  M[i, k] = int_{-1}^{1} P_k(x) exp(i kappa_i x) dx
#                                   = 2 i^k j_k(kappa_i)
# --------------------------------------------------------------------------

_IPOW = np.array([1.0, 1j, -1.0, -1j], dtype=np.complex128)


def legendre_fourier_moments_np(kappa, n):
    k = np.arange(n)
    j = spherical_jn(k[None, :], kappa[:, None])
    # scipy returns NaN for subnormal arguments; there j_k = delta_k0 to full precision
    tiny = np.abs(kappa) < 1e-150
    if tiny.any():
        j[tiny] = (k == 0).astype(float)
    return 2.0 * _IPOW[k % 4][None, :] * j


@njit(cache=True)
def _sph_jn_row(x, n, out):
    # j_0..j_{n-1} at x >= 0 into out[:n]
    if x == 0.0:
        out[0] = 1.0
        for k in range(1, n):
            out[k] = 0.0
        return
    if x < 0.5:
        # power series, no cancellation for small x
        pref = 1.0
        for k in range(n):
            if k > 0:
                pref *= x / (2 * k + 1)
            term = 1.0
            s = 1.0
            x2 = x * x
            for m in range(1, 40):
                term *= -x2 / (2.0 * m * (2 * k + 2 * m + 1))
                s += term
                if abs(term) < 1e-17 * abs(s):
                    break
            out[k] = pref * s
        return
    s, c = math.sin(x), math.cos(x)
    j0 = s / x
    j1 = s / (x * x) - c / x
    if x >= n:
        out[0] = j0
        if n > 1:
            out[1] = j1
        for k in range(2, n):
            out[k] = (2 * k - 1) / x * out[k - 1] - out[k - 2]
        return
    # Miller backward recurrence with rescaling
    top = n + int(x) + 40
    buf = np.empty(top + 2)
    buf[top + 1] = 0.0
    buf[top] = 1e-300
    for k in range(top, 0, -1):
        buf[k - 1] = (2 * k + 1) / x * buf[k] - buf[k + 1]
        if abs(buf[k - 1]) > 1e250:
            for m in range(k - 1, top + 2):
                buf[m] *= 1e-250
    if abs(j0) >= abs(j1):
        scale = j0 / buf[0]
    else:
        scale = j1 / buf[1]
    for k in range(n):
        out[k] = buf[k] * scale


@njit(cache=True)
def legendre_fourier_moments_nb(kappa, n):
    m = kappa.shape[0]
    out = np.empty((m, n), dtype=np.complex128)
    row = np.empty(n)
    ipow = np.empty(4, dtype=np.complex128)
    ipow[0] = 1.0
    ipow[1] = 1j
    ipow[2] = -1.0
    ipow[3] = -1j
    for i in range(m):
        x = kappa[i]
        _sph_jn_row(abs(x), n, row)
        for k in range(n):
            v = row[k]
            if x < 0.0 and k % 2 == 1:
                v = -v
            out[i, k] = 2.0 * ipow[k % 4] * v
    return out


if USE_NUMBA:
    lorentz_sum = lorentz_sum_nb
    logderiv_sum = logderiv_sum_nb
    rational_product = rational_product_nb
    unwrap_phase = unwrap_phase_nb
    legendre_fourier_moments = legendre_fourier_moments_nb
else:
    lorentz_sum = lorentz_sum_np
    logderiv_sum = logderiv_sum_np
    rational_product = rational_product_np
    unwrap_phase = unwrap_phase_np
    legendre_fourier_moments = legendre_fourier_moments_np
