"""Independent high-precision references (mpmath), used only by the tests."""
import mpmath as mp

DPS = 30


def _half_line_pole_integral(a, t):
    # int_0^inf exp(-i w t) / (w - a) dw for Im a != 0, t > 0, via E1.
    # The path s = i t (w - a) crosses the E1 cut when Re a > 0 > Im a.
    s0 = -1j * a * t
    k = -1 if (mp.re(a) > 0 and mp.im(a) < 0) else 0
    return mp.exp(-1j * a * t) * (mp.e1(s0) + k * 2j * mp.pi)


def halfline_amplitude(omega0, gamma, t, weight=1):
    """L(t) over [0, inf) for one Lorentzian, to ~25 digits."""
    with mp.workdps(DPS):
        h = mp.mpf(gamma) / 2
        p_up = mp.mpc(omega0, h)
        p_dn = mp.mpc(omega0, -h)
        if t == 0:
            return complex(weight * (mp.mpf(1) / 2 + mp.atan(2 * mp.mpf(omega0) / gamma) / mp.pi))
        t = mp.mpf(t)
        val = (_half_line_pole_integral(p_up, t) - _half_line_pole_integral(p_dn, t)) / (2j * mp.pi)
        return complex(weight * val)


def halfline_amplitude_bruteforce(omega0, gamma, t):
    """Direct quadrature; only reliable for moderate t (used to vet the E1 form)."""
    with mp.workdps(DPS):
        h = mp.mpf(gamma) / 2
        f = lambda w: (h / mp.pi) / ((w - omega0) ** 2 + h * h) * mp.expj(-w * t)
        top = omega0 + 20 * h
        pts = [0, max(omega0 - 5 * h, 0) / 2, max(omega0 - 5 * h, 0), omega0, omega0 + 5 * h, top]
        pts = sorted(set(pts))
        return complex(mp.quad(f, pts) + mp.quadosc(f, [top, mp.inf], omega=t))


def density(omega0, gamma, w):
    with mp.workdps(DPS):
        h = mp.mpf(gamma) / 2
        return float((h / mp.pi) / ((mp.mpf(w) - omega0) ** 2 + h * h))


def interval_norm(omega0, gamma, a, b):
    with mp.workdps(DPS):
        h = mp.mpf(gamma) / 2
        return float(mp.quad(lambda w: (h / mp.pi) / ((w - omega0) ** 2 + h * h), [a, omega0, b]
                             if a < omega0 < b else [a, b]))


def log_S(zeros, poles, z, const=1):
    with mp.workdps(DPS):
        z = mp.mpc(z)
        v = mp.mpc(const)
        for a in zeros:
            v *= z - mp.mpc(a)
        for b in poles:
            v /= z - mp.mpc(b)
        return v
