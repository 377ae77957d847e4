"""Stationary-phase evaluation of A = int g(x) exp(i f(x)/hbar) dx with the first correction.

A0 = sqrt(2 pi hbar/|f2|) g0 exp(i pi s/4 + i f0/hbar) and
A  = A0 (1 + i hbar R + O(hbar^2)),

R = (f2 g2 - f3 g1)/(2 f2^2 g0) + (5 f3^2 - 3 f2 f4)/(24 f2^3),

with fk, gk the k-th derivatives at the stationary point x0.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateStationaryPoint

__all__ = ["SpaResult", "spa_integrate", "rotated_contour_integral", "error_slopes"]


@dataclass(frozen=True)
class SpaResult:
    A0: complex
    R: complex
    hbar: float

    @property
    def corrected(self):
        return self.A0 * (1 + 1j * self.hbar * self.R)


def spa_integrate(f_derivs, g_derivs, hbar, s=None, scale=1.0):
    """SPA from derivatives at x0.

    f_derivs = (f, f', f'', f''', f''''), g_derivs = (g, g', g'').
    ``s`` is the sign of f''; it defaults to the sign of the real part.
    """
    f0, f1, f2, f3, f4 = f_derivs
    g0, g1, g2 = g_derivs
    if abs(f1) > 1e-10 * scale:
        raise DegenerateStationaryPoint(f"f'(x0) = {f1!r} is not zero")
    if f2 == 0:
        raise DegenerateStationaryPoint("f''(x0) vanishes")
    if g0 == 0:
        raise DegenerateStationaryPoint("g(x0) vanishes; the correction is undefined")
    if s is None:
        s = 1 if np.real(f2) > 0 else -1
    A0 = math.sqrt(2 * math.pi * hbar / abs(f2)) * g0 * np.exp(1j * (math.pi * s / 4 + f0 / hbar))
    R = (f2 * g2 - f3 * g1) / (2 * f2 ** 2 * g0) + (5 * f3 ** 2 - 3 * f2 * f4) / (24 * f2 ** 3)
    return SpaResult(complex(A0), R, hbar)


def rotated_contour_integral(f, g, hbar, angle, limit=np.inf):
    """int g exp(i f/hbar) dx along the ray x = exp(i angle) y, y real.

    Valid when the integrand is entire and decays in the sectors swept
    by the rotation, so the rotated integral equals the real-axis one.
    """
    rot = np.exp(1j * angle)

    def integrand(y, part):
        x = rot * y
        val = g(x) * np.exp(1j * f(x) / hbar) * rot
        return val.real if part == 0 else val.imag

    re = quad(integrand, -limit, limit, args=(0,), epsabs=1e-14, epsrel=1e-13, limit=500)[0]
    im = quad(integrand, -limit, limit, args=(1,), epsabs=1e-14, epsrel=1e-13, limit=500)[0]
    return complex(re, im)


def error_slopes(hbars, f, g, f_derivs, g_derivs, angle):
    """Relative errors of A0 and A0(1 + i hbar R) against the contour oracle."""
    e0, e1 = [], []
    for h in hbars:
        ref = rotated_contour_integral(f, g, h, angle)
        res = spa_integrate(f_derivs, g_derivs, h)
        e0.append(abs(ref - res.A0) / abs(res.A0))
        e1.append(abs(ref - res.corrected) / abs(res.A0))
    lh = np.log(hbars)
    return (np.polyfit(lh, np.log(e0), 1)[0], np.polyfit(lh, np.log(e1), 1)[0],
            np.array(e0), np.array(e1))
