"""Coherent states: labels, wavefunctions, overlaps and Bargmann transforms.

A coherent state is labelled by the complex number

    z = (q/b + i p/c) / sqrt(2),      b c = hbar,

and is the Gaussian of width b centred at (q, p).  The same pair of real
numbers can be written as two independent complex coordinates (u, v) with
u = z and v = conj(z) on the real phase space.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import simpson, trapezoid

from .errors import ConfigError, GridTooCoarse

__all__ = [
    "CoherentParams", "PhasePoint", "ComplexLabel", "ComplexPhase",
    "label_of", "point_of", "qp_from_uv", "uv_from_qp",
    "wavefunction", "wavefunction_zform", "overlap",
    "bargmann_transform", "bargmann_grid",
]

SQRT2 = math.sqrt(2.0)
PI_M14 = math.pi ** -0.25

# half-width of quadrature windows, in units of b
WINDOW = 8.0


@dataclass(frozen=True)
class CoherentParams:
    """Width b (position), c (momentum) and hbar, with b*c = hbar."""
    b: float
    c: float
    hbar: float

    def __post_init__(self):
        if not (self.b > 0 and self.c > 0 and self.hbar > 0):
            raise ConfigError("b, c and hbar must be positive")
        if abs(self.b * self.c - self.hbar) > 1e-14 * self.hbar * 4:
            raise ConfigError(
                f"b*c = {self.b * self.c!r} differs from hbar = {self.hbar!r}")

    @classmethod
    def from_b(cls, b, hbar):
        return cls(float(b), float(hbar) / float(b), float(hbar))

    @classmethod
    def natural(cls, omega, hbar, mass=1.0):
        """Widths matched to a harmonic oscillator of frequency omega."""
        return cls.from_b(math.sqrt(hbar / (mass * omega)), hbar)


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float

    def __post_init__(self):
        if not (np.isfinite(self.q) and np.isfinite(self.p)):
            raise ConfigError("phase point must be finite")


@dataclass(frozen=True)
class ComplexLabel:
    z: complex

    @property
    def x(self):
        return self.z.real

    @property
    def y(self):
        return self.z.imag


@dataclass(frozen=True)
class ComplexPhase:
    u: complex
    v: complex


def label_of(point, params):
    z = (point.q / params.b + 1j * point.p / params.c) / SQRT2
    return ComplexLabel(complex(z))


def point_of(label, params):
    z = label.z
    return PhasePoint(SQRT2 * params.b * z.real, SQRT2 * params.c * z.imag)


def qp_from_uv(u, v, params):
    """Inverse of the (u, v) map; complex (q, p) for independent u, v."""
    q = params.b * (u + v) / SQRT2
    p = -1j * params.c * (u - v) / SQRT2
    return q, p


def uv_from_qp(q, p, params):
    u = (q / params.b + 1j * p / params.c) / SQRT2
    v = (q / params.b - 1j * p / params.c) / SQRT2
    return u, v


def _as_point(state, params):
    if isinstance(state, PhasePoint):
        return state
    if isinstance(state, ComplexLabel):
        return point_of(state, params)
    if isinstance(state, complex):
        return point_of(ComplexLabel(state), params)
    q, p = state
    return PhasePoint(float(q), float(p))


def _as_label(state, params):
    if isinstance(state, ComplexLabel):
        return state
    if isinstance(state, PhasePoint):
        return label_of(state, params)
    if isinstance(state, (complex, float, int)):
        return ComplexLabel(complex(state))
    q, p = state
    return label_of(PhasePoint(float(q), float(p)), params)


def wavefunction(state, params, x):
    """<x|z> for a coherent state given as PhasePoint or ComplexLabel."""
    pt = _as_point(state, params)
    x = np.asarray(x, dtype=float)
    b, hbar = params.b, params.hbar
    arg = -(x - pt.q) ** 2 / (2 * b * b) + 1j * pt.p * (x - 0.5 * pt.q) / hbar
    return PI_M14 / math.sqrt(b) * np.exp(arg)


def wavefunction_zform(state, params, x):
    """Same state written through z: exp[-(x/b - sqrt2 z)^2/2 + z(z - z*)/2]."""
    z = _as_label(state, params).z
    x = np.asarray(x, dtype=float)
    arg = -0.5 * (x / params.b - SQRT2 * z) ** 2 + 0.5 * z * (z - z.conjugate())
    return PI_M14 / math.sqrt(params.b) * np.exp(arg)


def overlap(z1, z2):
    """<z1|z2> for two labels of the same family."""
    a = z1.z if isinstance(z1, ComplexLabel) else complex(z1)
    c = z2.z if isinstance(z2, ComplexLabel) else complex(z2)
    return np.exp(-0.5 * abs(a) ** 2 + a.conjugate() * c - 0.5 * abs(c) ** 2)


def _check_rules(f, x, scale):
    s = simpson(f, x=x)
    t = trapezoid(f, x=x)
    if abs(s - t) > 1e-6 * scale:
        raise GridTooCoarse(
            f"trapezoid and Simpson estimates differ by {abs(s - t):.3e}")
    return s


def bargmann_transform(psi, point, params, x=None, npts=801):
    """<z|psi> by quadrature over the window q +- 8b.

    ``psi`` is either a callable of x or an array sampled on ``x``.
    """
    pt = _as_point(point, params)
    lo, hi = pt.q - WINDOW * params.b, pt.q + WINDOW * params.b
    if callable(psi):
        xs = np.linspace(lo, hi, npts)
        vals = np.asarray(psi(xs), dtype=complex)
    else:
        if x is None:
            raise ValueError("sampled psi needs its x grid")
        x = np.asarray(x, dtype=float)
        vals = np.asarray(psi, dtype=complex)
        sel = (x >= lo) & (x <= hi)
        if sel.sum() < 5:
            raise GridTooCoarse("fewer than 5 grid points inside the window")
        xs, vals = x[sel], vals[sel]
    f = np.conj(wavefunction(pt, params, xs)) * vals
    scale = math.sqrt(max(trapezoid(np.abs(vals) ** 2, x=xs), 1e-300))
    return complex(_check_rules(f, xs, scale))


def bargmann_grid(psi, q, p, params, x=None, npts=801):
    """<z|psi> on the tensor grid q x p.

    ``psi`` is a callable (integrated over q +- 8b for each q) or an array
    sampled on ``x``.  Returns an array of shape (len(q), len(p)).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    b, hbar = params.b, params.hbar
    s = np.linspace(-WINDOW, WINDOW, npts)
    out = np.empty((q.size, p.size), dtype=complex)
    for i, qi in enumerate(q):
        if callable(psi):
            xs = qi + b * s
            vals = np.asarray(psi(xs), dtype=complex)
        else:
            sel = np.abs(np.asarray(x) - qi) <= WINDOW * b
            xs, vals = np.asarray(x)[sel], np.asarray(psi, dtype=complex)[sel]
            if xs.size < 5:
                out[i] = 0.0
                continue
        env = PI_M14 / math.sqrt(b) * np.exp(-(xs - qi) ** 2 / (2 * b * b)) * vals
        # conj of the plane-wave part, one row per momentum
        ph = np.exp(-1j * np.outer(p, xs - 0.5 * qi) / hbar)
        out[i] = simpson(ph * env, x=xs, axis=1)
    return out
