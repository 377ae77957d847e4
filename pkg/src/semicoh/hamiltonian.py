"""Hamiltonian models and their three phase-space symbols.

Every model has the form p^2/2m + V(q) for the Weyl symbol H_W.  The
smoothed symbol H1 = <z|H|z> is the Gaussian average of H_W with variance
b^2/2 in q and c^2/2 in p; the antismoothed symbol H2 is the inverse map
(variance -b^2/2, -c^2/2).  All closed forms are analytic and accept complex
arguments.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from math import comb
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .coherent import CoherentParams
from .errors import ConfigError, DegreeTooHigh, UnsupportedSymbol

__all__ = [
    "SymbolKind", "LocalDerivatives", "HamiltonianModel",
    "eval_symbol", "smooth_monomial", "smooth_polynomial",
    "harmonic_model", "polynomial_model", "exponential_model",
    "barrier_model", "custom_model", "MAX_DEGREE",
]

MAX_DEGREE = 12


class SymbolKind(Enum):
    WEYL = "weyl"
    SMOOTHED = "smoothed"
    ANTISMOOTHED = "antismoothed"

    @property
    def sigma(self):
        """Sign attached to the I term: +1, -1, or 0 for Weyl."""
        return {"weyl": 0, "smoothed": 1, "antismoothed": -1}[self.value]

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"h1": "smoothed", "q": "smoothed", "h2": "antismoothed",
                   "p": "antismoothed", "hw": "weyl", "w": "weyl"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise UnsupportedSymbol(f"unknown symbol kind {name!r}") from None


@dataclass(frozen=True)
class LocalDerivatives:
    """Symbol value and derivatives up to second order at (q, p)."""
    H: complex
    H_q: complex
    H_p: complex
    H_qq: complex
    H_pp: complex
    H_qp: complex
    b: float
    c: float

    @property
    def H_u(self):
        return (self.b * self.H_q - 1j * self.c * self.H_p) / np.sqrt(2.0)

    @property
    def H_v(self):
        return (self.b * self.H_q + 1j * self.c * self.H_p) / np.sqrt(2.0)

    @property
    def H_uv(self):
        return 0.5 * self.b ** 2 * self.H_qq + 0.5 * self.c ** 2 * self.H_pp

    @property
    def H_uu(self):
        b, c = self.b, self.c
        return 0.5 * b * b * self.H_qq - 1j * b * c * self.H_qp - 0.5 * c * c * self.H_pp

    @property
    def H_vv(self):
        b, c = self.b, self.c
        return 0.5 * b * b * self.H_qq + 1j * b * c * self.H_qp - 0.5 * c * c * self.H_pp

    @property
    def epsilon(self):
        """Half the mixed (z, z*) second derivative, b^2/4 H_qq + c^2/4 H_pp."""
        return 0.5 * self.H_uv


def smooth_polynomial(coeffs, variance):
    """Gaussian average of sum_k a_k x^k with the given (possibly negative) variance.

    Coefficients are in ascending powers.
    """
    a = np.asarray(coeffs, dtype=float)
    n = a.size
    out = np.zeros(n)
    for j in range(n):
        acc = 0.0
        k = 0
        while j + 2 * k < n:
            # E[Y^{2k}] = (2k-1)!! s^k for a centred Gaussian of variance s
            dfact = 1.0
            for r in range(1, 2 * k, 2):
                dfact *= r
            acc += comb(j + 2 * k, 2 * k) * dfact * variance ** k * a[j + 2 * k]
            k += 1
        out[j] = acc
    return out


def smooth_monomial(n, variance=0.25, inverse=False, max_degree=MAX_DEGREE):
    """Smoothed x^n as ascending coefficients.

    The default variance 1/4 is the coherent-state smoothing in units where
    b = 1 and x = Re z.  ``inverse`` gives the antismoothed polynomial.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > max_degree:
        raise DegreeTooHigh(f"degree {n} exceeds the maximum {max_degree}")
    a = np.zeros(n + 1)
    a[n] = 1.0
    return smooth_polynomial(a, -variance if inverse else variance)


@dataclass(frozen=True)
class HamiltonianModel:
    """Kinetic p^2/2m plus a potential from one of the supported families.

    family: 'harmonic', 'polynomial', 'exponential' or 'custom'.
    coeffs: polynomial potential, ascending powers of q.
    terms: exponential-sum potential, ((amplitude, alpha), ...).
    custom: callable q -> (V, V', V'') for a Weyl-only potential.
    """
    family: str
    params: CoherentParams
    mass: float = 1.0
    coeffs: tuple = ()
    terms: tuple = ()
    omega: Optional[float] = None
    custom: Optional[Callable] = field(default=None, compare=False)
    meta: tuple = ()

    def __post_init__(self):
        if self.family not in ("harmonic", "polynomial", "exponential", "custom"):
            raise ConfigError(f"unknown model family {self.family!r}")
        if not self.mass > 0:
            raise ConfigError("mass must be positive")
        if len(self.coeffs) > MAX_DEGREE + 1:
            raise DegreeTooHigh(f"potential degree {len(self.coeffs) - 1} "
                                f"exceeds {MAX_DEGREE}")
        if self.family == "custom" and self.custom is None:
            raise ConfigError("custom family needs a potential callable")
        object.__setattr__(self, "_cache", {})

    @property
    def hbar(self):
        return self.params.hbar

    def with_params(self, params):
        return replace(self, params=params)

    def _potential_data(self, kind):
        """Cached (poly coeffs, exp terms, constant) for one symbol kind."""
        kind = SymbolKind.parse(kind)
        cache = self._cache
        if kind in cache:
            return cache[kind]
        if self.family == "custom" and kind is not SymbolKind.WEYL:
            raise UnsupportedSymbol("custom potentials only provide the Weyl symbol")
        sig = kind.sigma
        s_q = sig * self.params.b ** 2 / 2
        const = sig * self.params.c ** 2 / (4 * self.mass)
        poly = smooth_polynomial(self.coeffs, s_q) if len(self.coeffs) else np.zeros(1)
        terms = tuple((a * np.exp(al * al * s_q / 2), al) for a, al in self.terms)
        d1 = P.polyder(poly) if poly.size > 1 else np.zeros(1)
        d2 = P.polyder(d1) if d1.size > 1 else np.zeros(1)
        data = (poly, d1, d2, terms, const)
        cache[kind] = data
        return data

    def potential(self, kind, q, deriv=0):
        """Position part of the symbol (including the kinetic constant)."""
        poly, d1, d2, terms, const = self._potential_data(kind)
        if self.family == "custom":
            return np.asarray(self.custom(q)[deriv])
        c = (poly, d1, d2)[deriv]
        out = P.polyval(q, c)
        if deriv == 0:
            out = out + const
        for a, al in terms:
            out = out + a * al ** deriv * np.exp(al * q)
        return out

    def rest_energy(self, kind, q):
        """Symbol at p = 0."""
        return self.potential(kind, q, 0)


def eval_symbol(model, kind, q, p):
    """Symbol of the given kind and its derivatives at (possibly complex) q, p."""
    kind = SymbolKind.parse(kind)
    V = model.potential(kind, q, 0)
    V1 = model.potential(kind, q, 1)
    V2 = model.potential(kind, q, 2)
    m = model.mass
    H = p * p / (2 * m) + V
    zero = 0 * (q + p)
    return LocalDerivatives(H=H, H_q=V1 + zero, H_p=p / m + 0 * q, H_qq=V2 + zero,
                            H_pp=1.0 / m + zero, H_qp=zero,
                            b=model.params.b, c=model.params.c)


def harmonic_model(omega, params, mass=1.0):
    return HamiltonianModel("harmonic", params, mass,
                            coeffs=(0.0, 0.0, 0.5 * mass * omega ** 2), omega=omega)


def polynomial_model(coeffs, params, mass=1.0):
    return HamiltonianModel("polynomial", params, mass,
                            coeffs=tuple(float(a) for a in coeffs))


def exponential_model(terms, params, mass=1.0, coeffs=()):
    """Potential sum_k a_k exp(alpha_k q), optionally plus a polynomial."""
    return HamiltonianModel("exponential", params, mass,
                            coeffs=tuple(float(a) for a in coeffs),
                            terms=tuple((float(a), float(al)) for a, al in terms))


def barrier_model(V0, alpha, A, mass, params):
    """Well between two exponential walls at +-A: 2 V0 exp(-alpha A) cosh(alpha q)."""
    if not (alpha > 0 and A > 0):
        raise ConfigError("alpha and A must be positive")
    a = V0 * np.exp(-alpha * A)
    return HamiltonianModel("exponential", params, mass,
                            terms=((a, alpha), (a, -alpha)),
                            meta=(("V0", V0), ("alpha", alpha), ("A", A)))


def custom_model(potential, params, mass=1.0):
    """Weyl-only model from a callable q -> (V, V', V'')."""
    return HamiltonianModel("custom", params, mass, custom=potential)
