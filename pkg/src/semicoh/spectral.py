"""Semiclassical quantization and Husimi densities from periodic orbits.

Three rules pair a symbol with a sign for the I term:

    smoothed      (S + I)(E_m) = (m + 1/2) h
    antismoothed  (S - I)(E_m) = (m + 1/2) h
    weyl          S(E_m)       = (m + 1/2) h

S(E) = closed-orbit integral of p dq, I(E) = closed-orbit integral of
epsilon dt with epsilon = b^2/4 H_qq + c^2/4 H_pp.  Both are evaluated on
the orbit parametrized by the angle theta of q = qbar + Delta cos(theta),
which removes the turning-point singularities.
"""

from dataclasses import dataclass, field
from enum import Enum
import math
import warnings

import numpy as np
from scipy.special import gammaln

from .classical import turning_points, well_bottom
from .coherent import PhasePoint
from .errors import (ConfigError, NoBracket, PoleProximityWarning, StationaryPointWarning,
                     Unbound)
from .hamiltonian import SymbolKind, eval_symbol

__all__ = [
    "QuantizationRule", "SemiclassicalLevel", "HusimiGrid", "OrbitFunctions",
    "quantize", "husimi_semiclassical", "greens_function", "ho_reference",
]


class QuantizationRule(Enum):
    SMOOTHED_PLUS_I = "smoothed"
    ANTISMOOTHED_MINUS_I = "antismoothed"
    WEYL_WKB = "weyl"

    @property
    def kind(self):
        return SymbolKind(self.value)

    @property
    def sigma(self):
        return self.kind.sigma

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).lower()
        key = {"paper": "smoothed", "h1": "smoothed", "anti": "antismoothed",
               "h2": "antismoothed", "wkb": "weyl"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown quantization rule {name!r}") from None


class OrbitFunctions:
    """S(E), T(E), I(E) for one model and symbol on the angle grid."""

    def __init__(self, model, kind, q_range=(-50.0, 50.0), nodes=256):
        self.model = model
        self.kind = SymbolKind.parse(kind)
        self.q_range = q_range
        self.bottom = well_bottom(model, self.kind, q_range)
        self.nodes = nodes
        n = nodes
        # Chebyshev nodes of the first and second kind as angles
        self.th1 = (2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n)
        self.th2 = np.arange(1, n + 1) * np.pi / (n + 1)

    @property
    def vmin(self):
        return self.bottom[1]

    @property
    def omega0(self):
        return self.bottom[2]

    @property
    def floor(self):
        """Energies up to here use the harmonic limit of the well bottom."""
        return self.vmin + 1e-9 * self.model.params.hbar * max(self.omega0, 1e-12)

    def epsilon(self, q, p=0.0):
        return np.real(eval_symbol(self.model, self.kind, q, p).epsilon)

    def _geometry(self, E):
        ql, qr = turning_points(self.model, self.kind, E, self.q_range, self.bottom)
        return 0.5 * (ql + qr), 0.5 * (qr - ql)

    def _p(self, E, q):
        V = np.real(self.model.rest_energy(self.kind, q))
        return np.sqrt(np.maximum(2 * self.model.mass * (E - V), 0.0))

    def action(self, E):
        """Closed-orbit integral of p dq."""
        if E <= self.floor:
            return 2 * np.pi * (E - self.vmin) / self.omega0
        qc, d = self._geometry(E)
        th = self.th2
        w = np.pi / (self.nodes + 1) * np.sin(th) ** 2
        p = self._p(E, qc + d * np.cos(th))
        return float(2 * d * np.sum(w * p / np.sin(th)))

    def _time_average(self, E, f):
        """Closed-orbit integral of f(q) dt."""
        qc, d = self._geometry(E)
        th = self.th1
        q = qc + d * np.cos(th)
        p = self._p(E, q)
        vals = f(q) * np.sin(th) / p
        return float(2 * self.model.mass * d * np.pi / self.nodes * np.sum(vals))

    def period(self, E):
        if E <= self.floor:
            return 2 * np.pi / self.omega0
        return self._time_average(E, lambda q: np.ones_like(q))

    def i_term(self, E):
        if E <= self.floor:
            return 2 * np.pi / self.omega0 * float(self.epsilon(self.bottom[0]))
        return self._time_average(E, self.epsilon)

    def derivative(self, fun, E, rel=1e-3):
        """Five-point central difference, one-sided next to the well bottom."""
        h = rel * max(E - self.vmin, 1e-12)
        if E - 2 * h > self.floor:
            return (fun(E - 2 * h) - 8 * fun(E - h) + 8 * fun(E + h) - fun(E + 2 * h)) / (12 * h)
        return (fun(E + 2 * h) - fun(E + h)) / h

    def complex_shift(self, fun, E, gamma):
        """fun(E + i gamma) from a second-order Taylor expansion."""
        h = 1e-3 * max(E - self.vmin, 1e-12)
        f0, fp, fm = fun(E), fun(E + h), fun(E - h)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * f0 + fm) / (h * h)
        return f0 + 1j * gamma * d1 - 0.5 * gamma ** 2 * d2


@dataclass
class SemiclassicalLevel:
    m: int
    energy: float
    action: float
    I: float
    period: float
    dI_dE: float
    rule: QuantizationRule
    below_minimum: bool = False


@dataclass
class HusimiGrid:
    q: np.ndarray
    p: np.ndarray
    rho: np.ndarray
    m: int
    rule: QuantizationRule
    extra: dict = field(default_factory=dict)


def _below_bottom_root(orb, sigma, target, F0):
    """Root of F continued analytically below the well bottom."""
    T0 = orb.period(orb.vmin)
    hw = orb.model.params.hbar * max(orb.omega0, 1e-12)
    delta = max(4 * abs(F0) / T0, 1e-3 * hw)
    eps = np.array([0.0, delta, 2 * delta, 3 * delta, 4 * delta])
    F = [F0] + [orb.action(orb.vmin + e) + sigma * orb.i_term(orb.vmin + e) - target
                for e in eps[1:]]
    coef = np.polyfit(eps / delta, F, 3)
    roots = np.roots(coef)
    roots = roots[np.abs(roots.imag) < 1e-9].real
    if roots.size == 0:
        raise NoBracket("no continued root near the well bottom")
    r = roots[np.argmin(np.abs(roots))]
    if abs(r) > 10:
        raise NoBracket("continued root lies far below the well bottom")
    return orb.vmin + r * delta


def quantize(model, rule, m_range, q_range=(-50.0, 50.0), orbits=None):
    """Semiclassical levels E_m for m in m_range under the given rule."""
    rule = QuantizationRule.parse(rule)
    orb = orbits or OrbitFunctions(model, rule.kind, q_range)
    sigma = rule.sigma
    h = 2 * np.pi * model.params.hbar
    hw = model.params.hbar * max(orb.omega0, 1e-12)

    def F(E, target):
        return orb.action(E) + sigma * orb.i_term(E) - target

    def dF(E):
        return orb.period(E) + sigma * orb.derivative(orb.i_term, E)

    levels = []
    lo_prev = orb.vmin
    for m in m_range:
        target = (m + 0.5) * h
        F0 = sigma * orb.i_term(orb.vmin) - target
        below = False
        if F0 >= 0:
            E = _below_bottom_root(orb, sigma, target, F0)
            below = True
        else:
            lo = lo_prev
            hi = max(lo, orb.vmin) + hw
            try:
                while F(hi, target) < 0:
                    lo, hi = hi, orb.vmin + 2 * (hi - orb.vmin)
            except Unbound:
                raise NoBracket(f"level {m} exceeds the capacity of the well") from None
            # bisection down to a narrow bracket, then safeguarded Newton
            for _ in range(200):
                if hi - lo < 1e-6 * max(hi - orb.vmin, 1e-300):
                    break
                mid = 0.5 * (lo + hi)
                if F(mid, target) < 0:
                    lo = mid
                else:
                    hi = mid
            E = 0.5 * (lo + hi)
            for _ in range(50):
                f = F(E, target)
                if abs(f) < 1e-10 * h:
                    break
                if f < 0:
                    lo = E
                else:
                    hi = E
                En = E - f / dF(E)
                E = En if lo < En < hi else 0.5 * (lo + hi)
            lo_prev = E
        period = orb.period(E)
        levels.append(SemiclassicalLevel(
            m, float(E), orb.action(E), orb.i_term(E), period,
            orb.derivative(orb.i_term, E) if E > orb.floor else 0.0, rule, below))
    return levels


def _flow(model, kind, q, p):
    d = eval_symbol(model, kind, q, p)
    b, c = model.params.b, model.params.c
    qd, pd = np.real(d.H_p), -np.real(d.H_q)
    zdot = np.sqrt(0.5 * (qd ** 2 / b ** 2 + pd ** 2 / c ** 2))
    return np.real(d.H), np.real(d.epsilon), zdot


def husimi_semiclassical(model, rule, level, q, p):
    """Semiclassical Husimi density of one level on the grid q x p."""
    rule = QuantizationRule.parse(rule)
    if level.rule is not rule:
        raise ValueError("level was solved with a different rule")
    Q, Pm = np.meshgrid(np.asarray(q, float), np.asarray(p, float), indexing="ij")
    E, eps, zdot = _flow(model, rule.kind, Q, Pm)
    hbar = model.params.hbar
    sigma = rule.sigma
    if rule is QuantizationRule.WEYL_WKB:
        denom_t, shift = level.period, 0.0
    else:
        denom_t, shift = level.period + sigma * level.dI_dE, sigma * eps
    bad = zdot < 1e-12
    if np.any(bad):
        warnings.warn("grid touches a stationary point; density left undefined there",
                      StationaryPointWarning, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.sqrt(2 * np.pi) / (zdot * denom_t) * np.exp(
            -(level.energy - E + shift) ** 2 / (2 * hbar ** 2 * zdot ** 2))
    rho[bad] = np.nan
    return HusimiGrid(np.asarray(q), np.asarray(p), rho, level.m, rule)


def greens_function(model, rule, point, E, gamma, orbits=None):
    """Coherent-state Green's function at a phase point, energy E + i gamma."""
    rule = QuantizationRule.parse(rule)
    orb = orbits or OrbitFunctions(model, rule.kind)
    sigma = rule.sigma
    hbar = model.params.hbar
    S = orb.complex_shift(orb.action, E, gamma)
    I = orb.complex_shift(orb.i_term, E, gamma) if sigma else 0.0
    phi = (S + sigma * I - np.pi * hbar) / hbar
    Ez, eps, zdot = _flow(model, rule.kind, point.q, point.p)
    if rule is QuantizationRule.WEYL_WKB:
        eps = 0.0
    ratio = np.exp(1j * phi)
    if abs(1 - ratio) < 1e-8:
        warnings.warn("energy sits on a pole", PoleProximityWarning, stacklevel=2)
    gauss = np.exp(-(E - Ez + sigma * eps + 1j * gamma) ** 2 / (2 * hbar ** 2 * zdot ** 2))
    return complex(-1j / hbar * np.sqrt(2 * np.pi) / zdot * ratio / (1 - ratio) * gauss)


def ho_reference(m, z, which="exact"):
    """Harmonic-oscillator Husimi densities in natural units.

    'semiclassical_full': residue form with the exact stationary time;
    'semiclassical_expanded': Gaussian-in-energy form; 'exact': Poisson form.
    """
    r2 = np.abs(np.asarray(z)) ** 2
    mh = m + 0.5
    if which == "exact":
        with np.errstate(divide="ignore"):
            return np.exp(-r2 + m * np.log(np.where(r2 > 0, r2, 1.0)) - gammaln(m + 1)) \
                if m > 0 else np.exp(-r2)
    if which == "semiclassical_full":
        with np.errstate(divide="ignore"):
            logr = np.log(np.where(r2 > 0, r2 / mh, 1.0))
        out = np.exp(mh - r2 + m * logr) / np.sqrt(2 * np.pi * mh)
        return np.where(r2 > 0, out, 0.0 if m > 0 else out)
    if which == "semiclassical_expanded":
        r = np.sqrt(r2)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.exp(-(r2 - mh) ** 2 / (2 * r2)) / (np.sqrt(2 * np.pi) * r)
    raise ValueError(f"unknown reference {which!r}")
