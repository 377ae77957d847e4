"""Continuous square-root branches of complex sequences."""

import numpy as np

from .errors import ZeroCrossing

ZERO = 1e-13


def phase_continue(samples):
    """Half of the continuously unwound argument of a complex sequence.

    Consecutive arguments are unwound with a jump threshold of pi.  The
    first sample fixes the branch through its principal argument.
    """
    s = np.asarray(samples, dtype=complex)
    if np.any(np.abs(s) < ZERO):
        raise ZeroCrossing("sequence passes through zero; square root undefined")
    return 0.5 * np.unwrap(np.angle(s))


class PhaseTracker:
    """Accumulate the argument of several complex quantities along a path.

    ``push`` takes the next values; if any argument jumps by more than
    ``limit`` the caller is told to subdivide.
    """

    def __init__(self, first, limit=np.pi / 2):
        first = np.asarray(first, dtype=complex)
        if np.any(np.abs(first) < ZERO):
            raise ZeroCrossing("initial value is zero")
        self.last = first
        self.arg = np.angle(first)
        self.limit = limit

    def jump(self, values):
        values = np.asarray(values, dtype=complex)
        if np.any(np.abs(values) < ZERO):
            raise ZeroCrossing("tracked quantity passes through zero")
        return np.angle(values / self.last)

    def push(self, values):
        d = self.jump(values)
        self.arg = self.arg + d
        self.last = np.asarray(values, dtype=complex)
        return self.arg

    @property
    def half(self):
        return 0.5 * self.arg
