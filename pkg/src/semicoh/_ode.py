"""Adaptive DOP853 driver with step recording and branch tracking."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import DOP853

from ._phase import PhaseTracker
from .errors import NonFiniteState, StepFailure


@dataclass
class Run:
    t: np.ndarray          # sample times (only the end point unless recorded)
    y: np.ndarray          # states, shape (dim, len(t))
    args: Optional[np.ndarray]  # tracked arguments, shape (k, len(t))


def integrate(fun, y0, t_end, rtol=1e-12, atol=1e-12, watch=None, record=False,
              max_step=np.inf):
    """Integrate y' = fun(t, y) from 0 to t_end.

    watch: optional y -> complex array whose argument is followed
    continuously.  A step is subdivided through the dense output whenever
    an argument would move by more than pi/2 inside it.
    """
    y0 = np.asarray(y0)
    tracker = PhaseTracker(watch(y0)) if watch is not None else None
    ts, ys = [0.0], [y0.copy()]
    args = [tracker.arg.copy()] if tracker is not None else None
    if t_end > 0:
        solver = DOP853(fun, 0.0, y0, t_end, rtol=rtol, atol=atol, max_step=max_step)
        while solver.status == "running":
            t_old = solver.t
            msg = solver.step()
            if solver.status == "failed":
                raise StepFailure(f"integrator failed at t={solver.t:.6g}: {msg}")
            y = solver.y
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(f"non-finite state at t={solver.t:.6g}")
            if tracker is not None:
                _advance(tracker, watch, solver, t_old, solver.t, y)
            if record:
                ts.append(solver.t)
                ys.append(y.copy())
                if tracker is not None:
                    args.append(tracker.arg.copy())
        if not record:
            ts, ys = [solver.t], [solver.y.copy()]
            if tracker is not None:
                args = [tracker.arg.copy()]
    elif not record:
        ts, ys = [0.0], [y0.copy()]
    arr_args = np.array(args).T if args is not None else None
    return Run(np.array(ts), np.array(ys).T, arr_args)


def _advance(tracker, watch, solver, t0, t1, y1):
    w = watch(y1)
    if np.all(np.abs(tracker.jump(w)) <= tracker.limit):
        tracker.push(w)
        return
    _refine(tracker, watch, solver.dense_output(), t0, t1, 0)


def _refine(tracker, watch, dense, t0, t1, depth):
    pts = np.linspace(t0, t1, 9)
    for a, b in zip(pts[:-1], pts[1:]):
        wm = watch(dense(b))
        if np.any(np.abs(tracker.jump(wm)) > tracker.limit) and depth < 12:
            _refine(tracker, watch, dense, a, b, depth + 1)
        else:
            tracker.push(wm)
