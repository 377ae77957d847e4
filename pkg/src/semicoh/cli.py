"""Scenario-driven command line front end.

    semicoh COMMAND [--config PATH|NAME] [--set key=value ...] [--out DIR]
                    [--threads N] [--format csv|json]

Commands: ivr-compare, propagator, spectrum, husimi, greens, exact-evolve,
spa-demo, scaling-check.  Configs are TOML (or JSON) files; NAME picks a
bundled scenario from semicoh/scenarios.  Every run writes manifest.json
next to its tables.  Exit codes: 0 ok, 2 config error, 3 compute error.
"""

import argparse
import copy
import json
import math
import os
import sys
import time
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .errors import ComputeError, ConfigError

COMMANDS = ("ivr-compare", "propagator", "spectrum", "husimi", "greens",
            "exact-evolve", "spa-demo", "scaling-check")
SCALING_TARGETS = ("action-defect", "appendix-c", "rules", "spa")

_REQUIRED = object()


# -- configuration ------------------------------------------------------------

def bundled_scenarios():
    root = resources.files("semicoh") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_config(ref):
    """Parse a TOML/JSON file, or a bundled scenario by name."""
    if ref is None:
        return {}
    if os.path.exists(ref):
        with open(ref, "rb") as fh:
            raw = fh.read()
        try:
            if ref.endswith(".json"):
                return json.loads(raw)
            return tomllib.loads(raw.decode())
        except (ValueError, tomllib.TOMLDecodeError) as err:
            raise ConfigError(f"cannot parse {ref}: {err}") from None
    res = resources.files("semicoh") / "scenarios" / f"{ref}.toml"
    if not res.is_file():
        raise ConfigError(f"config {ref!r} is neither a file nor a bundled scenario "
                          f"({', '.join(bundled_scenarios())})")
    return tomllib.loads(res.read_text())


def _parse_value(text):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(cfg, pairs):
    cfg = copy.deepcopy(cfg)
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, val = item.split("=", 1)
        parts = key.strip().split(".")
        node = cfg
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-table")
        node[parts[-1]] = _parse_value(val.strip())
    return cfg


def get(cfg, key, default=_REQUIRED, kind=None):
    node = cfg
    for p in key.split("."):
        if not isinstance(node, dict) or p not in node:
            if default is _REQUIRED:
                raise ConfigError(f"missing config key {key!r}")
            return default
        node = node[p]
    if kind is not None:
        try:
            if kind is float and isinstance(node, bool):
                raise TypeError
            node = kind(node)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r} has invalid value {node!r}") from None
    return node


def _floats(cfg, key, default=_REQUIRED):
    val = get(cfg, key, default)
    try:
        return [float(v) for v in val]
    except TypeError:
        raise ConfigError(f"config key {key!r} must be a list of numbers") from None


def _span(cfg, key, default=_REQUIRED):
    """[lo, hi, n] triple as a numpy grid."""
    import numpy as np
    val = get(cfg, key, default)
    try:
        lo, hi, n = float(val[0]), float(val[1]), int(val[2])
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"config key {key!r} must be [lo, hi, n]") from None
    if n < 1 or not hi >= lo:
        raise ConfigError(f"config key {key!r} has an empty range")
    return np.linspace(lo, hi, n)


def build_params(cfg):
    from .coherent import CoherentParams
    hbar = get(cfg, "coherent.hbar", kind=float)
    if "b" in cfg.get("coherent", {}):
        b = get(cfg, "coherent.b", kind=float)
    else:
        # widths matched to the model's small-oscillation frequency
        omega = get(cfg, "coherent.omega", kind=float)
        mass = get(cfg, "model.mass", 1.0, float)
        b = math.sqrt(hbar / (mass * omega))
    if not (b > 0 and hbar > 0):
        raise ConfigError("coherent.b and coherent.hbar must be positive")
    return CoherentParams.from_b(b, hbar)


def build_model(cfg):
    from . import hamiltonian as ham
    params = build_params(cfg)
    family = get(cfg, "model.family", kind=str)
    mass = get(cfg, "model.mass", 1.0, float)
    if not mass > 0:
        raise ConfigError("config key 'model.mass' must be positive")
    if family == "harmonic":
        return ham.harmonic_model(get(cfg, "model.omega", kind=float), params, mass)
    if family == "free":
        return ham.polynomial_model([0.0], params, mass)
    if family == "polynomial":
        return ham.polynomial_model(_floats(cfg, "model.coeffs"), params, mass)
    if family == "exponential":
        terms = get(cfg, "model.terms")
        try:
            terms = [(float(a), float(al)) for a, al in terms]
        except (TypeError, ValueError):
            raise ConfigError("config key 'model.terms' must be [[amplitude, alpha], ...]") from None
        return ham.exponential_model(terms, params, mass, _floats(cfg, "model.coeffs", []))
    if family == "barrier":
        return ham.barrier_model(get(cfg, "model.V0", kind=float),
                                 get(cfg, "model.alpha", kind=float),
                                 get(cfg, "model.A", kind=float), mass, params)
    raise ConfigError(f"config key 'model.family' has unknown value {family!r}")


def _initial_point(cfg):
    from .coherent import PhasePoint
    return PhasePoint(get(cfg, "state.q", kind=float), get(cfg, "state.p", kind=float))


def _basis(cfg, model):
    from .quantum import build_basis
    N = get(cfg, "quantum.N", None, int)
    E_max = get(cfg, "quantum.E_max", None, float)
    L = get(cfg, "quantum.L", None, float)
    if N is None and E_max is None:
        raise ConfigError("missing config key 'quantum.N' (or 'quantum.E_max')")
    return build_basis(model, E_max=E_max, N=N, L=L)


def validate(command, cfg):
    """Check everything the command will read before computing anything."""
    if command == "scaling-check":
        target = get(cfg, "scaling.target", "action-defect", str)
        if target not in SCALING_TARGETS:
            raise ConfigError(f"config key 'scaling.target' must be one of {SCALING_TARGETS}")
        return
    if command == "spa-demo":
        return
    build_model(cfg)
    if command in ("ivr-compare", "exact-evolve"):
        _initial_point(cfg)
        _floats(cfg, "run.times")
        if get(cfg, "model.family") == "free":
            _span(cfg, "grid.x")
        elif get(cfg, "quantum.N", None, int) is None:
            get(cfg, "quantum.E_max", kind=float)
    if command == "husimi":
        _span(cfg, "husimi.q")
        _span(cfg, "husimi.p")
        get(cfg, "husimi.m", kind=int)
    if command == "greens":
        get(cfg, "greens.q", kind=float)
        get(cfg, "greens.p", kind=float)
        get(cfg, "greens.gamma", kind=float)
    if command == "propagator":
        _floats(cfg, "run.times")
        get(cfg, "propagator.pairs")


# -- output -------------------------------------------------------------------

def fmt(v):
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


class Writer:
    def __init__(self, out, form):
        self.out = out
        self.form = form
        self.files = []
        os.makedirs(out, exist_ok=True)

    def table(self, name, columns, rows):
        if self.form == "json":
            path = os.path.join(self.out, name + ".json")
            data = [{c: (v if isinstance(v, (int, str)) else float(v))
                     for c, v in zip(columns, row)} for row in rows]
            with open(path, "w", newline="\n") as fh:
                json.dump(data, fh, indent=1, allow_nan=True)
                fh.write("\n")
        else:
            path = os.path.join(self.out, name + ".csv")
            with open(path, "w", newline="\n") as fh:
                fh.write(",".join(columns) + "\n")
                for row in rows:
                    fh.write(",".join(fmt(v) for v in row) + "\n")
        self.files.append(os.path.basename(path))
        return path


def _tag(t):
    return format(float(t), "g").replace(".", "p").replace("-", "m")


# -- commands -----------------------------------------------------------------

def cmd_ivr_compare(cfg, w):
    import numpy as np
    from scipy.integrate import trapezoid
    from .coherent import wavefunction
    from .ivr import free_packet_exact, mixed_packet, sampling_spread
    model = build_model(cfg)
    z0 = _initial_point(cfg)
    times = _floats(cfg, "run.times")
    methods = get(cfg, "ivr.methods", ["paper", "hk", "heller"])
    n = get(cfg, "grid.n", 1024, int)
    if get(cfg, "model.family") == "free":
        # no bound spectrum; the reference is the closed-form spreading packet
        x = _span(cfg, "grid.x")

        def reference(t):
            return free_packet_exact(model.params, model.mass, z0, t, x)
        summary = {"reference": "free closed form"}
    else:
        from .quantum import diagonalize, evolve_exact, expand
        sol = diagonalize(model, _basis(cfg, model))
        L = sol.basis.L
        x = np.linspace(-L, L, n)
        coeffs = expand(sol, lambda xs: wavefunction(z0, model.params, xs))

        def reference(t):
            return evolve_exact(sol, None, t, x, coeffs=coeffs)
        summary = {"reference": "exact diagonalization", "trusted_levels": sol.trusted,
                   "L": L, "E_max": float(sol.basis.E_max)}
    norms = []
    for t in times:
        exact = reference(t)
        cols = {"exact": exact}
        info = {}
        for meth in methods:
            pk = mixed_packet(model, meth, z0, t, x)
            cols[meth] = pk.psi
            info[meth] = pk
        w.table(f"ivr_t{_tag(t)}", ["x"] + [f"rho_{k}" for k in cols],
                zip(x, *(np.abs(v) ** 2 for v in cols.values())))
        row = [t, trapezoid(np.abs(exact) ** 2, x), float(np.max(np.abs(exact) ** 2))]
        for meth in methods:
            pk = info[meth]
            err = math.sqrt(trapezoid(np.abs(pk.psi - exact) ** 2, x))
            row += [pk.norm(), pk.analytic_norm(), float(np.max(np.abs(pk.psi) ** 2)), err,
                    sampling_spread(pk.tangent, meth, model.params.hbar)]
        norms.append(row)
    cols = ["t", "norm_exact", "peak_exact"]
    for meth in methods:
        cols += [f"norm_{meth}", f"norm_{meth}_analytic", f"peak_{meth}", f"l2err_{meth}",
                 f"spread_{meth}"]
    w.table("norms", cols, norms)
    return summary


def cmd_exact_evolve(cfg, w):
    import numpy as np
    from .coherent import wavefunction
    from .quantum import diagonalize, evolve_exact, expand
    model = build_model(cfg)
    z0 = _initial_point(cfg)
    sol = diagonalize(model, _basis(cfg, model))
    L = sol.basis.L
    x = np.linspace(-L, L, get(cfg, "grid.n", 1024, int))
    coeffs = expand(sol, lambda xs: wavefunction(z0, model.params, xs))
    for t in _floats(cfg, "run.times"):
        psi = evolve_exact(sol, None, t, x, coeffs=coeffs)
        w.table(f"exact_t{_tag(t)}", ["x", "re", "im", "rho"],
                zip(x, psi.real, psi.imag, np.abs(psi) ** 2))
    w.table("eigenvalues", ["n", "E_n", "trusted"],
            [(n, E, int(n < sol.trusted)) for n, E in enumerate(sol.energies)])
    return {"trusted_levels": sol.trusted}


def cmd_propagator(cfg, w):
    from .coherent import PhasePoint, label_of, overlap
    from .complextraj import propagator_from, solve_boundary
    model = build_model(cfg)
    if get(cfg, "propagator.representation", "coherent", str) == "coordinate":
        return _coordinate_propagator(cfg, w, model)
    kind = get(cfg, "propagator.kind", "smoothed", str)
    rows = []
    for pair in get(cfg, "propagator.pairs"):
        try:
            q1, p1, q2, p2 = (float(v) for v in pair)
        except (TypeError, ValueError):
            raise ConfigError("config key 'propagator.pairs' must hold [q', p', q'', p''] rows") from None
        a, b = PhasePoint(q1, p1), PhasePoint(q2, p2)
        for t in _floats(cfg, "run.times"):
            if t == 0:
                K = complex(overlap(label_of(b, model.params), label_of(a, model.params)))
                rows.append((t, q1, p1, q2, p2, K.real, K.imag, abs(K), 0.0, 0))
                continue
            tr = solve_boundary(model, kind, a, b, t)
            K = propagator_from(tr)
            rows.append((t, q1, p1, q2, p2, K.real, K.imag, abs(K), tr.residual,
                         tr.iterations))
    w.table("propagator", ["t", "q1", "p1", "q2", "p2", "re", "im", "abs",
                           "residual", "iterations"], rows)
    return {"kind": kind, "evaluations": len(rows)}


def _coordinate_propagator(cfg, w, model):
    import numpy as np
    from .ivr import coordinate_propagator
    rows = []
    for pair in get(cfg, "propagator.pairs"):
        try:
            x1, x2 = (float(v) for v in pair)
        except (TypeError, ValueError):
            raise ConfigError("config key 'propagator.pairs' must hold [x', x''] rows") from None
        for t in _floats(cfg, "run.times"):
            row = [t, x1, x2]
            for meth in ("hk", "paper"):
                a = coordinate_propagator(model, x1, x2, t, meth, mode="spa")
                b = coordinate_propagator(model, x1, x2, t, meth, mode="brute")
                row += [a.real, a.imag, b.real, b.imag, abs(b) / abs(a) - 1,
                        float(np.angle(b / a))]
            rows.append(row)
    cols = ["t", "x1", "x2"]
    for meth in ("hk", "paper"):
        cols += [f"{meth}_spa_re", f"{meth}_spa_im", f"{meth}_brute_re", f"{meth}_brute_im",
                 f"{meth}_modulus_dev", f"{meth}_phase_dev"]
    w.table("coordinate_propagator", cols, rows)
    return {"evaluations": len(rows)}


def cmd_spectrum(cfg, w):
    from .spectral import QuantizationRule, quantize
    model = build_model(cfg)
    m_max = get(cfg, "spectrum.m_max", 10, int)
    ms = range(m_max + 1)
    E = {r: quantize(model, r, ms) for r in QuantizationRule}
    exact = None
    if "quantum" in cfg:
        from .quantum import diagonalize
        sol = diagonalize(model, _basis(cfg, model))
        if sol.trusted <= m_max:
            raise ComputeError(f"only {sol.trusted} trusted levels; increase quantum.N")
        exact = sol.energies
    sm = QuantizationRule.SMOOTHED_PLUS_I
    cols = ["m", "E_paperrule", "E_wkb", "E_antirule"] + (["E_exact"] if exact is not None else []) + ["T", "I"]
    rows = []
    for i, m in enumerate(ms):
        row = [m, E[sm][i].energy, E[QuantizationRule.WEYL_WKB][i].energy,
               E[QuantizationRule.ANTISMOOTHED_MINUS_I][i].energy]
        if exact is not None:
            row.append(exact[m])
        rows.append(row + [E[sm][i].period, E[sm][i].I])
    w.table("spectrum", cols, rows)
    return {"levels": len(rows)}


def cmd_husimi(cfg, w):
    import numpy as np
    from .spectral import husimi_semiclassical, quantize
    model = build_model(cfg)
    rule = get(cfg, "husimi.rule", "smoothed", str)
    m = get(cfg, "husimi.m", kind=int)
    q, p = _span(cfg, "husimi.q"), _span(cfg, "husimi.p")
    level = quantize(model, rule, [m])[0]
    grid = husimi_semiclassical(model, rule, level, q, p)
    Q, Pm = np.meshgrid(q, p, indexing="ij")
    cols, data = ["q", "p", "rho"], [Q.ravel(), Pm.ravel(), grid.rho.ravel()]
    summary = {"m": m, "rule": grid.rule.value, "E_m": level.energy}
    if get(cfg, "husimi.exact", False, bool):
        from .quantum import diagonalize, husimi_exact
        sol = diagonalize(model, _basis(cfg, model))
        ex = husimi_exact(sol, m, q, p, model.params)
        cols.append("rho_exact")
        data.append(ex.ravel())
        a, b = np.nan_to_num(grid.rho), ex
        summary["overlap"] = float(np.sum(a * b) / math.sqrt(np.sum(a * a) * np.sum(b * b)))
    w.table("husimi", cols, zip(*data))
    return summary


def cmd_greens(cfg, w):
    import warnings
    from .coherent import PhasePoint
    from .spectral import OrbitFunctions, QuantizationRule, greens_function
    from .errors import PoleProximityWarning
    model = build_model(cfg)
    rule = QuantizationRule.parse(get(cfg, "greens.rule", "smoothed", str))
    pt = PhasePoint(get(cfg, "greens.q", kind=float), get(cfg, "greens.p", kind=float))
    gamma = get(cfg, "greens.gamma", kind=float)
    if not gamma > 0:
        raise ConfigError("config key 'greens.gamma' must be positive")
    energies = _span(cfg, "greens.E")
    orb = OrbitFunctions(model, rule.kind)
    rows = []
    for E in energies:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PoleProximityWarning)
            G = greens_function(model, rule, pt, E, gamma, orbits=orb)
        rows.append((E, G.real, G.imag, abs(G), int(bool(caught))))
    w.table("greens", ["E", "re", "im", "abs", "pole_flag"], rows)
    return {"rule": rule.value, "gamma": gamma}


def _poly(coeffs):
    import numpy as np
    c = np.asarray(coeffs, dtype=float)
    return lambda x: np.polynomial.polynomial.polyval(x, c)


def _spa_table(cfg, w):
    import numpy as np
    from numpy.polynomial import polynomial as P
    from .asymptotics import rotated_contour_integral, spa_integrate
    from .classical import loglog_slope
    fc = _floats(cfg, "spa.f", [0.0, 0.0, 1.0, 0.0, 1.0])
    gc = _floats(cfg, "spa.g", [1.0])
    hbars = _floats(cfg, "spa.hbars", [0.2, 0.1, 0.05, 0.025])
    angle = get(cfg, "spa.angle", math.pi / 8, float)
    x0 = get(cfg, "spa.x0", 0.0, float)

    def derivs(c, k):
        out, cur = [], np.asarray(c)
        for _ in range(k):
            out.append(float(P.polyval(x0, cur)) if cur.size else 0.0)
            cur = P.polyder(cur) if cur.size > 1 else np.zeros(0)
        return out

    fd, gd = derivs(fc, 5), derivs(gc, 3)
    f, g = _poly(fc), _poly(gc)
    rows, e0, e1 = [], [], []
    for h in hbars:
        ref = rotated_contour_integral(lambda x: f(x + x0), lambda x: g(x + x0), h, angle)
        res = spa_integrate(fd, gd, h)
        a, b = abs(ref - res.A0) / abs(res.A0), abs(ref - res.corrected) / abs(res.A0)
        e0.append(a)
        e1.append(b)
        rows.append((h, ref.real, ref.imag, res.A0.real, res.A0.imag,
                     res.corrected.real, res.corrected.imag, a, b))
    w.table("spa", ["hbar", "quad_re", "quad_im", "A0_re", "A0_im", "corr_re", "corr_im",
                    "relerr_A0", "relerr_corrected"], rows)
    R = spa_integrate(fd, gd, hbars[0]).R
    return {"R": float(np.real(R)), "slope_A0": loglog_slope(hbars, e0),
            "slope_corrected": loglog_slope(hbars, e1)}


def cmd_spa_demo(cfg, w):
    return _spa_table(cfg, w)


def _action_defect(cfg, w):
    from .classical import loglog_slope, smoothing_action_defect
    from .coherent import CoherentParams, PhasePoint
    from .hamiltonian import polynomial_model
    coeffs = _floats(cfg, "scaling.coeffs", [0.0, 0.0, 0.0, 0.0, 0.25])
    hbars = _floats(cfg, "scaling.hbars", [0.2, 0.1, 0.05, 0.025, 0.0125])
    t = get(cfg, "scaling.t", 1.0, float)
    start = PhasePoint(get(cfg, "scaling.q", 1.0, float), get(cfg, "scaling.p", 0.0, float))
    rows = []
    for h in hbars:
        model = polynomial_model(coeffs, CoherentParams.from_b(math.sqrt(h), h))
        rows.append((h, abs(smoothing_action_defect(model, start, t))))
    w.table("action_defect", ["hbar", "defect"], rows)
    return {"slope": loglog_slope([r[0] for r in rows], [r[1] for r in rows])}


def _rules(cfg, w):
    import numpy as np
    from .classical import loglog_slope
    from .coherent import CoherentParams
    from .hamiltonian import polynomial_model
    from .quantum import build_basis, diagonalize
    from .spectral import QuantizationRule, quantize
    coeffs = _floats(cfg, "scaling.coeffs", [0.0, 0.0, 0.5, 0.0, 0.25])
    hbars = _floats(cfg, "scaling.hbars", [0.2, 0.1, 0.05])
    m_max = get(cfg, "scaling.m_max", 10, int)
    ms = list(range(m_max + 1))
    rules = list(QuantizationRule)
    rows, seps = [], {}
    for h in hbars:
        model = polynomial_model(coeffs, CoherentParams.from_b(math.sqrt(h), h))
        E = {r: np.array([l.energy for l in quantize(model, r, ms)]) for r in rules}
        basis = build_basis(model, E_max=3 * E[QuantizationRule.WEYL_WKB][-1] + 5)
        ex = diagonalize(model, basis).energies[:len(ms)]
        for i, m in enumerate(ms):
            rows.append([h, m] + [E[r][i] for r in rules] + [ex[i]])
        for a in range(3):
            for b in range(a + 1, 3):
                key = f"{rules[a].value}-{rules[b].value}"
                seps.setdefault(key, []).append(float(np.max(np.abs(E[rules[a]] - E[rules[b]]))))
    w.table("rules", ["hbar", "m"] + [f"E_{r.value}" for r in rules] + ["E_exact"], rows)
    return {f"slope_{k}": loglog_slope(hbars, v) for k, v in seps.items()}


def cmd_scaling_check(cfg, w):
    target = get(cfg, "scaling.target", "action-defect", str)
    if target in ("action-defect", "appendix-c"):
        return _action_defect(cfg, w)
    if target == "rules":
        return _rules(cfg, w)
    if target == "spa":
        return _spa_table(cfg, w)
    raise ConfigError(f"config key 'scaling.target' must be one of {SCALING_TARGETS}")


HANDLERS = {
    "ivr-compare": cmd_ivr_compare, "propagator": cmd_propagator,
    "spectrum": cmd_spectrum, "husimi": cmd_husimi, "greens": cmd_greens,
    "exact-evolve": cmd_exact_evolve, "spa-demo": cmd_spa_demo,
    "scaling-check": cmd_scaling_check,
}


# -- entry point --------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario file (TOML/JSON) or bundled name")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. coherent.hbar=0.1")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--threads", type=int, default=None,
                        help="thread count for the linear-algebra backend")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    parser = argparse.ArgumentParser(prog="semicoh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "scaling-check":
            p.add_argument("target", nargs="?", choices=SCALING_TARGETS, default=None)
    return parser


def run(command, config=None, overrides=(), out="out", form="csv", threads=None,
        target=None):
    """Run one command; returns (exit status, summary or message)."""
    t0 = time.perf_counter()
    try:
        cfg = apply_overrides(load_config(config), overrides)
        if command == "scaling-check" and target is not None:
            cfg.setdefault("scaling", {})["target"] = target
        if command not in HANDLERS:
            raise ConfigError(f"unknown command {command!r}")
        validate(command, cfg)
        writer = Writer(out, form)
        summary = HANDLERS[command](cfg, writer)
    except ConfigError as err:
        return 2, f"config error: {err}"
    except ComputeError as err:
        return 3, f"compute error in {command}: {type(err).__name__}: {err}"
    manifest = {
        "tool": "semicoh", "version": __version__, "command": command,
        "config_source": config, "overrides": list(overrides), "config": cfg,
        "threads": threads, "format": form, "outputs": writer.files,
        "summary": summary, "wall_time_s": time.perf_counter() - t0,
    }
    with open(os.path.join(out, "manifest.json"), "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return 0, summary


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    status, info = run(args.command, args.config, args.set, args.out, args.format,
                       args.threads, getattr(args, "target", None))
    if status:
        print(info, file=sys.stderr)
    else:
        print(json.dumps(info, default=str))
    return status


if __name__ == "__main__":
    sys.exit(main())
