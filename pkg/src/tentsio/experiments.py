"""Experiment configurations, the experiment runner and its reports.

A configuration is a JSON object::

    {
      "kind": "duality-check",
      "grid": {"n": 1, "X": 3.141592653589793, "Nx": 64,
               "t_min": 0.001, "t_max": 10.0, "Nt": 256},
      "model": {"family": "heat"},
      "params": {},
      "seeds": [0, 1, 2],
      "tolerances": {"rel": 0.01},
      "output": {"json": "duality.json", "csv": "duality.csv"}
    }

``params`` holds the kind-specific sweeps (see :data:`DEFAULT_PARAMS`).  A
report has the sections ``config``, ``cases``, ``summary``, ``tolerances``,
``versions`` and ``runtime``; everything but ``runtime`` is a deterministic
function of the configuration.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import platform
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy

from . import __version__
from .errors import ConfigurationError, ExperimentError, TentsioError
from .exponents import PRESETS, fmt, golden_rows, preset
from .grid import Field, GridSpec, inner, make_grid, sample, weighted_l2_norm
from .kernels import (DENSE_CAP_1D, DENSE_CAP_ND, make_model, measure_offdiag,
                      random_coefficient)
from .sio import apply, apply_backward, hardy_check, hardy_constant, hardy_profiles, maxreg
from .tent import (TentParams, change_homogeneity, make_atom, tent_norm, unit_ball_volume,
                   verify_atom)

KINDS = ("norm-identity", "isometry", "offdiag-fit", "maxreg-ratio", "exponent-table",
         "hardy-sweep", "duality-check")

DEFAULT_TOLERANCES = {
    "norm-identity": {"rel": 0.03},
    "isometry": {"discrepancy": 0.02, "slack": 1e-6},
    "offdiag-fit": {"min_M": None, "max_M": None, "max_residual": None},
    "maxreg-ratio": {"stability": 0.2, "uniformity": 2.0},
    "exponent-table": {},
    "hardy-sweep": {},
    "duality-check": {"rel": 0.01},
}

DEFAULT_PARAMS = {
    "norm-identity": {"grids": None, "pairs": [[1, 0], [2, -0.5]]},
    "isometry": {"pairs": [[2, 0], [1, -1], [2, -0.5]], "kinds": ["constant", "randomized", "oscillatory"],
                 "p": [1.0, 2.0]},
    "offdiag-fit": {"pair": "2:2", "t_ladder": [0.5, 0.25], "d_ladder": [1.0, 2.0],
                    "ball_radius": 1.0, "x_min": 4.0, "x_max": None, "contrast": 10.0,
                    "refine": 1},
    "maxreg-ratio": {"mode": "weighted-l2", "betas": [0.0], "Nt": [64, 128],
                     "p": [1.0], "kinds": ["constant"], "k": [0, 1, 2], "m": 2, "beta": 0.0},
    "exponent-table": {"presets": list(PRESETS), "n": [1, 2, 3, 4, 5, 6]},
    "hardy-sweep": {"betas": [0.0, 0.5, 0.9, 0.99], "levels": [0.5, 0.9, 1.0]},
    "duality-check": {},
}

# Published ranges: (lower, lower eps-limit, upper, upper closed, upper eps-limit)
_POINTWISE = {n: (f"{n}/{n + 1}", False, "inf", True, False) for n in range(1, 7)}
PUBLISHED = {
    "prop14-heat": _POINTWISE,
    "prop14-sqrt": _POINTWISE,
    "prop15": _POINTWISE,
    "prop16": {1: ("1/2", False, "inf", True, False), 2: ("2/3", False, "inf", True, False),
               3: ("6/7", True, "inf", True, False), 4: ("1", True, "inf", True, False),
               5: ("6/5", True, "inf", True, False), 6: ("4/3", True, "inf", True, False)},
    "prop17": {1: ("1/2", False, "inf", True, False), 2: ("2/3", False, "inf", True, False),
               3: ("6/7", True, "inf", True, False), 4: ("1", True, "inf", True, False),
               5: ("6/5", True, "6", False, True), 6: ("4/3", True, "4", False, True)},
}


# ---------------------------------------------------------------- inputs


def random_bump(spec: GridSpec, seed: int) -> Field:
    """Gaussian in space times a Gaussian in ``log t``, with seeded centre and widths."""
    r = np.random.default_rng(seed)
    c = r.uniform(-0.5, 0.5, spec.n)
    w = r.uniform(0.25, 0.4)
    tc = r.uniform(-3.0, -2.0)

    def fn(t, *y):
        r2 = sum((yy - cc) ** 2 for yy, cc in zip(y, c))
        return np.exp(-r2 / w ** 2) * np.exp(-(np.log(t) - tc) ** 2)

    return sample(fn, spec)


def time_bump(t, c, w):
    """Smooth bump in ``log t``, supported on ``|log t - c| < w``."""
    z = (np.log(t) - c) / w
    return np.where(np.abs(z) < 1, np.exp(-1 / np.maximum(1 - z ** 2, 1e-300)), 0.0)


def random_input(spec: GridSpec, seed: int, lo: float = 0.01, hi: float = 1.0) -> Field:
    """Compactly supported in time, a sum of three seeded Fourier modes in space."""
    r = np.random.default_rng(seed)
    c = r.uniform(np.log(lo), np.log(hi))
    w = r.uniform(0.5, 1.5)
    k = r.integers(0, 8, size=3)
    ph = r.uniform(0, 2 * np.pi, 3)
    if spec.n != 1:
        raise ConfigurationError("random_input is defined for n = 1")
    scale = np.pi / spec.X
    return sample(lambda t, y: time_bump(t, c, w) * sum(np.cos(kk * scale * y + p)
                                                        for kk, p in zip(k, ph)), spec)


def pair_input(spec: GridSpec, seed: int) -> Field:
    """Time bump inside ``[0.02, 0.5]`` times a single mode plus a fixed one."""
    r = np.random.default_rng(seed)
    c = r.uniform(np.log(0.02), np.log(0.5))
    w = r.uniform(0.5, 1.5)
    k = r.integers(1, 5)
    ph = r.uniform(0, 2 * np.pi)
    scale = np.pi / spec.X
    return sample(lambda t, y: time_bump(t, c, w) * (np.cos(k * scale * y + ph)
                                                     + 0.5 * np.sin(scale * y)), spec)


# ---------------------------------------------------------------- config


@dataclass
class ExperimentConfig:
    kind: str
    grid: dict = field(default_factory=dict)
    model: dict = field(default_factory=lambda: {"family": "heat"})
    params: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0])
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    name: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigurationError("a configuration is a JSON object with a 'kind' key")
        unknown = set(d) - {"kind", "grid", "model", "params", "seeds", "tolerances", "output", "name"}
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**copy.deepcopy(d))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "grid": self.grid, "model": self.model, "params": self.params,
             "seeds": self.seeds, "tolerances": self.tolerances, "output": self.output}
        if self.name is not None:
            d["name"] = self.name
        return copy.deepcopy(d)

    def merged_params(self) -> dict:
        out = copy.deepcopy(DEFAULT_PARAMS.get(self.kind, {}))
        out.update(copy.deepcopy(self.params))
        return out

    def merged_tolerances(self) -> dict:
        out = dict(DEFAULT_TOLERANCES.get(self.kind, {}))
        out.update(self.tolerances)
        return out

    def grid_spec(self, **override) -> GridSpec:
        g = dict(self.grid)
        g.update(override)
        return GridSpec.from_dict(g)


def _spec_or_none(grid: dict, diags: list, label: str = "grid") -> Optional[GridSpec]:
    try:
        return GridSpec.from_dict(grid)
    except (TentsioError, KeyError, TypeError, ValueError) as exc:
        diags.append(f"invalid {label}: {exc}")
        return None


def validate(config: ExperimentConfig) -> list:
    """Static checks; returns a list of diagnostics, empty when the config is usable."""
    diags = []
    if config.kind not in KINDS:
        return [f"unknown experiment kind {config.kind!r}; expected one of {list(KINDS)}"]
    params = config.merged_params()
    for key, val in params.items():
        if isinstance(val, list) and len(val) == 0:
            diags.append(f"empty sweep: {key}")
    if not isinstance(config.seeds, list) or not all(isinstance(s, int) for s in config.seeds):
        diags.append("seeds must be an explicit list of integers")
    elif config.kind not in ("exponent-table", "hardy-sweep") and not config.seeds:
        diags.append("empty sweep: seeds")
    kind = config.kind
    if kind == "exponent-table":
        bad = [p for p in params["presets"] if p not in PRESETS]
        if bad:
            diags.append(f"unknown presets {bad}")
        return diags
    if kind == "norm-identity" and params.get("grids"):
        specs = [_spec_or_none(g, diags, "refinement grid") for g in params["grids"]]
        spec = specs[-1] if specs else None
    else:
        spec = _spec_or_none(config.grid, diags)
    if kind == "hardy-sweep":
        for b in params["betas"]:
            if not b < 1:
                diags.append(f"beta={b} outside the weighted L2 hypothesis beta < 1")
    if kind == "maxreg-ratio" and params["mode"] == "weighted-l2":
        for b in params["betas"]:
            if not b < 1:
                diags.append(f"beta={b} outside the weighted L2 hypothesis beta < 1")
    if kind == "maxreg-ratio" and params["mode"] not in ("weighted-l2", "tent-atoms"):
        diags.append(f"unknown maxreg-ratio mode {params['mode']!r}")
    if spec is None:
        return diags
    if kind == "offdiag-fit":
        reach = max(params["d_ladder"] or [0]) + params["ball_radius"]
        if reach > spec.X / 2:
            diags.append(f"wrap-around risk: max d + ball radius = {reach} exceeds X/2 = {spec.X / 2}")
        N = spec.Nx * int(params.get("refine", 1))
        cap = DENSE_CAP_1D if spec.n == 1 else DENSE_CAP_ND
        if N ** spec.n > cap and (spec.n > 1 or N > cap):
            diags.append(f"dense oracle of size {N ** spec.n} exceeds the memory cap {cap}")
    if kind in ("maxreg-ratio", "duality-check") and spec.n != 1:
        diags.append("maxreg experiments are defined for n = 1")
    return diags


# ---------------------------------------------------------------- report


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    return x


def versions() -> dict:
    return {"tentsio": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


@dataclass
class Report:
    config: dict
    cases: list
    summary: dict
    tolerances: dict
    passed: bool
    rows: list = field(default_factory=list)
    runtime: dict = field(default_factory=dict)

    def payload(self) -> dict:
        """Everything except the runtime section."""
        return _clean({"config": self.config, "cases": self.cases, "summary": self.summary,
                       "tolerances": self.tolerances, "passed": self.passed,
                       "versions": versions()})

    def to_dict(self) -> dict:
        d = self.payload()
        d["runtime"] = _clean(self.runtime)
        return d

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def csv_text(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        keys = list(self.rows[0].keys())
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _csv_value(r.get(k)) for k in keys})
        return buf.getvalue()

    def write(self, json_path=None, csv_path=None) -> None:
        if json_path:
            with open(json_path, "w") as fh:
                fh.write(self.to_json() + "\n")
        if csv_path:
            with open(csv_path, "w") as fh:
                fh.write(self.csv_text())


def _csv_value(v):
    v = _clean(v)
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------- experiments


def _guard(kind: str, params: dict, fn: Callable):
    try:
        return fn()
    except TentsioError as exc:
        raise ExperimentError(f"{kind} case {json.dumps(_clean(params), sort_keys=True)}: "
                              f"{type(exc).__name__}: {exc}") from exc


def _norm_identity(cfg: ExperimentConfig, P: dict, tol: dict):
    grids = P.get("grids") or [cfg.grid]
    cases, rows = [], []
    levels = []
    for level, g in enumerate(grids):
        spec = GridSpec.from_dict(g)
        bn = unit_ball_volume(spec.n)
        worst = 0.0
        for seed in cfg.seeds:
            f = random_bump(spec, seed)
            for m, beta in P["pairs"]:
                case = {"level": level, "seed": seed, "m": m, "beta": beta}
                ratio = _guard(cfg.kind, case, lambda: tent_norm(f, TentParams(2, m, beta)) ** 2
                               / weighted_l2_norm(f, beta) ** 2)
                err = abs(ratio / bn - 1)
                worst = max(worst, err)
                case.update({"n": spec.n, "Nt": spec.Nt, "Nx": spec.Nx, "ratio": ratio, "b_n": bn,
                             "rel_error": err})
                cases.append(case)
                rows.append(case)
        levels.append({"level": level, "Nt": spec.Nt, "Nx": spec.Nx, "max_rel_error": worst})
    passed = levels[-1]["max_rel_error"] < tol["rel"]
    for c in cases:
        c["pass"] = c["level"] != len(grids) - 1 or c["rel_error"] < tol["rel"]
    return cases, rows, {"convergence": levels}, passed


def _isometry(cfg, P, tol):
    spec = cfg.grid_spec()
    cases = []
    for m, beta in P["pairs"]:
        for kind in P["kinds"]:
            for seed in cfg.seeds:
                r = 0.5 + 0.05 * (seed % 10)
                x0 = [0.1 * (seed % 10) - 0.4] + [0.0] * (spec.n - 1)
                case = {"m": m, "beta": beta, "atom": kind, "seed": seed, "r": r}

                def one():
                    a = make_atom(kind, r, x0, TentParams(1.0, m, beta), spec, seed=seed)
                    ja = change_homogeneity(a, m, beta)
                    cin, cout = verify_atom(a), verify_atom(ja)
                    disc = []
                    for p in P["p"]:
                        n1 = tent_norm(a.field, TentParams(p, m, beta))
                        n2 = tent_norm(ja.field, TentParams(p, 1, -1))
                        disc.append(abs(n1 - n2) / n1)
                    return cin, cout, disc

                cin, cout, disc = _guard(cfg.kind, case, one)
                ok = (max(disc) < tol["discrepancy"] and cout.support_ok
                      and cout.slack <= cin.slack + tol["slack"])
                case.update({"discrepancy": max(disc), "slack_in": cin.slack, "slack_out": cout.slack,
                             "support_ok": cout.support_ok, "pass": ok})
                cases.append(case)
    passed = all(c["pass"] for c in cases)
    return cases, cases, {"max_discrepancy": max(c["discrepancy"] for c in cases)}, passed


def _model_for(cfg: ExperimentConfig, spec: GridSpec, seed: int, P: dict):
    mdl = dict(cfg.model)
    family = mdl.pop("family", "heat")
    sqrt = bool(mdl.pop("sqrt", False))
    if family == "divform1d":
        refine = int(P.get("refine", 1))
        coarse = GridSpec(spec.n, spec.X, spec.Nx // refine, spec.t_min, spec.t_max, spec.Nt)
        a = random_coefficient(coarse, contrast=P.get("contrast", 10.0), seed=seed)
        return make_model(family, spec, sqrt, a=np.repeat(a, refine))
    if family == "schrodinger1d":
        r = np.random.default_rng(seed)
        V = mdl.get("V_scale", 1.0) * r.uniform(0, 1, spec.Nx)
        return make_model(family, spec, sqrt, V=V)
    return make_model(family, spec, sqrt, **mdl)


def _offdiag(cfg, P, tol):
    refine = int(P.get("refine", 1))
    spec = cfg.grid_spec(Nx=cfg.grid["Nx"] * refine)
    seeds = cfg.seeds if cfg.model.get("family") in ("divform1d", "schrodinger1d") else cfg.seeds[:1]
    x_max = P["x_max"] if P["x_max"] is not None else math.inf
    cases, rows = [], []
    for seed in seeds:
        case = {"seed": seed, "family": cfg.model.get("family", "heat"), "pair": P["pair"]}

        def one():
            S = _model_for(cfg, spec, seed, P)
            return measure_offdiag(S, P["pair"], P["t_ladder"], P["d_ladder"], P["ball_radius"],
                                   x_min=P["x_min"], x_max=x_max)

        est = _guard(cfg.kind, case, one)
        ok = True
        if tol.get("min_M") is not None:
            ok &= est.fittedM >= tol["min_M"]
        if tol.get("max_M") is not None:
            ok &= est.fittedM <= tol["max_M"]
        if tol.get("max_residual") is not None:
            ok &= est.residual < tol["max_residual"]
        case.update({"fittedM": est.fittedM, "residual": est.residual, "points": len(est.fitRange),
                     "pass": bool(ok)})
        cases.append(case)
        for s, d, x, val in est.samples:
            rows.append({"seed": seed, "t": s, "d": d, "x": x, "norm": val})
    passed = all(c["pass"] for c in cases)
    return cases, rows, {"fittedM": [c["fittedM"] for c in cases]}, passed


def _maxreg_ratio(cfg, P, tol):
    if P["mode"] == "weighted-l2":
        return _maxreg_weighted(cfg, P, tol)
    return _maxreg_atoms(cfg, P, tol)


def _maxreg_weighted(cfg, P, tol):
    cases, rows = [], []
    for beta in P["betas"]:
        per_nt = []
        for Nt in P["Nt"]:
            spec = cfg.grid_spec(Nt=Nt)
            case = {"beta": beta, "Nt": Nt}

            def one():
                S = _model_for(cfg, spec, cfg.seeds[0], P)
                T = maxreg(S)
                return max(weighted_l2_norm(apply(T, f), beta) / weighted_l2_norm(f, beta)
                           for f in (random_input(spec, s) for s in cfg.seeds))

            ratio = _guard(cfg.kind, case, one)
            per_nt.append(ratio)
            rows.append({"beta": beta, "Nt": Nt, "ratio": ratio})
        changes = [abs(b / a - 1) for a, b in zip(per_nt, per_nt[1:])]
        cases.append({"beta": beta, "Nt": P["Nt"], "ratios": per_nt, "changes": changes,
                      "pass": max(changes, default=0.0) < tol["stability"]})
    passed = all(c["pass"] for c in cases)
    return cases, rows, {"max_change": max(max(c["changes"], default=0.0) for c in cases)}, passed


def _maxreg_atoms(cfg, P, tol):
    spec = cfg.grid_spec()
    m, beta = P["m"], P["beta"]
    n = spec.n
    cases, rows = [], []
    for kind in P["kinds"]:
        values = {p: [] for p in P["p"]}
        for k in P["k"]:
            r = 2.0 ** -k
            case = {"atom": kind, "k": k}

            def one():
                S = _model_for(cfg, spec, cfg.seeds[0], P)
                a = make_atom(kind, r, [0.0] * n, TentParams(1.0, m, beta), spec, seed=cfg.seeds[0] + k)
                out = apply(maxreg(S), a.field)
                # linearity: the p-atom is the p=1 atom times r**(-n(2/p-1)/2) / r**(-n/2)
                return {p: tent_norm(out, TentParams(p, m, beta))
                        * r ** (-n * (2 / p - 1) / 2) / r ** (-n / 2) for p in P["p"]}

            norms = _guard(cfg.kind, case, one)
            for p in P["p"]:
                values[p].append(norms[p])
                rows.append({"atom": kind, "k": k, "r": r, "p": p, "norm": norms[p]})
        for p in P["p"]:
            ratio = max(values[p]) / min(values[p])
            cases.append({"atom": kind, "p": p, "norms": values[p], "max_over_min": ratio,
                          "pass": ratio <= tol["uniformity"]})
    passed = all(c["pass"] for c in cases)
    return cases, rows, {"max_over_min": max(c["max_over_min"] for c in cases)}, passed


def _exponent_table(cfg, P, tol):
    rows = [r for r in golden_rows(P["n"]) if r["preset"] in P["presets"]]
    cases = []
    for r in rows:
        pub = PUBLISHED.get(r["preset"], {}).get(r["n"])
        got = (r["lower"], r["lower_limit"], r["upper"], r["upper_closed"], r["upper_limit"])
        status = "unchecked" if pub is None else ("match" if got == pub and not r["lower_closed"]
                                                  else "mismatch")
        cases.append({**r, "published": None if pub is None else list(pub), "status": status,
                      "pass": status != "mismatch"})
    passed = all(c["pass"] for c in cases)
    return cases, rows, {"checked": sum(c["status"] != "unchecked" for c in cases),
                         "mismatches": sum(c["status"] == "mismatch" for c in cases)}, passed


def _hardy(cfg, P, tol):
    spec = cfg.grid_spec()
    cases = []
    for beta in P["betas"]:
        case = {"beta": beta}
        est = _guard(cfg.kind, case, lambda: hardy_check(beta, hardy_profiles(beta, spec, P["levels"]), spec))
        case.update({"constant": est, "sharp": hardy_constant(beta), "finite": math.isfinite(est)})
        cases.append(case)
    consts = [c["constant"] for c in cases]
    monotone = all(a < b for a, b in zip(consts, consts[1:]))
    for c in cases:
        c["pass"] = c["finite"] and monotone
    return cases, cases, {"monotone": monotone}, monotone and all(c["finite"] for c in cases)


def _duality(cfg, P, tol):
    spec = cfg.grid_spec()
    cases = []
    S = _guard(cfg.kind, {"stage": "model"}, lambda: _model_for(cfg, spec, cfg.seeds[0], P))
    T = maxreg(S)
    for seed in cfg.seeds:
        case = {"seed": seed, "pair_seed": 100 + seed}

        def one():
            f, g = pair_input(spec, seed), pair_input(spec, 100 + seed)
            return inner(apply(T, f), g), inner(f, apply_backward(T, g))

        a, b = _guard(cfg.kind, case, one)
        rel = abs(a - b) / abs(a)
        case.update({"forward": a, "backward": b, "rel_error": rel, "pass": rel < tol["rel"]})
        cases.append(case)
    passed = all(c["pass"] for c in cases)
    return cases, [{k: v for k, v in c.items() if k not in ("forward", "backward")} for c in cases], \
        {"max_rel_error": max(c["rel_error"] for c in cases)}, passed


_RUNNERS = {
    "norm-identity": _norm_identity,
    "isometry": _isometry,
    "offdiag-fit": _offdiag,
    "maxreg-ratio": _maxreg_ratio,
    "exponent-table": _exponent_table,
    "hardy-sweep": _hardy,
    "duality-check": _duality,
}


def run(config: ExperimentConfig, write: bool = True) -> Report:
    """Validate and execute ``config``; writes the configured outputs when ``write``.

    Raises
    ------
    ConfigurationError
        When :func:`validate` reports diagnostics.
    ExperimentError
        When a module error occurs inside a case; the message names the case.
    """
    diags = validate(config)
    if diags:
        raise ConfigurationError("; ".join(diags))
    params = config.merged_params()
    tol = config.merged_tolerances()
    start = time.perf_counter()
    cases, rows, summary, passed = _RUNNERS[config.kind](config, params, tol)
    elapsed = time.perf_counter() - start
    echo = config.to_dict()
    echo["params"] = params
    report = Report(echo, cases, summary, tol, bool(passed), rows,
                    {"seconds": elapsed, "finished": time.strftime("%Y-%m-%dT%H:%M:%S")})
    if write and config.output:
        report.write(config.output.get("json"), config.output.get("csv"))
    return report


# ---------------------------------------------------------------- suite


def default_suite() -> list:
    """One desk-scale configuration per experiment kind."""
    pi = math.pi
    return [
        ExperimentConfig("norm-identity", name="norm-identity",
                         params={"grids": [{"n": 1, "X": 4.0, "Nx": Nx, "t_min": 1e-3, "t_max": 1.0, "Nt": Nx}
                                           for Nx in (64, 128, 256)]},
                         seeds=[0, 1, 2]),
        ExperimentConfig("isometry", name="isometry",
                         grid={"n": 1, "X": 4.0, "Nx": 128, "t_min": 1e-4, "t_max": 2.0, "Nt": 128},
                         params={"kinds": ["constant", "randomized"]}, seeds=[0, 1, 2]),
        ExperimentConfig("offdiag-fit", name="offdiag-heat",
                         grid={"n": 1, "X": 16.0, "Nx": 512, "t_min": 0.1, "t_max": 1.0, "Nt": 8},
                         model={"family": "heat"},
                         params={"t_ladder": [2 ** (-k / 2) for k in range(2, 8)],
                                 "d_ladder": [2 ** (j / 2) for j in range(-2, 5)],
                                 "x_min": 20.0, "x_max": 50.0},
                         tolerances={"min_M": 5.0, "max_residual": 0.5}),
        ExperimentConfig("maxreg-ratio", name="maxreg-weighted",
                         grid={"n": 1, "X": pi, "Nx": 64, "t_min": 1e-4, "t_max": 10.0, "Nt": 64},
                         params={"mode": "weighted-l2", "betas": [-0.5, 0.0, 0.5], "Nt": [64, 128]},
                         seeds=[0, 1, 2, 3]),
        ExperimentConfig("exponent-table", name="exponent-table", seeds=[]),
        ExperimentConfig("hardy-sweep", name="hardy-sweep",
                         grid={"n": 1, "X": 1.0, "Nx": 8, "t_min": 1e-8, "t_max": 1e8, "Nt": 256},
                         seeds=[]),
        ExperimentConfig("duality-check", name="duality",
                         grid={"n": 1, "X": pi, "Nx": 64, "t_min": 1e-3, "t_max": 10.0, "Nt": 128},
                         seeds=[0, 1, 2], tolerances={"rel": 0.01}),
    ]


@dataclass
class SuiteReport:
    reports: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def payload(self) -> dict:
        return {"experiments": [r.payload() for r in self.reports], "passed": self.passed}

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        d = self.payload()
        d["runtime"] = {"seconds": sum(r.runtime.get("seconds", 0.0) for r in self.reports),
                        "per_experiment": [_clean(r.runtime) for r in self.reports]}
        return json.dumps(d, sort_keys=True, indent=2)


def run_suite(configs=None) -> SuiteReport:
    configs = default_suite() if configs is None else configs
    return SuiteReport([run(c, write=False) for c in configs])
