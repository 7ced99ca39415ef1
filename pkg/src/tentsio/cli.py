"""Command line entry point ``tentsio``.

Subcommands::

    tentsio exponents --theorem thm31 --n 3 --m 2 --beta 0 --q 6/5 --M inf
    tentsio exponents --preset prop16 --n 4
    tentsio norm --p 1 --m 2 --beta 0 --input f.json [--carleson]
    tentsio apply --op maxreg --alpha 1+0i --model heat --part whole --input f.json --output Tf.json
    tentsio offdiag --model heat --n 1 --qr 2:2 --m 2 ...
    tentsio resolvent-offdiag --model heat --theta 0.5 ...
    tentsio experiment --config cfg.json | --suite

Every subcommand writes JSON to stdout.  The exit status is 0 when all
declared tolerances pass, 1 when a check fails and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import exponents as ex
from .errors import TentsioError
from .experiments import ExperimentConfig, _clean, default_suite, run, run_suite
from .grid import GridSpec, load_field, save_field
from .kernels import (make_model, measure_offdiag, measure_resolvent_offdiag, parse_pair,
                      random_coefficient)
from .sio import apply, apply_backward, maxreg, maxreg_alpha
from .tent import TentParams, carleson_norm, tent_norm


def _emit(obj) -> None:
    print(json.dumps(_clean(obj), sort_keys=True, indent=2))


def _float_list(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------- exponents


def cmd_exponents(args) -> int:
    if args.preset:
        rep = ex.preset(args.preset, args.n, args.p_minus, args.p_plus)
    else:
        inputs = ex.ExponentInputs(args.n, args.m, args.beta, args.q, args.M, args.alpha_re)
        if args.theorem == "thm31":
            rep = ex.thm31_range(inputs, side=args.side)
        elif args.theorem == "prop36":
            rep = ex.prop36_range(inputs.n, inputs.m, inputs.beta, inputs.q, inputs.M)
        elif args.theorem == "thm41":
            rep = ex.thm41_range(inputs, side=args.side)
        elif args.theorem == "prop42":
            rep = ex.prop42_range(inputs)
        else:
            rep = ex.cor56_pL(inputs.n, inputs.m, inputs.beta, inputs.q, args.direction, side=args.side)
    _emit(rep.to_dict())
    return 0 if rep.ok else 1


# ---------------------------------------------------------------- models


def _add_model_args(p) -> None:
    p.add_argument("--model", default="heat",
                   choices=["heat", "poisson", "divform1d", "schrodinger1d", "scalar"])
    p.add_argument("--sqrt", action="store_true", help="use L**(1/2)")
    p.add_argument("--w", type=float, default=1.0, help="multiplier of the scalar model")
    p.add_argument("--seed", type=int, default=0, help="seed for random coefficients")
    p.add_argument("--contrast", type=float, default=10.0, help="coefficient contrast")


def _model(args, spec: GridSpec):
    if args.model == "divform1d":
        return make_model("divform1d", spec, args.sqrt,
                          a=random_coefficient(spec, contrast=args.contrast, seed=args.seed))
    if args.model == "schrodinger1d":
        V = np.random.default_rng(args.seed).uniform(0, 1, spec.Nx)
        return make_model("schrodinger1d", spec, args.sqrt, V=V)
    if args.model == "scalar":
        return make_model("scalar", spec, args.sqrt, w=args.w)
    return make_model(args.model, spec, args.sqrt)


# ---------------------------------------------------------------- norm / apply


def cmd_norm(args) -> int:
    f = load_field(args.input)
    diags = []
    if not args.carleson and not math.isinf(args.p) and args.p < 1:
        diags.append("p < 1: quasi-norm")
    if not args.beta < 1 and args.p == 2:
        diags.append("beta >= 1: weighted L2 identity not available")
    if args.carleson or math.isinf(args.p):
        value = carleson_norm(f, args.m, args.beta)
    else:
        value = tent_norm(f, TentParams(args.p, args.m, args.beta))
    print(repr(float(value)))
    _emit({"value": float(value), "grid": f.spec.to_dict(), "diagnostics": diags,
           "params": {"p": args.p, "m": args.m, "beta": args.beta, "carleson": bool(args.carleson)}})
    return 0


def cmd_apply(args) -> int:
    f = load_field(args.input)
    S = _model(args, f.spec)
    alpha = complex(args.alpha.replace(" ", "").replace("i", "j"))
    if args.op == "maxreg-alpha":
        out = apply(maxreg_alpha(S, alpha), f, args.part)
    elif args.op == "backward":
        out = apply_backward(maxreg(S), f, args.part)
    else:
        out = apply(maxreg(S), f, args.part)
    save_field(out, args.output)
    _emit({"output": args.output, "op": args.op, "alpha": [alpha.real, alpha.imag],
           "part": args.part, "model": args.model, "grid": out.spec.to_dict()})
    return 0


# ---------------------------------------------------------------- off-diagonal


def _add_offdiag_args(p) -> None:
    _add_model_args(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=float, default=None, help="homogeneity (checked against the model)")
    p.add_argument("--qr", default="2:2", help="norm pair q:r")
    p.add_argument("--X", type=float, default=16.0)
    p.add_argument("--Nx", type=int, default=512)
    p.add_argument("--t-ladder", type=_float_list, default=[2 ** (-k / 2) for k in range(2, 8)])
    p.add_argument("--d-ladder", type=_float_list, default=[2 ** (j / 2) for j in range(-2, 5)])
    p.add_argument("--ball-radius", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=4.0)
    p.add_argument("--x-max", type=float, default=math.inf)


def _offdiag_spec(args) -> GridSpec:
    # the time grid is unused by the fits; it only has to be a valid spec
    t = sorted(args.t_ladder)
    return GridSpec(args.n, args.X, args.Nx, t[0], max(t[-1], t[0] * 2), 8)


def _check_m(args, S) -> None:
    if args.m is not None and not math.isclose(args.m, S.m):
        raise TentsioError(f"--m {args.m} does not match the model homogeneity {S.m}")


def cmd_offdiag(args) -> int:
    spec = _offdiag_spec(args)
    S = _model(args, spec)
    _check_m(args, S)
    est = measure_offdiag(S, parse_pair(args.qr), args.t_ladder, args.d_ladder, args.ball_radius,
                          x_min=args.x_min, x_max=args.x_max)
    _emit(est.to_dict())
    return 0


def cmd_resolvent(args) -> int:
    spec = _offdiag_spec(args)
    S = _model(args, spec)
    _check_m(args, S)
    est = measure_resolvent_offdiag(S, parse_pair(args.qr), args.theta, args.t_ladder, args.d_ladder,
                                    args.ball_radius, power=args.power, x_min=args.x_min,
                                    x_max=args.x_max)
    _emit(est.to_dict())
    return 0


# ---------------------------------------------------------------- experiment


def cmd_experiment(args) -> int:
    if args.suite:
        rep = run_suite(default_suite())
        text = rep.to_json()
        if args.output_dir:
            os.makedirs(args.output_dir, exist_ok=True)
            with open(os.path.join(args.output_dir, "suite.json"), "w") as fh:
                fh.write(text + "\n")
            for r in rep.reports:
                name = r.config.get("name") or r.config["kind"]
                r.write(os.path.join(args.output_dir, name + ".json"),
                        os.path.join(args.output_dir, name + ".csv"))
        print(text)
        return 0 if rep.passed else 1
    cfg = ExperimentConfig.load(args.config)
    rep = run(cfg)
    print(rep.to_json())
    return 0 if rep.passed else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tentsio", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="exact exponent ranges")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theorem", choices=["thm31", "prop36", "thm41", "prop42", "cor56"])
    g.add_argument("--preset", choices=list(ex.PRESETS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", default="1")
    p.add_argument("--beta", default="0")
    p.add_argument("--q", default="2")
    p.add_argument("--M", default="inf")
    p.add_argument("--alpha-re", default="1")
    p.add_argument("--direction", choices=list(ex.DIRECTIONS), default="A-forward")
    p.add_argument("--side", type=int, choices=[-1, 0, 1], default=0,
                   help="decide the case at q-0 (-1) or q+0 (1)")
    p.add_argument("--p-minus", default=None)
    p.add_argument("--p-plus", default=None)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("norm", help="tent or Carleson norm of a field file")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--carleson", action="store_true")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("apply", help="apply a maximal-regularity operator to a field file")
    p.add_argument("--op", choices=["maxreg", "maxreg-alpha", "backward"], default="maxreg")
    p.add_argument("--alpha", default="1+0i")
    p.add_argument("--part", choices=["whole", "singular", "tail"], default="whole")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_model_args(p)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("offdiag", help="fit the off-diagonal order of tL e^{-tL}")
    _add_offdiag_args(p)
    p.set_defaults(func=cmd_offdiag)

    p = sub.add_parser("resolvent-offdiag", help="fit the resolvent off-diagonal order")
    _add_offdiag_args(p)
    p.add_argument("--theta", type=float, default=math.pi)
    p.add_argument("--power", type=int, default=2)
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("experiment", help="run an experiment configuration")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--config")
    g.add_argument("--suite", action="store_true", help="run the built-in suite")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TentsioError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"tentsio: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
