"""Command line: orbigenus {genus, equivariant, theta, models, anomaly, fa}."""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import analyzers, io, library, localization, theta
from .errors import ArithmeticPreconditionError, OrbigenusError, SchemaError


def _order(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"order must be a rational like 5 or 9/2, got {text!r}") from None


def _load(args):
    if args.builtin:
        return library.model_by_name(args.builtin)
    if not args.model:
        raise SchemaError("give --model PATH or --builtin NAME")
    try:
        return io.load(args.model)
    except OSError as e:
        raise SchemaError(f"cannot read {args.model}: {e.strerror}") from None


def _emit_series(g, args, out, through):
    if args.format == "json":
        out.write(json.dumps(g.to_json(through), sort_keys=False) + "\n")
        return
    for line in g.text_lines(through):
        out.write(line + "\n")
    for k in ("genus", "twist", "path", "normalization", "theta_prefactor", "specialization", "y"):
        if k in g.meta:
            out.write(f"# {k}: {g.meta[k]}\n")


def cmd_genus(args, out):
    model = _load(args)
    cut = localization.order_cutoff(model, args.order)
    kind = args.kind
    if kind == "elliptic":
        g = localization.orbifold_elliptic_genus(model, cut, args.twist, args.path)
    elif kind == "spin":
        g = localization.spin_genus(model, cut, args.path)
    elif kind == "lefschetz_cx":
        g = localization.lefschetz_cx(model, cut, args.twist)
    else:
        g = localization.lefschetz_spin(model, cut)
    _emit_series(g, args, out, args.order)
    return 0


def cmd_equivariant(args, out):
    model = _load(args)
    z = analyzers.parse_y(args.y)
    analyzers.level_guard(model, z)
    cut = localization.order_cutoff(model, args.order)
    g = localization.equivariant_genus(model, cut, args.twist, args.path, y=z)
    _emit_series(g, args, out, args.order)
    if args.check_rigidity:
        rep = analyzers.check_rigidity(model, cut, z, args.twist, args.path)
        out.write(f"# rigidity report, y = {rep.y}\n")
        for e in rep.entries:
            if e.q <= args.order:
                out.write(e.line() + "\n")
    return 0


def cmd_theta(args, out):
    ok = True
    if args.check == "transforms":
        rng = random.Random(args.seed)
        worst = {}
        for _ in range(args.points):
            t = complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
            tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
            for k, v in theta.transformation_residuals(t, tau, args.terms).items():
                worst[k] = max(worst.get(k, 0.0), v)
        for k, v in worst.items():
            passed = v < args.tol
            ok &= passed
            out.write(f"{k}: max relative residual {v:.3e} {'pass' if passed else 'FAIL'}\n")
    elif args.check == "triple-product":
        passed = theta.theta3_triple_product_check(args.cutoff)
        ok &= passed
        out.write(f"triple product through q^{args.cutoff}: {'exact pass' if passed else 'FAIL'}\n")
    else:
        triples = [(1, 2, 0), (1, 2, 2), (2, 2, 0)]
        if args.a is not None or args.b is not None or args.k is not None:
            triples = [(args.k or 1, args.a if args.a is not None else 2, args.b or 0)]
        for k, a, b in triples:
            passed = theta.quasi_periodicity_check(k, a, b, args.cutoff)
            ok &= passed
            out.write(f"quasi (k={k}, a={a}, b={b}) below q^{args.cutoff}: {'exact pass' if passed else 'FAIL'}\n")
    return 0 if ok else 1


def cmd_models(args, out):
    if args.action == "list":
        for k, v in library.REGISTRY.items():
            out.write(f"{k}: {v}\n")
        return 0
    if not args.name:
        raise SchemaError("models emit needs a NAME")
    out.write(io.dumps(library.model_by_name(args.name)))
    return 0


def cmd_anomaly(args, out):
    model = _load(args)
    rep = analyzers.check_anomaly(model, args.twist)
    for line in rep.lines():
        out.write(line + "\n")
    return 0


def cmd_fa(args, out):
    model = _load(args)
    A = theta.SL2Matrix.parse(args.matrix)
    cut = localization.order_cutoff(model, args.order)
    g = analyzers.build_FA(model, A, cut, args.y, args.twist)
    _emit_series(g, args, out, args.order)
    if args.scan:
        rep = analyzers.scan_holomorphicity(g, [k / args.points for k in range(args.points)], tol=args.tol)
        for line in rep.lines():
            out.write(line + "\n")
        return 0 if rep.passed else 1
    return 0


def _model_flags(p):
    p.add_argument("--model", help="model file (JSON)")
    p.add_argument("--builtin", help="built-in model name, see 'models list'")


def build_parser():
    ap = argparse.ArgumentParser(prog="orbigenus", description="Exact orbifold elliptic genera and verdicts.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("genus", help="orbifold genus through a q-order")
    _model_flags(p)
    p.add_argument("--order", type=_order, default=Fraction(0))
    p.add_argument("--twist", choices=["tangent", "w"], default="tangent")
    p.add_argument("--kind", choices=["elliptic", "spin", "lefschetz_cx", "lefschetz_spin"], default="elliptic")
    p.add_argument("--path", choices=["direct", "theta"], default="direct")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_genus)

    p = sub.add_parser("equivariant", help="equivariant genus with rational-in-u coefficients")
    _model_flags(p)
    p.add_argument("--order", type=_order, default=Fraction(0))
    p.add_argument("--y", default=None, help="symbolic (default), -1, i, omega, or e(p/q)")
    p.add_argument("--twist", choices=["tangent", "w"], default="tangent")
    p.add_argument("--path", choices=["direct", "theta"], default="direct")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--check-rigidity", action="store_true")
    p.set_defaults(fn=cmd_equivariant)

    p = sub.add_parser("theta", help="theta-function self checks")
    p.add_argument("--check", choices=["transforms", "triple-product", "quasi"], required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--terms", type=int, default=50)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.set_defaults(fn=cmd_theta)

    p = sub.add_parser("models", help="list or emit built-in models")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    p.set_defaults(fn=cmd_models)

    p = sub.add_parser("anomaly", help="scalar anomaly identities and n")
    _model_flags(p)
    p.add_argument("--twist", choices=["tangent", "w"], default="w")
    p.set_defaults(fn=cmd_anomaly)

    p = sub.add_parser("fa", help="F^A for an SL2(Z) matrix, optional holomorphicity scan")
    _model_flags(p)
    p.add_argument("--matrix", default="S", help="S, T, I or 'a b c d'")
    p.add_argument("--y", required=True)
    p.add_argument("--order", type=_order, default=Fraction(2))
    p.add_argument("--twist", choices=["tangent", "w"], default="tangent")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--scan", action="store_true")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_fa)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "cutoff", "unset") is None:
        args.cutoff = 10 if args.check == "triple-product" else 8
    try:
        return args.fn(args, out)
    except OrbigenusError as e:
        sys.stderr.write(f"error ({type(e).__name__}): {e}\n")
        return e.exit_code
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return ArithmeticPreconditionError.exit_code


if __name__ == "__main__":
    sys.exit(main())
