"""Command line entry point: ``cantorsum <command> ...``.

Exit codes: 0 success, 1 precondition error (claim not certifiable under
its hypotheses), 2 validation failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import certify as cert_mod
from . import counterexamples as cx
from . import oracle
from .cantor import CantorApprox, build_self_similar
from .errors import PreconditionError
from .gaplemma import newhouse_intersect
from .intervals import IntervalUnion
from .thickness import thickness
from .transfer import CircleSum, PNormDistance, flat_sum_family

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_PRECONDITION, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2, 64
log = logging.getLogger("cantorsum")


@dataclass
class RunConfig:
    depth: int = 16
    tol_root: float = 1e-12
    tol_witness: float = 1e-9
    grid_cell: float = 2.0 ** -10
    seed: int = 0
    out: str = "out/cert.json"

    def check(self) -> None:
        if self.depth < 1:
            raise PreconditionError("depth must be >= 1")
        for k in ("tol_root", "tol_witness", "grid_cell"):
            if getattr(self, k) <= 0:
                raise PreconditionError(f"{k} must be positive")


def load_config(path) -> RunConfig:
    """Flat ``key = value`` TOML file; unknown keys are rejected."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known = set(RunConfig.__dataclass_fields__)
    bad = [k for k, v in data.items() if k not in known or isinstance(v, dict)]
    if bad:
        raise PreconditionError(f"unknown or nested config keys: {', '.join(bad)}")
    cfg = RunConfig(**data)
    cfg.check()
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from exc


def _point(s: str):
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated coordinates")
    return tuple(p.strip() for p in parts)


def _union(s: str) -> IntervalUnion:
    try:
        return IntervalUnion.parse(s)
    except Exception as exc:  # noqa: BLE001 - reported as usage error
        raise argparse.ArgumentTypeError(f"bad interval union {s!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cantorsum", description="Interior certificates for sums and distance "
                "sets of Cantor sets.")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="seed for randomized sweeps")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="cover of C_gamma as JSON")
    g.add_argument("--gamma", type=_fraction, required=True)
    g.add_argument("--depth", type=int)
    g.add_argument("--out")

    t = sub.add_parser("thickness", help="(epsilon-)thickness of C_gamma")
    t.add_argument("--gamma", type=_fraction, required=True)
    t.add_argument("--depth", type=int)
    t.add_argument("--eps", type=_fraction, default=Fraction(0))
    t.add_argument("--json", action="store_true")

    i = sub.add_parser("intersect", help="gap-lemma witness for C_g1 and shift + C_g2")
    i.add_argument("--gamma1", type=_fraction, required=True)
    i.add_argument("--gamma2", type=_fraction, required=True)
    i.add_argument("--shift", type=_fraction, default=Fraction(0))
    i.add_argument("--tol", type=float, default=1e-9)
    i.add_argument("--depth", type=int)

    c = sub.add_parser("certify", help="certify a claim")
    c.add_argument("claim", choices=["sum-mt", "pinned-mt", "thickness", "pinned-pnorm",
                                     "annulus", "measure"])
    c.add_argument("--gamma", type=_fraction, default=Fraction(2, 5))
    c.add_argument("--gamma2", type=_fraction)
    c.add_argument("--family", default="circle-sum",
                   choices=["circle-sum", "pnorm", "flat-sum"])
    c.add_argument("--t", type=_point, default=("0", "0"))
    c.add_argument("--beta", type=float, default=2.0)
    c.add_argument("--beta0", type=float, default=2.0)
    c.add_argument("--radius", type=float, default=0.06, help="half-width of the exponent interval")
    c.add_argument("--a", type=_union)
    c.add_argument("--b", type=_union)
    c.add_argument("--depth", type=int)
    c.add_argument("--out")

    v = sub.add_parser("validate", help="oracle validation of a certificate")
    v.add_argument("--cert", required=True)
    v.add_argument("--depth", type=int)
    v.add_argument("--betas", help="comma-separated exponents for p-norm certificates")
    v.add_argument("--shift", type=float, default=0.0, help="shift J (negative control)")
    v.add_argument("--report")

    x = sub.add_parser("counterexample", help="Giant and polygon demonstrations")
    xs = x.add_subparsers(dest="which", required=True)
    xg = xs.add_parser("giant")
    xg.add_argument("--q", type=_point, required=True)
    xg.add_argument("--raster-n", type=int, help="also raster Giant_N + S^1")
    xg.add_argument("--pgm")
    xp = xs.add_parser("polygon")
    xp.add_argument("--gamma-file", help="JSON with 'segments'; default unit square")
    xp.add_argument("--g-denominator", type=int, default=8)
    xp.add_argument("--pgm")

    a = sub.add_parser("demo-annulus", help="annulus certificate plus raster validation")
    a.add_argument("--a", type=_union, required=True)
    a.add_argument("--b", type=_union, required=True)
    a.add_argument("--out")
    return p


def _write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _cmd_gen(args, cfg):
    K = build_self_similar(args.gamma, args.depth or cfg.depth)
    text = K.to_json()
    if args.out:
        _write(args.out, text)
    else:
        print(text)
    return EXIT_OK


def _cmd_thickness(args, cfg):
    K = build_self_similar(args.gamma, args.depth or cfg.depth)
    rep = thickness(K, args.eps)
    if args.json:
        print(json.dumps(rep.to_dict()))
    else:
        print(f"tau = {float(rep.tau)}")
    return EXIT_OK


def _cmd_intersect(args, cfg):
    d = args.depth or cfg.depth
    K = build_self_similar(args.gamma1, d)
    L = CantorApprox.self_similar(args.gamma2, d, offset=args.shift)
    w = newhouse_intersect(K, L, tol=args.tol)
    print(json.dumps({k: v for k, v in w.to_dict().items() if k != "trace"}))
    return EXIT_OK


def _cmd_certify(args, cfg):
    depth = args.depth or cfg.depth
    claim = args.claim
    if claim == "sum-mt":
        cert = cert_mod.certify_sum_circle_middle_third()
    elif claim == "pinned-mt":
        cert = cert_mod.certify_pinned_middle_third(args.t)
    elif claim == "thickness":
        K1 = build_self_similar(args.gamma, depth)
        K2 = build_self_similar(args.gamma2 or args.gamma, depth)
        fam = CircleSum() if args.family == "circle-sum" else \
            PNormDistance(tuple(float(Fraction(v)) for v in args.t), args.beta)
        cert = cert_mod.certify_thickness(
            K1, K2, fam, claim="sum-circle-thickness" if args.family == "circle-sum"
            else "thickness-product")
    elif claim == "pinned-pnorm":
        C = build_self_similar(args.gamma, depth)
        cert = cert_mod.certify_pinned_pnorm(C, tuple(float(Fraction(v)) for v in args.t),
                                             args.beta0, args.radius)
    elif claim == "annulus":
        if args.a is None or args.b is None:
            raise PreconditionError("annulus needs --a and --b")
        cert = cert_mod.certify_annulus(args.a, args.b)
    else:
        if args.a is None or args.b is None:
            raise PreconditionError("measure needs --a and --b")
        fam = {"circle-sum": CircleSum, "flat-sum": flat_sum_family}.get(args.family)
        if fam is None:
            raise PreconditionError("measure supports circle-sum and flat-sum")
        cert = cert_mod.certify_measure(args.a, args.b, fam())
    out = args.out or cfg.out
    _write(out, cert.to_json())
    print(cert.summary())
    print(f"written: {out}")
    return EXIT_OK if cert.certified else EXIT_PRECONDITION


def _cmd_validate(args, cfg):
    cert = cert_mod.Certificate.from_json(Path(args.cert).read_text())
    if args.shift:
        cert = oracle.shifted(cert, args.shift)
    betas = [float(b) for b in args.betas.split(",")] if args.betas else None
    rep = oracle.validate(cert, args.depth, betas=betas, cell=cfg.grid_cell)
    text = json.dumps(rep.to_dict(), indent=1)
    if args.report:
        _write(args.report, text)
    print(text)
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def _cmd_counterexample(args, cfg):
    if args.which == "giant":
        tr = cx.giant_excludes(args.q)
        print(tr)
        if args.raster_n:
            grid = cx.giant_raster(args.raster_n)
            print(f"Giant_{args.raster_n} + S^1 raster (illustrative): "
                  f"occupancy {grid.fraction:.4f}")
            if args.pgm:
                grid.to_pgm(args.pgm)
        return EXIT_OK if tr.excluded else EXIT_VALIDATION
    spec = (cx.PolygonSpec.from_dict(json.loads(Path(args.gamma_file).read_text()))
            if args.gamma_file else cx.PolygonSpec.unit_square())
    rep = cx.polygon_sum_demo(spec, cx.g_grid(args.g_denominator))
    print(json.dumps(rep.to_dict(), indent=1))
    if args.pgm:
        rep.raster.to_pgm(args.pgm)
    return EXIT_OK if rep.untouched and rep.identity_ok else EXIT_VALIDATION


def _cmd_demo_annulus(args, cfg):
    cert = cert_mod.certify_annulus(args.a, args.b)
    out = args.out or cfg.out
    _write(out, cert.to_json())
    print(cert.summary())
    rep = oracle.validate(cert, cell=cfg.grid_cell)
    print(json.dumps(rep.to_dict(), indent=1))
    if not cert.certified:
        return EXIT_PRECONDITION
    return EXIT_OK if rep.passed else EXIT_VALIDATION


COMMANDS = {"gen": _cmd_gen, "thickness": _cmd_thickness, "intersect": _cmd_intersect,
            "certify": _cmd_certify, "validate": _cmd_validate,
            "counterexample": _cmd_counterexample, "demo-annulus": _cmd_demo_annulus}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.check()
        random.seed(cfg.seed)
        np.random.seed(cfg.seed)
        log.debug("config %s", asdict(cfg))
        return COMMANDS[args.command](args, cfg)
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main() -> None:
    sys.exit(run())
