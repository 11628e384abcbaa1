"""Command-line front end.

Exit codes: 0 success, 1 an inequality or check failed, 2 usage error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .model import (
    WORD_BUDGET,
    BudgetError,
    DimensionError,
    DyadicGrid,
    FullShift,
    ProductIID,
    ReciprocalAlphabet,
    ResolutionError,
    ShiftAverageProduct,
    SparseNK,
    VanishingCubes,
    enumerate_words,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

FAMILY_SCHEMA = "family spec: sparse:N=<int>,K=<int> | full | full-binary | cubes:m=<int> | reciprocal:n=<int>"
MEASURE_SCHEMA = ("measure spec: sparse-shift-avg:N=<int>,K=<int>[,b=<int>] | iid-grid[:b=<int>] | "
                  "iid:<v1>,<v2>,... | point[:<v>]")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    bits: int = 6
    word_budget: int = WORD_BUDGET
    table_budget: int = 10**7
    time_cap: float = 600.0
    out: str | None = None
    workers: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if min(self.word_budget, self.table_budget, self.time_cap, self.workers) <= 0:
            raise UsageError("budgets and workers must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------


def parse_rational(text: str, allow_decimal: bool = False) -> Fraction:
    """Exact rational from ``p/q``, ``2^-j``, an integer, or (if allowed) a decimal."""
    t = text.strip()
    m = re.fullmatch(r"(\d+)\s*\^\s*(-?\d+)", t)
    if m:
        return Fraction(int(m.group(1))) ** int(m.group(2))
    if re.fullmatch(r"-?\d+(/\d+)?", t):
        return Fraction(t)
    if allow_decimal and re.fullmatch(r"-?\d*\.\d+", t):
        return Fraction(t)
    raise UsageError(f"{text!r} is not an exact rational (use p/q or 2^-j)")


def parse_list(text: str, item=int) -> list:
    return [item(x) for x in text.split(",") if x.strip()]


def parse_range(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return parse_list(text)


def _kv(body: str) -> dict:
    out = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_family(text: str | None):
    if not text:
        raise UsageError(f"missing family; {FAMILY_SCHEMA}")
    kind, _, body = text.partition(":")
    try:
        if kind == "sparse":
            kv = _kv(body)
            return SparseNK(int(kv["N"]), int(kv["K"]))
        if kind == "full":
            return FullShift()
        if kind == "full-binary":
            return FullShift((0.0, 1.0))
        if kind == "cubes":
            return VanishingCubes(int(_kv(body)["m"]))
        if kind == "reciprocal":
            return ReciprocalAlphabet(int(_kv(body)["n"]))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad family {text!r} ({exc}); {FAMILY_SCHEMA}") from None
    raise UsageError(f"unknown family {kind!r}; {FAMILY_SCHEMA}")


def parse_measure(text: str | None):
    if not text:
        raise UsageError(f"missing measure; {MEASURE_SCHEMA}")
    kind, _, body = text.partition(":")
    try:
        if kind == "sparse-shift-avg":
            kv = _kv(body)
            return ShiftAverageProduct(int(kv["N"]), int(kv["K"]), int(kv.get("b", 3)))
        if kind == "iid-grid":
            b = int(_kv(body).get("b", 3)) if body else 3
            return ProductIID.uniform(DyadicGrid(b).points)
        if kind == "iid":
            return ProductIID.uniform([float(parse_rational(v, True)) for v in body.split(",")])
        if kind == "point":
            return ProductIID.point_mass(float(parse_rational(body, True)) if body else 0.0)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad measure {text!r} ({exc}); {MEASURE_SCHEMA}") from None
    raise UsageError(f"unknown measure {kind!r}; {MEASURE_SCHEMA}")


def parse_alpha(text: str) -> Fraction:
    a = parse_rational(text)
    if not (0 < a <= 1) or a.numerator != 1:
        raise UsageError(f"alpha={a} unsupported: the curve construction only attains exponents 1/q "
                         "(exponent gap between 1/ceil(n/k) and k/n)")
    return a


def parse_p(text: str) -> float:
    if text in ("inf", "infinity"):
        return math.inf
    p = float(parse_rational(text))
    if p < 1:
        raise UsageError("p must be >= 1 or inf")
    return p


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _emit(cfg: RunConfig, name: str, text: str) -> None:
    if cfg.out:
        path = Path(cfg.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_dim(args, cfg: RunConfig) -> int:
    from .dimension import mbdim_estimate, mmdim_estimate

    family = parse_family(args.family)
    grid = DyadicGrid(cfg.bits)
    ns = parse_list(args.n) if args.n else None
    js = parse_range(args.j) if args.j else None
    kinds = ["mmdim", "mbdim"] if args.kind == "both" else [args.kind]
    for kind in kinds:
        fn = mmdim_estimate if kind == "mmdim" else mbdim_estimate
        est = fn(family, ns, js, grid, cfg.word_budget, cfg.workers)
        print(f"{kind}: value {est.value:.6f} (slopes {est.endpoint_slope:.6f} endpoint, {est.lsq_slope:.6f} lsq)")
        print("  per-eps: " + ", ".join(f"j={j}:{v:.6f}" for j, v in zip(est.js, est.per_eps)))
        _emit(cfg, f"{kind}.json", est.to_json() + "\n")
        if cfg.out:
            est.write_csv(Path(cfg.out) / f"{kind}.csv", args.family)
    return EXIT_OK


def cmd_codec(args, cfg: RunConfig) -> int:
    from .codec import SparseCodec, linear_random_codec, peano_codec

    p = parse_p(args.p)
    if args.scheme == "sparse":
        c = SparseCodec(args.N, args.K, args.l, parse_alpha(args.alpha), args.b, p)
        pair, family, grid = c.pair(), c.family, c.grid
    elif args.scheme == "peano":
        pair = peano_codec(args.n, parse_alpha(args.alpha), args.b, p)
        family, grid = FullShift(), DyadicGrid(args.b)
    else:
        family = parse_family(args.family)
        grid = DyadicGrid(args.b)
        pair = linear_random_codec(family, args.n, args.k, cfg.seed, grid, cfg.word_budget, p)
    _emit(cfg, "codec.json", pair.to_json() + "\n")
    line = f"rate: {float(pair.rate):g}"
    failed = False
    if args.roundtrip == "exhaustive":
        W = enumerate_words(family, pair.n, grid, cfg.word_budget)
        errors = int(np.any(pair.roundtrip(W) != W, axis=1).sum())
        line = f"errors: {errors}, " + line
        failed = errors > 0
    print(line)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_rd(args, cfg: RunConfig) -> int:
    from .ratedist import rd_dimension, rd_function

    mu = parse_measure(args.measure)
    eps = [float(parse_rational(e)) for e in args.eps.split(",")]
    curve = rd_function(mu, parse_list(args.n), parse_p(args.p), eps, cfg.word_budget, cfg.workers)
    if curve.capped:
        print(f"# block lengths skipped by the joint-table cap: {curve.capped}", file=sys.stderr)
    import io

    buf = io.StringIO()
    tmp = Path(cfg.out) if cfg.out else None
    # CSV to stdout, and to the output directory when given
    import csv as _csv

    wr = _csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "p", "epsilon", "rate", "achieved_distortion", "iterations"])
    for n in sorted(curve.per_n):
        for pt in curve.per_n[n]:
            wr.writerow([n, curve.p, repr(pt.epsilon), repr(pt.rate), repr(pt.distortion), pt.iterations])
    sys.stdout.write(buf.getvalue())
    if tmp:
        _emit(cfg, "rd.csv", buf.getvalue())
        _emit(cfg, "rd.json", curve.to_json() + "\n")
        if len(curve.points) >= 2:
            _emit(cfg, "rd_dimension.json", _dumps(rd_dimension(curve)))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    from . import harness

    if args.check == "bound-chain":
        rep = harness.bound_chain(parse_family(args.family), parse_alpha(args.alpha), workers=cfg.workers)
    elif args.check == "ball-entropy":
        rep = harness.ball_entropy_check(args.nmax)
    elif args.check == "lin-rank":
        res = harness.lin_rank_check(args.N, args.K, args.l, args.k, args.trials, cfg.seed)
        rep = harness.Report("linear rank law", measured=res)
        if res["below_threshold"]:
            rep.rows.append(harness.Inequality("rank deficient fraction", 1.0, res["deficient"] / res["trials"]))
        else:
            rep.rows.append(harness.Inequality("full rank fraction >= 0.95", 0.95, res["full_rank"] / res["trials"]))
    elif args.check == "thm-bound":
        rep = harness.thm_consistency(workers=cfg.workers)
    else:
        a = float(parse_rational(args.alpha))
        L = float(parse_rational(args.L, True))
        rep = harness.Report("binary shift bound", measured={"alpha": a, "L": L,
                                                             "bound": harness.binary_shift_bound(a, L)})
    sys.stdout.write(rep.to_csv())
    print(f"# {'PASS' if rep.passed else 'FAIL'}: {rep.title}")
    _emit(cfg, "report.json", rep.to_json() + "\n")
    _emit(cfg, "report.csv", rep.to_csv())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_spacefill(args, cfg: RunConfig) -> int:
    from .spacefill import cube_surjection, holder_estimate, target_grid

    print("k,n,b,exponent,grid_points,roundtrip_errors,image_points,alpha_hat,L_hat")
    failed = False
    rows = []
    for b in parse_range(args.b):
        g = cube_surjection(args.k, args.n, b)
        Y = target_grid(args.n, b)
        errors = int(np.any(g(g.right_inverse(Y)) != Y, axis=1).sum())
        image = len(np.unique(g(g.source_grid()), axis=0)) if g.source_bits * args.k <= 20 else -1
        fit = holder_estimate(g, pair_budget=args.pairs, seed=cfg.seed)
        row = f"{args.k},{args.n},{b},{g.exponent},{len(Y)},{errors},{image},{fit.alpha!r},{fit.L!r}"
        rows.append(row)
        print(row)
        failed |= errors > 0 or (image >= 0 and image != len(Y))
    _emit(cfg, "spacefill.csv", "k,n,b,exponent,grid_points,roundtrip_errors,image_points,alpha_hat,L_hat\n"
          + "\n".join(rows) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--b", "--bits", dest="bits", help="grid resolution bits (spacefill: list or range)")
    common.add_argument("--out", help="output directory for JSON/CSV files")
    common.add_argument("--workers", type=int, help="parallelism degree (results do not depend on it)")
    common.add_argument("--budget", type=int, help="word enumeration budget")

    ap = argparse.ArgumentParser(prog="analogcomp", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dim", parents=[common], help="metric mean dimension and mean box dimension estimates",
                       description="Covering-number tables and dimension estimates: the growth exponent of "
                                   "covering numbers of n-blocks, with the block limit before (mmdim) or after "
                                   "(mbdim) the scale limit. " + FAMILY_SCHEMA)
    d.add_argument("--family")
    d.add_argument("--kind", choices=["mmdim", "mbdim", "both"], default="mmdim")
    d.add_argument("--n", help="comma-separated block lengths")
    d.add_argument("--j", help="scales 2^-j as a list or range a..b")
    d.set_defaults(func=cmd_dim)

    c = sub.add_parser("codec", parents=[common], help="build a compressor/decompressor pair",
                       description="Sparse support/signature codec with Hölder decoder, seeded linear codec with "
                                   "nearest-word decoder, or the space-filling-curve codec for the full shift.")
    c.add_argument("scheme", choices=["sparse", "linear", "peano"])
    c.add_argument("--N", type=int, default=4)
    c.add_argument("--K", type=int, default=1)
    c.add_argument("--l", type=int, default=1, help="windows per block")
    c.add_argument("--alpha", default="1/2", help="decoder exponent 1/q")
    c.add_argument("--p", default="inf")
    c.add_argument("--n", type=int, default=4)
    c.add_argument("--k", type=int, default=3)
    c.add_argument("--family", default="sparse:N=4,K=1")
    c.add_argument("--roundtrip", choices=["exhaustive", "none"], default="none")
    c.set_defaults(func=cmd_codec, default_bits=3)

    r = sub.add_parser("rd", parents=[common], help="rate-distortion curve of a block marginal",
                       description="Blahut-Arimoto rate-distortion curve, infimum over the block-length "
                                   "schedule, bits per coordinate. " + MEASURE_SCHEMA)
    r.add_argument("--measure")
    r.add_argument("--n", default="1")
    r.add_argument("--eps", default="2^-2,2^-3")
    r.add_argument("--p", default="2")
    r.set_defaults(func=cmd_rd)

    v = sub.add_parser("verify", parents=[common], help="run a bound check; exit 1 on failure",
                       description="Bound chain between dimension and compression rates, ball entropy bound, "
                                   "linear rank law, lower-bound consistency, binary shift bound.")
    v.add_argument("check", choices=["bound-chain", "ball-entropy", "lin-rank", "thm-bound", "binary-shift"])
    v.add_argument("--family", default="sparse:N=4,K=1")
    v.add_argument("--alpha", default="1/2")
    v.add_argument("--L", default="1")
    v.add_argument("--nmax", type=int, default=14)
    v.add_argument("--N", type=int, default=4)
    v.add_argument("--K", type=int, default=1)
    v.add_argument("--l", type=int, default=4)
    v.add_argument("--k", type=int, default=7)
    v.add_argument("--trials", type=int, default=200)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spacefill", parents=[common], help="space-filling surjection checks",
                       description="Roundtrip, surjectivity and Hölder fit of the coordinatewise Hilbert "
                                   "surjection [0,1]^k -> [0,1]^n.")
    s.add_argument("action", choices=["check"])
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--pairs", type=int, default=10**5)
    s.set_defaults(func=cmd_spacefill)
    return ap


def make_config(args) -> RunConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    cfg = RunConfig.from_dict(base)
    if getattr(args, "default_bits", None) and "bits" not in base:
        cfg.bits = args.default_bits
    if args.bits is not None and args.command != "spacefill":
        try:
            cfg.bits = int(args.bits)
        except ValueError:
            raise UsageError(f"--b expects an integer, got {args.bits!r}") from None
    for name, attr in (("seed", "seed"), ("out", "out"), ("workers", "workers"),
                       ("budget", "word_budget")):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, attr, val)
    cfg.__post_init__()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = make_config(args)
        if args.command == "codec":
            args.b = cfg.bits
        if args.command == "spacefill":
            args.b = args.bits or "3..5"
        return args.func(args, cfg)
    except (UsageError, ResolutionError, DimensionError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
