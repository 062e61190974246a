"""Command-line front end.

Every command prints one JSON object on one line unless it
emits a grid, which is CSV.  Exit codes: 0 success, 2 bad input or a
violated precondition, 64 unknown subcommand, 65 unreadable sequence file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction

import numpy as np

from . import denjoy as dj
from . import freeboundary as fb
from . import ktheory as kt
from . import shiftspec as ss
from . import symdyn as sd
from .exceptions import PreconditionError, WindowError
from .zlattice import AbGroupInvariants

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_DATA = 0, 2, 64, 65


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        code = EXIT_UNKNOWN if "invalid choice" in message else EXIT_USAGE
        raise CliError(f"{self.prog}: {message}", code)


def _encode(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, AbGroupInvariants):
        return obj.to_dict()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_encode(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json(payload: dict, seed: int) -> str:
    payload = {**payload, "seed": seed}
    return json.dumps(payload, default=_encode) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_encode(v) if isinstance(v, Fraction) else v for v in r])
    return buf.getvalue()


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# sequence sources


def _centered(word: str) -> sd.BiSequence:
    r = (len(word) - 1) // 2
    return sd.BiSequence(word[: 2 * r + 1], r)


def _add_source(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gen", type=int, help="centred Fibonacci word f_n (default 14)")
    g.add_argument("--stage", type=int, help="two-sided Fibonacci stage k")
    g.add_argument("--file", help="sequence file: one line of 1/2 with '|' before index 0")


def _source(args) -> sd.BiSequence:
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return sd.BiSequence.from_text(fh.read())
        except (OSError, sd.SequenceFormatError, ValueError) as exc:
            raise CliError(f"bad sequence file {args.file}: {exc}", EXIT_DATA) from None
    if args.stage is not None:
        return sd.two_sided_fibonacci(args.stage)
    return _centered(sd.fibonacci_word(14 if args.gen is None else args.gen))


def _describe_source(args) -> dict:
    if args.file:
        return {"file": args.file}
    if args.stage is not None:
        return {"stage": args.stage}
    return {"gen": 14 if args.gen is None else args.gen}


# ---------------------------------------------------------------------------
# seq


def cmd_seq_fib(args):
    if args.stage is not None:
        x = sd.two_sided_fibonacci(args.stage)
        return {"stage": args.stage, "radius": x.radius, "sequence": x.to_text()}
    w = sd.fibonacci_word(14 if args.gen is None else args.gen)
    return {"gen": 14 if args.gen is None else args.gen, "word": w, "length": len(w), "count2": w.count("2")}


def cmd_seq_complexity(args):
    x = _source(args)
    if args.max_k < 1:
        raise PreconditionError("--max-k must be >= 1")
    table = {str(k): sd.block_complexity(x, k) for k in range(1, args.max_k + 1)}
    return {"source": _describe_source(args), "complexity": table}


def cmd_seq_slope(args):
    x = _source(args)
    est = sd.slope_estimate(x, args.N)
    return {"source": _describe_source(args), "N": args.N, "slope": est, "slope_float": float(est)}


def cmd_seq_runs(args):
    x = _source(args)
    return {"source": _describe_source(args), "run1": sd.has_unbounded_runs(x, 1),
            "run2": sd.has_unbounded_runs(x, 2)}


# ---------------------------------------------------------------------------
# boundary


def cmd_boundary_act(args):
    word = fb.reduce(args.word)
    if word != args.word:
        raise PreconditionError(f"{args.word!r} is not reduced")
    v = fb.BoundaryVector.cylinder(word, args.level)
    out = fb.act_generator(args.letter, v)
    return {"letter": args.letter, "input": v.to_dict(), "image": out.to_dict()}


def _witness_checks(omega: str, g: str) -> dict:
    return {"reduced": fb.is_reduced(g), "exponent_sums": list(fb.exponent_sums(g)),
            "strict_prefix": g.startswith(omega) and len(g) > len(omega)}


def cmd_boundary_witness(args):
    if args.kind == "minimality":
        if args.prefix is None or args.first is None:
            raise PreconditionError("minimality needs --prefix and --first")
        g = fb.minimality_witness(args.prefix, args.first, args.n)
        return {"kind": "minimality", "word": g, "starts_with_prefix": g.startswith(args.prefix)}
    if args.random:
        rng = random.Random(args.seed)
        results = []
        for _ in range(args.random):
            length = rng.randint(1, 8)
            w = rng.choice(fb.LETTERS)
            while len(w) < length:
                w += rng.choice([x for x in fb.LETTERS if x != fb.INVERSE[w[-1]]])
            g = fb.infiniteness_witness(w)
            results.append({"omega": w, "word": g, **_witness_checks(w, g)})
        ok = all(r["reduced"] and r["exponent_sums"] == [0, 0] and r["strict_prefix"] for r in results)
        return {"kind": "infiniteness", "count": len(results), "all_pass": ok, "results": results}
    if not args.omega:
        raise PreconditionError("infiniteness needs --omega or --random")
    g = fb.infiniteness_witness(args.omega, args.sigma1, args.sigma2)
    return {"kind": "infiniteness", "omega": args.omega, "word": g, **_witness_checks(args.omega, g)}


# ---------------------------------------------------------------------------
# denjoy


def _system(args) -> dj.DenjoySystem:
    try:
        lam = dj.parse_angle(args.lam)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return dj.DenjoySystem(lam, args.base, args.depth)


def _point(text: str) -> dj.CutPoint:
    """``3L``/``-2R`` for orbit sides, ``@1.25`` for a plain angle."""
    t = text.strip()
    if t.startswith("@"):
        return dj.CutPoint(angle=float(t[1:]))
    side = {"L": "left", "R": "right"}.get(t[-1:].upper())
    try:
        idx = int(t[:-1])
    except ValueError:
        idx = None
    if side is None or idx is None:
        raise CliError(f"point {text!r}: use e.g. 2L, -1R or @0.5")
    return dj.CutPoint(index=idx, side=side)


def cmd_denjoy_distance(args):
    s = _system(args)
    x, y = _point(args.x), _point(args.y)
    value, bound = dj.denjoy_distance(x, y, s)
    return {"lam": s.lam, "depth": s.depth, "x": x.to_dict(), "y": y.to_dict(),
            "distance": value, "tail_bound": bound}


def cmd_denjoy_code(args):
    s = _system(args)
    word = dj.rotation_coding(s, args.start, args.length)
    return {"lam": s.lam, "start": args.start, "length": args.length, "word": word}


def cmd_denjoy_measure(args):
    s = _system(args)
    arcs = {}
    for item in args.arc or []:
        j, _, c = item.partition("=")
        try:
            arcs[int(j)] = arcs.get(int(j), 0) + int(c or 1)
        except ValueError:
            raise CliError(f"--arc expects j=c, got {item!r}") from None
    v = dj.ClopenVector.from_terms(s.depth, args.unit, arcs)
    out = {"lam": s.lam, "vector": v.to_dict(), "measure": dj.measure_functional(v, s)}
    if args.power:
        w = dj.induced_action(v, args.power)
        out.update({"power": args.power, "image": w.to_dict(), "image_measure": dj.measure_functional(w, s)})
    return out


# ---------------------------------------------------------------------------
# ktheory

MODELS = ("point", "denjoy-id", "denjoy-alpha", "swap")


def _model(args) -> kt.DiagonalActionModel:
    if args.model == "point":
        return kt.DiagonalActionModel.point(args.level)
    if args.model == "swap":
        return kt.DiagonalActionModel.swap(args.level)
    return kt.DiagonalActionModel.denjoy(args.depth, args.level, args.model.split("-")[1])


def _group_payload(model, inv) -> dict:
    return {"model": model.describe(), "level": model.boundary_level, **inv.to_dict()}


def cmd_k0_direct(args):
    m = _model(args)
    return {**_group_payload(m, kt.pv_k0_direct(m, args.margin)), "margin": args.margin}


def cmd_k0_reduced(args):
    m = _model(args)
    return _group_payload(m, kt.pv_k0_reduced(m))


def cmd_example16(args):
    return {"depth": args.depth, **kt.example16_quotient(args.depth).to_dict()}


def cmd_k1(args):
    m = _model(args)
    k = kt.pv_k1_kernel(m)
    z, _ = kt.zeta_matrix(m)
    mv = kt.m_vectors(m)
    out = {"model": m.describe(), "level": m.boundary_level, "kernel_rank": k.rank,
           "m_vectors": len(mv), "m_vectors_in_kernel": all(not any(z.apply(v)) for v in mv),
           "basis_in_kernel": all(not any(z.apply(v)) for v in k.basis)}
    if args.basis:
        out["basis"] = [list(v) for v in k.basis]
    return out


def cmd_verify(args):
    m = _model(args)
    rep = kt.verify_reduction(m, args.samples, args.seed, args.corrupt)
    return {**rep.to_dict(), "level": m.boundary_level, "pass": rep.passed}


def cmd_sweep(args):
    params = _ints(args.params)
    if args.family == "example16":
        compute = kt.example16_quotient
    elif args.family == "point":
        def compute(p):
            return kt.pv_k0_direct(kt.DiagonalActionModel.point(p))
    else:
        def compute(p):
            return AbGroupInvariants(kt.pv_k1_kernel(kt.DiagonalActionModel.denjoy(p, args.level)).rank)
    predict = None
    if args.predict_rank is not None:
        target = AbGroupInvariants(args.predict_rank)

        def predict(p):
            return target
    table = kt.stabilization_sweep(compute, params, predict)
    ranks = [r.invariants.free_rank for r in table.rows]
    return {"family": args.family, **table.to_dict(),
            "strictly_increasing": all(b > a for a, b in zip(ranks, ranks[1:]))}


# ---------------------------------------------------------------------------
# spectrum


def cmd_shift(args):
    x = _source(args)
    return {"source": _describe_source(args), **ss.polar_identity_check(x, args.tol)}


def cmd_joint(args):
    x = _source(args)
    gamma = _ints(args.gamma)
    if args.grid:
        lo, hi, count = args.grid.split(":")
        lo, hi, count = Fraction(lo), Fraction(hi), int(count)
        if count < 2:
            raise PreconditionError("grid needs at least 2 points per axis")
        axis = [lo + (hi - lo) * k / (count - 1) for k in range(count)]
        rows = ss.joint_spectrum_grid(x, gamma, [axis] * len(gamma))
        header = [f"lambda_{i}" for i in gamma] + ["score"]
        return _csv(header, ([float(v) for v in r[:-1]] + [_encode(r[-1])] for r in rows))
    if not args.point:
        raise PreconditionError("give --point or --grid")
    vals = [complex(t.replace("i", "j")) if ("i" in t or "j" in t) else Fraction(t)
            for t in args.point.split(",")]
    res = ss.joint_spectrum_test(x, ss.JointPoint(tuple(gamma), tuple(vals)), args.tol)
    return {"source": _describe_source(args), **res}


def cmd_witness(args):
    rng = np.random.default_rng(args.seed)
    ns = _ints(args.n)
    if not ns or min(ns) < 0:
        raise PreconditionError("--n needs nonnegative lengths")
    worst = {n: 0.0 for n in ns}
    for _ in range(args.samples):
        w = np.exp(2j * np.pi * rng.random(max(ns) + 1))
        for k in range(args.points):
            lam = np.exp(2j * np.pi * (k + rng.random()) / args.points)
            for n in ns:
                worst[n] = max(worst[n], ss.unimodular_witness(w, lam, n)["residual"])
    rows = [(n, repr(worst[n]), repr(math.sqrt(2 / (n + 1)))) for n in ns]
    if args.format == "csv":
        return _csv(["n", "residual", "bound"], rows)
    return {"samples": args.samples, "points": args.points,
            "rows": [{"n": n, "residual": worst[n], "bound": math.sqrt(2 / (n + 1)),
                      "pass": worst[n] <= math.sqrt(2 / (n + 1)) + 1e-9} for n in ns]}


def cmd_periodic(args):
    weights = _floats(args.weights)
    res = ss.periodic_spectrum(weights, len(weights), args.m, args.tol)
    return {**res, "moduli": sorted(float(abs(v)) for v in res["eigenvalues"])}


def cmd_rotation(args):
    return ss.rotation_weight_check(args.theta, args.window, args.tol)


def cmd_nonsimple(args):
    return {"source": _describe_source(args), **ss.nonsimplicity_scan(_source(args))}


# ---------------------------------------------------------------------------
# parser

SCHEMAS = {
    "fib": '{"gen", "word", "length", "count2"} or with --stage {"stage", "radius", "sequence"}',
    "complexity": '{"source", "complexity": {"k": p_k}}',
    "slope": '{"source", "N", "slope": "p/q", "slope_float"}',
    "runs": '{"source", "run1", "run2"}',
    "act": '{"letter", "input": {"level", "coeffs"}, "image": {"level", "coeffs"}}',
    "witness_b": '{"kind", "word", ...checks} or with --random {"count", "all_pass", "results"}',
    "distance": '{"lam", "depth", "x", "y", "distance", "tail_bound"}',
    "code": '{"lam", "start", "length", "word"}',
    "measure": '{"lam", "vector", "measure"[, "power", "image", "image_measure"]}',
    "group": '{"model", "level", "free_rank", "torsion": [int]}',
    "example16": '{"depth", "free_rank", "torsion": [int]}',
    "k1": '{"model", "level", "kernel_rank", "m_vectors", "m_vectors_in_kernel", "basis_in_kernel"[, "basis"]}',
    "verify": '{"model", "level", "sampled", "skipped", "checks": [{"name", "pass", "detail"}], "pass"}',
    "sweep": '{"family", "rows": [{"param", "free_rank", "torsion"[, "matches"]}], "stable_from", "strictly_increasing"}',
    "shift": '{"source", "radius", "shift_residual", "sqrt_residual", "max_residual", "pass"}',
    "joint": '{"source", "indices", "score": "p/q", "argmin"[, "member"]}; with --grid CSV lambda_i...,score',
    "witness_s": 'CSV n,residual,bound or JSON {"samples", "points", "rows": [{"n", "residual", "bound", "pass"}]}',
    "periodic": '{"period", "m", "radius", "eigenvalues", "moduli", "max_deviation", "pass"}',
    "rotation": '{"theta", "radius", "x0", "sqrt_residual", "shift_residual", "commutation_residual", "max_residual", "pass"}',
    "nonsimple": '{"source", "rows": [{"radius", "run1", "run2"}], "growing", "not_simple", "verdict"}',
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--out", help="write output here instead of stdout")

    root = _Parser(prog="denjoykit", description=__doc__,
                   formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = root.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, fn, schema, **kw):
        p = sub.add_parser(name, parents=[common], epilog=f"JSON output: {SCHEMAS[schema]}",
                           formatter_class=argparse.RawDescriptionHelpFormatter, **kw)
        p.set_defaults(fn=fn)
        return p

    seq = groups.add_parser("seq", help="Fibonacci and Sturmian sequences").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(seq, "fib", cmd_seq_fib, "fib")
    p.add_argument("--gen", type=int)
    p.add_argument("--stage", type=int)
    p = leaf(seq, "complexity", cmd_seq_complexity, "complexity")
    _add_source(p)
    p.add_argument("--max-k", type=int, default=10)
    p = leaf(seq, "slope", cmd_seq_slope, "slope")
    _add_source(p)
    p.add_argument("--N", type=int, required=True)
    p = leaf(seq, "runs", cmd_seq_runs, "runs")
    _add_source(p)

    bnd = groups.add_parser("boundary", help="free group boundary").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(bnd, "act", cmd_boundary_act, "act")
    p.add_argument("--letter", required=True, choices=list(fb.LETTERS))
    p.add_argument("--word", required=True)
    p.add_argument("--level", type=int)
    p = leaf(bnd, "witness", cmd_boundary_witness, "witness_b")
    p.add_argument("--kind", choices=["minimality", "infiniteness"], default="infiniteness")
    p.add_argument("--prefix")
    p.add_argument("--first")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--omega")
    p.add_argument("--sigma1")
    p.add_argument("--sigma2")
    p.add_argument("--random", type=int, default=0, help="test this many random omegas")

    den = groups.add_parser("denjoy", help="Denjoy Cantor set").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("distance", cmd_denjoy_distance), ("code", cmd_denjoy_code),
                     ("measure", cmd_denjoy_measure)):
        p = leaf(den, name, fn, name)
        p.add_argument("--lam", default="golden", help="angle, e.g. golden, 2pi/phi^2, 1.0")
        p.add_argument("--base", type=float, default=0.0)
        p.add_argument("--depth", type=int, default=8)
        if name == "distance":
            p.add_argument("--x", required=True, help="2L, @angle, or --x=-1R for negative indices")
            p.add_argument("--y", required=True, help="same format as --x")
        elif name == "code":
            p.add_argument("--start", type=float, default=0.1)
            p.add_argument("--length", type=int, default=100)
        else:
            p.add_argument("--unit", type=int, default=0)
            p.add_argument("--arc", action="append", help="j=c, repeatable")
            p.add_argument("--power", type=int, default=0)

    kth = groups.add_parser("ktheory", help="truncated K-theory presentations").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)

    def model_args(p):
        p.add_argument("--model", choices=MODELS, default="denjoy-id")
        p.add_argument("--depth", type=int, default=2)
        p.add_argument("--level", type=int, default=1)

    p = leaf(kth, "k0-direct", cmd_k0_direct, "group")
    model_args(p)
    p.add_argument("--margin", type=int, default=0)
    model_args(leaf(kth, "k0-reduced", cmd_k0_reduced, "group"))
    p = leaf(kth, "example16", cmd_example16, "example16")
    p.add_argument("--depth", type=int, default=1)
    p = leaf(kth, "k1", cmd_k1, "k1")
    model_args(p)
    p.add_argument("--basis", action="store_true")
    p = leaf(kth, "verify", cmd_verify, "verify")
    model_args(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--corrupt", action="store_true", help="negative control")
    p = leaf(kth, "sweep", cmd_sweep, "sweep")
    p.add_argument("--family", choices=["example16", "point", "k1"], default="example16")
    p.add_argument("--params", default="1,2,3,4")
    p.add_argument("--level", type=int, default=1, help="boundary level for the k1 family")
    p.add_argument("--predict-rank", type=int)

    spec = groups.add_parser("spectrum", help="weighted shift checks").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(spec, "shift", cmd_shift, "shift")
    _add_source(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p = leaf(spec, "joint", cmd_joint, "joint")
    _add_source(p)
    p.add_argument("--gamma", default="0")
    p.add_argument("--point", help="comma-separated lambda_i; complex as 1+2i")
    p.add_argument("--grid", help="lo:hi:count on every axis, emits CSV")
    p.add_argument("--tol", type=float)
    p = leaf(spec, "witness", cmd_witness, "witness_s")
    p.add_argument("--n", default="50,200,800")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p = leaf(spec, "periodic", cmd_periodic, "periodic")
    p.add_argument("--weights", default="1,2", help="comma-separated weights of one period")
    p.add_argument("--m", type=int, default=8, help="number of periods in the cyclic truncation")
    p.add_argument("--tol", type=float, default=1e-9)
    p = leaf(spec, "rotation", cmd_rotation, "rotation")
    p.add_argument("--theta", type=float, default=(math.sqrt(5) - 1) / 2)
    p.add_argument("--window", type=int, default=128)
    p.add_argument("--tol", type=float, default=1e-9)
    p = leaf(spec, "nonsimple", cmd_nonsimple, "nonsimple")
    _add_source(p)
    return root


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = args.fn(args)
        text = result if isinstance(result, str) else _json(result, args.seed)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return EXIT_OK
    except CliError as exc:
        print(str(exc).splitlines()[0], file=stderr)
        return exc.code
    except (PreconditionError, WindowError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
