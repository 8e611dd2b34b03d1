"""Command-line entry point: ``ffdist <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 capacity error, 3 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import fileio
from .counting import chain_report, spectrum_fft, spectrum_naive
from .errors import FFDistError, UsageError
from .experiments import (
    GENERATORS,
    THEOREMS,
    ExperimentConfig,
    emit,
    generate,
    run_sweep,
    threshold,
)
from .field import parse_field
from .geometry import NormSpec, PairSet, Space, distance_set, two_param_distance_set
from .proof_engine import certify, coverage_ratio, default_tau, heavy_fibers


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


GLOBAL_DEFAULTS = dict(field=None, modulus=None, dim=None, s=None, coeffs=None,
                       seed=0, out=None, format=None)


def _common() -> argparse.ArgumentParser:
    # SUPPRESS so a subcommand's defaults never clobber flags given before it
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--field", help="q, or p^k; e.g. 7, 9, 3^2")
    g.add_argument("--modulus", help="irreducible modulus c0:c1:...:ck for k > 1")
    g.add_argument("--dim", type=int, help="ambient dimension d")
    g.add_argument("--s", type=int, help="norm exponent s >= 2")
    g.add_argument("--coeffs", help="norm coefficients a1,...,ad")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format",
                   help="csv, json-lines or plot-data (sweep); text (others)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="ffdist", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("distset", parents=[common], help="one-parameter distance set")
    p.add_argument("X")
    p.add_argument("Y", nargs="?")

    p = sub.add_parser("twoparam", parents=[common], help="two-parameter distance set")
    p.add_argument("E")

    p = sub.add_parser("count", parents=[common], help="spectrum, Q, T, T' and the inequality chain")
    p.add_argument("X")
    p.add_argument("Y", nargs="?")
    p.add_argument("--method", choices=("naive", "fft"), default="naive")

    p = sub.add_parser("fibers", parents=[common], help="fiber sizes and heavy set")
    p.add_argument("E")
    p.add_argument("--tau", type=int)
    p.add_argument("--C", default="2", help="constant in the default threshold (rational)")

    p = sub.add_parser("certify", parents=[common], help="heavy-fiber certificate")
    p.add_argument("E")
    p.add_argument("--tau", type=int)
    p.add_argument("--C", default="2")
    p.add_argument("--exhaustive", action="store_true")

    p = sub.add_parser("sweep", parents=[common], help="seeded threshold sweep")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--generator", default="uniform-random", choices=GENERATORS)
    p.add_argument("--sizes", required=True, help="comma-separated cardinalities")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add the elapsed_ms column")

    p = sub.add_parser("threshold", parents=[common], help="evaluate a theorem's size threshold")
    p.add_argument("--theorem", required=True, choices=THEOREMS)

    p = sub.add_parser("generate", parents=[common], help="write a generated set in ffdist-v1 format")
    p.add_argument("--theorem", default="thm13", choices=THEOREMS)
    p.add_argument("--generator", default="uniform-random", choices=GENERATORS)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    return parser


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _field_from_args(args):
    if args.field is None:
        raise UsageError("--field is required")
    return parse_field(args.field, args.modulus)


def _norm_from_args(args, space: Space) -> NormSpec:
    a = None
    if args.coeffs is not None:
        F = space.field
        a = tuple(F.decode(c).index for c in args.coeffs.split(","))
    return NormSpec(space, args.s if args.s is not None else 2, a)


def _load(args, path: str) -> fileio.Document:
    doc = fileio.read(path)
    space = doc.space
    if args.field is not None and _field_from_args(args) != space.field:
        raise UsageError(f"{path}: --field disagrees with the file header")
    if args.dim is not None and args.dim != space.d:
        raise UsageError(f"{path}: --dim disagrees with the file header")
    if args.s is not None or args.coeffs is not None:
        s = args.s if args.s is not None else doc.norm.s
        a = doc.norm.a
        if args.coeffs is not None:
            a = tuple(space.field.decode(c).index for c in args.coeffs.split(","))
        doc.norm = NormSpec(space, s, a)
    return doc


def _points(doc: fileio.Document, path: str):
    if doc.points is None:
        raise UsageError(f"{path}: expected a point set, found a pair set")
    return doc.points


def _pairs(doc: fileio.Document, path: str):
    if doc.pairs is None:
        if doc.points is not None and len(doc.points) == 0:
            return PairSet(doc.space)
        raise UsageError(f"{path}: expected a pair set, found a point set")
    return doc.pairs


def _tau(args, space: Space) -> int:
    if args.tau is not None:
        return args.tau
    try:
        C = Fraction(args.C)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed constant C={args.C!r}") from None
    return default_tau(space.q, space.d, C)


def _two(args):
    dx = _load(args, args.X)
    X = _points(dx, args.X)
    if args.Y is None:
        return dx, X, X
    dy = _load(args, args.Y)
    Y = _points(dy, args.Y)
    if dy.norm != dx.norm:
        raise UsageError("X and Y files disagree on field, dimension or norm")
    return dx, X, Y


def run(args) -> str:
    cmd = args.command
    if cmd == "distset":
        doc, X, Y = _two(args)
        F = doc.norm.field
        vals = sorted(distance_set(X, Y, doc.norm))
        return f"size {len(vals)}\n" + " ".join(F.encode(v) for v in vals) + "\n"

    if cmd == "twoparam":
        doc = _load(args, args.E)
        E = _pairs(doc, args.E)
        F = doc.norm.field
        vals = sorted(two_param_distance_set(E, doc.norm))
        body = "".join(f"{F.encode(v)} {F.encode(u)}\n" for v, u in vals)
        return f"size {len(vals)} of {F.q ** 2}\n" + body

    if cmd == "count":
        doc, X, Y = _two(args)
        n = doc.norm
        spec = (spectrum_fft if args.method == "fft" else spectrum_naive)(X, Y, n)
        rep = chain_report(X, Y, n)
        F = n.field
        lines = [f"r({F.encode(u)}) = {c}" for u, c in spec.as_dict().items()]
        lines += [
            f"|X| = {rep.nX}  |Y| = {rep.nY}  |Z| = {rep.nZ}",
            f"|Delta| = {rep.delta}",
            f"Q = {rep.Q}",
            f"T = {rep.T}",
            f"T' = {rep.Tprime}",
            f"|X|^2|Y|^2/Q = {rep.cs_lower}",
        ]
        if rep.pham_ratio is not None:
            lines.append(f"pham_rhs = {rep.pham_rhs:.6g}  pham_ratio = {rep.pham_ratio:.6g}")
        return "\n".join(lines) + "\n"

    if cmd == "fibers":
        doc = _load(args, args.E)
        E = _pairs(doc, args.E)
        F = doc.norm.field
        dec = heavy_fibers(E, _tau(args, doc.space))
        heavy = set(dec.heavy)
        lines = [f"tau {dec.tau}  heavy {len(dec.heavy)}  pigeonhole_bound {dec.pigeonhole_bound}"]
        for y, m in dec.fiber_sizes.items():
            mark = " *" if y in heavy else ""
            lines.append(" ".join(F.encode(c) for c in y) + f" : {m}{mark}")
        return "\n".join(lines) + "\n"

    if cmd == "certify":
        doc = _load(args, args.E)
        E = _pairs(doc, args.E)
        cert = certify(E, doc.norm, _tau(args, doc.space), exhaustive=args.exhaustive)
        verified = cert.verify(E)
        ratio = coverage_ratio(cert, E, doc.norm)
        return (
            cert.to_text()
            + f"# verified {verified} pairs; coverage {ratio} = {float(ratio):.6g}; "
            f"min |values_v| = {cert.min_witness_size}\n"
        )

    if cmd == "threshold":
        F = _field_from_args(args)
        d = args.dim if args.dim is not None else 2
        return f"{threshold(args.theorem, F.q, d):.6g}\n"

    config = ExperimentConfig(
        field=_field_from_args(args),
        d=args.dim if args.dim is not None else 2,
        theorem=args.theorem,
        generator=args.generator,
        sizes=_ints(getattr(args, "sizes", None)) or [getattr(args, "size", 0)],
        trials=getattr(args, "trials", 1),
        seed=args.seed,
        s=args.s if args.s is not None else 2,
        a=None,
    )
    if args.coeffs is not None:
        config = ExperimentConfig(
            config.field, config.d, config.theorem, config.generator, config.sizes,
            config.trials, config.seed, config.s, tuple(_norm_from_args(args, config.space).a),
        )
    if cmd == "generate":
        data = generate(config, args.size, args.trial)
        return fileio.dumps(config.norm, data)

    rows = run_sweep(config, workers=args.workers)
    return emit(rows, args.format or "csv", timing=args.timing)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for key, val in GLOBAL_DEFAULTS.items():
            if not hasattr(args, key):
                setattr(args, key, val)
        text = run(args)
        if args.out:
            try:
                with open(args.out, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as e:
                raise UsageError(f"cannot write {args.out}: {e.strerror}") from None
        else:
            sys.stdout.write(text)
    except FFDistError as e:
        print(f"ffdist: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
