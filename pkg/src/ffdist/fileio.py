"""The ``ffdist-v1`` text format for point sets and pair sets.

::

    ffdist-v1
    p=<p> k=<k> d=<d> s=<s> a=<a1>,...,<ad>
    modulus=<c0>:<c1>:...:<ck>          (only when k > 1)
    <x1> ... <xd>                       (one point per line)
    <x1> ... <xd> <y1> ... <yd>         (pair sets: 2d elements per line)

Elements use the field text encoding; lines starting with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import UsageError
from .field import Field
from .geometry import NormSpec, PairSet, PointSet, Space

MAGIC = "ffdist-v1"


@dataclass
class Document:
    norm: NormSpec
    points: PointSet | None = None
    pairs: PairSet | None = None

    @property
    def space(self) -> Space:
        return self.norm.space


def format_header(norm: NormSpec) -> str:
    F = norm.field
    a = ",".join(F.encode(c) for c in norm.a)
    lines = [MAGIC, f"p={F.p} k={F.k} d={norm.space.d} s={norm.s} a={a}"]
    if F.k > 1:
        lines.append("modulus=" + ":".join(str(c) for c in F.modulus))
    return "\n".join(lines) + "\n"


def dumps(norm: NormSpec, data: PointSet | PairSet) -> str:
    if data.space != norm.space:
        raise UsageError("data and norm live in different spaces")
    enc = norm.field.encode
    body = []
    if isinstance(data, PointSet):
        for v in data:
            body.append(" ".join(enc(c) for c in v))
    else:
        for x, y in data:
            body.append(" ".join(enc(c) for c in x + y))
    return format_header(norm) + "".join(line + "\n" for line in body)


def loads(text: str, source: str = "<string>") -> Document:
    lines = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.strip().startswith("#")
    ]

    def fail(lineno, msg):
        raise UsageError(f"{source}:{lineno}: {msg}")

    if not lines or lines[0][1] != MAGIC:
        fail(lines[0][0] if lines else 1, f"expected '{MAGIC}'")
    if len(lines) < 2:
        fail(lines[0][0], "missing parameter line")
    lineno, params = lines[1]
    kv = {}
    for tok in params.split():
        if "=" not in tok:
            fail(lineno, f"malformed parameter {tok!r}")
        key, val = tok.split("=", 1)
        kv[key] = val
    missing = {"p", "k", "d", "s", "a"} - kv.keys()
    if missing:
        fail(lineno, f"missing parameters {sorted(missing)}")
    try:
        p, k, d, s = (int(kv[x]) for x in "pkds")
    except ValueError:
        fail(lineno, "p, k, d, s must be integers")
    rest = lines[2:]
    modulus = None
    if k > 1:
        if not rest or not rest[0][1].startswith("modulus="):
            fail(rest[0][0] if rest else lineno, "k > 1 requires a modulus line")
        try:
            modulus = tuple(int(c) for c in rest[0][1][len("modulus="):].split(":"))
        except ValueError:
            fail(rest[0][0], "malformed modulus")
        rest = rest[1:]
    F = Field(p, k, modulus)
    space = Space(F, d)
    a = [F.decode(c).index for c in kv["a"].split(",")]
    norm = NormSpec(space, s, tuple(a))

    rows = []
    width = None
    for ln, text_ in rest:
        toks = text_.split()
        if width is None:
            width = len(toks)
            if width not in (d, 2 * d):
                fail(ln, f"expected {d} or {2 * d} elements, got {width}")
        elif len(toks) != width:
            fail(ln, f"expected {width} elements, got {len(toks)}")
        try:
            rows.append([F.decode(t).index for t in toks])
        except UsageError as e:
            fail(ln, str(e))
    if width == 2 * d:
        pairs = PairSet.from_pairs(space, [(r[:d], r[d:]) for r in rows])
        return Document(norm, pairs=pairs)
    return Document(norm, points=PointSet.from_vectors(space, rows))


def read(path: str | Path) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return loads(text, str(path))


def write(path: str | Path, norm: NormSpec, data: PointSet | PairSet) -> None:
    try:
        Path(path).write_text(dumps(norm, data), encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from None
