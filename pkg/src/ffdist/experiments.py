"""Seeded generators, theorem thresholds, and threshold sweeps.

Theorem modes
-------------
pair-set experiments (E in F_q^d x F_q^d, two-parameter distance set):
    thm11   |E| >> q^((3d+1)/2)  =>  |Delta_dd(E)| = q^2   (hard pass/fail)
    thm12   d = 2, |E| >> q^(10/3)
    thm13   general (s, a), |E| >> q^((3d+1)/2)
    thm14   d = 2, prime field, |E| >> p^(13/4)
set experiments (X, Y in F_q^d, one-parameter distance set):
    lemma21 |X||Y| >> q^(d+1)
    lemma31 d = 2, prime field, |X|, |Y| >> p^(5/4)

Only thm11 gets a ``threshold_met`` verdict.  The other modes record the
ratio |Delta|/q^2 (pair sets) or |Delta|/q (sets) without a constant.

Generators
----------
uniform-random  distinct points by rejection; above half the universe the
                complement is sampled instead.
product         (pair sets only) E = A x B, |A| the largest divisor of |E|
                with |A| <= sqrt|E| and |E|/|A| <= q^d; A, B uniform-random.
sphere-union    cells (spheres about the origin; for pair sets, products of
                two spheres) in shuffled order, taken whole while they fit,
                the last one partially at random.
subspace        uniform-random inside the smallest coordinate subspace
                {leading coordinates = 0} holding the requested size.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from functools import cached_property
from typing import Sequence, TextIO

import numpy as np

from .counting import chain_report
from .errors import ConsistencyError, UsageError
from .field import Field
from .geometry import NormSpec, PairSet, PointSet, Space, two_param_size
from .rng import SplitMix64, derive_seed

PAIR_THEOREMS = ("thm11", "thm12", "thm13", "thm14")
SET_THEOREMS = ("lemma21", "lemma31")
THEOREMS = PAIR_THEOREMS + SET_THEOREMS
GENERATORS = ("uniform-random", "product", "sphere-union", "subspace")


def threshold(theorem: str, q: int, d: int) -> float:
    """The size threshold of a theorem, evaluated without its implicit constant."""
    if theorem not in THEOREMS:
        raise UsageError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    if theorem in ("thm12", "thm14", "lemma31") and d != 2:
        raise UsageError(f"{theorem} is stated for d = 2, got d = {d}")
    if theorem in ("thm11", "thm13"):
        return q ** ((3 * d + 1) / 2)
    if theorem == "thm12":
        return q ** (10 / 3)
    if theorem == "thm14":
        return q ** (13 / 4)
    if theorem == "lemma21":
        return float(q ** (d + 1))
    return q ** (5 / 4)


@dataclass(frozen=True)
class ExperimentConfig:
    field: Field
    d: int
    theorem: str
    generator: str = "uniform-random"
    sizes: tuple[int, ...] = ()
    trials: int = 1
    seed: int = 0
    s: int = 2
    a: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))
        if self.theorem not in THEOREMS:
            raise UsageError(f"unknown theorem {self.theorem!r}")
        if self.generator not in GENERATORS:
            raise UsageError(f"unknown generator {self.generator!r}")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        threshold(self.theorem, self.field.q, self.d)  # dimension check
        if self.theorem in ("thm14", "lemma31") and self.field.k != 1:
            raise UsageError(f"{self.theorem} is stated over prime fields")
        if self.theorem in ("thm11", "thm12", "thm14", "lemma31") and not self.norm.is_usual:
            raise UsageError(f"{self.theorem} is stated for the usual distance (s=2, a=1)")
        if self.generator == "product" and not self.pairs:
            raise UsageError("the product generator builds pair sets only")
        cap = self.space.size ** (2 if self.pairs else 1)
        for m in self.sizes:
            if not 0 <= m <= cap:
                raise UsageError(f"size {m} outside [0, {cap}] for {self.theorem}")

    @property
    def pairs(self) -> bool:
        return self.theorem in PAIR_THEOREMS

    @cached_property
    def space(self) -> Space:
        return Space(self.field, self.d)

    @cached_property
    def norm(self) -> NormSpec:
        return NormSpec(self.space, self.s, self.a)


# sampling -------------------------------------------------------------------


def sample_distinct(rng: SplitMix64, universe: int, m: int) -> np.ndarray:
    """m distinct integers from [0, universe), sorted."""
    if not 0 <= m <= universe:
        raise UsageError(f"cannot draw {m} distinct elements from {universe}")
    complement = m > universe // 2
    want = universe - m if complement else m
    if complement or m > universe // 4:
        taken = np.zeros(universe, dtype=bool)
        got = 0
        while got < want:
            x = rng.below(universe)
            if not taken[x]:
                taken[x] = True
                got += 1
        return np.flatnonzero(~taken if complement else taken)
    seen: set[int] = set()
    while len(seen) < want:
        seen.add(rng.below(universe))
    return np.array(sorted(seen), dtype=np.int64)


def _cells(config: ExperimentConfig) -> np.ndarray:
    n = config.norm
    if not config.pairs:
        return n.table
    return (n.table[:, None] * config.field.q + n.table[None, :]).reshape(-1)


def _sphere_union(rng: SplitMix64, cells: np.ndarray, m: int) -> np.ndarray:
    labels = sorted(set(cells.tolist()))
    rng.shuffle(labels)
    chosen = []
    need = m
    for lab in labels:
        if need == 0:
            break
        members = np.flatnonzero(cells == lab)
        if members.size <= need:
            chosen.append(members)
            need -= members.size
        else:
            chosen.append(members[sample_distinct(rng, members.size, need)])
            need = 0
    return np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=np.int64)


def _factor_near_sqrt(m: int, cap: int) -> tuple[int, int]:
    for a in range(math.isqrt(m), 0, -1):
        if m % a == 0 and m // a <= cap:
            return a, m // a
    raise UsageError(f"no factorization {m} = |A| |B| with |A|, |B| <= {cap}")


def generate(config: ExperimentConfig, size: int, trial: int, stream: int = 0):
    """Deterministic PointSet (set modes) or PairSet (pair modes) of the given size.

    Randomness comes from ``SplitMix64(derive_seed(seed, trial, size, stream))``;
    set modes draw X from stream 0 and Y from stream 1.
    """
    space = config.space
    universe = space.size ** (2 if config.pairs else 1)
    if not 0 <= size <= universe:
        raise UsageError(f"size {size} exceeds the ambient capacity {universe}")
    rng = SplitMix64(derive_seed(config.seed, trial, size, stream))
    wrap = (lambda idx: PairSet(space, idx)) if config.pairs else (lambda idx: PointSet(space, idx))
    g = config.generator
    if g == "uniform-random":
        return wrap(sample_distinct(rng, universe, size))
    if g == "product":
        if size == 0:
            return PairSet(space)
        a, b = _factor_near_sqrt(size, space.size)
        A = PointSet(space, sample_distinct(rng, space.size, a))
        B = PointSet(space, sample_distinct(rng, space.size, b))
        return PairSet.product(A, B)
    if g == "sphere-union":
        space.check_dense("sphere cells", universe)
        return wrap(_sphere_union(rng, _cells(config), size))
    # subspace
    dim = 0
    while config.field.q**dim < size:
        dim += 1
    return wrap(sample_distinct(rng, config.field.q**dim, size))


# sweeps ---------------------------------------------------------------------


@dataclass
class SweepRow:
    theorem: str
    trial: int
    size: int
    q: int
    d: int
    s: int
    generator: str
    n_e: int | None
    n_x: int | None
    n_y: int | None
    delta: int
    Q: int | None
    T: int | None
    Tprime: int | None
    cs_lower: str | None
    pham_ratio: float | None
    threshold: float
    above_threshold: bool
    ratio: float
    threshold_met: bool | None
    elapsed_ms: float = 0.0


CSV_FIELDS = [f.name for f in fields(SweepRow) if f.name != "elapsed_ms"]


def run_one(config: ExperimentConfig, size: int, trial: int) -> SweepRow:
    t0 = time.perf_counter()
    q, d = config.field.q, config.d
    n = config.norm
    thr = threshold(config.theorem, q, d)
    if config.pairs:
        E = generate(config, size, trial)
        delta = two_param_size(E, n)
        row = SweepRow(
            config.theorem, trial, size, q, d, n.s, config.generator,
            len(E), None, None, delta, None, None, None, None, None,
            thr, len(E) >= thr, _sig(delta / q**2),
            (delta == q * q) if config.theorem == "thm11" else None,
        )
    else:
        X = generate(config, size, trial, 0)
        Y = generate(config, size, trial, 1)
        rep = chain_report(X, Y, n)
        measure = len(X) * len(Y) if config.theorem == "lemma21" else min(len(X), len(Y))
        row = SweepRow(
            config.theorem, trial, size, q, d, n.s, config.generator,
            None, len(X), len(Y), rep.delta, rep.Q, rep.T, rep.Tprime,
            str(rep.cs_lower), rep.pham_ratio,
            thr, measure >= thr, _sig(rep.delta / q), None,
        )
    row.elapsed_ms = round((time.perf_counter() - t0) * 1000, 3)
    return row


def _sig(x: float) -> float:
    return float(f"{x:.6g}")


def _run_job(args):
    return run_one(*args)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """One row per (size, trial), ordered by size position then trial."""
    jobs = [(config, m, t) for m in config.sizes for t in range(config.trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [run_one(*job) for job in jobs]
    order = {m: i for i, m in reversed(list(enumerate(config.sizes)))}
    rows.sort(key=lambda r: (order[r.size], r.trial))
    return rows


# emission -------------------------------------------------------------------


def check_row(row: SweepRow) -> None:
    if row.Q is None:
        return
    nx, ny = row.n_x, row.n_y
    if row.delta * row.Q < nx * nx * ny * ny or row.Q > nx * row.T or row.T > row.Tprime:
        raise ConsistencyError(f"inequality chain violated in row {row}")
    if row.Q and Fraction(row.cs_lower) != Fraction(nx * nx * ny * ny, row.Q):
        raise ConsistencyError(f"cs_lower mismatch in row {row}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit(rows: Sequence[SweepRow], fmt: str = "csv", out: TextIO | str | None = None,
         timing: bool = False) -> str:
    """Serialize rows as csv, json-lines or plot-data; returns the text.

    ``elapsed_ms`` is written only with ``timing=True`` so that default output
    is byte-identical across runs.
    """
    for r in rows:
        check_row(r)
    names = CSV_FIELDS + (["elapsed_ms"] if timing else [])
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            d = asdict(r)
            w.writerow([_cell(d[k]) for k in names])
    elif fmt == "json-lines":
        for r in rows:
            d = asdict(r)
            buf.write(json.dumps({k: d[k] for k in names}) + "\n")
    elif fmt == "plot-data":
        by_size: dict[int, list[int]] = defaultdict(list)
        for r in rows:
            by_size[r.size].append(r.delta)
        for m in sorted(by_size):
            vals = by_size[m]
            buf.write(f"{m} {sum(vals) / len(vals):.6g} {min(vals)}\n")
    else:
        raise UsageError(f"unknown format {fmt!r}; choose csv, json-lines or plot-data")
    text = buf.getvalue()
    if isinstance(out, str):
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise UsageError(f"cannot write {out}: {e.strerror}") from None
    elif out is not None:
        out.write(text)
    return text
