"""Heavy-fiber extraction and witness composition.

Given E in F_q^d x F_q^d, the fiber over y is E_y = {x : (x, y) in E}.  Base
points with |E_y| > tau form the heavy set.  For each distance u realized by
heavy z, t, every v in Delta(E_z, E_t) yields (v, u) in the two-parameter
distance set, because (x, z), (y, t) in E with ||x - y|| = v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, UsageError
from .geometry import (
    NormSpec,
    PairSet,
    PointSet,
    Space,
    _two_param_mask,
    distance_values,
    fiber_sizes,
    norm_s,
)


@dataclass(frozen=True, eq=False)
class HeavyFiberDecomposition:
    tau: int
    heavy: PointSet
    fiber_sizes: dict[tuple[int, ...], int]
    pigeonhole_bound: int


def heavy_fibers(E: PairSet, tau: int) -> HeavyFiberDecomposition:
    if tau < 0:
        raise UsageError(f"tau must be nonnegative, got {tau}")
    space = E.space
    keys, counts = fiber_sizes(E)
    heavy = PointSet(space, keys[counts > tau])
    sizes = {
        tuple(int(c) for c in row): int(m) for row, m in zip(space.coords(keys), counts)
    }
    qd = space.size
    # |E| <= q^d |heavy| + tau q^d
    bound = max(0, -(-(len(E) - tau * qd) // qd))
    if len(heavy) < bound or len(E) > qd * len(heavy) + tau * qd:
        raise ConsistencyError(
            f"pigeonhole violated: |E|={len(E)}, |heavy|={len(heavy)}, tau={tau}, q^d={qd}"
        )
    return HeavyFiberDecomposition(tau, heavy, sizes, bound)


def default_tau(q: int, d: int, C=2) -> int:
    """floor((C/2) q^((d+1)/2)), computed exactly for rational C."""
    C = Fraction(C)
    if C <= 0:
        raise UsageError(f"C must be positive, got {C}")
    half = C / 2
    if (d + 1) % 2 == 0:
        return math.floor(half * q ** ((d + 1) // 2))
    # floor(sqrt(x)) == isqrt(floor(x)) for rational x >= 0
    x = half * half * q ** (d + 1)
    return math.isqrt(x.numerator // x.denominator)


@dataclass(frozen=True)
class CertificateEntry:
    u: int
    z: tuple[int, ...]
    t: tuple[int, ...]
    values_v: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Certificate:
    space: Space
    norm: NormSpec
    tau: int
    entries: tuple[CertificateEntry, ...]
    exhaustive: bool = False
    source: bytes = field(default=b"", repr=False)

    @property
    def certified_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((v, e.u) for e in self.entries for v in e.values_v)

    @property
    def min_witness_size(self) -> int | None:
        """Smallest |Delta(E_z, E_t)| over entries (None when empty)."""
        if not self.entries:
            return None
        return min(len(e.values_v) for e in self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, Certificate)
            and self.norm == other.norm
            and self.tau == other.tau
            and self.entries == other.entries
            and self.exhaustive == other.exhaustive
        )

    def to_text(self) -> str:
        """One line per entry: ``u ; z ; t ; v1 v2 ...`` in the element text encoding."""
        F = self.space.field
        enc = F.encode
        lines = [
            f"# certificate tau={self.tau} s={self.norm.s} "
            f"a={','.join(enc(c) for c in self.norm.a)} entries={len(self.entries)}"
        ]
        for e in self.entries:
            lines.append(
                " ; ".join(
                    [
                        enc(e.u),
                        " ".join(enc(c) for c in e.z),
                        " ".join(enc(c) for c in e.t),
                        " ".join(enc(v) for v in e.values_v),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def witnesses(self, E: PairSet) -> dict[tuple[int, int], tuple[tuple, tuple]]:
        """Map each certified (v, u) to explicit ((x, z), (y, t)) in E x E.

        Raises ConsistencyError if some certified pair has no witness.
        """
        n = self.norm
        space = self.space
        if _fingerprint(E, n) != self.source:
            raise UsageError("certificate was not produced from this pair set and norm")
        first, second = E.first, E.second
        heavy = heavy_fibers(E, self.tau).heavy if self.exhaustive else None
        out = {}
        for e in self.entries:
            if heavy is None:
                bases = [(space.index(e.z), space.index(e.t))]
            else:
                norms = n.pairwise(heavy.coords, heavy.coords)
                bases = [(int(heavy.idx[i]), int(heavy.idx[j])) for i, j in np.argwhere(norms == e.u)]
            todo = set(e.values_v)
            for zi, ti in bases:
                xs, ys = first[second == zi], first[second == ti]
                if not todo or not len(xs) or not len(ys):
                    continue
                vals = n.pairwise(space.coords(xs), space.coords(ys))
                for v in list(todo):
                    hit = np.argwhere(vals == v)
                    if hit.size:
                        i, j = hit[0]
                        z, t = space.coords(zi), space.coords(ti)
                        x, y = space.coords(xs[i]), space.coords(ys[j])
                        out[(v, e.u)] = (
                            (tuple(map(int, x)), tuple(map(int, z))),
                            (tuple(map(int, y)), tuple(map(int, t))),
                        )
                        todo.discard(v)
            if todo:
                raise ConsistencyError(f"no witnesses for v in {sorted(todo)} at u={e.u}")
        return out

    def verify(self, E: PairSet) -> int:
        """Check every certified pair against its witnesses with scalar arithmetic.

        Returns the number of verified pairs.
        """
        n = self.norm
        found = self.witnesses(E)
        for (v, u), ((x, z), (y, t)) in found.items():
            if (x, z) not in E or (y, t) not in E:
                raise ConsistencyError(f"witness for {(v, u)} is not in E")
            if norm_s(x, y, n).index != v or norm_s(z, t, n).index != u:
                raise ConsistencyError(f"witness for {(v, u)} evaluates differently")
        return len(found)


def _fingerprint(E: PairSet, n: NormSpec) -> bytes:
    return repr((n.space, n.s, n.a)).encode() + E.codes.tobytes()


def certify(E: PairSet, n: NormSpec, tau: int, exhaustive: bool = False) -> Certificate:
    """Certified subset of the two-parameter distance set from heavy fibers.

    One witness pair (z, t) per u by default: the lexicographically smallest
    in point-index order.  ``exhaustive=True`` unions Delta(E_z, E_t) over all
    heavy pairs realizing u instead.
    """
    if n.space != E.space:
        raise UsageError("norm and pair set live in different spaces")
    space = E.space
    dec = heavy_fibers(E, tau)
    heavy = dec.heavy
    entries = []
    if len(heavy):
        first, second = E.first, E.second
        fib = {int(y): PointSet(space, first[second == y]) for y in heavy.idx}
        norms = n.pairwise(heavy.coords, heavy.coords)
        # heavy.idx is sorted, so row-major argwhere order is lexicographic in (z, t)
        for u in np.unique(norms):
            hits = np.argwhere(norms == u)
            if not exhaustive:
                hits = hits[:1]
            vals = np.zeros(space.q, dtype=bool)
            for i, j in hits:
                zi, ti = int(heavy.idx[i]), int(heavy.idx[j])
                vals[distance_values(fib[zi], fib[ti], n)] = True
            i, j = hits[0]
            entries.append(
                CertificateEntry(
                    int(u),
                    tuple(int(c) for c in heavy.coords[i]),
                    tuple(int(c) for c in heavy.coords[j]),
                    tuple(int(v) for v in np.flatnonzero(vals)),
                )
            )
    return Certificate(space, n, tau, tuple(entries), exhaustive, _fingerprint(E, n))


def coverage_ratio(cert: Certificate, E: PairSet, n: NormSpec) -> Fraction:
    """|certified pairs| / |two-parameter distance set of E|."""
    if cert.norm != n or cert.source != _fingerprint(E, n):
        raise UsageError("certificate was not produced from this pair set and norm")
    mask = _two_param_mask(E, n)
    total = int(mask.sum())
    if total == 0:
        return Fraction(0)
    q = E.space.q
    for v, u in cert.certified_pairs:
        if not mask[v * q + u]:
            raise ConsistencyError(f"certified pair {(v, u)} is not in the distance set")
    return Fraction(len(cert.certified_pairs), total)
