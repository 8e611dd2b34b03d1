"""Vectors in F_q^d, the norm sum_i a_i (x_i - y_i)^s, and distance sets.

Conventions used throughout the package:

* A field element is addressed by its integer index (see ``ffdist.field``).
* A vector is a tuple of d element indices.  Functions that take vectors also
  accept ``FieldElement`` coordinates.
* A point of F_q^d is addressed by its mixed-radix index
  ``x_1 q^(d-1) + x_2 q^(d-2) + ... + x_d``, so sorting by point index is
  lexicographic order on coordinate tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, UsageError
from .field import Field, FieldElement

# largest dense table (entries) materialized over F_q^d or F_q^2d
MAX_DENSE = 1 << 22
# pair evaluations per numpy block
BLOCK = 1 << 20


@dataclass(frozen=True)
class Space:
    """The ambient space F_q^d."""

    field: Field
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise UsageError(f"dimension must be >= 1, got {self.d}")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return self.field.q**self.d

    def check_dense(self, what: str = "dense table", entries: int | None = None) -> None:
        n = self.size if entries is None else entries
        if n > MAX_DENSE:
            raise CapacityError(
                f"{what} over F_{self.q}^{self.d} needs {n} entries; limit is {MAX_DENSE}"
            )

    def vector(self, coords: Iterable) -> tuple[int, ...]:
        out = tuple(_elem_index(self.field, c) for c in coords)
        if len(out) != self.d:
            raise UsageError(f"expected a vector of length {self.d}, got {len(out)}")
        return out

    def index(self, coords: Iterable) -> int:
        idx = 0
        for c in self.vector(coords):
            idx = idx * self.q + c
        return idx

    def coords(self, indices) -> np.ndarray:
        """(n, d) array of element indices for an array of point indices."""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.empty(indices.shape + (self.d,), dtype=np.int64)
        rest = indices.copy()
        for j in range(self.d - 1, -1, -1):
            rest, out[..., j] = np.divmod(rest, self.q)
        return out

    def indices(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        idx = np.zeros(coords.shape[:-1], dtype=np.int64)
        for j in range(self.d):
            idx = idx * self.q + coords[..., j]
        return idx


def _elem_index(F: Field, c) -> int:
    if isinstance(c, FieldElement):
        return F(c).index
    c = int(c)
    if not 0 <= c < F.q:
        raise UsageError(f"coordinate {c} is not an element index of F_{F.q}")
    return c


@dataclass(frozen=True, eq=False)
class NormSpec:
    """The distance ``sum_i a_i (x_i - y_i)^s`` with all ``a_i`` nonzero."""

    space: Space
    s: int = 2
    a: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.s < 2:
            raise UsageError(f"exponent s must be >= 2, got {self.s}")
        a = (1,) * self.space.d if self.a is None else self.space.vector(self.a)
        if any(c == 0 for c in a):
            raise UsageError("all norm coefficients must be nonzero")
        object.__setattr__(self, "a", a)

    @classmethod
    def usual(cls, space: Space) -> NormSpec:
        return cls(space, 2, None)

    @property
    def field(self) -> Field:
        return self.space.field

    @property
    def is_usual(self) -> bool:
        return self.s == 2 and all(c == 1 for c in self.a)

    def __eq__(self, other):
        return (
            isinstance(other, NormSpec)
            and (self.space, self.s, self.a) == (other.space, other.s, other.a)
        )

    def __hash__(self):
        return hash((self.space, self.s, self.a))

    @cached_property
    def _term_tables(self) -> list[np.ndarray]:
        F = self.field
        powers = F.power_table(self.s)
        return [F.scale_table(c)[powers] for c in self.a]

    def of_differences(self, diffs: np.ndarray) -> np.ndarray:
        """Norm values for an (..., d) array of difference coordinates."""
        F = self.field
        tables = self._term_tables
        out = tables[0][diffs[..., 0]]
        for j in range(1, self.space.d):
            out = F.add(out, tables[j][diffs[..., j]])
        return out

    def pairwise(self, xc: np.ndarray, yc: np.ndarray) -> np.ndarray:
        """(len(xc), len(yc)) array of ||x - y||_s."""
        F = self.field
        diffs = F.sub(xc[:, None, :], yc[None, :, :])
        return self.of_differences(diffs)

    @cached_property
    def table(self) -> np.ndarray:
        """Norm of every point w of F_q^d (i.e. ||w - 0||_s), by point index."""
        self.space.check_dense("norm table")
        return self.of_differences(self.space.coords(np.arange(self.space.size)))


class PointSet:
    """A duplicate-free set of points of F_q^d, kept as sorted point indices."""

    __slots__ = ("space", "idx", "_coords", "_indicator")

    def __init__(self, space: Space, indices=()):
        idx = np.unique(np.asarray(indices, dtype=np.int64).reshape(-1))
        if idx.size and (idx[0] < 0 or idx[-1] >= space.size):
            raise UsageError("point index outside F_q^d")
        self.space = space
        self.idx = idx
        self.idx.flags.writeable = False
        self._coords = None
        self._indicator = None

    @classmethod
    def from_vectors(cls, space: Space, vectors: Iterable) -> PointSet:
        return cls(space, [space.index(v) for v in vectors])

    @classmethod
    def full(cls, space: Space) -> PointSet:
        return cls(space, np.arange(space.size))

    @property
    def coords(self) -> np.ndarray:
        if self._coords is None:
            self._coords = self.space.coords(self.idx)
        return self._coords

    def indicator(self) -> np.ndarray:
        if self._indicator is None:
            self.space.check_dense("indicator")
            ind = np.zeros(self.space.size, dtype=bool)
            ind[self.idx] = True
            self._indicator = ind
        return self._indicator

    def __len__(self):
        return int(self.idx.size)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.coords:
            yield tuple(int(c) for c in row)

    def __contains__(self, v) -> bool:
        i = self.space.index(v)
        j = np.searchsorted(self.idx, i)
        return bool(j < self.idx.size and self.idx[j] == i)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.space == other.space
            and np.array_equal(self.idx, other.idx)
        )

    def __hash__(self):
        return hash((self.space, self.idx.tobytes()))

    def __repr__(self):
        return f"PointSet(F_{self.space.q}^{self.space.d}, {len(self)} points)"

    def union(self, other: PointSet) -> PointSet:
        _same_space(self.space, other.space)
        return PointSet(self.space, np.union1d(self.idx, other.idx))

    def translate(self, c) -> PointSet:
        c = np.array(self.space.vector(c), dtype=np.int64)
        return PointSet(self.space, self.space.indices(self.space.field.add(self.coords, c)))

    def scale(self, lam) -> PointSet:
        lam = _elem_index(self.space.field, lam)
        F = self.space.field
        return PointSet(self.space, self.space.indices(F.mul(lam, self.coords)))


class PairSet:
    """A duplicate-free subset E of F_q^d x F_q^d.

    Stored as sorted codes ``i1 * q^d + i2`` of point-index pairs.
    """

    __slots__ = ("space", "codes")

    def __init__(self, space: Space, codes=()):
        n = space.size
        codes = np.unique(np.asarray(codes, dtype=np.int64).reshape(-1))
        if codes.size and (codes[0] < 0 or codes[-1] >= n * n):
            raise UsageError("pair code outside F_q^d x F_q^d")
        self.space = space
        self.codes = codes
        self.codes.flags.writeable = False

    @classmethod
    def from_pairs(cls, space: Space, pairs: Iterable[tuple]) -> PairSet:
        n = space.size
        return cls(space, [space.index(x) * n + space.index(y) for x, y in pairs])

    @classmethod
    def from_index_pairs(cls, space: Space, first, second) -> PairSet:
        first = np.asarray(first, dtype=np.int64)
        second = np.asarray(second, dtype=np.int64)
        return cls(space, first * space.size + second)

    @classmethod
    def product(cls, A: PointSet, B: PointSet) -> PairSet:
        _same_space(A.space, B.space)
        return cls(A.space, (A.idx[:, None] * A.space.size + B.idx[None, :]).reshape(-1))

    @property
    def first(self) -> np.ndarray:
        return self.codes // self.space.size

    @property
    def second(self) -> np.ndarray:
        return self.codes % self.space.size

    def __len__(self):
        return int(self.codes.size)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        c1 = self.space.coords(self.first)
        c2 = self.space.coords(self.second)
        for a, b in zip(c1, c2):
            yield tuple(int(v) for v in a), tuple(int(v) for v in b)

    def __contains__(self, pair) -> bool:
        x, y = pair
        code = self.space.index(x) * self.space.size + self.space.index(y)
        j = np.searchsorted(self.codes, code)
        return bool(j < self.codes.size and self.codes[j] == code)

    def __eq__(self, other):
        return (
            isinstance(other, PairSet)
            and self.space == other.space
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self):
        return hash((self.space, self.codes.tobytes()))

    def __repr__(self):
        return f"PairSet(F_{self.space.q}^{self.space.d} x F_{self.space.q}^{self.space.d}, {len(self)} pairs)"


def _same_space(a: Space, b: Space) -> None:
    if a != b:
        raise UsageError(f"mismatched spaces: F_{a.q}^{a.d} vs F_{b.q}^{b.d}")


def _check_norm(space: Space, n: NormSpec) -> None:
    if n.space != space:
        raise UsageError("norm and point set live in different spaces")


def norm_s(x: Sequence, y: Sequence, n: NormSpec) -> FieldElement:
    """Scalar ``sum_i a_i (x_i - y_i)^s`` evaluated with ``FieldElement`` arithmetic."""
    F = n.field
    xs = n.space.vector(x)
    ys = n.space.vector(y)
    total = F.zero
    for ai, xi, yi in zip(n.a, xs, ys):
        total = total + F(ai) * (F(xi) - F(yi)) ** n.s
    return total


def _pair_blocks(X: PointSet, Y: PointSet, n: NormSpec):
    """Yield (row offset, block of ||x - y||_s) over row blocks of X."""
    _same_space(X.space, Y.space)
    _check_norm(X.space, n)
    if not len(X) or not len(Y):
        return
    rows = max(1, BLOCK // len(Y))
    xc, yc = X.coords, Y.coords
    for start in range(0, len(X), rows):
        yield start, n.pairwise(xc[start : start + rows], yc)


def distance_values(X: PointSet, Y: PointSet, n: NormSpec) -> np.ndarray:
    """Sorted array of element indices attained by ||x - y||_s."""
    seen = np.zeros(n.field.q, dtype=bool)
    for _, block in _pair_blocks(X, Y, n):
        seen[block.reshape(-1)] = True
    return np.flatnonzero(seen)


def distance_set(X: PointSet, Y: PointSet, n: NormSpec) -> frozenset[int]:
    """The set {||x - y||_s : x in X, y in Y} as element indices."""
    return frozenset(int(u) for u in distance_values(X, Y, n))


def _two_param_mask(E: PairSet, n: NormSpec) -> np.ndarray:
    space = E.space
    _check_norm(space, n)
    q = space.q
    seen = np.zeros(q * q, dtype=bool)
    m = len(E)
    if not m:
        return seen
    c1 = space.coords(E.first)
    c2 = space.coords(E.second)
    rows = max(1, BLOCK // m)
    for start in range(0, m, rows):
        v = n.pairwise(c1[start : start + rows], c1)
        u = n.pairwise(c2[start : start + rows], c2)
        seen[(v * q + u).reshape(-1)] = True
    return seen


def two_param_distance_set(E: PairSet, n: NormSpec) -> frozenset[tuple[int, int]]:
    """{(||x1 - y1||_s, ||x2 - y2||_s) : (x1, x2), (y1, y2) in E}."""
    q = E.space.q
    return frozenset(divmod(int(c), q) for c in np.flatnonzero(_two_param_mask(E, n)))


def two_param_size(E: PairSet, n: NormSpec) -> int:
    return int(_two_param_mask(E, n).sum())


def sphere(r, n: NormSpec) -> PointSet:
    """{w in F_q^d : ||w - 0||_s = r}."""
    r = _elem_index(n.field, r)
    return PointSet(n.space, np.flatnonzero(n.table == r))


def fibers(E: PairSet) -> dict[tuple[int, ...], PointSet]:
    """Map each y with a nonempty fiber to E_y = {x : (x, y) in E}."""
    space = E.space
    first, second = E.first, E.second
    order = np.argsort(second, kind="stable")
    second_sorted = second[order]
    keys, starts = np.unique(second_sorted, return_index=True)
    bounds = list(starts[1:]) + [second_sorted.size]
    out = {}
    for key, lo, hi in zip(keys, starts, bounds):
        vec = tuple(int(c) for c in space.coords(int(key)))
        out[vec] = PointSet(space, first[order[lo:hi]])
    return out


def fiber_sizes(E: PairSet) -> tuple[np.ndarray, np.ndarray]:
    """(base point indices, fiber sizes) for every nonempty fiber, sorted by base."""
    keys, counts = np.unique(E.second, return_counts=True)
    return keys, counts
