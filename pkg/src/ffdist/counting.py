"""Exact distance spectra, distance energy, and isosceles triple counts.

For point sets X, Y the spectrum is r(u) = #{(x, y) in X x Y : ||x - y||_s = u}.
From it:

* |Delta(X, Y)| is the support size of r,
* Q = sum_u r(u)^2 counts quadruples (x, y, x', y') with equal distances,
* Cauchy-Schwarz gives |Delta| * Q >= (sum_u r(u))^2 = |X|^2 |Y|^2.

T counts (x, y, y') in X x Y x Y with ||x - y|| = ||x - y'|| and T' the same
over Z^3, Z = X u Y.  Then Q <= |X| T and T <= T'.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError
from .geometry import NormSpec, PointSet, _pair_blocks, _same_space, _check_norm

# largest allowed distance from an integer after the floating transform
ROUNDING_GUARD = 0.25


@dataclass(frozen=True, eq=False)
class DistanceSpectrum:
    counts: np.ndarray  # counts[u] = r(u), indexed by element index
    nX: int
    nY: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.nX * self.nY:
            raise ConsistencyError(
                f"spectrum total {int(self.counts.sum())} != {self.nX} * {self.nY}"
            )

    def __getitem__(self, u) -> int:
        return int(self.counts[int(u)])

    def __eq__(self, other):
        return (
            isinstance(other, DistanceSpectrum)
            and (self.nX, self.nY) == (other.nX, other.nY)
            and np.array_equal(self.counts, other.counts)
        )

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.counts))

    def as_dict(self) -> dict[int, int]:
        return {int(u): int(c) for u, c in enumerate(self.counts) if c}


def spectrum_naive(X: PointSet, Y: PointSet, n: NormSpec) -> DistanceSpectrum:
    """r(u) by direct enumeration of all |X||Y| ordered pairs."""
    counts = np.zeros(n.field.q, dtype=np.int64)
    for _, block in _pair_blocks(X, Y, n):
        counts += np.bincount(block.reshape(-1), minlength=n.field.q)
    return DistanceSpectrum(counts, len(X), len(Y))


def difference_counts(X: PointSet, Y: PointSet) -> np.ndarray:
    """c(w) = #{(x, y) in X x Y : x - y = w} for every w in F_q^d.

    F_q^d is additively (Z_p)^(kd): the indicator tables are reshaped to a
    kd-dimensional cube of side p and correlated with an n-dimensional FFT.
    """
    _same_space(X.space, Y.space)
    space = X.space
    space.check_dense("difference transform")
    F = space.field
    # C-order axes run over (coordinate 1 digit k-1, ..., coordinate d digit 0)
    shape = (F.p,) * (F.k * space.d)
    a = X.indicator().reshape(shape).astype(np.float64)
    b = Y.indicator().reshape(shape).astype(np.float64)
    corr = np.fft.ifftn(np.fft.fftn(a) * np.conj(np.fft.fftn(b))).real
    rounded = np.rint(corr)
    err = np.abs(corr - rounded).max(initial=0.0)
    if err > ROUNDING_GUARD:
        raise ConsistencyError(f"transform rounding error {err:.3g} exceeds {ROUNDING_GUARD}")
    return rounded.astype(np.int64).reshape(-1)


def spectrum_fft(X: PointSet, Y: PointSet, n: NormSpec) -> DistanceSpectrum:
    """r(u) = sum of c(w) over the sphere ||w||_s = u, with c from the transform."""
    _check_norm(X.space, n)
    c = difference_counts(X, Y)
    counts = np.zeros(n.field.q, dtype=np.int64)
    np.add.at(counts, n.table, c)
    return DistanceSpectrum(counts, len(X), len(Y))


def quadruple_count(spec: DistanceSpectrum) -> int:
    return sum(int(c) * int(c) for c in spec.counts)


def _apex_energy(A: PointSet, B: PointSet, n: NormSpec) -> int:
    """sum over a in A of sum_u f_a(u)^2, f_a(u) = #{b in B : ||a - b|| = u}."""
    q = n.field.q
    total = 0
    for _, block in _pair_blocks(A, B, n):
        rows = block.shape[0]
        codes = np.arange(rows, dtype=np.int64)[:, None] * q + block
        hist = np.bincount(codes.reshape(-1), minlength=rows * q)
        total += int(np.dot(hist, hist))
    return total


def triple_count(X: PointSet, Y: PointSet, n: NormSpec) -> int:
    """T = #{(x, y, y') in X x Y x Y : ||x - y||_s = ||x - y'||_s}."""
    return _apex_energy(X, Y, n)


def union_triple_count(X: PointSet, Y: PointSet, n: NormSpec) -> tuple[PointSet, int]:
    """(Z, T') with Z = X u Y and T' the isosceles triple count over Z^3."""
    Z = X.union(Y)
    return Z, _apex_energy(Z, Z, n)


def pham_rhs(z: int, p: int) -> float:
    return z**3 / p + p ** (2 / 3) * z ** (5 / 3) + p ** (1 / 4) * z**2


@dataclass(frozen=True)
class ChainReport:
    nX: int
    nY: int
    nZ: int
    delta: int
    Q: int
    T: int
    Tprime: int
    cs_lower: Fraction
    pham_rhs: float | None = None
    pham_ratio: float | None = None

    def check(self) -> None:
        """Re-assert the exact inequalities; raises ConsistencyError."""
        if self.delta * self.Q < self.nX**2 * self.nY**2:
            raise ConsistencyError(f"|Delta| * Q < |X|^2 |Y|^2 in {self}")
        if self.Q > self.nX * self.T:
            raise ConsistencyError(f"Q > |X| * T in {self}")
        if self.T > self.Tprime:
            raise ConsistencyError(f"T > T' in {self}")


def pham_applies(n: NormSpec) -> bool:
    """The T' bound is stated for the usual distance on F_p^2 only."""
    return n.field.k == 1 and n.space.d == 2 and n.is_usual


def chain_report(X: PointSet, Y: PointSet, n: NormSpec) -> ChainReport:
    spec = spectrum_naive(X, Y, n)
    Q = quadruple_count(spec)
    T = triple_count(X, Y, n)
    Z, Tp = union_triple_count(X, Y, n)
    nX, nY = len(X), len(Y)
    cs = Fraction(nX**2 * nY**2, Q) if Q else Fraction(0)
    rhs = ratio = None
    if pham_applies(n) and len(Z):
        rhs = pham_rhs(len(Z), n.field.p)
        ratio = float(f"{Tp / rhs:.6g}")
    report = ChainReport(nX, nY, len(Z), spec.support_size, Q, T, Tp, cs, rhs, ratio)
    report.check()
    return report
