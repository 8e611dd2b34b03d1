import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import F3, F5, random_norm, random_points
from ffdist import (
    ConsistencyError,
    NormSpec,
    PairSet,
    PointSet,
    Space,
    UsageError,
    certify,
    coverage_ratio,
    default_tau,
    heavy_fibers,
    two_param_distance_set,
)

S3 = Space(F3, 2)
USUAL3 = NormSpec.usual(S3)
E3 = PairSet.from_pairs(S3, [((0, 0), (0, 0)), ((1, 0), (0, 0)), ((0, 0), (1, 1))])


def test_heavy_fibers_examples(rng):
    A = random_points(rng, S3, 4)
    B = random_points(rng, S3, 5)
    assert heavy_fibers(PairSet.product(A, B), len(A) - 1).heavy == B
    assert len(heavy_fibers(E3, 2).heavy) == 0
    dec = heavy_fibers(E3, 1)
    assert list(dec.heavy) == [(0, 0)]
    assert dec.fiber_sizes == {(0, 0): 2, (1, 1): 1}


def test_pigeonhole_bound_reported():
    space = Space(F3, 2)
    E = PairSet(space, range(81))  # full space: every fiber has size 9
    dec = heavy_fibers(E, 3)
    # ceil((81 - 3 * 9) / 9) = 6
    assert dec.pigeonhole_bound == 6
    assert len(dec.heavy) == 9
    assert len(heavy_fibers(E, 9).heavy) == 0
    assert heavy_fibers(E, 9).pigeonhole_bound == 0
    with pytest.raises(UsageError):
        heavy_fibers(E, -1)


def test_default_tau_examples():
    assert default_tau(3, 2, 2) == 5
    assert default_tau(4, 3, 2) == 16
    assert default_tau(3, 2, Fraction(1, 10**6)) == 0
    assert default_tau(5, 2, 2) == 11
    with pytest.raises(UsageError):
        default_tau(3, 2, 0)


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (7, 2), (9, 2), (3, 3), (11, 4), (13, 2)])
@pytest.mark.parametrize("C", [Fraction(1), Fraction(2), Fraction(7, 3), Fraction(1, 5)])
def test_default_tau_exact_floor(q, d, C):
    tau = default_tau(q, d, C)
    # tau is the largest integer with tau <= (C/2) q^((d+1)/2), checked by squaring
    x2 = (C / 2) ** 2 * q ** (d + 1)
    assert tau**2 <= x2 < (tau + 1) ** 2


def test_certify_product_is_exhaustive(rng):
    for _ in range(5):
        n = random_norm(rng, S3)
        A = random_points(rng, S3, rng.randint(2, 9))
        B = random_points(rng, S3, rng.randint(1, 9))
        E = PairSet.product(A, B)
        cert = certify(E, n, len(A) - 1)
        assert cert.certified_pairs == two_param_distance_set(E, n)
        assert coverage_ratio(cert, E, n) == 1


def test_certify_empty_heavy():
    cert = certify(E3, USUAL3, 5)
    assert cert.entries == () and cert.certified_pairs == frozenset()
    assert cert.min_witness_size is None


def test_certify_singleton():
    E = PairSet.from_pairs(S3, [((1, 2), (2, 0))])
    cert = certify(E, USUAL3, 0)
    assert cert.certified_pairs == {(0, 0)}
    assert coverage_ratio(cert, E, USUAL3) == 1


def test_certify_random_is_sound():
    rng = random.Random(47)
    n = USUAL3
    tau = default_tau(3, 2, 2)
    for _ in range(10):
        E = PairSet(S3, rng.sample(range(81), 47))
        cert = certify(E, n, tau)
        brute = oracles.two_param(list(E), F3, n.s, n.a)
        assert cert.certified_pairs <= brute
        assert cert.verify(E) == len(cert.certified_pairs)


def test_tie_breaking_is_lexicographic():
    rng = random.Random(2)
    space = Space(F5, 2)
    n = NormSpec.usual(space)
    E = PairSet(space, rng.sample(range(625), 400))
    cert = certify(E, n, 3)
    heavy = sorted(heavy_fibers(E, 3).heavy)
    for e in cert.entries:
        first = min(
            (z, t) for z in heavy for t in heavy
            if oracles.norm(z, t, space.field, 2, (1, 1)) == e.u
        )
        assert (e.z, e.t) == first


def test_deterministic():
    rng = random.Random(9)
    space = Space(F5, 2)
    E = PairSet(space, rng.sample(range(625), 300))
    n = NormSpec(space, 3, (1, 2))
    a, b = certify(E, n, 2), certify(E, n, 2)
    assert a == b and a.to_text() == b.to_text()


def test_exhaustive_mode_dominates():
    rng = random.Random(4)
    space = Space(F5, 2)
    n = NormSpec.usual(space)
    for _ in range(5):
        E = PairSet(space, rng.sample(range(625), 250))
        single = certify(E, n, 3)
        full = certify(E, n, 3, exhaustive=True)
        assert single.certified_pairs <= full.certified_pairs
        assert full.verify(E) == len(full.certified_pairs)
        assert full.certified_pairs <= two_param_distance_set(E, n)


def test_coverage_ratio_dense_q5():
    rng = random.Random(8)
    space = Space(F5, 2)
    n = NormSpec.usual(space)
    E = PairSet(space, rng.sample(range(625), 300))
    cert = certify(E, n, 0)
    r = coverage_ratio(cert, E, n)
    assert 0 <= r <= 1


def test_provenance_checked():
    other = PairSet.from_pairs(S3, [((0, 0), (0, 0))])
    cert = certify(E3, USUAL3, 0)
    with pytest.raises(UsageError):
        coverage_ratio(cert, other, USUAL3)
    with pytest.raises(UsageError):
        coverage_ratio(cert, E3, NormSpec(S3, 3))
    with pytest.raises(UsageError):
        cert.verify(other)


def test_tampered_certificate_detected():
    from dataclasses import replace

    cert = certify(E3, USUAL3, 0)
    bad = replace(cert.entries[0], values_v=(0, 1, 2))
    forged = replace(cert, entries=(bad,) + cert.entries[1:])
    with pytest.raises(ConsistencyError):
        forged.verify(E3)


def test_text_form():
    cert = certify(E3, USUAL3, 0)
    lines = cert.to_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1:] == ["0 ; 0 0 ; 0 0 ; 0 1", "2 ; 0 0 ; 1 1 ; 0 1"]


pair_sets = st.builds(
    lambda idx: PairSet(S3, idx), st.lists(st.integers(0, 80), max_size=300)
)


@given(pair_sets, st.integers(0, 10), st.integers(0, 10))
def test_pigeonhole_and_monotonicity(E, t1, t2):
    t1, t2 = min(t1, t2), max(t1, t2)
    h1, h2 = heavy_fibers(E, t1), heavy_fibers(E, t2)
    qd = S3.size
    assert len(E) <= qd * len(h2.heavy) + t2 * qd
    assert set(h2.heavy) <= set(h1.heavy)
    assert sum(h1.fiber_sizes.values()) == len(E)
    for y, m in h1.fiber_sizes.items():
        assert (y in h1.heavy) == (m > t1)
