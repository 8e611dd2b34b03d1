"""Brute-force reference implementations.

Everything here uses scalar FieldElement arithmetic and plain loops, never the
numpy tables used by the library paths under test.
"""

from collections import Counter
from itertools import product


def norm(x, y, F, s, a):
    total = F.zero
    for ai, xi, yi in zip(a, x, y):
        total = total + F(ai) * (F(xi) - F(yi)) ** s
    return total.index


def all_vectors(F, d):
    return [tuple(v) for v in product(range(F.q), repeat=d)]


def spectrum(X, Y, F, s, a):
    return Counter(norm(x, y, F, s, a) for x in X for y in Y)


def distance_set(X, Y, F, s, a):
    return {norm(x, y, F, s, a) for x in X for y in Y}


def two_param(E, F, s, a):
    return {
        (norm(x1, y1, F, s, a), norm(x2, y2, F, s, a)) for (x1, x2) in E for (y1, y2) in E
    }


def quadruples(X, Y, F, s, a):
    dists = [norm(x, y, F, s, a) for x in X for y in Y]
    return sum(1 for d1 in dists for d2 in dists if d1 == d2)


def triples(X, Y, F, s, a):
    return sum(
        1 for x in X for y in Y for y2 in Y if norm(x, y, F, s, a) == norm(x, y2, F, s, a)
    )
