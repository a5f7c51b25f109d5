"""Arithmetic in GF(q) for prime powers q.

Elements are the integers 0..q-1, read as base-p coefficient vectors of a
polynomial (least significant digit = constant term). Multiplication
reduces modulo a fixed monic irreducible polynomial.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

# coefficients low -> high, monic; orders up to 32
IRREDUCIBLE = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (1, 0, 1),
    16: (1, 1, 0, 0, 1),
    25: (2, 1, 1),
    27: (1, 2, 0, 1),
    32: (1, 0, 1, 0, 0, 1),
}


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, m) with q = p**m, or None."""
    if q < 2:
        return None
    p = next(d for d in itertools.count(2) if q % d == 0)
    m, x = 0, q
    while x % p == 0:
        x //= p
        m += 1
    return (p, m) if x == 1 else None


def _polymulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    deg = len(mod) - 1
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            for j in range(deg + 1):
                out[i - deg + j] = (out[i - deg + j] - c * mod[j]) % p
    return out[:deg] + [0] * (deg - len(out[:deg]))


def _is_irreducible(poly, p):
    deg = len(poly) - 1
    # brute force: no monic factor of degree 1..deg//2
    for d in range(1, deg // 2 + 1):
        for coeffs in itertools.product(range(p), repeat=d):
            f = list(coeffs) + [1]
            if _polymod(poly, f, p) == [0] * d:
                return False
    return True


def _polymod(a, f, p):
    a = list(a)
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return a[:df]


def irreducible(p: int, m: int) -> tuple[int, ...]:
    q = p**m
    if q in IRREDUCIBLE:
        return IRREDUCIBLE[q]
    # lexicographically first monic irreducible beyond the table
    for coeffs in itertools.product(range(p), repeat=m):
        poly = tuple(reversed(coeffs)) + (1,)
        if poly[0] and _is_irreducible(poly, p):
            return poly
    raise ValueError(q)


@lru_cache(maxsize=None)
def tables(q: int) -> tuple[np.ndarray, np.ndarray]:
    """(addition, multiplication) tables of GF(q) as int arrays."""
    pm = prime_power(q)
    if pm is None:
        raise ValueError(f"{q} is not a prime power")
    p, m = pm
    if m == 1:
        r = np.arange(q)
        return (r[:, None] + r[None, :]) % q, (r[:, None] * r[None, :]) % q
    digits = [[(x // p**i) % p for i in range(m)] for x in range(q)]
    value = lambda ds: sum(d * p**i for i, d in enumerate(ds))  # noqa: E731
    mod = irreducible(p, m)
    add = np.zeros((q, q), dtype=int)
    mul = np.zeros((q, q), dtype=int)
    for a in range(q):
        for b in range(q):
            add[a, b] = value([(x + y) % p for x, y in zip(digits[a], digits[b])])
            mul[a, b] = value(_polymulmod(digits[a], digits[b], mod, p))
    return add, mul
