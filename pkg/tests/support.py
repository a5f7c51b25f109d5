"""Shared builders for the tests: random relabellings that preserve every
intersection count, and small cached ingredient pools."""

from __future__ import annotations

import random
from functools import lru_cache

from triplex import constructions as cons
from triplex import latin
from triplex.core import FlowerIntersectionCertificate, TripleSystem, canon


def relabel_cert(cert: FlowerIntersectionCertificate, rng: random.Random) -> FlowerIntersectionCertificate:
    perm = list(range(cert.v))
    rng.shuffle(perm)
    systems = [[canon(perm[p] for p in b) for b in s] for s in cert.systems]
    return FlowerIntersectionCertificate(cert.v, systems, perm[cert.flower_point], cert.claimed_k)


def relabel_plain(t: cons.PlainTriple, rng: random.Random) -> cons.PlainTriple:
    perm = list(range(t.v))
    rng.shuffle(perm)
    return cons.PlainTriple.of(t.v, [TripleSystem(t.v, [[perm[p] for p in b] for b in s]) for s in t.systems])


def isotope(t: latin.LatinTriple, rng: random.Random) -> latin.LatinTriple:
    """Same row, column and symbol permutation on all three squares."""
    n = t.n
    rows, cols, syms = (rng.sample(range(n), n) for _ in range(3))
    out = []
    for s in t.squares:
        out.append(latin.LatinSquare([[syms[s.rows[rows[i]][cols[j]]] for j in range(n)] for i in range(n)]))
    return latin.LatinTriple.of(*out)


@lru_cache(maxsize=None)
def plain(v: int, a: int) -> cons.PlainTriple:
    return cons.realize_plain_3way(v, a)


@lru_cache(maxsize=None)
def flower(r: int, k: int) -> FlowerIntersectionCertificate:
    if k == 0:
        return cons.flower_only(r)
    return cons.identity_max(r)


@lru_cache(maxsize=None)
def latin_triple(n: int, k: int) -> latin.LatinTriple:
    return latin.realize_three_way(n, k)


def small_flower_values(r: int):
    return {3: [4], 4: [0, 8]}[r]
