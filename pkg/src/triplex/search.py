"""Brute-force oracles and stochastic searches.

The exhaustive routines here recompute small spectra from scratch and share
no code with the recursive constructions, so they can be used to check them.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import exactcover, spectra
from .core import (
    FlowerIntersectionCertificate,
    Permutation,
    TripleSystem,
    canon,
    flower_intersection_number,
    flower_of,
    steiner_system,
)


class SearchFailed(Exception):
    """A budgeted search gave up. Not a proof of non-existence."""

    def __init__(self, what, spent=None):
        self.what, self.spent = what, spent
        super().__init__(f"unrealized: {what}" + (f" after {spent} moves" if spent is not None else ""))


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    budget: int = 10**7
    restarts: int = 50
    time_limit: float | None = None
    canonicalize: bool = True

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")

    def rng(self, salt=0) -> random.Random:
        return random.Random(self.seed * 1_000_003 + salt)


# -- exhaustive enumeration -----------------------------------------------------

@lru_cache(maxsize=None)
def _all_sts(v: int) -> tuple[tuple, ...]:
    triples = list(itertools.combinations(range(v), 3))
    options = {b: tuple(itertools.combinations(b, 2)) for b in triples}
    pairs = list(itertools.combinations(range(v), 2))
    return tuple(tuple(sorted(sol)) for sol in exactcover.solve(options, pairs))


def enumerate_all_sts(v: int) -> list[TripleSystem]:
    """Every labelled STS(v) on 0..v-1, for v in {7, 9}."""
    if v not in (7, 9):
        raise ValueError(f"enumeration supports v in {{7, 9}}, not {v}")
    return [TripleSystem(v, blocks) for blocks in _all_sts(v)]


def exhaustive_flower_spectrum(r: int, witnesses: bool = False):
    """All k with three STS(2r+1) sharing a flower and pairwise-identical
    intersections of size k + r; r in {3, 4}.

    Systems are grouped by their flower at point 0. Any valid triple can be
    relabelled to have its common flower there, so nothing is missed.
    """
    if r not in (3, 4):
        raise ValueError("exhaustive flower spectrum is limited to r in {3, 4}")
    v = 2 * r + 1
    groups: dict = {}
    for blocks in _all_sts(v):
        flower = tuple(b for b in blocks if b[0] == 0)
        groups.setdefault(flower, []).append(frozenset(blocks))
    found: dict = {}
    for flower, systems in groups.items():
        for s1, s2, s3 in itertools.combinations_with_replacement(systems, 3):
            i12 = s1 & s2
            if i12 == s1 & s3 == s2 & s3:
                k = len(i12) - r
                found.setdefault(k, (flower, s1, s2, s3))
    if witnesses:
        return {
            k: FlowerIntersectionCertificate(v, [sorted(s1), sorted(s2), sorted(s3)], 0, k)
            for k, (_, s1, s2, s3) in found.items()
        }
    return frozenset(found)


@lru_cache(maxsize=None)
def all_latin_squares(n: int) -> np.ndarray:
    """Every Latin square of order n as an (N, n, n) array."""
    out = []
    grid = [[-1] * n for _ in range(n)]

    def fill(c):
        if c == n * n:
            out.append([row[:] for row in grid])
            return
        i, j = divmod(c, n)
        used = set(grid[i][:j]) | {grid[x][j] for x in range(i)}
        for s in range(n):
            if s not in used:
                grid[i][j] = s
                fill(c + 1)
        grid[i][j] = -1

    fill(0)
    return np.array(out, dtype=np.int8).reshape(-1, n, n)


def _reduced(squares: np.ndarray) -> np.ndarray:
    n = squares.shape[1]
    ident = np.arange(n)
    mask = (squares[:, 0, :] == ident).all(axis=1) & (squares[:, :, 0] == ident).all(axis=1)
    return squares[mask]


def _latin_3way_scan(n: int) -> dict:
    """k -> witness (three squares as nested tuples)."""
    if not 1 <= n <= 4:
        raise ValueError("exhaustive Latin search is limited to n <= 4")
    allsq = all_latin_squares(n).reshape(-1, n * n)
    found: dict = {}
    # simultaneous row/column/symbol permutations preserve the agreement
    # pattern, so the first square may be taken reduced
    for first in _reduced(all_latin_squares(n)).reshape(-1, n * n):
        e1 = allsq == first  # (N, n*n): square b agrees with the first
        for bi in range(len(allsq)):
            e12 = e1[bi]
            e23 = allsq == allsq[bi]
            e13 = e1
            same = e12[None, :] & e13
            differ = ~e12[None, :] & ~e13 & ~e23
            ok = (same | differ).all(axis=1)
            for ci in np.nonzero(ok)[0]:
                k = int(same[ci].sum())
                if k not in found:
                    found[k] = tuple(
                        tuple(tuple(int(x) for x in sq.reshape(n, n)[i]) for i in range(n))
                        for sq in (first, allsq[bi], allsq[ci])
                    )
    return found


@lru_cache(maxsize=None)
def exhaustive_latin_3way_witnesses(n: int) -> dict:
    return _latin_3way_scan(n)


def exhaustive_latin_3way(n: int) -> frozenset[int]:
    """Every 3-way agreement count for Latin squares of order n <= 4."""
    return frozenset(exhaustive_latin_3way_witnesses(n))


# -- hill-climbing for triple systems ------------------------------------------

def hillclimb_sts(v: int, fixed=(), forbidden=frozenset(), rng: random.Random | None = None,
                  budget: int = 10**6):
    """Stinson-style hill-climb for an STS(v) containing the ``fixed`` blocks
    and avoiding ``forbidden``. Returns (blocks, moves) or (None, moves)."""
    rng = rng or random.Random(0)
    forbidden = {canon(b) for b in forbidden}
    fixed = [canon(b) for b in fixed]
    covered: dict = {}
    free = [set(range(v)) - {x} for x in range(v)]
    for b in fixed:
        for x, y in itertools.combinations(b, 2):
            if (x, y) in covered:
                raise ValueError(f"fixed blocks overlap on pair {(x, y)}")
            covered[(x, y)] = b
            free[x].discard(y)
            free[y].discard(x)
    fixed_set = set(fixed)
    target = v * (v - 1) // 6
    blocks = set(fixed)
    live = [x for x in range(v) if free[x]]
    moves = 0
    while moves < budget:
        if len(blocks) == target:
            return sorted(blocks), moves
        moves += 1
        live = [x for x in range(v) if free[x]] if moves % 8 == 1 or not live else live
        x = rng.choice(live)
        if not free[x]:
            live = [p for p in range(v) if free[p]]
            continue
        nb = list(free[x])
        if len(nb) < 2:
            live = [p for p in range(v) if free[p]]
            continue
        y, z = rng.sample(nb, 2)
        new = canon((x, y, z))
        if new in forbidden:
            continue
        yz = (min(y, z), max(y, z))
        old = covered.get(yz)
        if old is not None:
            if old in fixed_set:
                continue
            blocks.discard(old)
            for a, b in itertools.combinations(old, 2):
                del covered[(a, b)]
                free[a].add(b)
                free[b].add(a)
        blocks.add(new)
        for a, b in itertools.combinations(new, 2):
            covered[(a, b)] = new
            free[a].discard(b)
            free[b].discard(a)
    return None, moves


def hillclimb_common_triple(v: int, common, config: SearchConfig = SearchConfig(), salt: int = 0):
    """Three STS(v) whose pairwise intersections all equal ``common``.

    Built one after another: each later system must contain ``common`` and
    avoid every other block already used. Returns three block lists.
    """
    common = sorted({canon(b) for b in common})
    spent = 0
    per = max(10_000, min(config.budget // max(1, config.restarts), 2_000_000))
    for attempt in range(config.restarts):
        rng = config.rng(salt * 7919 + attempt)
        systems, used = [], set()
        for _ in range(3):
            blocks, moves = hillclimb_sts(v, common, used - set(common), rng, per)
            spent += moves
            if blocks is None:
                break
            systems.append(blocks)
            used |= set(blocks)
        if len(systems) == 3:
            return systems
        if spent >= config.budget:
            break
    raise SearchFailed(f"three STS({v}) through {len(common)} common blocks", spent)


def _flower_groups(r: int):
    """Groups (flower pairs) of the 3-GDD of type 2^r, points 1..2r."""
    return [(2 * i + 1, 2 * i + 2) for i in range(r)]


def hillclimb_disjoint_gdd_triple(r: int, config: SearchConfig = SearchConfig()):
    """Three pairwise block-disjoint 3-GDDs of type 2^r on fixed groups.

    Each GDD is grown as an STS(2r+1) through the fixed flower at point 0
    (a 3-GDD of type 2^r plus that flower is an STS), later systems avoiding
    the blocks already used; the flower is then removed again.
    """
    from .pbd import GddTriple, gdd_from_flower

    if not spectra.admissible(r) or r < 1:
        raise ValueError(f"r={r} is not admissible")
    if 2 * (r - 2) < 3:
        # at most 2(r-2) pairwise disjoint such GDDs exist
        raise SearchFailed(f"r={r}: fewer than three disjoint 3-GDDs of type 2^{r} exist", 0)
    flower = [(0, a, b) for a, b in _flower_groups(r)]
    systems = hillclimb_common_triple(2 * r + 1, flower, config, salt=r)
    triple = GddTriple.of(*(gdd_from_flower(TripleSystem(2 * r + 1, s), 0) for s in systems))
    if not triple.disjoint:
        raise SearchFailed(f"r={r}: GDDs share {len(triple.common)} blocks")
    return triple


# -- permutation probing ---------------------------------------------------------

def _flower_preserving(src: TripleSystem, dst: TripleSystem, x: int, rng: random.Random) -> Permutation:
    """Random permutation fixing x and mapping src's flower at x onto dst's."""
    sp = [tuple(p for p in b if p != x) for b in flower_of(src, x).blocks]
    dp = [tuple(p for p in b if p != x) for b in flower_of(dst, x).blocks]
    rng.shuffle(dp)
    image = list(range(src.v))
    for (a, b), (c, d) in zip(sp, dp):
        if rng.random() < 0.5:
            c, d = d, c
        image[a], image[b] = c, d
    return Permutation(image)


def permutation_probe(first: TripleSystem, source: TripleSystem, flower_point: int, target: int,
                      config: SearchConfig = SearchConfig(), candidates=None):
    """Look for (pi, pi') with |first & pi(source) & pi'(source)|_F = target.

    ``candidates`` may list permutation pairs to test systematically;
    otherwise pairs are drawn at random among permutations carrying the
    source flower onto the first system's flower.
    """
    v = first.v
    r = (v - 1) // 2
    if target < 0 or target > spectra.max_flower_k(r):
        raise ValueError(f"target {target} exceeds the bound {spectra.max_flower_k(r)}")
    rng = config.rng(target)
    base = first.block_set
    x = flower_point

    def pairs():
        if candidates is not None:
            yield from candidates
            return
        while True:
            yield (_flower_preserving(source, first, x, rng), _flower_preserving(source, first, x, rng))

    deadline = time.monotonic() + config.time_limit if config.time_limit else None
    for tried, (p, q) in enumerate(pairs()):
        if tried >= config.budget or (deadline and time.monotonic() > deadline):
            break
        b2 = frozenset(canon(p.image[i] for i in b) for b in source.blocks)
        i12 = base & b2
        if len(i12) - r != target:
            continue
        b3 = frozenset(canon(q.image[i] for i in b) for b in source.blocks)
        if i12 == base & b3 == b2 & b3:
            cert = FlowerIntersectionCertificate(v, [sorted(base), sorted(b2), sorted(b3)], x, target)
            try:
                flower_intersection_number(cert)
            except Exception:
                continue
            return cert, (p, q)
    raise SearchFailed(f"no permutation pair reaching k={target}")


def search_flower_certificate(r: int, k: int, config: SearchConfig = SearchConfig()):
    """Flower certificate by hill-climbing around a prescribed common part:
    the flower at 0 plus k blocks of a random STS(2r+1)."""
    v = 2 * r + 1
    if k not in spectra.i3f(r):
        raise ValueError(f"{k} is not in I^3_F({r})")
    if k == spectra.max_flower_k(r):
        s = steiner_system(v)
        return FlowerIntersectionCertificate(v, [s, s, s], 0, k)
    spent = 0
    for attempt in range(config.restarts):
        rng = config.rng(10_007 * attempt + k)
        base, moves = hillclimb_sts(v, [], set(), rng, 10**6)
        spent += moves
        if base is None:
            continue
        x = rng.randrange(v)
        fl = [b for b in base if x in b]
        rest = [b for b in base if x not in b]
        common = fl + rng.sample(rest, k)
        sub = SearchConfig(config.seed + attempt, max(1, (config.budget - spent)), restarts=3)
        try:
            systems = hillclimb_common_triple(v, common, sub, salt=attempt)
        except SearchFailed as exc:
            spent += exc.spent or 0
            if spent >= config.budget:
                break
            continue
        cert = FlowerIntersectionCertificate(v, systems, x, k)
        flower_intersection_number(cert)
        return cert
    raise SearchFailed(f"flower certificate r={r}, k={k}", spent)


# -- trade search ------------------------------------------------------------------

def _triangles(edges, exclude):
    adj: dict = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    tris = set()
    for a, b in edges:
        for c in adj[a] & adj[b]:
            tris.add(canon((a, b, c)))
    return {t: tuple(itertools.combinations(t, 2)) for t in tris if t not in exclude}


def _two_mates(removed, rng, budget, stats):
    """Two block sets covering the pairs of ``removed``, disjoint from it and
    from each other, or None. ``stats["nodes"]`` counts the work done."""
    edges = sorted(p for b in removed for p in itertools.combinations(b, 2))
    opts = _triangles(edges, set(removed))
    tried, inner = 0, {}
    outer: dict = {}
    try:
        for t2 in exactcover.solve(opts, edges, rng=rng, budget=budget, stats=outer):
            tried += 1
            rest = {t: cs for t, cs in opts.items() if t not in set(t2)}
            try:
                t3 = exactcover.first(rest, edges, rng=rng, budget=budget, stats=inner)
            except exactcover.BudgetExhausted:
                t3 = None
            stats["nodes"] = stats.get("nodes", 0) + inner.get("nodes", 0)
            if t3 is not None:
                return t2, t3
            if tried >= 20:
                break
    except exactcover.BudgetExhausted:
        pass
    finally:
        stats["nodes"] = stats.get("nodes", 0) + outer.get("nodes", 0)
    return None


def _removal(blocks, points, need, rng, tries=60):
    """``need`` blocks: preferably every block through a few whole points,
    else the last point's blocks are cut short."""
    for _ in range(tries):
        pts = list(points)
        rng.shuffle(pts)
        removed: set = set()
        for p in pts:
            removed.update(b for b in blocks if p in b)
            if len(removed) >= need:
                break
        if len(removed) == need:
            return removed
    removed = set()
    for p in pts:
        add = [b for b in blocks if p in b and b not in removed]
        rng.shuffle(add)
        removed.update(add[:need - len(removed)])
        if len(removed) == need:
            break
    return removed


def trade_flower_certificate(r: int, k: int, config: SearchConfig = SearchConfig()):
    """Flower certificate by re-decomposing a removed part twice.

    Keep the flower at a point x and k further blocks of a random STS(2r+1);
    the removed blocks (those meeting a few random points) must be replaced by
    two mutually disjoint partial systems on the same pairs, found by exact
    cover. The common part is then exactly what was kept.
    """
    v = 2 * r + 1
    if k not in spectra.i3f(r):
        raise ValueError(f"{k} is not in I^3_F({r})")
    need = spectra.t(v) - r - k
    if need == 0:
        s = steiner_system(v)
        return FlowerIntersectionCertificate(v, [s, s, s], 0, k)
    spent = 0
    for attempt in range(config.restarts * 4):
        rng = config.rng(30_011 * attempt + k)
        base, moves = hillclimb_sts(v, [], set(), rng, 10**6)
        if base is None:
            continue
        x = rng.randrange(v)
        rest = [b for b in base if x not in b]
        removed = _removal(rest, [p for p in range(v) if p != x], need, rng)
        per = max(1_000, min(200_000, config.budget // 20))
        stats: dict = {}
        mates = _two_mates(sorted(removed), rng, per, stats)
        spent += stats.get("nodes", 0) + 1
        if mates is not None:
            kept = [b for b in base if b not in removed]
            systems = [kept + sorted(removed), kept + list(mates[0]), kept + list(mates[1])]
            cert = FlowerIntersectionCertificate(v, systems, x, k)
            flower_intersection_number(cert)
            return cert
        if spent >= config.budget:
            break
    raise SearchFailed(f"trade search r={r}, k={k}", spent)
