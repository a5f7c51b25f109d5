"""Intersection-preserving recursive constructions of flower certificates.

Every function assembles three Steiner triple systems from smaller verified
ingredients and re-verifies the result with
:func:`triplex.core.flower_intersection_number` before returning it, so a
construction can never hand back a certificate whose k differs from the
arithmetic prediction.

Point encodings (0-based):

* tripling, ``V x {1,2,3}`` with ``|V| = n``: ``(i, c) -> (c-1)*n + i``;
  extra points follow, ``inf = 3n`` or ``inf_1, inf_2, inf_3 = 3n, 3n+1, 3n+2``;
* doubling, ``X u Y`` with ``|X| = v``: ``x -> x`` and ``y -> v + y``;
* special squares, ``inf_s -> s - 1`` for s = 1..v0, square index ``i -> v0 + i``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from . import latin, pbd as pbdmod, search, spectra
from .core import (
    DesignError,
    FlowerIntersectionCertificate,
    TripleSystem,
    canon,
    flower_intersection_number,
    flower_of,
    one_factorize,
    steiner_system,
    three_way_common,
    validate_sts,
)
from .latin import DiagonalLatinTriple, LatinTriple, SpecialTriple


class ConstructionError(DesignError):
    pass


@dataclass(frozen=True)
class PlainTriple:
    """Three STS(v) whose pairwise intersections are one common set."""

    v: int
    systems: tuple

    @classmethod
    def of(cls, v, systems):
        return cls(v, tuple(s.blocks if isinstance(s, TripleSystem) else tuple(sorted(canon(b) for b in s))
                            for s in systems))

    def triple_systems(self):
        return tuple(TripleSystem(self.v, s) for s in self.systems)

    @property
    def a(self) -> int:
        return verify_plain(self)

    def to_dict(self):
        return {"v": self.v, "a": self.a, "systems": [[list(b) for b in s] for s in self.systems]}

    @classmethod
    def from_dict(cls, d):
        return cls.of(d["v"], d["systems"])


def verify_plain(t: PlainTriple) -> int:
    """Size of the common set; raises if a system is invalid or the pairwise
    intersections differ."""
    systems = t.triple_systems()
    for i, s in enumerate(systems):
        rep = validate_sts(s)
        if not rep.ok:
            raise ConstructionError(f"plain system {i + 1} is not an STS({t.v}): {rep.summary()}")
    return len(three_way_common(*systems))


def _relabel(blocks, mapping):
    return [canon(mapping[p] for p in b) for b in blocks]


def _finish(v, systems, flower_point, claim):
    cert = FlowerIntersectionCertificate(v, systems, flower_point, claim)
    flower_intersection_number(cert)
    return cert


def flower_normal_form(cert: FlowerIntersectionCertificate) -> FlowerIntersectionCertificate:
    """Relabel so the flower point is 0 and the flower blocks are
    {0, 2l+1, 2l+2}."""
    x = cert.flower_point
    mapping = {x: 0}
    fl = flower_of(cert.triple_systems()[0], x)
    for l, (p, q) in enumerate(fl.pairs):
        mapping[p], mapping[q] = 2 * l + 1, 2 * l + 2
    if len(mapping) != cert.v:
        raise ConstructionError("flower does not cover every point")
    systems = [_relabel(s, mapping) for s in cert.systems]
    return FlowerIntersectionCertificate(cert.v, systems, 0, cert.claimed_k)


def _verified_k(cert: FlowerIntersectionCertificate) -> int:
    return flower_intersection_number(FlowerIntersectionCertificate(cert.v, cert.systems, cert.flower_point))


# -- STS(3v): a Latin triple with a constant diagonal --------------------------

def triple_with_diagonal(r: int, plain1: PlainTriple, plain2: PlainTriple,
                         flower_cert: FlowerIntersectionCertificate, diag: DiagonalLatinTriple,
                         mode: str = "diagonal") -> FlowerIntersectionCertificate:
    """Certificate for 3r+1 with k = a1 + a2 + a + b.

    ``diag`` has order 2r+1, a shared constant secondary diagonal and
    b + (2r+1) agreement cells. In ``diagonal`` mode the flower system sits
    on V x {3} and the diagonal symbol is renamed to its flower point; the
    ``row`` and ``column`` modes conjugate the triple so a whole row (column)
    is shared and put the flower system on V x {1} (V x {2}).
    """
    n = 2 * r + 1
    if not spectra.admissible(r):
        raise ConstructionError(f"r={r} is not admissible")
    for name, t in (("plain1", plain1), ("plain2", plain2), ("flower certificate", flower_cert)):
        if t.v != n:
            raise ConstructionError(f"{name} has order {t.v}, expected {n}")
    if diag.n != n:
        raise ConstructionError(f"the Latin triple has order {diag.n}, expected {n}")
    a1, a2 = verify_plain(plain1), verify_plain(plain2)
    a = _verified_k(flower_cert)
    b = diag.k - n
    x, d = flower_cert.flower_point, diag.symbol
    swap = list(range(n))
    swap[x], swap[d] = d, x
    if mode == "diagonal":
        squares = [s.relabel(swap) for s in diag.squares]
        pos = 2
    elif mode == "row":
        squares = [latin.LatinSquare([s.rows[swap[i]] for i in range(n)]) for s in latin.with_common_row(diag).squares]
        pos = 0
    elif mode == "column":
        squares = [latin.LatinSquare([[row[swap[j]] for j in range(n)] for row in s.rows])
                   for s in latin.with_common_column(diag).squares]
        pos = 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    parts = [plain1.systems, plain2.systems]
    parts.insert(pos, flower_cert.systems)
    systems = []
    for q in range(3):
        blocks = [canon(p + c * n for p in blk) for c in range(3) for blk in parts[c][q]]
        sq = squares[q].rows
        blocks += [(i, n + j, 2 * n + sq[i][j]) for i in range(n) for j in range(n)]
        systems.append(blocks)
    return _finish(3 * n, systems, pos * n + x, a1 + a2 + a + b)


# -- STS(3v+1) -------------------------------------------------------------------

def expand_3r(r: int, certs: Sequence[FlowerIntersectionCertificate], lt: LatinTriple) -> FlowerIntersectionCertificate:
    """Certificate for 3r with k = a1 + a2 + a3 + b from three flower
    certificates of order 2r+1 and a Latin triple of order 2r with b
    agreement cells. Each flower point is sent to inf."""
    n = 2 * r
    if len(certs) != 3:
        raise ConstructionError("expand_3r takes three flower certificates")
    if lt.n != n:
        raise ConstructionError(f"the Latin triple has order {lt.n}, expected {n}")
    ks = []
    for c in certs:
        if c.v != n + 1:
            raise ConstructionError(f"flower certificate of order {c.v}, expected {n + 1}")
        ks.append(_verified_k(c))
    inf = 3 * n
    normal = [flower_normal_form(c) for c in certs]
    systems = []
    for q in range(3):
        blocks = []
        for c, cert in enumerate(normal):
            mapping = [inf] + [c * n + p for p in range(n)]
            blocks += _relabel(cert.systems[q], mapping)
        sq = lt.squares[q].rows
        blocks += [(i, n + j, 2 * n + sq[i][j]) for i in range(n) for j in range(n)]
        systems.append(blocks)
    return _finish(3 * n + 1, systems, inf, sum(ks) + lt.k)


# -- STS(3v+3) -------------------------------------------------------------------

def expand_3r1(r: int, certs: Sequence[FlowerIntersectionCertificate], lt: LatinTriple,
               infinities=None) -> FlowerIntersectionCertificate:
    """Certificate for 3r+1 with k = a1 + a2 + a3 + b from three flower
    certificates of order 2r+3 and a Latin triple of order 2r.

    Each input must contain a common block {inf1, inf2, inf3} with the flower
    at inf1. ``infinities[c]`` names that block for input c; by default the
    first flower block through the flower point is used.
    """
    if r % 3 not in (0, 2):
        raise ConstructionError(f"r={r}: r+1 must be admissible (r = 0, 2 mod 3)")
    n = 2 * r
    if len(certs) != 3:
        raise ConstructionError("expand_3r1 takes three flower certificates")
    if lt.n != n:
        raise ConstructionError(f"the Latin triple has order {lt.n}, expected {n}")
    base = 3 * n
    systems = [[], [], []]
    ks = []
    for c, cert in enumerate(certs):
        if cert.v != n + 3:
            raise ConstructionError(f"flower certificate of order {cert.v}, expected {n + 3}")
        ks.append(_verified_k(cert))
        x = cert.flower_point
        fl = flower_of(cert.triple_systems()[0], x).blocks
        if infinities is not None and infinities[c] is not None:
            tri = tuple(infinities[c])
            if canon(tri) not in fl or tri[0] != x:
                raise ConstructionError(f"input {c + 1} has no common block {tri} through its flower point")
        else:
            tri = (x,) + tuple(p for p in fl[0] if p != x)
        mapping = {tri[0]: base, tri[1]: base + 1, tri[2]: base + 2}
        rest = [p for p in range(cert.v) if p not in mapping]
        mapping.update({p: c * n + i for i, p in enumerate(rest)})
        for q in range(3):
            systems[q] += _relabel(cert.systems[q], mapping)
    for q in range(3):
        blocks = sorted(set(systems[q]))
        sq = lt.squares[q].rows
        blocks += [(i, n + j, 2 * n + sq[i][j]) for i in range(n) for j in range(n)]
        systems[q] = blocks
    return _finish(3 * n + 3, systems, base, sum(ks) + lt.k)


# -- STS(2v+1) -------------------------------------------------------------------

def double_values(r: int, k: int) -> dict:
    """{k + (s-1)(r+1): s} over the usable s."""
    v = 2 * r + 1
    return {k + (s - 1) * (r + 1): s for s in list(range(1, v - 2)) + [v]}


def double(r: int, cert: FlowerIntersectionCertificate, s: int) -> FlowerIntersectionCertificate:
    """Certificate for 2r+1 with k' = k + (s-1)(r+1).

    alpha_1 fixes the flower point and s-1 further points and cycles the
    rest; alpha_2 is its inverse, so moved points get three distinct images.
    """
    v = 2 * r + 1
    if cert.v != v:
        raise ConstructionError(f"base certificate has order {cert.v}, expected {v}")
    if not (1 <= s <= v - 3 or s == v):
        raise ConstructionError(f"s={s} not in 1..{v - 3} or {v}")
    k = _verified_k(cert)
    x = cert.flower_point
    order = [x] + [p for p in range(v) if p != x]
    moved = order[s:]
    fwd = list(range(v))
    for i, p in enumerate(moved):
        fwd[p] = moved[(i + 1) % len(moved)]
    back = [0] * v
    for p, q in enumerate(fwd):
        back[q] = p
    factors = one_factorize(v + 1).factors
    c_part = [(order[i], v + a, v + b) for i, f in enumerate(factors) for a, b in f]
    systems = []
    for q, alpha in enumerate((list(range(v)), fwd, back)):
        blocks = list(cert.systems[q])
        blocks += [canon((alpha[p], a, b)) for p, a, b in c_part]
        systems.append(blocks)
    return _finish(2 * v + 1, systems, x, k + (s - 1) * (r + 1))


# -- PBD composition -------------------------------------------------------------

def pbd_compose(design: pbdmod.PairwiseBalancedDesign, certs: Sequence[FlowerIntersectionCertificate]) -> FlowerIntersectionCertificate:
    """Certificate for r = |points| with k = sum of k_B; ``certs[idx]`` is
    the certificate for ``design.blocks[idx]`` (order 2|B|+1)."""
    r = design.v
    if not spectra.admissible(r):
        raise ConstructionError(f"r={r} is not admissible")
    if len(certs) != len(design.blocks):
        raise ConstructionError(f"{len(design.blocks)} blocks but {len(certs)} certificates")
    total = 0
    normal = []
    for idx, (block, c) in enumerate(zip(design.blocks, certs)):
        m = len(block)
        if c is None:
            raise ConstructionError(f"missing certificate for block {idx}")
        if not spectra.admissible(m):
            raise ConstructionError(f"block {idx} has inadmissible size {m}")
        if c.v != 2 * m + 1:
            raise ConstructionError(f"block {idx} of size {m} needs order {2 * m + 1}, got {c.v}")
        total += _verified_k(c)
        normal.append(flower_normal_form(c))
    systems = []
    for q in range(3):
        subs = [TripleSystem(c.v, c.systems[q]) for c in normal]
        systems.append(pbdmod.sts_from_pbd(design, subs).blocks)
    return _finish(2 * r + 1, systems, 0, total)


# -- leaves ------------------------------------------------------------------------

def identity_max(r: int, base: TripleSystem | None = None, flower_point: int = 0) -> FlowerIntersectionCertificate:
    """The same system three times: k = 2r(r-1)/3."""
    v = 2 * r + 1
    s = base if base is not None else steiner_system(v)
    if s.v != v:
        raise ConstructionError(f"base has order {s.v}, expected {v}")
    return _finish(v, [s, s, s], flower_point, spectra.max_flower_k(r))


def flower_only(r: int, budget: int = 10**7, seed: int = 0) -> FlowerIntersectionCertificate:
    """k = 0: three STS(2r+1) sharing only the flower at 0, from three
    pairwise disjoint 3-GDDs of type 2^r found by hill-climbing."""
    if not spectra.admissible(r):
        raise ConstructionError(f"r={r} is not admissible")
    try:
        triple = search.hillclimb_disjoint_gdd_triple(r, search.SearchConfig(seed=seed, budget=budget))
    except search.SearchFailed as exc:
        raise latin.Unrealized(r, 0, str(exc)) from exc
    systems = [pbdmod.sts_from_gdd(g, at=0) for g in triple.designs]
    return _finish(2 * r + 1, systems, 0, 0)


def _enumerated_plain(v: int, a: int, rng: random.Random):
    systems = search.enumerate_all_sts(v)
    sets = [s.block_set for s in systems]
    order = list(range(len(sets)))
    rng.shuffle(order)
    for i in order[:40]:
        groups: dict = {}
        for j, s in enumerate(sets):
            if j != i:
                common = sets[i] & s
                if len(common) == a:
                    groups.setdefault(common, []).append(j)
        for common, js in groups.items():
            for j1, j2 in itertools.combinations(js, 2):
                if sets[j1] & sets[j2] == common:
                    return [systems[i], systems[j1], systems[j2]]
    return None


def realize_plain_3way(v: int, a: int, budget: int = 10**7, seed: int = 0) -> PlainTriple:
    """Three STS(v) pairwise meeting in the same a blocks.

    Identity for a = t_v, the full enumeration for v in {7, 9}, and
    otherwise a hill-climb around a random common set. Raises Unrealized.
    """
    tv = spectra.t(v)
    if a not in spectra.i3(v):
        raise latin.TargetNotInSpectrum(f"{a} is not in I^3({v})")
    if a == tv:
        s = steiner_system(v)
        return PlainTriple.of(v, [s, s, s])
    rng = random.Random(seed * 31 + v * 1000 + a)
    if v in (7, 9):
        found = _enumerated_plain(v, a, rng)
        if found is None:
            raise latin.Unrealized(v, a, "no such triple among all STS(%d)" % v)
        t = PlainTriple.of(v, found)
    else:
        spent, t = 0, None
        for attempt in range(50):
            base, moves = search.hillclimb_sts(v, [], set(), rng, 10**6)
            spent += moves
            if base is None:
                continue
            common = rng.sample(base, a)
            try:
                found = search.hillclimb_common_triple(
                    v, common, search.SearchConfig(seed=seed + attempt, budget=max(1, budget - spent), restarts=3),
                    salt=attempt)
            except search.SearchFailed as exc:
                spent += exc.spent or 0
                if spent >= budget:
                    break
                continue
            t = PlainTriple.of(v, found)
            break
        if t is None:
            raise latin.Unrealized(v, a, f"hill-climb budget {budget} exhausted")
    if verify_plain(t) != a:
        raise ConstructionError("internal error: plain triple has the wrong intersection")
    return t


# -- special squares ---------------------------------------------------------------

def special_extend(cert: FlowerIntersectionCertificate, special: SpecialTriple) -> FlowerIntersectionCertificate:
    """From a certificate of order v0 (7 or 15) and three special squares of
    order v0+1: order 2v0+1 with k = l + value.

    Symbol s >= 1 of the squares stands for point inf_s = s-1; the input's
    flower point becomes inf_1, so the symbol-1 cells inside the 2x2
    diagonal blocks extend the flower.
    """
    v0 = cert.v
    n = special.order
    if n != v0 + 1:
        raise ConstructionError(f"special squares of order {n} need a certificate of order {n - 1}")
    ell = _verified_k(cert)
    x = cert.flower_point
    mapping = list(range(v0))
    mapping[x], mapping[0] = 0, x
    systems = []
    for q in range(3):
        blocks = _relabel(cert.systems[q], mapping)
        sq = special.squares[q].rows
        for i in range(n):
            for j in range(i + 1, n):
                s = sq[i][j]
                if s == 0:
                    raise ConstructionError(f"symbol 0 off the diagonal at {(i, j)}")
                blocks.append((s - 1, v0 + i, v0 + j))
        systems.append(blocks)
    return _finish(v0 + n, systems, 0, ell + special.value)


def special8_values() -> dict:
    """{value: order-4 agreement a} for the order-8 special triples."""
    return {8 + a: a for a in sorted(latin.known_values(4))}


def special16_values() -> dict:
    """{value: (a, b, c)} over a, c of order 4 and b of order 8."""
    out = {}
    four = sorted(latin.known_values(4))
    for b in sorted(latin.known_values(8)):
        for a in four:
            for c in four:
                out.setdefault(16 + a + b + c, (a, b, c))
    return out
