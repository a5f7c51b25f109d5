"""Pairwise balanced and group divisible designs, the B({6,t},1,6t) design
from four MOLS, and STS assembly over a PBD skeleton.

Point encodings (0-based):
  * V x {1..6} with |V| = t: point (x, m) is (m-1)*t + x.
  * {inf} U (X x {1,2}): inf is 0, (i,1) is 1+2i and (i,2) is 2+2i.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import fields, spectra
from .core import DesignError, TripleSystem, canon, validate_sts
from .latin import LatinSquare, are_orthogonal, is_latin, mols_prime_power

DATA_ENV = "TRIPLEX_DATA_DIR"


class DesignRejected(DesignError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class MissingFlowerTriple(DesignError):
    pass


class MolsUnavailable(DesignError):
    pass


@dataclass(frozen=True)
class PairwiseBalancedDesign:
    v: int
    blocks: tuple[tuple[int, ...], ...]
    sizes: frozenset = frozenset()

    def __init__(self, v, blocks, sizes=None):
        blocks = tuple(sorted(canon(b) for b in blocks))
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "sizes", frozenset(sizes) if sizes else frozenset(len(b) for b in blocks))

    def to_dict(self):
        return {"v": self.v, "blocks": [list(b) for b in self.blocks]}


@dataclass(frozen=True)
class GroupDivisibleDesign:
    v: int
    groups: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, v, groups, blocks):
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "groups", tuple(sorted(canon(g) for g in groups)))
        object.__setattr__(self, "blocks", tuple(sorted(canon(b) for b in blocks)))

    @property
    def group_type(self) -> dict:
        return dict(sorted(Counter(len(g) for g in self.groups).items()))

    def to_dict(self):
        return {"v": self.v, "groups": [list(g) for g in self.groups], "blocks": [list(b) for b in self.blocks]}


@dataclass(frozen=True)
class GddTriple:
    designs: tuple[GroupDivisibleDesign, GroupDivisibleDesign, GroupDivisibleDesign]
    common: frozenset

    @classmethod
    def of(cls, d1, d2, d3):
        if not d1.groups == d2.groups == d3.groups:
            raise DesignError("the three GDDs must share their groups")
        for d in (d1, d2, d3):
            rep = validate_gdd(d)
            if not rep.ok:
                raise DesignRejected(rep)
        s1, s2, s3 = (frozenset(d.blocks) for d in (d1, d2, d3))
        if not (s1 & s2 == s1 & s3 == s2 & s3):
            raise DesignError("pairwise intersections differ")
        return cls((d1, d2, d3), s1 & s2)

    @property
    def disjoint(self) -> bool:
        return not self.common


@dataclass
class DesignReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        if self.ok:
            return "ok"
        head = "; ".join(str(v) for v in self.violations[:6])
        more = len(self.violations) - 6
        return head + (f"; ... {more} more" if more > 0 else "")


def _pair_counts(blocks):
    cnt: Counter = Counter()
    for b in blocks:
        for x, y in itertools.combinations(b, 2):
            cnt[(x, y)] += 1
    return cnt


def _structure(v, blocks, rep):
    for b in blocks:
        if len(set(b)) != len(b):
            rep.violations.append(("repeated point", tuple(b)))
        if any(not 0 <= x < v for x in b):
            rep.violations.append(("point out of range", tuple(b)))
    dup = [b for b, c in Counter(blocks).items() if c > 1]
    for b in dup:
        rep.violations.append(("duplicate block", b))


def validate_pbd(d: PairwiseBalancedDesign, sizes=None) -> DesignReport:
    rep = DesignReport()
    if d.v >= 2 and not d.blocks:
        rep.violations.append(("no blocks", d.v))
        return rep
    _structure(d.v, d.blocks, rep)
    allowed = set(sizes) if sizes else None
    for b in d.blocks:
        if allowed is not None and len(b) not in allowed:
            rep.violations.append(("block size not allowed", b))
    cnt = _pair_counts(d.blocks)
    for p in itertools.combinations(range(d.v), 2):
        c = cnt.get(p, 0)
        if c != 1:
            rep.violations.append(("pair covered %d times" % c, p))
    return rep


def validate_gdd(d: GroupDivisibleDesign) -> DesignReport:
    rep = DesignReport()
    if d.v >= 2 and not d.blocks:
        rep.violations.append(("no blocks", d.v))
        return rep
    _structure(d.v, d.blocks, rep)
    seen = Counter(x for g in d.groups for x in g)
    for x in range(d.v):
        if seen.get(x, 0) != 1:
            rep.violations.append(("point not in exactly one group", x))
    group_of = {x: gi for gi, g in enumerate(d.groups) for x in g}
    for b in d.blocks:
        gs = Counter(group_of.get(x) for x in b)
        if any(c > 1 for c in gs.values()):
            rep.violations.append(("block meets a group twice", b))
    cnt = _pair_counts(d.blocks)
    for p in itertools.combinations(range(d.v), 2):
        c = cnt.get(p, 0)
        same = group_of.get(p[0]) == group_of.get(p[1])
        want = 0 if same else 1
        if c != want:
            kind = "group pair" if same else "cross pair"
            rep.violations.append((f"{kind} covered {c} times", p))
    return rep


def gdd_from_flower(system: TripleSystem, x: int) -> GroupDivisibleDesign:
    """Remove the flower at x: a 3-GDD of type 2^r whose groups are the
    flower pairs. Points other than x are renumbered in order."""
    label = {p: i for i, p in enumerate(p for p in range(system.v) if p != x)}
    groups, blocks = [], []
    for b in system.blocks:
        if x in b:
            groups.append([label[p] for p in b if p != x])
        else:
            blocks.append([label[p] for p in b])
    return GroupDivisibleDesign(system.v - 1, groups, blocks)


def sts_from_gdd(gdd: GroupDivisibleDesign, at: int | None = None) -> TripleSystem:
    """Inverse of gdd_from_flower: a type 2^r GDD plus a new point (inserted
    at label ``at``, default the end) joined to every group."""
    if any(len(g) != 2 for g in gdd.groups):
        raise DesignError("only GDDs of type 2^r close up to a triple system")
    at = gdd.v if at is None else at
    up = lambda p: p + (p >= at)  # noqa: E731
    blocks = [[up(p) for p in b] for b in gdd.blocks]
    blocks += [[at, up(g[0]), up(g[1])] for g in gdd.groups]
    return TripleSystem(gdd.v + 1, blocks)


# -- MOLS and the 6t design ----------------------------------------------------

def data_dir() -> Path | None:
    d = os.environ.get(DATA_ENV)
    return Path(d) if d else None


def load_mols(path) -> list[LatinSquare]:
    """Squares from {"n": t, "squares": [[[...], ...], ...]}."""
    d = json.loads(Path(path).read_text())
    squares = [LatinSquare(rows) for rows in d["squares"]]
    for s in squares:
        if s.n != d["n"] or not is_latin(s):
            raise DesignError(f"{path}: not a Latin square of order {d['n']}")
    return squares


def _product_mols(a: list[LatinSquare], b: list[LatinSquare]) -> list[LatinSquare]:
    m, n = a[0].n, b[0].n
    out = []
    for x, y in zip(a, b):
        out.append(LatinSquare([[x.rows[i1][j1] * n + y.rows[i2][j2]
                                 for j1 in range(m) for j2 in range(n)]
                                for i1 in range(m) for i2 in range(n)]))
    return out


def four_mols(t: int) -> list[LatinSquare]:
    """Four MOLS of order t: field squares, products of those, or a file
    mols_<t>.json in the external data directory."""
    d = data_dir()
    if d is not None and (d / f"mols_{t}.json").exists():
        squares = load_mols(d / f"mols_{t}.json")[:4]
        _check_mols(squares, t)
        return squares
    if fields.prime_power(t) is not None and t >= 5:
        return mols_prime_power(t, 4)
    # products of prime powers, each with at least four MOLS
    parts = []
    x = t
    p = 2
    while x > 1:
        if x % p == 0:
            q = 1
            while x % p == 0:
                x //= p
                q *= p
            parts.append(q)
        p += 1
    if len(parts) > 1 and all(q >= 5 for q in parts):
        squares = mols_prime_power(parts[0], 4)
        for q in parts[1:]:
            squares = _product_mols(squares, mols_prime_power(q, 4))
        return squares
    raise MolsUnavailable(f"no four MOLS of order {t} available (set {DATA_ENV} to supply mols_{t}.json)")


def _check_mols(squares, t):
    if len(squares) < 4:
        raise DesignError(f"need four squares, got {len(squares)}")
    for s in squares:
        if s.n != t or not is_latin(s):
            raise DesignError(f"not a Latin square of order {t}")
    for a, b in itertools.combinations(squares, 2):
        if not are_orthogonal(a, b):
            raise DesignError("supplied squares are not pairwise orthogonal")


def pbd_6t(t: int, mols: list[LatinSquare] | None = None) -> PairwiseBalancedDesign:
    """B({6,t},1,6t) on V x {1..6}: the six copies of V plus one block
    {(i,1), (j,2), (L1(i,j),3), ..., (L4(i,j),6)} per cell."""
    if t < 5:
        raise ValueError("t must be at least 5")
    if mols is None:
        mols = four_mols(t)
    else:
        mols = list(mols)[:4]
    _check_mols(mols, t)
    pt = lambda x, m: (m - 1) * t + x  # noqa: E731
    blocks = [[pt(x, m) for x in range(t)] for m in range(1, 7)]
    for i in range(t):
        for j in range(t):
            blocks.append([pt(i, 1), pt(j, 2)] + [pt(sq.rows[i][j], 3 + a) for a, sq in enumerate(mols)])
    return PairwiseBalancedDesign(6 * t, blocks, {6, t})


# -- STS over a PBD --------------------------------------------------------------

def flower_triples(r: int):
    return [(0, 1 + 2 * i, 2 + 2 * i) for i in range(r)]


def sts_from_pbd(pbd: PairwiseBalancedDesign, subsystems) -> TripleSystem:
    """STS(2r+1) on {inf} U (X x {1,2}) from STS(2|B|+1)s, one per block.

    ``subsystems[idx]`` is the system for ``pbd.blocks[idx]`` in local
    encoding: inf is 0 and the l-th point of the block is 1+2l, 2+2l. Every
    local system must contain the triples {0, 1+2l, 2+2l}.
    """
    r = pbd.v
    if not spectra.admissible(r):
        raise DesignError(f"r={r} is not admissible")
    out = set(flower_triples(r))
    for idx, block in enumerate(pbd.blocks):
        sub = subsystems[idx]
        m = len(block)
        if sub.v != 2 * m + 1:
            raise DesignError(f"block {idx} of size {m} needs an STS({2 * m + 1}), got v={sub.v}")
        have = sub.block_set
        for f in flower_triples(m):
            if f not in have:
                raise MissingFlowerTriple(f"block {idx}: local system lacks {f}")
        to_global = [0]
        for p in block:
            to_global += [1 + 2 * p, 2 + 2 * p]
        for b in sub.blocks:
            out.add(canon(to_global[p] for p in b))
    system = TripleSystem(2 * r + 1, sorted(out))
    rep = validate_sts(system)
    if not rep.ok:
        raise DesignError(f"assembled system is not an STS: {rep.summary()}")
    return system


# -- ingestion -------------------------------------------------------------------

def load_design(path):
    """A validated PBD or GDD from a JSON file; groups make it a GDD."""
    try:
        d = json.loads(Path(path).read_text())
        v, blocks = int(d["v"]), [list(b) for b in d["blocks"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DesignError(f"cannot parse {path}: {exc}") from exc
    if "groups" in d:
        design = GroupDivisibleDesign(v, d["groups"], blocks)
        rep = validate_gdd(design)
    else:
        design = PairwiseBalancedDesign(v, blocks)
        rep = validate_pbd(design)
    if not rep.ok:
        raise DesignRejected(rep)
    return design


def gdd_as_pbd(gdd: GroupDivisibleDesign) -> PairwiseBalancedDesign:
    """Groups become blocks: a PBD on the same points."""
    return PairwiseBalancedDesign(gdd.v, list(gdd.blocks) + list(gdd.groups))
