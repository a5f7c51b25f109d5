"""Triple systems, flowers, permutations, 1-factorizations and the
certificate verifier.

Points are the integers ``0..v-1``. A block is a sorted 3-tuple and a block
set is kept sorted, so equality and intersection of systems are exact.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from . import spectra

Block = tuple[int, int, int]


class DesignError(Exception):
    """Base class for violated design invariants."""


class InvalidSystem(DesignError):
    def __init__(self, index, report):
        self.index = index
        self.report = report
        super().__init__(f"system {index} is not a valid STS: {report.summary()}")


class PairwiseMismatch(DesignError):
    def __init__(self, witness):
        # witness: blocks lying in some pairwise intersection but not in all
        self.witness = tuple(sorted(witness))
        super().__init__(
            f"pairwise intersections differ; {len(self.witness)} witness block(s), "
            f"e.g. {list(self.witness[:3])}"
        )


class FlowerNotCommon(DesignError):
    pass


class ClaimMismatch(DesignError):
    def __init__(self, claimed, actual):
        self.claimed, self.actual = claimed, actual
        super().__init__(f"claimed k={claimed} but verified k={actual}")


class NotAdmissible(DesignError):
    pass


class NotABijection(DesignError):
    pass


def canon(block: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(block))


def canon_blocks(blocks: Iterable[Iterable[int]]) -> tuple[Block, ...]:
    return tuple(sorted({canon(b) for b in blocks}))


@dataclass(frozen=True)
class TripleSystem:
    v: int
    blocks: tuple[Block, ...]

    def __init__(self, v: int, blocks: Iterable[Iterable[int]]):
        object.__setattr__(self, "v", int(v))
        # keep duplicates visible to the validator
        object.__setattr__(self, "blocks", tuple(sorted(canon(b) for b in blocks)))

    @cached_property
    def block_set(self) -> frozenset[Block]:
        return frozenset(self.blocks)

    @cached_property
    def pair_index(self) -> dict[tuple[int, int], Block]:
        idx = {}
        for b in self.blocks:
            for p in itertools.combinations(b, 2):
                idx.setdefault(p, b)
        return idx

    def block_on(self, x: int, y: int) -> Block | None:
        return self.pair_index.get((x, y) if x < y else (y, x))

    def __len__(self):
        return len(self.blocks)

    def to_dict(self):
        return {"v": self.v, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["v"], d["blocks"])


@dataclass
class StsReport:
    v: int
    malformed: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)
    multiply_covered: dict = field(default_factory=dict)
    duplicate_blocks: list = field(default_factory=list)
    bad_order: bool = False

    @property
    def ok(self) -> bool:
        return not (
            self.malformed or self.uncovered or self.multiply_covered
            or self.duplicate_blocks or self.bad_order
        )

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.bad_order:
            parts.append(f"v={self.v} is not 1 or 3 mod 6")
        if self.malformed:
            parts.append(f"malformed blocks {self.malformed[:3]}")
        if self.duplicate_blocks:
            parts.append(f"duplicate blocks {self.duplicate_blocks[:3]}")
        if self.uncovered:
            parts.append(f"{len(self.uncovered)} uncovered pair(s) {self.uncovered[:3]}")
        if self.multiply_covered:
            items = sorted(self.multiply_covered.items())[:3]
            parts.append(f"{len(self.multiply_covered)} multiply covered pair(s) {items}")
        return "; ".join(parts)


def validate_sts(system: TripleSystem) -> StsReport:
    v = system.v
    rep = StsReport(v=v, bad_order=not spectra.sts_order_ok(v))
    counts: dict[tuple[int, int], int] = {}
    seen = set()
    for b in system.blocks:
        if len(b) != 3 or len(set(b)) != 3 or not all(0 <= x < v for x in b):
            rep.malformed.append(b)
            continue
        if b in seen:
            rep.duplicate_blocks.append(b)
        seen.add(b)
        for p in itertools.combinations(b, 2):
            counts[p] = counts.get(p, 0) + 1
    for p in itertools.combinations(range(v), 2):
        c = counts.get(p, 0)
        if c == 0:
            rep.uncovered.append(p)
        elif c > 1:
            rep.multiply_covered[p] = c
    return rep


def is_sts(system: TripleSystem) -> bool:
    return validate_sts(system).ok


@dataclass(frozen=True)
class Flower:
    owner: int
    blocks: tuple[Block, ...]

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(tuple(x for x in b if x != self.owner) for b in self.blocks)


def flower_of(system: TripleSystem, x: int) -> Flower:
    if not 0 <= x < system.v:
        raise ValueError(f"point {x} outside 0..{system.v - 1}")
    return Flower(x, tuple(b for b in system.blocks if x in b))


def _as_set(b) -> frozenset:
    if isinstance(b, TripleSystem):
        return b.block_set
    return frozenset(canon(x) for x in b)


def three_way_common(b1, b2, b3) -> frozenset[Block]:
    """The common block set, provided all pairwise intersections coincide."""
    s1, s2, s3 = _as_set(b1), _as_set(b2), _as_set(b3)
    i12, i13, i23 = s1 & s2, s1 & s3, s2 & s3
    if i12 == i13 == i23:
        return i12
    raise PairwiseMismatch((i12 | i13 | i23) - (i12 & i13 & i23))


def common_flower_points(b1, b2, b3, v: int) -> list[int]:
    """Points whose flower is identical in all three systems and lies in the
    common block set (assumes pairwise intersections already agree)."""
    s1, s2, s3 = _as_set(b1), _as_set(b2), _as_set(b3)
    common = s1 & s2 & s3
    out = []
    for x in range(v):
        f1 = {b for b in s1 if x in b}
        if f1 <= common and {b for b in s2 if x in b} == f1 == {b for b in s3 if x in b}:
            out.append(x)
    return out


@dataclass(frozen=True)
class FlowerIntersectionCertificate:
    v: int
    systems: tuple[tuple[Block, ...], tuple[Block, ...], tuple[Block, ...]]
    flower_point: int
    claimed_k: int | None = None

    def __init__(self, v, systems, flower_point, claimed_k=None):
        if len(systems) != 3:
            raise ValueError("a certificate holds exactly three systems")
        syst = tuple(
            s.blocks if isinstance(s, TripleSystem) else tuple(sorted(canon(b) for b in s))
            for s in systems
        )
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "systems", syst)
        object.__setattr__(self, "flower_point", int(flower_point))
        object.__setattr__(self, "claimed_k", None if claimed_k is None else int(claimed_k))

    @property
    def r(self) -> int:
        return (self.v - 1) // 2

    def triple_systems(self) -> tuple[TripleSystem, TripleSystem, TripleSystem]:
        return tuple(TripleSystem(self.v, s) for s in self.systems)

    def with_claim(self, k):
        return FlowerIntersectionCertificate(self.v, self.systems, self.flower_point, k)

    def to_dict(self):
        return {
            "v": self.v,
            "flower_point": self.flower_point,
            "claimed_k": self.claimed_k,
            "systems": [[list(b) for b in s] for s in self.systems],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["v"], d["systems"], d["flower_point"], d.get("claimed_k"))


@dataclass
class CertificateCheck:
    """Per-invariant verdicts for one certificate."""

    checks: list = field(default_factory=list)  # (name, passed, detail)
    k: int | None = None
    error: DesignError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def add(self, name, passed, detail=""):
        self.checks.append((name, passed, detail))


def check_certificate(cert: FlowerIntersectionCertificate) -> CertificateCheck:
    out = CertificateCheck()
    systems = cert.triple_systems()
    for i, s in enumerate(systems):
        rep = validate_sts(s)
        out.add(f"system {i + 1} is an STS({cert.v})", rep.ok, rep.summary())
        if not rep.ok and out.error is None:
            out.error = InvalidSystem(i + 1, rep)
    if out.error:
        return out
    try:
        common = three_way_common(*systems)
        out.add("pairwise intersections identical", True, f"{len(common)} common blocks")
    except PairwiseMismatch as exc:
        out.add("pairwise intersections identical", False, str(exc))
        out.error = exc
        return out
    x = cert.flower_point
    if not 0 <= x < cert.v:
        out.error = FlowerNotCommon(f"flower point {x} outside 0..{cert.v - 1}")
        out.add("flower common", False, str(out.error))
        return out
    flowers = [flower_of(s, x).blocks for s in systems]
    if not (flowers[0] == flowers[1] == flowers[2] and set(flowers[0]) <= common):
        out.error = FlowerNotCommon(f"flower at {x} differs between systems")
        out.add("flower common", False, str(out.error))
        return out
    out.add("flower common", True, f"{len(flowers[0])} flower blocks at point {x}")
    k = len(common) - cert.r
    out.k = k
    if cert.claimed_k is not None and cert.claimed_k != k:
        out.error = ClaimMismatch(cert.claimed_k, k)
        out.add("claimed k", False, str(out.error))
    else:
        out.add("claimed k", True, f"k={k}")
    return out


def flower_intersection_number(cert: FlowerIntersectionCertificate) -> int:
    """Re-verify every certificate invariant from the raw blocks and return k."""
    res = check_certificate(cert)
    if res.error is not None:
        raise res.error
    return res.k


@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]

    def __init__(self, image: Sequence[int]):
        image = tuple(int(x) for x in image)
        if sorted(image) != list(range(len(image))):
            raise NotABijection(f"image {image} is not a bijection on 0..{len(image) - 1}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, v):
        return cls(range(v))

    @classmethod
    def from_cycles(cls, v, cycles, one_based=False):
        img = list(range(v))
        seen = set()
        for c in cycles:
            c = [x - 1 for x in c] if one_based else list(c)
            for a in c:
                if a in seen or not 0 <= a < v:
                    raise NotABijection(f"bad cycle element {a}")
                seen.add(a)
            for a, b in zip(c, c[1:] + c[:1]):
                img[a] = b
        return cls(img)

    @classmethod
    def from_mapping(cls, v, mapping):
        img = list(range(v))
        for a, b in mapping.items():
            img[a] = b
        return cls(img)

    def __call__(self, x):
        return self.image[x]

    def __len__(self):
        return len(self.image)

    def inverse(self):
        inv = [0] * len(self.image)
        for i, x in enumerate(self.image):
            inv[x] = i
        return Permutation(inv)

    def then(self, other):
        """Apply self first, then other."""
        return Permutation([other.image[x] for x in self.image])

    def fixed_points(self):
        return [i for i, x in enumerate(self.image) if i == x]

    def cycles(self):
        seen, out = set(), []
        for i in range(len(self.image)):
            if i in seen or self.image[i] == i:
                continue
            c, j = [], i
            while j not in seen:
                seen.add(j)
                c.append(j)
                j = self.image[j]
            out.append(tuple(c))
        return out

    def apply_blocks(self, blocks):
        return tuple(sorted(canon(self.image[x] for x in b) for b in blocks))


def apply_permutation(p: Permutation, system: TripleSystem) -> TripleSystem:
    if len(p) != system.v:
        raise NotABijection(f"permutation on {len(p)} points applied to STS({system.v})")
    return TripleSystem(system.v, p.apply_blocks(system.blocks))


@dataclass(frozen=True)
class OneFactorization:
    order: int
    factors: tuple[tuple[tuple[int, int], ...], ...]


def one_factorize(order: int) -> OneFactorization:
    """Circle method: vertex order-1 is fixed, the others rotate."""
    if order < 2 or order % 2:
        raise ValueError(f"1-factorization needs an even order >= 2, got {order}")
    m = order - 1
    factors = []
    for i in range(m):
        edges = [(min(i, m), max(i, m))]
        for j in range(1, order // 2):
            a, b = (i - j) % m, (i + j) % m
            edges.append((min(a, b), max(a, b)))
        factors.append(tuple(sorted(edges)))
    return OneFactorization(order, tuple(factors))


def steiner_system(v: int) -> TripleSystem:
    """A fixed STS(v): Bose for v = 3 mod 6, Skolem for v = 1 mod 6."""
    if not spectra.sts_order_ok(v):
        raise ValueError(f"no STS({v})")
    if v == 1:
        return TripleSystem(1, [])
    if v % 6 == 3:
        n = v // 3
        pt = lambda x, i: x + n * i  # noqa: E731
        half = (n + 1) // 2  # inverse of 2 mod odd n
        blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(n)]
        for x in range(n):
            for y in range(x + 1, n):
                s = ((x + y) * half) % n
                for i in range(3):
                    blocks.append((pt(x, i), pt(y, i), pt(s, (i + 1) % 3)))
        return TripleSystem(v, blocks)
    # Skolem: half-idempotent commutative quasigroup of even order m
    m = (v - 1) // 3
    h = m // 2
    inf = v - 1
    pt = lambda x, i: x + m * i  # noqa: E731

    def op(x, y):
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + h

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(h)]
    for x in range(h):
        for i in range(3):
            blocks.append((inf, pt(x + h, i), pt(x, (i + 1) % 3)))
    for x in range(m):
        for y in range(x + 1, m):
            for i in range(3):
                blocks.append((pt(x, i), pt(y, i), pt(op(x, y), (i + 1) % 3)))
    return TripleSystem(v, blocks)


def dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())
