"""Systems, permutations and square templates transcribed from the small-case
tables, the published spectrum bounds, and recomputation of the claimed
permutation identities.

The tables live in ``data/`` as 1-based text, one printed row per line, so
they can be proofread line by line.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from . import spectra
from .core import (
    DesignError,
    FlowerIntersectionCertificate,
    Permutation,
    TripleSystem,
    apply_permutation,
    canon,
    common_flower_points,
    flower_of,
    validate_sts,
)


class TranscriptionError(DesignError):
    pass


class DuplicateBlock(TranscriptionError):
    def __init__(self, block, line):
        self.block, self.line = block, line
        super().__init__(f"block {tuple(x + 1 for x in block)} repeated (line {line})")


class UnknownEntry(KeyError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    identifier: str
    kind: str  # system | permutation | template
    payload: object
    provenance: str
    status: str = "ok"  # ok | repaired | quarantined
    note: str = ""

    def export(self):
        """Standard file format for the payload."""
        if self.kind == "system":
            return self.payload.to_dict()
        if self.kind == "permutation":
            return {"v": len(self.payload), "image": list(self.payload.image),
                    "cycles": [[x + 1 for x in c] for c in self.payload.cycles()], "printed": self.note}
        return {"order": len(self.payload), "cells": [[_cell_json(c) for c in row] for row in self.payload]}


def _read(name: str) -> str:
    return (resources.files("triplex") / "data" / name).read_text()


def parse_table(text: str, v: int, strict: bool = True) -> list:
    """Blocks from a 1-based table. With ``strict`` a repeated block raises
    DuplicateBlock; otherwise repeats are kept so the defect stays visible."""
    blocks, seen = [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for chunk in line.split(","):
            pts = [int(x) - 1 for x in chunk.split()]
            if len(pts) != 3 or len(set(pts)) != 3 or not all(0 <= p < v for p in pts):
                raise TranscriptionError(f"line {lineno}: bad triple {chunk.strip()!r}")
            b = canon(pts)
            if b in seen and strict:
                raise DuplicateBlock(b, lineno)
            seen[b] = lineno
            blocks.append(b)
    return blocks


def repair_by_pair_coverage(v: int, blocks) -> tuple[list, tuple, tuple]:
    """Replace one copy of a repeated block by the triple on the uncovered
    pairs, if those pairs form exactly one triple. Returns (blocks, removed,
    added)."""
    counts = Counter(blocks)
    dups = [b for b, c in counts.items() if c > 1]
    covered = Counter(p for b in set(blocks) for p in itertools.combinations(b, 2))
    missing = [p for p in itertools.combinations(range(v), 2) if covered[p] == 0]
    pts = sorted({x for p in missing for x in p})
    if len(dups) != 1 or len(missing) != 3 or len(pts) != 3:
        raise TranscriptionError(f"no unique repair: duplicates {dups}, uncovered pairs {missing}")
    added = tuple(pts)
    out = list(blocks)
    out.remove(dups[0])
    out.append(added)
    return sorted(out), dups[0], added


_SYSTEM_FILES = {
    "STS13-A": ("sts13_A.txt", 13, "STS(13) table A, r=6 case"),
    "STS13-B": ("sts13_B.txt", 13, "STS(13) table B, r=6 case"),
    "STS15-A": ("sts15_A.txt", 15, "STS(15) table A, r=7 case"),
    "STS15-B": ("sts15_B.txt", 15, "STS(15) table B, r=7 case"),
    "STS15-C": ("sts15_C.txt", 15, "STS(15) table C, r=7 case"),
    "STS15-D": ("sts15_D.txt", 15, "STS(15) table D, r=7 case"),
    "STS15-E": ("sts15_E.txt", 15, "STS(15) table E, r=7 case"),
    "STS19-A": ("sts19_A.txt", 19, "STS(19) table A, r=9 case"),
}


def _load_system(ident) -> list[CatalogEntry]:
    fname, v, prov = _SYSTEM_FILES[ident]
    text = _read(fname)
    try:
        blocks = parse_table(text, v)
    except DuplicateBlock as exc:
        raw = parse_table(text, v, strict=False)
        entries = [CatalogEntry(ident, "system", TripleSystem(v, raw), prov, "quarantined",
                                f"as printed: {exc}; excluded from constructions")]
        fixed, removed, added = repair_by_pair_coverage(v, raw)
        system = TripleSystem(v, fixed)
        if validate_sts(system).ok:
            note = (f"one copy of {tuple(x + 1 for x in removed)} replaced by "
                    f"{tuple(x + 1 for x in added)}, the only triple on the uncovered pairs")
            entries.append(CatalogEntry(ident + "-REPAIRED", "system", system, prov, "repaired", note))
        return entries
    system = TripleSystem(v, blocks)
    rep = validate_sts(system)
    if not rep.ok:
        return [CatalogEntry(ident, "system", system, prov, "quarantined", rep.summary())]
    return [CatalogEntry(ident, "system", system, prov)]


_PERM_LINE = re.compile(r"^(\S+)\s*\|\s*(\d+)\s*\|\s*(.*)$")


def parse_cycles(text: str) -> list[list[int]]:
    return [[int(x) for x in grp.split()] for grp in re.findall(r"\(([^)]*)\)", text)]


def _load_permutations() -> list[CatalogEntry]:
    out = []
    for line in _read("permutations.txt").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        m = _PERM_LINE.match(line.strip())
        if not m:
            raise TranscriptionError(f"bad permutation line {line!r}")
        ident, v, cyc = m.group(1), int(m.group(2)), m.group(3)
        perm = Permutation.from_cycles(v, parse_cycles(cyc), one_based=True)
        out.append(CatalogEntry(ident, "permutation", perm, f"permutation {ident} on {v} points", note=cyc.strip()))
    return out


# -- special square templates ---------------------------------------------------
# A template cell is an int (fixed symbol) or (name, i, j, offset) meaning
# offset + name[i][j]; a transposed placement swaps i and j.

def _klein(i, j):
    return i ^ j


def special8_template(name="A"):
    rows = []
    for i in range(8):
        row = []
        for j in range(8):
            if (i < 4) == (j < 4):
                row.append(_klein(i % 4, j % 4))
            elif i < 4:
                row.append((name, i, j - 4, 4))
            else:
                row.append((name, j, i - 4, 4))
        rows.append(row)
    return rows


def special16_template():
    top, bottom = special8_template("A"), special8_template("C")
    rows = []
    for i in range(16):
        row = []
        for j in range(16):
            if i < 8 and j < 8:
                row.append(top[i][j])
            elif i >= 8 and j >= 8:
                row.append(bottom[i - 8][j - 8])
            elif i < 8:
                row.append(("B", i, j - 8, 8))
            else:
                row.append(("B", j, i - 8, 8))
        rows.append(row)
    return rows


def fill_template(template, squares: dict):
    from .latin import LatinSquare

    return LatinSquare([[c if isinstance(c, int) else c[3] + squares[c[0]].rows[c[1]][c[2]]
                         for c in row] for row in template])


def _cell_json(c):
    return c if isinstance(c, int) else list(c)


@lru_cache(maxsize=None)
def _entries() -> dict:
    out = {}
    for ident in _SYSTEM_FILES:
        for e in _load_system(ident):
            out[e.identifier] = e
    for e in _load_permutations():
        out[e.identifier] = e
    out["SPECIAL8-TEMPLATE"] = CatalogEntry("SPECIAL8-TEMPLATE", "template", special8_template(),
                                            "order-8 special square pattern")
    out["SPECIAL16-TEMPLATE"] = CatalogEntry("SPECIAL16-TEMPLATE", "template", special16_template(),
                                             "order-16 special square pattern")
    return out


def identifiers() -> list[str]:
    return sorted(_entries())


def get(identifier: str) -> CatalogEntry:
    try:
        return _entries()[identifier]
    except KeyError:
        raise UnknownEntry(f"unknown catalog identifier {identifier!r}") from None


def usable_system(identifier: str) -> TripleSystem:
    """A system fit for constructions: repaired entries replace quarantined ones."""
    e = get(identifier)
    if e.status == "quarantined":
        e = get(identifier + "-REPAIRED")
    return e.payload


# -- recomputation of the printed identities ------------------------------------

@dataclass(frozen=True)
class PaperClaim:
    row: str
    first: str
    source: str
    perm: str
    claimed_k: int
    flower_point: int | None = 0  # point 1 in the printed labels; None: not stated, found by scan


CLAIMS = (
    PaperClaim("13-1", "STS13-A", "STS13-A", "13-1", 1, None),
    PaperClaim("13-2", "STS13-B", "STS13-A", "13-2", 5, None),
    PaperClaim("15-1", "STS15-B", "STS15-D", "15-1", 1),
    PaperClaim("15-2", "STS15-B", "STS15-B", "15-2", 2),
    PaperClaim("15-3", "STS15-B", "STS15-D", "15-3", 3),
    PaperClaim("15-4", "STS15-E", "STS15-E", "15-4", 4),
    PaperClaim("15-5", "STS15-B", "STS15-C", "15-5", 6),
    PaperClaim("15-6", "STS15-A", "STS15-A", "15-6", 7),
    PaperClaim("19-1", "STS19-A", "STS19-A", "19-1", 1),
    PaperClaim("19-2", "STS19-A", "STS19-A", "19-2", 2),
    PaperClaim("19-3", "STS19-A", "STS19-A", "19-3", 3),
)


@dataclass
class CheckRow:
    claim: PaperClaim
    computed: int | None
    match: bool
    note: str = ""
    sizes: tuple = ()

    @property
    def label(self):
        c = self.claim
        return f"|{c.first} & pi_{c.perm}({c.source}) & pi'_{c.perm}({c.source})|_F = {c.claimed_k}"


def claim_systems(claim: PaperClaim):
    first = usable_system(claim.first)
    source = usable_system(claim.source)
    p, q = get("PI-" + claim.perm).payload, get("PI'-" + claim.perm).payload
    return first, apply_permutation(p, source), apply_permutation(q, source)


def flower_point_of(claim: PaperClaim):
    """The stated flower point, or the first point whose flower is common
    to all three systems when none is stated (None if there is none)."""
    if claim.flower_point is not None:
        return claim.flower_point
    s = claim_systems(claim)
    s1, s2, s3 = (x.block_set for x in s)
    if not s1 & s2 == s1 & s3 == s2 & s3:
        return None
    pts = common_flower_points(s1, s2, s3, s[0].v)
    return pts[0] if pts else None


def claim_certificate(row: str) -> FlowerIntersectionCertificate:
    claim = next(c for c in CLAIMS if c.row == row)
    s = claim_systems(claim)
    x = flower_point_of(claim)
    return FlowerIntersectionCertificate(s[0].v, s, 0 if x is None else x, claim.claimed_k)


def check_claim(claim: PaperClaim) -> CheckRow:
    s1, s2, s3 = (s.block_set for s in claim_systems(claim))
    i12, i13, i23 = s1 & s2, s1 & s3, s2 & s3
    sizes = (len(i12), len(i13), len(i23))
    notes = []
    for ident in {claim.first, claim.source}:
        if get(ident).status == "quarantined":
            notes.append(f"{ident} used as repaired: {get(ident + '-REPAIRED').note}")
    if not i12 == i13 == i23:
        notes.append(f"pairwise intersections differ (sizes {sizes[0]}, {sizes[1]}, {sizes[2]})")
        return CheckRow(claim, None, False, "; ".join(notes), sizes)
    v = claim_systems(claim)[0].v
    x = flower_point_of(claim)
    if x is None:
        notes.append("no point has a common flower")
        return CheckRow(claim, None, False, "; ".join(notes), sizes)
    if claim.flower_point is None:
        notes.append(f"flower point found by scan: {x + 1}")
    flowers = [flower_of(TripleSystem(v, s), x).blocks for s in (s1, s2, s3)]
    if not (flowers[0] == flowers[1] == flowers[2] and set(flowers[0]) <= i12):
        notes.append(f"flower at point {x + 1} not common")
        return CheckRow(claim, None, False, "; ".join(notes), sizes)
    k = len(i12) - (v - 1) // 2
    return CheckRow(claim, k, k == claim.claimed_k, "; ".join(notes), sizes)


def reproduce_paper_checks() -> list[CheckRow]:
    return [check_claim(c) for c in CLAIMS]


# -- published spectra -----------------------------------------------------------

@dataclass(frozen=True)
class PublishedSpectrum:
    r: int
    lower: frozenset
    upper: frozenset
    derived_only: bool = False
    source: str = ""

    def __post_init__(self):
        full = spectra.i3f(self.r)
        if not (self.lower <= self.upper <= full):
            raise ValueError(f"inconsistent bounds for r={self.r}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper and not self.derived_only

    @property
    def undecided(self) -> frozenset:
        return self.upper - self.lower


def _rng(a, b):
    return frozenset(range(a, b + 1))


@lru_cache(maxsize=None)
def published_spectrum(r: int) -> PublishedSpectrum:
    full = spectra.i3f(r) if spectra.admissible(r) else frozenset()
    small = {
        1: ({0}, {0}),
        3: ({4}, {4}),
        4: ({0, 8}, {0, 8}),
        6: (_rng(0, 5) | {7, 20}, _rng(0, 7) | {20}),
        7: (_rng(0, 8) | _rng(10, 13) | {16, 22, 28}, _rng(0, 16) | {22, 28}),
        9: (full - {4, 6, 7, 9, 11, 34, 35}, full),
        24: (full - _rng(1, 15), full),
    }
    if r in small:
        lo, up = small[r]
        return PublishedSpectrum(r, frozenset(lo), frozenset(up), source=f"small case r={r}")
    if spectra.admissible(r) and r >= 10:
        return PublishedSpectrum(r, full, full, source="general case" if r not in (10, 15, 60, 132) else f"case r={r}")
    return PublishedSpectrum(r, frozenset(), full, derived_only=True, source="necessary condition only")


@dataclass
class NecessaryReport:
    r: int
    k: int
    violations: list = field(default_factory=list)
    in_i3f: bool = False

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        return "ok" if self.ok else "; ".join(self.violations)


def check_necessary_conditions(r: int, k: int) -> NecessaryReport:
    """Every condition a flower intersection number k for r must satisfy."""
    rep = NecessaryReport(r, k)
    if not spectra.admissible(r):
        rep.violations.append(f"r={r} is not admissible (need r = 0 or 1 mod 3)")
        return rep
    rep.in_i3f = k in spectra.i3f(r)
    if not rep.in_i3f:
        rep.violations.append(f"k={k} is not in I^3_F({r}) = {spectra.fmt_set(spectra.i3f(r))}")
    try:
        j3 = spectra.flower_values_from_j3(r)
    except KeyError:
        j3 = None
    if j3 is not None and k not in j3:
        rep.violations.append(f"k+r={k + r} is not a 3-way intersection number of STS({2 * r + 1})")
    if k not in spectra.published_jf(r):
        rep.violations.append(f"k={k} is not a 2-way flower intersection number for r={r}")
    pub = published_spectrum(r)
    if not pub.derived_only and k not in pub.upper:
        rep.violations.append(f"k={k} is outside the published upper bound {spectra.fmt_set(pub.upper)}")
    return rep
