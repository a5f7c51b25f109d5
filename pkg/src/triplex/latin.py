"""Latin squares, MOLS and 3-way agreement triples.

A triple of Latin squares is *valid* when every cell either holds the same
symbol in all three squares or three pairwise distinct symbols; its
agreement is the set of cells of the first kind.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import exactcover, fields, spectra


class LatinError(Exception):
    pass


class TwoAgreeOneDiffers(LatinError):
    def __init__(self, cell, entries):
        self.cell, self.entries = cell, entries
        super().__init__(f"cell {cell} holds {entries}: two squares agree, one differs")


class TargetNotInSpectrum(LatinError):
    pass


class Unrealized(LatinError):
    def __init__(self, n, k, reason=""):
        self.n, self.k = n, k
        super().__init__(f"no triple of order {n} with {k} agreement cells found" + (f" ({reason})" if reason else ""))


class NoDecomposition(LatinError):
    pass


@dataclass(frozen=True)
class LatinSquare:
    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Sequence[Sequence[int]]):
        object.__setattr__(self, "rows", tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, cell):
        i, j = cell
        return self.rows[i][j]

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=int)

    def transpose(self):
        return LatinSquare(list(zip(*self.rows)))

    def relabel(self, mapping):
        return LatinSquare([[mapping[x] for x in r] for r in self.rows])

    def conjugate(self, order: str):
        """Conjugate by permuting the (row, col, symbol) roles; ``order`` names
        the new roles, e.g. "scr" makes old symbols the new rows."""
        n = self.n
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                t = {"r": i, "c": j, "s": self.rows[i][j]}
                out[t[order[0]]][t[order[1]]] = t[order[2]]
        return LatinSquare(out)

    def to_dict(self):
        return {"n": self.n, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d):
        sq = cls(d["rows"])
        if sq.n != d.get("n", sq.n):
            raise ValueError("n does not match row count")
        return sq


@dataclass
class LatinReport:
    ok: bool
    kind: str = ""
    index: int = -1
    symbol: int = -1

    def __str__(self):
        return "ok" if self.ok else f"{self.kind} {self.index} repeats symbol {self.symbol}"


def validate_latin(sq: LatinSquare) -> LatinReport:
    n = sq.n
    for r in sq.rows:
        if len(r) != n:
            return LatinReport(False, "shape", -1, -1)
        for x in r:
            if not 0 <= x < n:
                return LatinReport(False, "symbol-range", -1, x)
    for i, r in enumerate(sq.rows):
        seen = set()
        for x in r:
            if x in seen:
                return LatinReport(False, "row", i, x)
            seen.add(x)
    for j in range(n):
        seen = set()
        for i in range(n):
            x = sq.rows[i][j]
            if x in seen:
                return LatinReport(False, "column", j, x)
            seen.add(x)
    return LatinReport(True)


def is_latin(sq) -> bool:
    return validate_latin(sq).ok


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    if a.n != b.n:
        raise ValueError(f"order mismatch {a.n} vs {b.n}")
    pairs = {(a.rows[i][j], b.rows[i][j]) for i in range(a.n) for j in range(a.n)}
    return len(pairs) == a.n * a.n


def mols_prime_power(q: int, count: int) -> list[LatinSquare]:
    """Squares (i, j) -> a*i + j over GF(q) for the field elements a = 1..count."""
    if fields.prime_power(q) is None:
        raise ValueError(f"{q} is not a prime power")
    if not 1 <= count <= q - 1:
        raise ValueError(f"count must lie in 1..{q - 1}")
    add, mul = fields.tables(q)
    out = []
    for a in range(1, count + 1):
        out.append(LatinSquare(add[mul[a, :], :]))  # row i: a*i + j
    return out


def cyclic(n: int, shift: int = 0) -> LatinSquare:
    return LatinSquare([[(i + j + shift) % n for j in range(n)] for i in range(n)])


def three_way_cells(a: LatinSquare, b: LatinSquare, c: LatinSquare) -> frozenset:
    if not a.n == b.n == c.n:
        raise ValueError("order mismatch")
    agree = []
    for i in range(a.n):
        ra, rb, rc = a.rows[i], b.rows[i], c.rows[i]
        for j in range(a.n):
            x, y, z = ra[j], rb[j], rc[j]
            if x == y == z:
                agree.append((i, j))
            elif x == y or x == z or y == z:
                raise TwoAgreeOneDiffers((i, j), (x, y, z))
    return frozenset(agree)


@dataclass(frozen=True)
class LatinTriple:
    squares: tuple[LatinSquare, LatinSquare, LatinSquare]
    agreement: frozenset

    @classmethod
    def of(cls, a, b, c):
        for sq in (a, b, c):
            rep = validate_latin(sq)
            if not rep.ok:
                raise LatinError(f"not a Latin square: {rep}")
        return cls((a, b, c), three_way_cells(a, b, c))

    @property
    def n(self):
        return self.squares[0].n

    @property
    def k(self):
        return len(self.agreement)

    def map(self, fn):
        return LatinTriple.of(*(fn(s) for s in self.squares))

    def to_dict(self):
        return {"n": self.n, "k": self.k, "squares": [s.to_dict() for s in self.squares]}

    @classmethod
    def from_dict(cls, d):
        t = cls.of(*(LatinSquare.from_dict(s) for s in d["squares"]))
        if "k" in d and d["k"] != t.k:
            raise LatinError(f"declared agreement {d['k']} but verified {t.k}")
        return t


@dataclass(frozen=True)
class DiagonalLatinTriple(LatinTriple):
    symbol: int = 0

    @classmethod
    def of(cls, a, b, c, symbol=None):
        base = LatinTriple.of(a, b, c)
        n = base.n
        sym = a.rows[0][n - 1] if symbol is None else symbol
        for s in base.squares:
            if any(s.rows[i][n - 1 - i] != sym for i in range(n)):
                raise LatinError("secondary diagonal is not constant and shared")
        return cls(base.squares, base.agreement, sym)

    @property
    def off_diagonal(self):
        return self.k - self.n


def identity_triple(sq: LatinSquare) -> LatinTriple:
    return LatinTriple.of(sq, sq, sq)


def shift_triple(n: int) -> LatinTriple:
    return LatinTriple.of(cyclic(n), cyclic(n, 1), cyclic(n, 2))


def product_triple(t1: LatinTriple, t2: LatinTriple) -> LatinTriple:
    m, n = t1.n, t2.n
    squares = []
    for a, b in zip(t1.squares, t2.squares):
        rows = [[a.rows[i1][j1] * n + b.rows[i2][j2]
                 for j1 in range(m) for j2 in range(n)]
                for i1 in range(m) for i2 in range(n)]
        squares.append(LatinSquare(rows))
    return LatinTriple.of(*squares)


# -- structural constructions ------------------------------------------------

def permutation_triple(m: int, fixed: int) -> tuple[list[int], list[int], list[int]]:
    """Identity, a cycle and its inverse on m letters fixing the first ``fixed``."""
    moved = m - fixed
    if moved not in (0,) and moved < 3:
        raise NoDecomposition(f"cannot move {moved} of {m} letters with distinct images")
    ident = list(range(m))
    fwd, back = list(range(m)), list(range(m))
    for idx in range(fixed, m):
        nxt = fixed + (idx - fixed + 1) % moved
        fwd[idx] = nxt
        back[nxt] = idx
    return ident, fwd, back


def quadrant_triple(parts: Sequence[LatinTriple]) -> LatinTriple:
    """Order 2m from four order-m triples: [[P, Q], [R, T]] with P, T on the
    low symbols and Q, R on the high ones."""
    m = parts[0].n
    squares = []
    for idx in range(3):
        p, q, r, t = (parts[x].squares[idx] for x in range(4))
        rows = []
        for i in range(m):
            rows.append(list(p.rows[i]) + [m + x for x in q.rows[i]])
        for i in range(m):
            rows.append([m + x for x in r.rows[i]] + list(t.rows[i]))
        squares.append(LatinSquare(rows))
    return LatinTriple.of(*squares)


def prolongation_square(sub: LatinSquare) -> LatinSquare:
    """Order 2m+1 square holding ``sub`` (symbols 0..m-1) in the top-left
    corner; symbol 2m fills the secondary diagonal."""
    m = sub.n
    n = 2 * m + 1
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < m and j < m:
                x = sub.rows[i][j]
            elif i < m:
                x = m + (j - m + i) % (m + 1)
            elif j < m:
                x = m + (i - m + j) % (m + 1)
            elif i == j:
                x = m + i % (m + 1)
            else:
                x = (i - j) % (m + 1) - 1
            rows[i][j] = x
    return LatinSquare(rows)


def prolongation_triple(sub: LatinTriple, low_fixed: int, high_fixed: int,
                        diagonal: bool = False) -> LatinTriple:
    """Order 2m+1 triple with agreement a + (m+1)*low_fixed + (2m+1)*high_fixed.

    The low symbols are permuted only inside the bottom-right block, the high
    symbols everywhere. With ``diagonal`` the high permutations fix symbol 2m,
    which occupies the whole secondary diagonal.
    """
    m = sub.n
    n = 2 * m + 1
    if diagonal and high_fixed < 1:
        raise NoDecomposition("the diagonal symbol is always fixed")
    lows = permutation_triple(m, low_fixed)
    # high symbols m..2m; order them so that 2m comes first when fixed
    high_order = [2 * m] + list(range(m, 2 * m))
    highs = permutation_triple(m + 1, high_fixed)
    squares = []
    for idx in range(3):
        base = prolongation_square(sub.squares[idx]).rows
        hmap = {high_order[a]: high_order[highs[idx][a]] for a in range(m + 1)}
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                x = base[i][j]
                if x >= m:
                    x = hmap[x]
                elif i >= m and j >= m:
                    x = lows[idx][x]
                row.append(x)
            rows.append(row)
        squares.append(LatinSquare(rows))
    if diagonal:
        return DiagonalLatinTriple.of(*squares, symbol=2 * m)
    return LatinTriple.of(*squares)


def relabel_triple(t: LatinTriple, mapping) -> LatinTriple:
    sq = [s.relabel(mapping) for s in t.squares]
    if isinstance(t, DiagonalLatinTriple):
        return DiagonalLatinTriple.of(*sq, symbol=mapping[t.symbol])
    return LatinTriple.of(*sq)


def diagonal_to_zero(t: DiagonalLatinTriple) -> DiagonalLatinTriple:
    n, d = t.n, t.symbol
    mapping = {x: x for x in range(n)}
    mapping[d], mapping[0] = 0, d
    return relabel_triple(t, mapping)


# -- recipes: which agreement counts the deterministic constructions reach ---

@lru_cache(maxsize=None)
def exhaustive_witnesses(n: int) -> dict:
    """k -> one witness triple (as row tuples) for n <= 4, by full search."""
    from .search import exhaustive_latin_3way_witnesses

    return exhaustive_latin_3way_witnesses(n)


@lru_cache(maxsize=None)
def library() -> dict:
    """Stored witnesses {(n, k): rows} found by the randomized search and
    shipped as data; each one is re-verified when used."""
    from importlib import resources

    path = resources.files("triplex") / "data" / "latin_witnesses.json"
    if not path.is_file():
        return {}
    raw = json.loads(path.read_text())
    return {(e["n"], e["k"]): e["squares"] for e in raw["triples"]}


def _bits(values, top) -> np.ndarray:
    arr = np.zeros(top + 1, dtype=bool)
    arr[sorted(values)] = True
    return arr


@lru_cache(maxsize=None)
def _quadrant_sums(m: int, parts: int) -> np.ndarray:
    """Boolean array of sums of ``parts`` values from known_values(m)."""
    base = _bits(known_values(m), m * m).astype(np.int64)
    if parts == 1:
        return base.astype(bool)
    prev = _quadrant_sums(m, parts - 1).astype(np.int64)
    return np.convolve(prev, base) > 0


@lru_cache(maxsize=None)
def known_values(n: int) -> frozenset:
    """Agreement counts the deterministic constructions reach at order n,
    using stored witnesses at the leaves."""
    out = {n * n}
    if n >= 3:
        out.add(0)
    if n <= 4:
        out |= set(exhaustive_witnesses(n))
    out |= {k for (m, k) in library() if m == n}
    if n % 2 == 0 and n >= 4:
        out |= set(np.nonzero(_quadrant_sums(n // 2, 4))[0].tolist())
    if n % 2 == 1 and n >= 3:
        m = (n - 1) // 2
        sub = _bits(known_values(m), m * m)
        total = np.zeros(n * n + 1, dtype=bool)
        for e in spectra.fixed_point_counts(m):
            for f in spectra.fixed_point_counts(m + 1):
                shift = (m + 1) * e + n * f
                total[shift:shift + m * m + 1] |= sub
        out |= set(np.nonzero(total)[0].tolist())
    for m in range(3, n // 2 + 1):
        out |= {n * n - m * m + x for x in known_values(m)}
    for p in range(2, n // 2 + 1):
        if n % p == 0:
            q = n // p
            out |= {x * y for x in known_values(p) for y in known_values(q)}
    return frozenset(out)


def recipe_for(n: int, k: int):
    """A construction recipe for (n, k), or None."""
    if k not in known_values(n):
        return None
    if k == n * n:
        return ("identity",)
    if k == 0 and n >= 3:
        return ("shift",)
    if n <= 4 and k in exhaustive_witnesses(n):
        return ("exhaustive", k)
    if (n, k) in library():
        return ("library", k)
    if n % 2 == 0:
        m = n // 2
        parts, left = [], k
        for remaining in (3, 2, 1):
            sums = _quadrant_sums(m, remaining)
            for x in sorted(known_values(m), reverse=True):
                if 0 <= left - x < len(sums) and sums[left - x]:
                    parts.append(x)
                    left -= x
                    break
            else:
                parts = None
                break
        if parts is not None and left in known_values(m):
            return ("quadrant", tuple(parts) + (left,))
    else:
        m = (n - 1) // 2
        sub = known_values(m)
        for f in sorted(spectra.fixed_point_counts(m + 1), reverse=True):
            for e in sorted(spectra.fixed_point_counts(m), reverse=True):
                a = k - (m + 1) * e - n * f
                if a in sub:
                    return ("prolong", a, e, f)
    for p in range(2, n // 2 + 1):
        if n % p == 0:
            q = n // p
            for x in known_values(p):
                if x and k % x == 0 and k // x in known_values(q):
                    return ("product", p, x, k // x)
    for m in range(n // 2, 2, -1):
        x = k - (n * n - m * m)
        if x in known_values(m):
            return ("embed", m, x)
    return None


@lru_cache(maxsize=None)
def diagonal_values(n: int) -> frozenset:
    """Total agreement (diagonal included) the constant-diagonal prolongation
    reaches for odd n = 2m+1."""
    if n % 2 == 0 or n < 3:
        return frozenset()
    m = (n - 1) // 2
    out = set()
    for a in known_values(m):
        for e in spectra.fixed_point_counts(m):
            for f in spectra.fixed_point_counts(m + 1):
                if f >= 1:
                    out.add(a + (m + 1) * e + n * f)
    return frozenset(out)


def complete_latin(partial, budget: int = 10**6) -> LatinSquare:
    """Fill the None entries of ``partial`` to a Latin square (exact cover)."""
    n = len(partial)
    row_used = [set() for _ in range(n)]
    col_used = [set() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            x = partial[i][j]
            if x is not None:
                row_used[i].add(x)
                col_used[j].add(x)
    options, primary = {}, []
    for i in range(n):
        for j in range(n):
            if partial[i][j] is None:
                primary.append(("cell", i, j))
                for s in range(n):
                    if s not in row_used[i] and s not in col_used[j]:
                        options[(i, j, s)] = (("cell", i, j), ("row", i, s), ("col", j, s))
        primary += [("row", i, s) for s in range(n) if s not in row_used[i]]
        primary += [("col", i, s) for s in range(n) if s not in col_used[i]]
    sol = exactcover.first(options, primary, budget=budget)
    if sol is None:
        raise LatinError("partial square has no completion")
    rows = [list(r) for r in partial]
    for i, j, s in sol:
        rows[i][j] = s
    return LatinSquare(rows)


def embed_triple(t: LatinTriple, n: int) -> LatinTriple:
    """Place an order-m triple as a subsquare (top-left, symbols 0..m-1) of an
    order-n square, m <= n/2, identical in all three squares elsewhere."""
    m = t.n
    if 2 * m > n:
        raise NoDecomposition(f"a subsquare of order {m} does not fit in order {n}")
    partial = [[None] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            partial[i][j] = t.squares[0].rows[i][j]
    outer = complete_latin(partial)
    squares = []
    for sq in t.squares:
        rows = [list(r) for r in outer.rows]
        for i in range(m):
            rows[i][:m] = sq.rows[i]
        squares.append(LatinSquare(rows))
    return LatinTriple.of(*squares)


def build_recipe(n: int, recipe) -> LatinTriple:
    kind = recipe[0]
    sub = lambda m, x: build_recipe(m, recipe_for(m, x))  # noqa: E731
    if kind == "identity":
        return identity_triple(cyclic(n))
    if kind == "shift":
        return shift_triple(n)
    if kind == "exhaustive":
        rows = exhaustive_witnesses(n)[recipe[1]]
        return LatinTriple.of(*(LatinSquare(r) for r in rows))
    if kind == "library":
        return LatinTriple.of(*(LatinSquare(r) for r in library()[(n, recipe[1])]))
    if kind == "quadrant":
        m = n // 2
        return quadrant_triple([sub(m, x) for x in recipe[1]])
    if kind == "prolong":
        _, a, e, f = recipe
        return prolongation_triple(sub((n - 1) // 2, a), e, f)
    if kind == "product":
        _, p, k1, k2 = recipe
        return product_triple(sub(p, k1), sub(n // p, k2))
    if kind == "embed":
        _, m, x = recipe
        return embed_triple(sub(m, x), n)
    raise ValueError(recipe)


# -- randomized search ---------------------------------------------------------

def random_latin_square(n: int, rng: random.Random) -> LatinSquare:
    """A random square from a shuffled exact-cover completion, falling back
    to a shuffled cyclic square if the completion stalls."""
    options = {(i, j, s): (("cell", i, j), ("row", i, s), ("col", j, s))
               for i in range(n) for j in range(n) for s in range(n)}
    primary = [(kind, a, b) for kind in ("cell", "row", "col") for a in range(n) for b in range(n)]
    try:
        sol = exactcover.first(options, primary, rng=rng, budget=50 * n * n)
    except exactcover.BudgetExhausted:
        sol = None
    if sol:
        rows = [[0] * n for _ in range(n)]
        for i, j, s in sol:
            rows[i][j] = s
        return LatinSquare(rows)
    base = cyclic(n)
    rp, cp, sp = (rng.sample(range(n), n) for _ in range(3))
    return LatinSquare([[sp[base.rows[rp[i]][cp[j]]] for j in range(n)] for i in range(n)])


def _margins(n: int, k: int, rng: random.Random):
    """Random line counts in {0..n-3} U {n} summing to k, or None."""
    allowed = list(range(n - 2)) + [n]
    for _ in range(200):
        out, left = [], k
        for idx in range(n):
            slots = n - idx - 1
            opts = [a for a in allowed if 0 <= left - a <= n * slots]
            if not opts:
                break
            # favour balanced counts; occasionally take a full line
            mean = left / (slots + 1)
            opts.sort(key=lambda a: abs(a - mean) + rng.random() * 2.5)
            a = opts[0]
            out.append(a)
            left -= a
        if len(out) == n and left == 0:
            rng.shuffle(out)
            return out
    return None


def _agreement_pattern(n: int, k: int, rng: random.Random) -> set | None:
    """k cells whose rows and columns leave 0 or at least 3 cells free."""
    rows, cols = _margins(n, k, rng), _margins(n, k, rng)
    if rows is None or cols is None:
        return None
    need = list(cols)
    cells = set()
    for i in sorted(range(n), key=lambda x: -rows[x]):
        order = sorted(range(n), key=lambda j: (-need[j], rng.random()))
        pick = [j for j in order[: rows[i]] if need[j] > 0]
        if len(pick) < rows[i]:
            return None
        for j in pick:
            need[j] -= 1
            cells.add((i, j))
    return cells


def _complete_pair(l1: LatinSquare, agree: set, rng, budget):
    """Squares 2 and 3 equal to ``l1`` on ``agree`` and pairwise different
    from it and each other elsewhere, via exact cover."""
    n = l1.n
    free = [(i, j) for i in range(n) for j in range(n) if (i, j) not in agree]
    row_need = [set(range(n)) for _ in range(n)]
    col_need = [set(range(n)) for _ in range(n)]
    for i, j in agree:
        row_need[i].discard(l1.rows[i][j])
        col_need[j].discard(l1.rows[i][j])
    options = {}
    primary = []
    for c in free:
        primary.append(("cell", c))
    for i in range(n):
        for s in row_need[i]:
            primary += [("r2", i, s), ("r3", i, s)]
    for j in range(n):
        for s in col_need[j]:
            primary += [("c2", j, s), ("c3", j, s)]
    for (i, j) in free:
        x = l1.rows[i][j]
        allowed = row_need[i] & col_need[j] - {x}
        for s in allowed:
            for u in allowed:
                if u != s:
                    options[(i, j, s, u)] = (("cell", (i, j)), ("r2", i, s), ("c2", j, s),
                                             ("r3", i, u), ("c3", j, u))
    sol = exactcover.first(options, primary, rng=rng, budget=budget)
    if sol is None:
        return None
    r2 = [list(r) for r in l1.rows]
    r3 = [list(r) for r in l1.rows]
    for (i, j, s, u) in sol:
        r2[i][j], r3[i][j] = s, u
    return LatinSquare(r2), LatinSquare(r3)


@lru_cache(maxsize=None)
def _derangement_pairs(m: int) -> tuple:
    """Pairs (p, q) of permutations of range(m) with i, p(i), q(i) distinct."""
    perms = [p for p in itertools.permutations(range(m)) if all(p[i] != i for i in range(m))]
    return tuple((p, q) for p in perms for q in perms if all(p[i] != q[i] for i in range(m)))


@lru_cache(maxsize=None)
def _pattern_counts(n: int, a: int, volume: int) -> tuple:
    """counts[i][x]: ways for columns i.. to hold x moved cells."""
    sizes = [0] + list(range(3, a + 1))
    counts = [[0] * (volume + 1) for _ in range(n + 1)]
    counts[n][0] = 1
    for i in range(n - 1, -1, -1):
        for x in range(volume + 1):
            counts[i][x] = sum(counts[i + 1][x - c] for c in sizes if c <= x)
    return tuple(tuple(r) for r in counts)


def _column_sizes(n: int, a: int, volume: int, rng: random.Random):
    """Per-column counts in {0} U [3, a] summing to ``volume``, drawn
    uniformly among all such patterns, or None."""
    counts = _pattern_counts(n, a, volume)
    if counts[0][volume] == 0:
        return None
    sizes, left = [], volume
    for i in range(n):
        opts = [c for c in [0] + list(range(3, a + 1)) if c <= left and counts[i + 1][left - c]]
        c = rng.choices(opts, [counts[i + 1][left - c] for c in opts])[0]
        sizes.append(c)
        left -= c
    return sizes


def _row_window(l1: LatinSquare, rows: list, sizes: list, rng, budget, cap=400):
    """Squares 2 and 3 that differ from ``l1`` only inside ``rows``; column j
    of the window is re-permuted on ``sizes[j]`` of its cells."""
    n = l1.n
    options = {}
    for j in range(n):
        c = sizes[j]
        if c == 0:
            cover = [("col", j)]
            for i in rows:
                cover += [(2, i, l1.rows[i][j]), (3, i, l1.rows[i][j])]
            options[(j, ())] = tuple(cover)
            continue
        subsets = list(itertools.combinations(rows, c))
        pairs = _derangement_pairs(c)
        picks = [(S, pq) for S in subsets for pq in pairs]
        if len(picks) > cap:
            picks = rng.sample(picks, cap)
        for S, (p, q) in picks:
            img2 = {S[x]: S[p[x]] for x in range(c)}
            img3 = {S[x]: S[q[x]] for x in range(c)}
            cover = [("col", j)]
            for i in rows:
                cover += [(2, i, l1.rows[img2.get(i, i)][j]), (3, i, l1.rows[img3.get(i, i)][j])]
            options[(j, tuple(sorted(img2.items())), tuple(sorted(img3.items())))] = tuple(cover)
    primary = [("col", j) for j in range(n)] + [(q, i, s) for q in (2, 3) for i in rows for s in range(n)]
    sol = exactcover.first(options, primary, rng=rng, budget=budget)
    if sol is None:
        return None
    r2 = [list(r) for r in l1.rows]
    r3 = [list(r) for r in l1.rows]
    for oid in sol:
        if len(oid) == 2:
            continue
        j, m2, m3 = oid
        for i, src in m2:
            r2[i][j] = l1.rows[src][j]
        for i, src in m3:
            r3[i][j] = l1.rows[src][j]
    return LatinSquare(r2), LatinSquare(r3)


def _joint(n: int, agree: set, rng, budget, stats):
    """All three squares at once for a fixed agreement pattern."""
    options = {}
    for i in range(n):
        for j in range(n):
            # relabelling symbols is free, so the first row of square 1 is fixed
            firsts = [j] if i == 0 else range(n)
            if (i, j) in agree:
                for s in firsts:
                    options[(i, j, s, s, s)] = (("cell", i, j),) + tuple(
                        x for q in (1, 2, 3) for x in (("row", q, i, s), ("col", q, j, s)))
            else:
                for s1 in firsts:
                    for s2 in range(n):
                        for s3 in range(n):
                            if s1 != s2 and s1 != s3 and s2 != s3:
                                options[(i, j, s1, s2, s3)] = (
                                    ("cell", i, j), ("row", 1, i, s1), ("col", 1, j, s1),
                                    ("row", 2, i, s2), ("col", 2, j, s2), ("row", 3, i, s3), ("col", 3, j, s3))
    primary = [("cell", i, j) for i in range(n) for j in range(n)]
    primary += [(kind, q, a, s) for kind in ("row", "col") for q in (1, 2, 3) for a in range(n) for s in range(n)]
    sol = exactcover.first(options, primary, rng=rng, budget=budget, stats=stats)
    if sol is None:
        return None
    sq = [[[0] * n for _ in range(n)] for _ in range(3)]
    for i, j, s1, s2, s3 in sol:
        sq[0][i][j], sq[1][i][j], sq[2][i][j] = s1, s2, s3
    return tuple(LatinSquare(x) for x in sq)


def _attempt(n: int, k: int, method: str, rng, budget, stats):
    volume = n * n - k
    if method == "pair":
        agree = _agreement_pattern(n, k, rng)
        if agree is None:
            return None
        l1 = random_latin_square(n, rng)
        pair = _complete_pair(l1, agree, rng, budget)
        return None if pair is None else (l1,) + pair
    if method == "window":
        heights = [a for a in range(3, min(n, 6) + 1) if _pattern_counts(n, a, volume)[0][volume]]
        if not heights:
            return None
        a = rng.choices(heights, [2 if a in (4, 5) else 1 for a in heights])[0]
        sizes = _column_sizes(n, a, volume, rng)
        if sizes is None:
            return None
        l1 = random_latin_square(n, rng) if rng.random() < 0.7 else cyclic(n)
        rows = sorted(rng.sample(range(n), a))
        pair = _row_window(l1, rows, sizes, rng, budget)
        return None if pair is None else (l1,) + pair
    agree = _agreement_pattern(n, k, rng)
    if agree is None:
        return None
    return _joint(n, agree, rng, budget, stats)


def search_triple(n: int, k: int, budget: int, seed: int = 0) -> LatinTriple | None:
    """Seeded randomized search. Each attempt draws one of three methods:
    completing squares 2 and 3 around a random first square and agreement
    pattern (suits small k), re-permuting columns inside a few rows (suits
    small disagreement volume), or solving all three squares jointly.
    ``budget`` counts exact-cover nodes; returns None when it runs out."""
    rng = random.Random(seed * 7_919 + n * 1_009 + k)
    volume = n * n - k
    spent = 0
    per_try = max(2_000, min(50_000, budget // 50))
    weights = {
        "pair": 3.0 if k <= n * n // 3 else 0.5,
        "window": 3.0 if volume <= 6 * n else 0.5,
        "joint": 1.0 if n <= 9 else 0.2,
    }
    methods, w = zip(*weights.items())
    while spent < budget:
        method = rng.choices(methods, w)[0]
        stats: dict = {}
        try:
            squares = _attempt(n, k, method, rng, min(per_try, budget - spent), stats)
        except exactcover.BudgetExhausted:
            spent += per_try
            continue
        spent += max(1, stats.get("nodes", per_try // 10))
        if squares is not None:
            t = LatinTriple.of(*squares)
            if t.k == k:
                return t
    return None


def realize_three_way(n: int, k: int, budget: int = 10**7, seed: int = 0) -> LatinTriple:
    """A verified triple of order n agreeing in exactly k cells.

    Tries exhaustive witnesses (n <= 4), the deterministic constructions and
    stored witnesses, then a seeded randomized search. Raises Unrealized on
    failure.
    """
    known = spectra.published_jprime3(n)
    if k not in known:
        raise TargetNotInSpectrum(f"{k} is not an agreement count for order {n}: {spectra.fmt_set(known)}")
    recipe = recipe_for(n, k)
    if recipe is not None:
        t = build_recipe(n, recipe)
    elif n <= 4:
        raise Unrealized(n, k, "exhaustive search shows no such triple")
    else:
        t = search_triple(n, k, budget, seed)
        if t is None:
            raise Unrealized(n, k, f"budget {budget} exhausted")
    if len(three_way_cells(*t.squares)) != k:
        raise Unrealized(n, k, "internal construction error")
    return t


def decompose_diagonal(n: int, k: int):
    """(a, e, f) with k = a + (m+1)e + (2m+1)f for order n = 2m+1."""
    if n % 2 == 0 or n < 3:
        raise NoDecomposition("constant-diagonal triples are built for odd orders")
    m = (n - 1) // 2
    sub = known_values(m)
    for f in sorted(x for x in spectra.fixed_point_counts(m + 1) if x >= 1):
        for e in sorted(spectra.fixed_point_counts(m)):
            a = k - (m + 1) * e - n * f
            if a in sub:
                return a, e, f
    raise NoDecomposition(f"{k} has no decomposition for order {n}")


def realize_diagonal_triple(n: int, k: int, budget: int = 10**7, seed: int = 0) -> DiagonalLatinTriple:
    """Triple of odd order n sharing a constant secondary diagonal (symbol 0),
    with k agreement cells in total, diagonal included."""
    if n % 2 == 0:
        raise NoDecomposition("constant-diagonal triples are built for odd orders")
    a, e, f = decompose_diagonal(n, k)
    m = (n - 1) // 2
    sub = build_recipe(m, recipe_for(m, a))
    t = prolongation_triple(sub, e, f, diagonal=True)
    t = diagonal_to_zero(t)
    if t.k != k:
        raise Unrealized(n, k, "internal construction error")
    return t


def with_common_row(t: DiagonalLatinTriple) -> LatinTriple:
    """Conjugate so that the shared diagonal symbol becomes a shared row."""
    return LatinTriple.of(*(s.conjugate("scr") for s in t.squares))


def with_common_column(t: DiagonalLatinTriple) -> LatinTriple:
    return LatinTriple.of(*(s.conjugate("rsc") for s in t.squares))


# -- special squares of orders 8 and 16 --------------------------------------

@dataclass(frozen=True)
class SpecialTriple:
    """Three special squares plus their agreement count over the cells above
    the 2x2 diagonal blocks."""

    order: int
    squares: tuple[LatinSquare, LatinSquare, LatinSquare]
    value: int


def _klein(i, j):
    return i ^ j


def special_square8(a: LatinSquare) -> LatinSquare:
    """Order 8; ``a`` is an order-4 square on symbols 0..3, placed on 4..7."""
    rows = [[0] * 8 for _ in range(8)]
    for i in range(8):
        for j in range(8):
            if (i < 4) == (j < 4):
                rows[i][j] = _klein(i % 4, j % 4)
            elif i < 4:
                rows[i][j] = 4 + a.rows[i][j - 4]
            else:
                rows[i][j] = 4 + a.rows[j][i - 4]
    return LatinSquare(rows)


def special_square16(a: LatinSquare, b: LatinSquare, c: LatinSquare) -> LatinSquare:
    """Order 16; ``a``, ``c`` order 4 on 0..3 (placed on 4..7), ``b`` order 8
    on 0..7 (placed on 8..15)."""
    top, bottom = special_square8(a), special_square8(c)
    rows = [[0] * 16 for _ in range(16)]
    for i in range(16):
        for j in range(16):
            if i < 8 and j < 8:
                rows[i][j] = top.rows[i][j]
            elif i >= 8 and j >= 8:
                rows[i][j] = bottom.rows[i - 8][j - 8]
            elif i < 8:
                rows[i][j] = 8 + b.rows[i][j - 8]
            else:
                rows[i][j] = 8 + b.rows[j][i - 8]
    return LatinSquare(rows)


def above_block_diagonal(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n) if i // 2 != j // 2]


def _special_value(squares) -> int:
    n = squares[0].n
    # full 3-way check over the whole square, then count the upper region
    agree = three_way_cells(*squares)
    return sum(1 for c in above_block_diagonal(n) if c in agree)


def assemble_special8(a_triple: LatinTriple) -> SpecialTriple:
    if a_triple.n != 4:
        raise LatinError("the order-8 special square needs an order-4 triple")
    squares = tuple(special_square8(s) for s in a_triple.squares)
    for s in squares:
        if not is_latin(s):
            raise LatinError("assembled square is not Latin")
    return SpecialTriple(8, squares, _special_value(squares))


def assemble_special16(a_triple: LatinTriple, c_triple: LatinTriple, b_triple: LatinTriple) -> SpecialTriple:
    if a_triple.n != 4 or c_triple.n != 4 or b_triple.n != 8:
        raise LatinError("order-16 special squares need order 4, 4 and 8 triples")
    squares = tuple(
        special_square16(a, b, c)
        for a, b, c in zip(a_triple.squares, b_triple.squares, c_triple.squares)
    )
    for s in squares:
        if not is_latin(s):
            raise LatinError("assembled square is not Latin")
    return SpecialTriple(16, squares, _special_value(squares))
