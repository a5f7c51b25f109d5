"""Integer spectra used throughout: the S^3 bracket, I^3_F, I'^3 and the
published small-order sets for 3-way STS and Latin square intersections."""

from __future__ import annotations


def t(v: int) -> int:
    """Number of triples in an STS(v)."""
    return v * (v - 1) // 6


def admissible(r: int) -> bool:
    return r >= 0 and r % 3 in (0, 1)


def sts_order_ok(v: int) -> bool:
    return v >= 1 and v % 6 in (1, 3)


def spectrum_s3(n: int) -> frozenset[int]:
    """{0..n} minus n-1, n-2, n-3, n-4, n-5, n-7 (negative exceptions ignored)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    gaps = {n - d for d in (1, 2, 3, 4, 5, 7)}
    return frozenset(x for x in range(n + 1) if x not in gaps)


def spectrum_s2(n: int) -> frozenset[int]:
    """The two-way bracket: {0..n} minus n-1, n-2, n-3, n-5."""
    gaps = {n - d for d in (1, 2, 3, 5)}
    return frozenset(x for x in range(n + 1) if x not in gaps)


def max_flower_k(r: int) -> int:
    return 2 * r * (r - 1) // 3


def i3f(r: int) -> frozenset[int]:
    return spectrum_s3(max_flower_k(r))


def i3(v: int) -> frozenset[int]:
    return spectrum_s3(t(v))


def iprime3(n: int) -> frozenset[int]:
    """Candidate 3-way agreement counts for Latin squares of order n.

    Orders 1 and 2 admit only identical triples (three squares of order 2
    always have two equal), so they return {n*n}.
    """
    if n <= 0:
        raise ValueError("order must be positive")
    if n <= 2:
        return frozenset({n * n})
    if n == 3:
        return frozenset({0, 9})
    top = n * n
    return frozenset(range(top - 15 + 1)) | {top - 12, top - 9, top}


def published_j3(v: int) -> frozenset[int]:
    """Three-way STS intersection numbers J^3(v) as published for v >= 7."""
    if v == 3:
        return frozenset({1})
    if v == 7:
        return frozenset({1, 7})
    if v == 9:
        return frozenset({0, 1, 3, 4, 12})
    if v == 13:
        return i3(13) - {14, 15, 16, 17, 18, 20}
    if v == 15:
        return i3(15) - {24, 25, 26, 27}
    if v >= 19 and sts_order_ok(v):
        return i3(v)
    raise KeyError(f"no published J^3 for v={v}")


def published_jprime3(n: int) -> frozenset[int]:
    """Published 3-way Latin square agreement spectrum J'^3(n)."""
    table = {
        3: frozenset({0, 9}),
        4: frozenset({0, 1, 4, 16}),
        5: frozenset(range(8)) | {10, 25},
        6: frozenset(range(20)) | {27, 36},
        7: frozenset(range(31)) | {37, 40, 49},
    }
    if n in table:
        return table[n]
    if n >= 8:
        return iprime3(n)
    if n in (1, 2):
        return frozenset({n * n})
    raise KeyError(n)


def published_jf(r: int) -> frozenset[int]:
    """Two-way flower intersection spectrum J_F(r)."""
    base = spectrum_s2(max_flower_k(r))
    if r == 4:
        return base - {1, 4}
    return base


def flower_values_from_j3(r: int) -> frozenset[int]:
    """{a - r : a in J^3(2r+1), a >= r}."""
    return frozenset(a - r for a in published_j3(2 * r + 1) if a >= r)


def fixed_point_counts(m: int) -> frozenset[int]:
    """Common fixed-point counts of a permutation triple (id, s, s') on m
    letters where every moved letter has three distinct images."""
    return frozenset(range(0, m - 2)) | {m} if m >= 0 else frozenset()


def sumset(*sets) -> frozenset[int]:
    out = {0}
    for s in sets:
        out = {a + b for a in out for b in s}
    return frozenset(out)


def fmt_set(values) -> str:
    """Compact interval notation, e.g. [0,5] U {7,20}."""
    vals = sorted(values)
    if not vals:
        return "{}"
    runs, singles = [], []
    start = prev = vals[0]
    for x in vals[1:] + [None]:
        if x is not None and x == prev + 1:
            prev = x
            continue
        if prev - start >= 2:
            runs.append(f"[{start},{prev}]")
        else:
            singles.extend(range(start, prev + 1))
        if x is not None:
            start = prev = x
    parts = runs + ([("{" + ",".join(map(str, singles)) + "}")] if singles else [])
    return " U ".join(parts)
