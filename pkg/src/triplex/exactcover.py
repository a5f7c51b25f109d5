"""Algorithm X over a dict-of-sets matrix.

``columns`` maps each constraint to the set of option ids covering it;
``options`` maps an option id to the constraints it covers. Secondary
constraints (covered at most once) are passed separately.
"""

from __future__ import annotations

import random


class BudgetExhausted(Exception):
    pass


def solve(options, primary, secondary=(), rng: random.Random | None = None, budget=None, stats=None):
    """Yield exact covers of ``primary`` as lists of option ids.

    ``budget`` caps the number of search nodes; BudgetExhausted is raised
    when it runs out. ``stats["nodes"]`` receives the node count.
    """
    cols = {c: set() for c in primary}
    for c in secondary:
        cols[c] = set()
    prim = set(primary)
    for oid, cs in options.items():
        for c in cs:
            cols[c].add(oid)
    counter = [0]
    try:
        yield from _search(cols, options, prim, [], rng, budget, counter)
    finally:
        if stats is not None:
            stats["nodes"] = counter[0]


def _search(cols, options, prim, partial, rng, budget, counter):
    live = [c for c in cols if c in prim]
    if not live:
        yield list(partial)
        return
    counter[0] += 1
    if budget is not None and counter[0] > budget:
        raise BudgetExhausted(counter[0])
    c = min(live, key=lambda col: len(cols[col]))
    cands = list(cols[c])
    if rng is not None:
        rng.shuffle(cands)
    else:
        cands.sort()
    for oid in cands:
        partial.append(oid)
        removed = _select(cols, options, oid)
        yield from _search(cols, options, prim, partial, rng, budget, counter)
        _deselect(cols, options, oid, removed)
        partial.pop()


def _select(cols, options, oid):
    removed = []
    for c in options[oid]:
        for other in cols[c]:
            for c2 in options[other]:
                if c2 != c:
                    cols[c2].discard(other)
        removed.append(cols.pop(c))
    return removed


def _deselect(cols, options, oid, removed):
    for c in reversed(options[oid]):
        cols[c] = removed.pop()
        for other in cols[c]:
            for c2 in options[other]:
                if c2 != c:
                    cols[c2].add(other)


def first(options, primary, secondary=(), rng=None, budget=None, stats=None):
    """First solution or None; BudgetExhausted propagates."""
    gen = solve(options, primary, secondary, rng, budget, stats)
    try:
        for sol in gen:
            return sol
        return None
    finally:
        gen.close()
