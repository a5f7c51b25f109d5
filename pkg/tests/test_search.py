import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplex import catalog, search, spectra
from triplex.core import TripleSystem, flower_intersection_number, validate_sts


def test_sts_counts():
    assert len(search.enumerate_all_sts(7)) == 30
    assert len(search.enumerate_all_sts(9)) == 840
    with pytest.raises(ValueError):
        search.enumerate_all_sts(13)


def test_exhaustive_flower_oracle():
    assert search.exhaustive_flower_spectrum(3) == {4}
    assert search.exhaustive_flower_spectrum(4) == {0, 8}
    for k, cert in search.exhaustive_flower_spectrum(4, witnesses=True).items():
        assert flower_intersection_number(cert) == k


def test_exhaustive_latin_oracle():
    assert search.exhaustive_latin_3way(3) == {0, 9}
    got = search.exhaustive_latin_3way(4)
    assert got == {0, 1, 4, 16}
    assert 7 not in got


def test_latin_square_counts():
    assert len(search.all_latin_squares(3)) == 12
    assert len(search.all_latin_squares(4)) == 576


@settings(max_examples=30)
@given(st.sampled_from([v for v in range(7, 40) if v % 6 in (1, 3)]), st.integers(0, 10**6))
def test_hillclimb_sts(v, seed):
    blocks, _ = search.hillclimb_sts(v, rng=random.Random(seed))
    assert blocks is not None
    assert validate_sts(TripleSystem(v, blocks)).ok


def test_hillclimb_respects_fixed_and_forbidden():
    rng = random.Random(2)
    fixed = [(0, 1, 2), (0, 3, 4)]
    forbidden = {(1, 3, 5), (2, 4, 6)}
    blocks, _ = search.hillclimb_sts(13, fixed, forbidden, rng)
    assert set(fixed) <= set(blocks)
    assert not forbidden & set(blocks)


def test_common_triple():
    base, _ = search.hillclimb_sts(13, rng=random.Random(5))
    common = base[:6]
    systems = search.hillclimb_common_triple(13, common, search.SearchConfig(seed=1))
    sets = [set(s) for s in systems]
    assert sets[0] & sets[1] == sets[0] & sets[2] == sets[1] & sets[2] == set(common)


def test_permutation_probe_finds_printed_pair():
    claim = next(c for c in catalog.CLAIMS if c.row == "15-2")
    first, source = catalog.usable_system(claim.first), catalog.usable_system(claim.source)
    pair = (catalog.get("PI-15-2").payload, catalog.get("PI'-15-2").payload)
    cert, found = search.permutation_probe(first, source, 0, 2, candidates=[pair])
    assert found == pair and flower_intersection_number(cert) == 2


def test_permutation_probe_budget():
    s = catalog.usable_system("STS13-A")
    with pytest.raises(search.SearchFailed):
        search.permutation_probe(s, s, 0, 7, search.SearchConfig(budget=50))


@pytest.mark.parametrize("r,k", [(6, 3), (6, 0), (7, 5)])
def test_trade_search(r, k):
    cert = search.trade_flower_certificate(r, k, search.SearchConfig(seed=0))
    assert flower_intersection_number(cert) == k


def test_search_flower_certificate():
    cert = search.search_flower_certificate(6, 3, search.SearchConfig(seed=0, budget=10**6))
    assert flower_intersection_number(cert) == 3


def test_search_rejects_values_outside_candidates():
    with pytest.raises(ValueError):
        search.trade_flower_certificate(4, 3)
    with pytest.raises(ValueError):
        search.search_flower_certificate(4, 3)


def test_gdd_triple_disjoint():
    t = search.hillclimb_disjoint_gdd_triple(4, search.SearchConfig(seed=3))
    assert t.disjoint


@pytest.mark.parametrize("r,k", [(9, 4), (9, 6), (7, 9)])
def test_beyond_published_values(r, k):
    """Values the published record leaves open; these certificates only
    show existence for this (r, k) and make no wider claim."""
    assert k in catalog.published_spectrum(r).undecided
    if (r, k) == (7, 9):
        cert = search.trade_flower_certificate(r, k, search.SearchConfig(seed=0))
    else:
        cert = search.search_flower_certificate(r, k, search.SearchConfig(seed=0, budget=2 * 10**6))
    assert flower_intersection_number(cert) == k
    assert k in spectra.i3f(r)
