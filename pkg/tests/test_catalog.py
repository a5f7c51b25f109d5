import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplex import catalog, latin, spectra
from triplex.core import flower_intersection_number, validate_sts


def test_parse_table():
    blocks = catalog.parse_table("1 2 3, 1 4 5\n# comment\n2 4 6", 7)
    assert blocks == [(0, 1, 2), (0, 3, 4), (1, 3, 5)]


def test_parse_table_rejects_bad_triples():
    with pytest.raises(catalog.TranscriptionError):
        catalog.parse_table("1 2 2", 7)
    with pytest.raises(catalog.TranscriptionError):
        catalog.parse_table("1 2 8", 7)
    with pytest.raises(catalog.DuplicateBlock):
        catalog.parse_table("1 2 3, 3 2 1", 7)


def test_repair_replaces_duplicate():
    fano = [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (0, 4, 5), (1, 5, 6), (0, 2, 6)]
    broken = [b for b in fano if b != (2, 3, 5)] + [(0, 1, 3)]
    fixed, removed, added = catalog.repair_by_pair_coverage(7, broken)
    assert removed == (0, 1, 3) and added == (2, 3, 5)
    assert sorted(fixed) == sorted(fano)


def test_all_systems_valid_or_quarantined():
    for ident in catalog.identifiers():
        e = catalog.get(ident)
        if e.kind == "system" and e.status != "quarantined":
            assert validate_sts(e.payload).ok, ident


def test_e_table_quarantined_and_repaired():
    assert catalog.get("STS15-E").status == "quarantined"
    rep = catalog.get("STS15-E-REPAIRED")
    assert rep.status == "repaired"
    assert "(4, 11, 15)" in rep.note
    assert catalog.usable_system("STS15-E") == rep.payload


def test_unknown_entry():
    with pytest.raises(catalog.UnknownEntry):
        catalog.get("STS99")


def test_permutations_are_bijections():
    perms = [i for i in catalog.identifiers() if i.startswith("PI")]
    assert len(perms) == 22
    for i in perms:
        p = catalog.get(i).payload
        assert sorted(p.image) == list(range(len(p)))


def test_paper_checks():
    rows = {r.claim.row: r for r in catalog.reproduce_paper_checks()}
    for row, r in rows.items():
        if row == "15-5":
            continue
        assert r.match, (row, r.note)
        assert flower_intersection_number(catalog.claim_certificate(row)) == r.claim.claimed_k
    assert rows["15-4"].note


def test_row_15_5_differs_as_printed():
    row = next(r for r in catalog.reproduce_paper_checks() if r.claim.row == "15-5")
    assert not row.match and row.computed is None


def test_templates_fill_to_special_squares():
    a = latin.cyclic(4)
    sq = catalog.fill_template(catalog.special8_template(), {"A": a})
    assert sq == latin.special_square8(a)
    b = latin.cyclic(8)
    sq16 = catalog.fill_template(catalog.special16_template(), {"A": a, "B": b, "C": a})
    assert sq16 == latin.special_square16(a, b, a)


def test_exports_are_plain_data():
    import json

    for ident in catalog.identifiers():
        json.dumps(catalog.get(ident).export())


@given(st.sampled_from([r for r in range(1, 80) if spectra.admissible(r)]))
def test_published_bounds_consistent(r):
    pub = catalog.published_spectrum(r)
    assert pub.lower <= pub.upper <= spectra.i3f(r)
    if r >= 10 and r != 24:
        assert pub.exact


def test_small_published_spectra():
    assert catalog.published_spectrum(4).upper == {0, 8}
    assert catalog.published_spectrum(6).undecided == {6}
    assert catalog.published_spectrum(7).undecided == {9, 14, 15}
    assert catalog.published_spectrum(9).undecided == {4, 6, 7, 9, 11, 34, 35}


def test_necessary_conditions():
    rep = catalog.check_necessary_conditions(4, 2)
    assert not rep.ok and rep.in_i3f
    assert catalog.check_necessary_conditions(10, 45).ok
    assert not catalog.check_necessary_conditions(5, 0).ok
    assert not catalog.check_necessary_conditions(10, 59).ok
