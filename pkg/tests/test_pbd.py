import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplex import pbd, search
from triplex.core import DesignError, steiner_system, validate_sts
from triplex.latin import LatinSquare, cyclic, mols_prime_power


@pytest.mark.parametrize("t", [5, 7, 8, 9, 11, 13])
def test_pbd_6t_audit(t):
    d = pbd.pbd_6t(t)
    assert pbd.validate_pbd(d, {6, t}).ok
    assert len(d.blocks) == t * t + 6


def test_pbd_6t_product_mols():
    d = pbd.pbd_6t(35)
    assert pbd.validate_pbd(d).ok and len(d.blocks) == 35 * 35 + 6


def test_pbd_6t_needs_mols():
    for t in (6, 10):
        with pytest.raises(pbd.MolsUnavailable):
            pbd.pbd_6t(t)


def test_non_orthogonal_mols_rejected():
    with pytest.raises(DesignError):
        pbd.pbd_6t(5, [cyclic(5)] * 4)


def test_missing_pair_detected():
    d = pbd.pbd_6t(5)
    broken = pbd.PairwiseBalancedDesign(d.v, d.blocks[1:])
    assert not pbd.validate_pbd(broken).ok


def test_gdd_from_flower_round_trip():
    s = steiner_system(13)
    g = pbd.gdd_from_flower(s, 0)
    assert pbd.validate_gdd(g).ok
    assert g.group_type == {2: 6}
    again = pbd.sts_from_gdd(g, at=0)
    assert validate_sts(again).ok


def test_disjoint_gdd_triple():
    triple = search.hillclimb_disjoint_gdd_triple(6, search.SearchConfig(seed=1))
    assert triple.disjoint
    for g in triple.designs:
        assert pbd.validate_gdd(g).ok


@given(st.sampled_from([3, 4, 6, 7, 9]))
def test_sts_from_trivial_pbd(r):
    d = pbd.PairwiseBalancedDesign(r, [list(range(r))])
    local = steiner_system(2 * r + 1)
    from triplex import constructions as cons

    cert = cons.flower_normal_form(cons.identity_max(r, local))
    s = pbd.sts_from_pbd(d, [cert.triple_systems()[0]])
    assert validate_sts(s).ok


def test_load_design_from_data_dir(tmp_path, monkeypatch):
    d = pbd.pbd_6t(5)
    (tmp_path / "pbd_30.json").write_text(json.dumps(d.to_dict()))
    assert pbd.load_design(tmp_path / "pbd_30.json") == d
    bad = d.to_dict()
    bad["blocks"] = bad["blocks"][1:]
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    with pytest.raises(pbd.DesignRejected):
        pbd.load_design(tmp_path / "bad.json")
    with pytest.raises(DesignError):
        pbd.load_design(tmp_path / "absent.json")


def test_mols_file_used(tmp_path, monkeypatch):
    squares = mols_prime_power(7, 4)
    (tmp_path / "mols_7.json").write_text(json.dumps({"n": 7, "squares": [s.rows for s in squares]}))
    monkeypatch.setenv(pbd.DATA_ENV, str(tmp_path))
    assert pbd.data_dir() == tmp_path
    assert [s.rows for s in pbd.four_mols(7)] == [s.rows for s in squares]
    bad = {"n": 7, "squares": [[[0] * 7] * 7]}
    (tmp_path / "mols_8.json").write_text(json.dumps(bad))
    with pytest.raises(DesignError):
        pbd.four_mols(8)


def test_load_mols_shape(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"n": 3, "squares": [cyclic(3).rows]}))
    assert pbd.load_mols(tmp_path / "m.json") == [LatinSquare(cyclic(3).rows)]
