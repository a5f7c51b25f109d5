import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplex import spectra


def test_small_flower_spectra():
    assert spectra.i3f(3) == {4}
    assert spectra.i3f(4) == {0, 2, 8}
    assert spectra.max_flower_k(10) == 60


@given(st.integers(1, 200))
def test_admissible_matches_order(r):
    assert spectra.admissible(r) == spectra.sts_order_ok(2 * r + 1)


@given(st.integers(0, 400))
def test_s3_shape(n):
    s = spectra.spectrum_s3(n)
    assert n in s
    assert not s & {n - d for d in (1, 2, 3, 4, 5, 7)}
    assert set(range(n - 7)) <= s


@given(st.integers(3, 60))
def test_iprime3_top(n):
    s = spectra.iprime3(n)
    top = n * n
    assert top in s
    assert top - 1 not in s


def test_iprime3_tiny_orders():
    assert spectra.iprime3(1) == {1}
    assert spectra.iprime3(2) == {4}
    with pytest.raises(ValueError):
        spectra.iprime3(0)


@given(st.integers(3, 30))
def test_published_latin_inside_candidates(n):
    assert spectra.published_jprime3(n) <= spectra.iprime3(n)


def test_published_j3_small():
    assert spectra.published_j3(9) == {0, 1, 3, 4, 12}
    with pytest.raises(KeyError):
        spectra.published_j3(11)


def test_fixed_point_counts():
    assert spectra.fixed_point_counts(5) == {0, 1, 2, 5}


def test_fmt_set():
    assert spectra.fmt_set([0, 1, 2, 3, 7, 20]) == "[0,3] U {7,20}"
