import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from support import isotope
from triplex import latin, spectra
from triplex.latin import LatinSquare


def test_cyclic_is_latin():
    for n in range(1, 12):
        assert latin.is_latin(latin.cyclic(n))


def test_validate_reports_repeats():
    rep = latin.validate_latin(LatinSquare([[0, 1], [0, 1]]))
    assert not rep.ok


@given(st.sampled_from([3, 4, 5, 7, 8, 9, 11]))
def test_mols_pairwise_orthogonal(q):
    squares = latin.mols_prime_power(q, q - 1)
    assert len(squares) == q - 1
    for i in range(len(squares)):
        assert latin.is_latin(squares[i])
        for j in range(i):
            assert latin.are_orthogonal(squares[i], squares[j])


def test_order3_classical_pair_orthogonal():
    a = LatinSquare([[(i + j) % 3 for j in range(3)] for i in range(3)])
    b = LatinSquare([[(i + 2 * j) % 3 for j in range(3)] for i in range(3)])
    assert latin.are_orthogonal(a, b)


def test_shift_triple_disjoint():
    assert latin.three_way_cells(latin.cyclic(3), latin.cyclic(3, 1), latin.cyclic(3, 2)) == frozenset()


def test_two_agree_one_differs():
    a = latin.cyclic(4)
    b_rows = [list(r) for r in a.rows]
    b_rows[0], b_rows[1] = b_rows[1], b_rows[0]
    with pytest.raises(latin.TwoAgreeOneDiffers):
        latin.three_way_cells(a, a, LatinSquare(b_rows))


def test_target_outside_spectrum():
    with pytest.raises(latin.TargetNotInSpectrum):
        latin.realize_three_way(4, 7)
    with pytest.raises(latin.TargetNotInSpectrum):
        latin.realize_three_way(5, 24)


@given(st.data())
def test_realize_known_values(data):
    n = data.draw(st.integers(3, 9))
    k = data.draw(st.sampled_from(sorted(latin.known_values(n))))
    t = latin.realize_three_way(n, k)
    assert len(latin.three_way_cells(*t.squares)) == k
    assert all(latin.is_latin(s) for s in t.squares)


@given(st.integers(3, 9), st.integers(0, 10**6))
def test_known_values_within_published(n, _):
    assert latin.known_values(n) <= spectra.published_jprime3(n)


@given(st.data(), st.randoms(use_true_random=False))
def test_isotopy_preserves_agreement(data, rnd):
    n = data.draw(st.integers(3, 7))
    k = data.draw(st.sampled_from(sorted(latin.known_values(n))))
    t = latin.realize_three_way(n, k)
    assert isotope(t, rnd).k == k


@given(st.data())
def test_product_triple(data):
    p, q = data.draw(st.integers(3, 4)), data.draw(st.integers(3, 4))
    x = data.draw(st.sampled_from(sorted(latin.known_values(p))))
    y = data.draw(st.sampled_from(sorted(latin.known_values(q))))
    t = latin.product_triple(latin.realize_three_way(p, x), latin.realize_three_way(q, y))
    assert t.n == p * q and t.k == x * y


@given(st.data())
def test_quadrant_triple(data):
    m = data.draw(st.integers(3, 4))
    ks = [data.draw(st.sampled_from(sorted(latin.known_values(m)))) for _ in range(4)]
    t = latin.quadrant_triple([latin.realize_three_way(m, k) for k in ks])
    assert t.n == 2 * m and t.k == sum(ks)


@given(st.data())
def test_prolongation_triple(data):
    m = data.draw(st.integers(3, 4))
    a = data.draw(st.sampled_from(sorted(latin.known_values(m))))
    e = data.draw(st.sampled_from(sorted(spectra.fixed_point_counts(m))))
    f = data.draw(st.sampled_from(sorted(spectra.fixed_point_counts(m + 1))))
    t = latin.prolongation_triple(latin.realize_three_way(m, a), e, f)
    assert t.k == a + (m + 1) * e + (2 * m + 1) * f


@given(st.data())
def test_embed_triple(data):
    m = data.draw(st.integers(3, 4))
    n = data.draw(st.integers(2 * m, 9))
    x = data.draw(st.sampled_from(sorted(latin.known_values(m))))
    t = latin.embed_triple(latin.realize_three_way(m, x), n)
    assert t.k == n * n - m * m + x


def test_embed_too_large():
    with pytest.raises(latin.NoDecomposition):
        latin.embed_triple(latin.shift_triple(4), 7)


@given(st.sampled_from([5, 7, 9]), st.data())
def test_diagonal_triples(n, data):
    k = data.draw(st.sampled_from(sorted(latin.diagonal_values(n))))
    t = latin.realize_diagonal_triple(n, k)
    assert t.k == k and t.symbol == 0
    assert all(s.rows[i][n - 1 - i] == 0 for s in t.squares for i in range(n))
    row = latin.with_common_row(t)
    assert row.k == k
    assert len({tuple(s.rows[0]) for s in row.squares}) == 1
    col = latin.with_common_column(t)
    assert col.k == k
    assert len({tuple(r[0] for r in s.rows) for s in col.squares}) == 1


def test_diagonal_needs_odd_order():
    with pytest.raises(latin.NoDecomposition):
        latin.realize_diagonal_triple(8, 10)


def test_diagonal_only_agreement():
    t = latin.realize_diagonal_triple(7, 7)
    assert t.off_diagonal == 0


def test_special8_values():
    got = {latin.assemble_special8(latin.realize_three_way(4, a)).value for a in (0, 1, 4)}
    assert got == {8, 9, 12}
    t = latin.assemble_special8(latin.realize_three_way(4, 16))
    assert t.value == 24 and all(latin.is_latin(s) for s in t.squares)


@pytest.mark.parametrize("a,b,c", [(0, 0, 0), (1, 20, 4), (16, 64, 16)])
def test_special16_values(a, b, c):
    t = latin.assemble_special16(latin.realize_three_way(4, a), latin.realize_three_way(4, c),
                                 latin.realize_three_way(8, b))
    cells = latin.three_way_cells(*t.squares)
    direct = sum(1 for cell in latin.above_block_diagonal(16) if cell in cells)
    assert t.value == direct == 16 + a + b + c


def test_special_squares_are_symmetric():
    sq = latin.special_square8(latin.cyclic(4))
    assert latin.is_latin(sq)
    assert all(sq.rows[i][j] == sq.rows[j][i] for i in range(8) for j in range(8))
    assert all(sq.rows[i][i] == 0 for i in range(8))


def test_search_triple_small():
    t = latin.search_triple(6, 11, 200000, seed=3)
    assert t is not None and t.k == 11


def test_square_round_trip():
    t = latin.realize_three_way(5, 4)
    again = latin.LatinTriple.from_dict(t.to_dict())
    assert again.k == 4
    bad = t.to_dict()
    bad["k"] = 5
    with pytest.raises(latin.LatinError):
        latin.LatinTriple.from_dict(bad)


def test_random_latin_square():
    rng = random.Random(1)
    for n in range(1, 10):
        assert latin.is_latin(latin.random_latin_square(n, rng))
