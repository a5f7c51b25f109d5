"""Soundness: every construction, fed randomized valid ingredients at leaf
orders, yields a certificate the verifier confirms with the predicted k."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import flower, isotope, latin_triple, plain, relabel_cert, relabel_plain
from triplex import catalog, latin, spectra
from triplex import constructions as cons
from triplex import pbd as pbdmod
from triplex.core import FlowerIntersectionCertificate, flower_intersection_number, steiner_system

N = 200
soundness = settings(max_examples=N)


def _verify(cert):
    # strip the claim so the verifier computes k from scratch
    return flower_intersection_number(FlowerIntersectionCertificate(cert.v, cert.systems, cert.flower_point))


def _plain_values(v):
    return sorted(spectra.published_j3(v))


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_triple_with_diagonal(data, rnd):
    r = data.draw(st.sampled_from([3, 4]), label="r")
    n = 2 * r + 1
    a1 = data.draw(st.sampled_from(_plain_values(n)), label="a1")
    a2 = data.draw(st.sampled_from(_plain_values(n)), label="a2")
    a = data.draw(st.sampled_from({3: [4], 4: [0, 8]}[r]), label="a")
    d = data.draw(st.sampled_from(sorted(latin.diagonal_values(n))), label="diag k")
    mode = data.draw(st.sampled_from(["diagonal", "row", "column"]), label="mode")
    diag = latin.realize_diagonal_triple(n, d)
    cert = cons.triple_with_diagonal(r, relabel_plain(plain(n, a1), rnd), relabel_plain(plain(n, a2), rnd),
                                     relabel_cert(flower(r, a), rnd), diag, mode)
    assert cert.v == 3 * n
    assert _verify(cert) == a1 + a2 + a + (d - n)


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_expand_3r(data, rnd):
    r = data.draw(st.sampled_from([3, 4]), label="r")
    ks = [data.draw(st.sampled_from({3: [4], 4: [0, 8]}[r])) for _ in range(3)]
    b = data.draw(st.sampled_from(sorted(latin.known_values(2 * r))), label="b")
    lt = isotope(latin_triple(2 * r, b), rnd)
    cert = cons.expand_3r(r, [relabel_cert(flower(r, k), rnd) for k in ks], lt)
    assert cert.v == 6 * r + 1
    assert _verify(cert) == sum(ks) + b


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_expand_3r1(data, rnd):
    r = 3
    ks = [data.draw(st.sampled_from([0, 8])) for _ in range(3)]
    b = data.draw(st.sampled_from(sorted(latin.known_values(6))), label="b")
    lt = isotope(latin_triple(6, b), rnd)
    cert = cons.expand_3r1(r, [relabel_cert(flower(4, k), rnd) for k in ks], lt)
    assert cert.v == 6 * r + 3
    assert _verify(cert) == sum(ks) + b


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_double(data, rnd):
    r = data.draw(st.sampled_from([3, 4]), label="r")
    k = data.draw(st.sampled_from({3: [4], 4: [0, 8]}[r]), label="k")
    v = 2 * r + 1
    s = data.draw(st.sampled_from(list(range(1, v - 2)) + [v]), label="s")
    cert = cons.double(r, relabel_cert(flower(r, k), rnd), s)
    assert cert.v == 2 * v + 1
    assert _verify(cert) == k + (s - 1) * (r + 1)
    assert cons.double_values(r, k)[k + (s - 1) * (r + 1)] == s


def _pg23():
    base = (0, 1, 3, 9)
    return pbdmod.PairwiseBalancedDesign(13, [[(x + i) % 13 for x in base] for i in range(13)])


def _ag23_plus_point():
    lines = [b for b in steiner_system(9).blocks]
    # the three lines of one parallel class get the extra point 9
    cls, used = [], set()
    for b in lines:
        if not used & set(b):
            cls.append(b)
            used |= set(b)
    return pbdmod.PairwiseBalancedDesign(10, [list(b) + [9] if b in cls else list(b) for b in lines])


DESIGNS = {
    "fano": pbdmod.PairwiseBalancedDesign(7, steiner_system(7).blocks),
    "pg23": _pg23(),
    "ag23+1": _ag23_plus_point(),
    "single4": pbdmod.PairwiseBalancedDesign(4, [[0, 1, 2, 3]]),
}


def test_designs_are_pbds():
    for d in DESIGNS.values():
        assert pbdmod.validate_pbd(d).ok
    assert DESIGNS["ag23+1"].sizes == {3, 4}


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_pbd_compose(data, rnd):
    design = DESIGNS[data.draw(st.sampled_from(sorted(DESIGNS)), label="design")]
    ks = [data.draw(st.sampled_from({3: [4], 4: [0, 8]}[len(b)])) for b in design.blocks]
    certs = [relabel_cert(flower(len(b), k), rnd) for b, k in zip(design.blocks, ks)]
    cert = cons.pbd_compose(design, certs)
    assert cert.v == 2 * design.v + 1
    assert _verify(cert) == sum(ks)


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_special8(data, rnd):
    a = data.draw(st.sampled_from([0, 1, 4, 16]), label="a")
    sp = latin.assemble_special8(isotope(latin_triple(4, a), rnd))
    cert = cons.special_extend(relabel_cert(flower(3, 4), rnd), sp)
    assert cert.v == 15
    assert _verify(cert) == 4 + 8 + a
    assert cons.special8_values()[8 + a] == a


SPECIAL16_BASES = ["identity"] + [c.row for c in catalog.CLAIMS if c.row.startswith("15") and c.row != "15-5"]


@settings(max_examples=N)
@given(st.data(), st.randoms(use_true_random=False))
def test_special16(data, rnd):
    a = data.draw(st.sampled_from([0, 1, 4, 16]), label="a")
    c = data.draw(st.sampled_from([0, 1, 4, 16]), label="c")
    b = data.draw(st.sampled_from(sorted(latin.known_values(8))), label="b")
    base = data.draw(st.sampled_from(SPECIAL16_BASES), label="base")
    cert0 = cons.identity_max(7) if base == "identity" else catalog.claim_certificate(base)
    ell = _verify(cert0)
    sp = latin.assemble_special16(isotope(latin_triple(4, a), rnd), isotope(latin_triple(4, c), rnd),
                                  isotope(latin_triple(8, b), rnd))
    cert = cons.special_extend(relabel_cert(cert0, rnd), sp)
    assert cert.v == 31
    assert _verify(cert) == ell + 16 + a + b + c


@soundness
@given(st.data(), st.randoms(use_true_random=False))
def test_flower_normal_form(data, rnd):
    r = data.draw(st.sampled_from([3, 4]))
    k = data.draw(st.sampled_from({3: [4], 4: [0, 8]}[r]))
    cert = cons.flower_normal_form(relabel_cert(flower(r, k), rnd))
    assert cert.flower_point == 0
    assert _verify(cert) == k
    blocks = set(cert.systems[0])
    assert all((0, 2 * i + 1, 2 * i + 2) in blocks for i in range(r))


@soundness
@given(st.sampled_from([3, 4, 6, 7, 9, 10]), st.randoms(use_true_random=False))
def test_identity_max(r, rnd):
    cert = cons.identity_max(r, flower_point=rnd.randrange(2 * r + 1))
    assert _verify(cert) == spectra.max_flower_k(r)


@soundness
@given(st.integers(0, 10**6))
def test_flower_only(seed):
    assert _verify(cons.flower_only(4, seed=seed)) == 0


@pytest.mark.parametrize("r", [6, 7])
def test_flower_only_larger(r):
    assert _verify(cons.flower_only(r, seed=1)) == 0


@soundness
@given(st.data(), st.integers(0, 10**6))
def test_realize_plain(data, seed):
    v = data.draw(st.sampled_from([7, 9]))
    a = data.draw(st.sampled_from(_plain_values(v)))
    t = cons.realize_plain_3way(v, a, seed=seed)
    assert cons.verify_plain(t) == a


def test_plain_rejects_impossible():
    with pytest.raises(latin.TargetNotInSpectrum):
        cons.realize_plain_3way(9, 5)
    with pytest.raises(latin.TargetNotInSpectrum):
        cons.realize_plain_3way(7, 0)
    # a candidate value that the full enumeration of STS(9) rules out
    with pytest.raises(latin.Unrealized):
        cons.realize_plain_3way(9, 2)


def test_diagonal_only_agreement_gives_six():
    # one common block in each plain triple, the flower-only r=3 value 4 and
    # Latin agreement on the diagonal alone
    p1 = plain(7, 1)
    cert = cons.triple_with_diagonal(3, p1, p1, cons.identity_max(3), latin.realize_diagonal_triple(7, 7))
    assert _verify(cert) == 6


def test_r10_k45():
    cert = cons.triple_with_diagonal(3, plain(7, 1), plain(7, 7), cons.identity_max(3),
                                     latin.realize_diagonal_triple(7, 40))
    assert _verify(cert) == 45


def test_wrong_orders_rejected():
    with pytest.raises(cons.ConstructionError):
        cons.expand_3r(3, [flower(4, 8)] * 3, latin_triple(6, 0))
    with pytest.raises(cons.ConstructionError):
        cons.expand_3r1(4, [flower(4, 8)] * 3, latin_triple(8, 0))
    with pytest.raises(cons.ConstructionError):
        cons.double(4, flower(4, 8), 7)
    with pytest.raises(cons.ConstructionError):
        cons.pbd_compose(DESIGNS["fano"], [flower(3, 4)] * 6)


@pytest.mark.parametrize("r", [3, 4, 6])
def test_double_all_fixed_identical_inputs_is_max(r):
    cert = cons.double(r, cons.identity_max(r), 2 * r + 1)
    assert _verify(cert) == spectra.max_flower_k(2 * r + 1)
    assert cert.systems[0] == cert.systems[1] == cert.systems[2]
