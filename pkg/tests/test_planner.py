import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplex import catalog, planner, spectra
from triplex.core import flower_intersection_number


def test_plan_r10_k45_uses_tripling():
    node = planner.Planner().plan(10, 45)
    assert node.step == "triple_with_diagonal"
    p = node.params
    assert (p["b"], p["a1"], p["a2"], p["a"]) == (33, 1, 7, 4)
    assert node.check_arithmetic()


def test_plan_r9_k25_uses_expand():
    node = planner.Planner().plan(9, 25)
    assert node.step == "expand_3r"
    assert node.check_arithmetic()


@settings(max_examples=60)
@given(st.sampled_from([10, 12, 13, 15, 16, 18, 19, 21, 22, 25, 27, 28]), st.data())
def test_plans_are_arithmetically_sound(r, data):
    p = planner.Planner()
    k = data.draw(st.sampled_from(sorted(p.options(r))))
    node = p.plan(r, k)
    assert node.target == (r, k)
    assert node.check_arithmetic()
    again = planner.RealizationPlan.from_dict(node.to_dict())
    assert again == node


def test_broken_arithmetic_detected():
    node = planner.Planner().plan(10, 45)
    node.params = dict(node.params)
    node.target = (10, 44)
    assert not node.check_arithmetic()


@settings(max_examples=25)
@given(st.sampled_from([10, 12, 13, 15]), st.data())
def test_plan_and_realize_exact(r, data):
    k = data.draw(st.sampled_from(sorted(planner.Planner().options(r))))
    cert, node = planner.plan_and_realize(r, k)
    assert flower_intersection_number(cert) == k == cert.claimed_k
    assert k in catalog.published_spectrum(r).upper


def test_necessary_conditions_refused():
    with pytest.raises(ValueError):
        planner.plan_and_realize(4, 2)
    with pytest.raises(ValueError):
        planner.plan_and_realize(5, 0)


def test_cited_values_named():
    with pytest.raises(planner.PlanUnavailable) as info:
        planner.plan_and_realize(10, 46)
    assert info.value.external and "56 blocks" in info.value.component


def test_high_values_named():
    with pytest.raises(planner.PlanUnavailable) as info:
        planner.plan_and_realize(10, 47)
    assert info.value.external and "J^3(v) = I^3(v)" in info.value.component


def test_undecided_value_is_not_external():
    comp, external = planner.explain(6, 6)
    assert not external and "undecided" in comp


def test_gdd_orders_named():
    comp, external = planner.explain(24, 20)
    assert external and "3^4 6^2" in comp
    assert not planner.explain(24, 5)[1]


def test_search_leaf_replan(monkeypatch):
    """A failing search leaf is blocked and the target re-planned."""
    calls = []
    real = planner.Executor._run

    def flaky(self, node):
        if node.step == "flower_only" and not calls:
            calls.append(node.target)
            raise planner.LeafFailed(("flower_only", node.target[0], 0), "forced")
        return real(self, node)

    monkeypatch.setattr(planner.Executor, "_run", flaky)
    cert, node = planner.plan_and_realize(13, 0)
    assert calls and flower_intersection_number(cert) == 0
    assert all(n.step != "flower_only" or n.target != calls[0] for n in node.walk())


def test_primary_routes():
    p = planner.Planner()
    assert p.primary_route(10) == "triple_with_diagonal"
    assert p.primary_route(9) == "expand_3r"
    assert p.primary_route(16) == "expand_3r1"
    assert p.primary_route(15) == "double"
    assert p.primary_route(24) == "pbd_compose"


def test_r15_low_values_by_doubling():
    p = planner.Planner()
    for k in range(16):
        assert p.plan(15, k).step == "double"


def test_combine_prefers_cheap():
    out = planner._combine([{0: 5, 1: 1}, {0: 1, 1: 5}])
    assert out[1] == (2, (1, 0))
    assert set(out) == {0, 1, 2}


def test_repeat_matches_combine():
    table = {0: 3, 2: 1, 5: 2}
    rep = planner._repeat(table, 5)
    comb = planner._combine([table] * 5)
    assert set(rep) == set(comb)
    assert all(rep[s][0] == comb[s][0] for s in rep)


def test_render():
    text = planner.Planner().plan(10, 45).render()
    assert "triple_with_diagonal" in text and "diagonal-latin" in text


@pytest.mark.parametrize("r", [6, 7, 9])
def test_small_orders_stay_inside_published(r):
    opts = planner.Planner().options(r)
    assert set(opts) <= catalog.published_spectrum(r).upper
    assert set(opts) <= spectra.i3f(r)
