from itertools import product

import pytest
from hypothesis import given, strategies as st

from absdist.groundness import GroundSub
from absdist.lattice import Lattice, check_metric_properties
from absdist.parser import read_term
from absdist.sharing import (
    ShareSub,
    Sharing,
    sh_abstract,
    sh_amgu,
    sh_distance,
    sh_join,
    sh_leq,
    sh_meet,
    sh_project,
    sh_size,
    sh_to_gr,
    sh_unify,
    sh_widen,
    star,
)
from oracles import apply, mgu, occ_abstraction, share_dist, sharing_universe

SH = Lattice(sh_leq, sh_join, sh_meet)


def S(*groups, vars="XYZ"):
    return ShareSub.of([tuple(g) for g in groups], list(vars))


def elements(vars_):
    return [ShareSub.bottom(vars_) if s is None else ShareSub(s, frozenset(vars_)) for s in sharing_universe(vars_)]


def test_size():
    assert sh_size(ShareSub.bottom("XY")) == 0
    assert sh_size(S(vars="XY")) == 1
    assert sh_size(ShareSub.top("XY")) == 4


def test_distance_examples():
    assert sh_distance(S("X", vars="XY"), S("X", "XY", vars="XY")) == 0.25
    assert sh_distance(ShareSub.bottom("XY"), S(vars="XY")) == 0.25
    for n in range(4):
        vs = "XYZW"[:n]
        assert sh_distance(ShareSub.bottom(vs), ShareSub.top(vs)) == 1


def test_scope_mismatch_is_an_error():
    with pytest.raises(ValueError):
        sh_join(S("X", vars="X"), S("Y", vars="Y"))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_modularity_exhaustive(n):
    elems = elements("XYZ"[:n])
    for a in elems:
        for b in elems:
            assert sh_size(sh_join(a, b)) + sh_size(sh_meet(a, b)) == sh_size(a) + sh_size(b)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_metric_axioms_exhaustive(n):
    vs = "XYZ"[:n]
    rep = check_metric_properties(elements(vs), sh_distance, SH)
    assert not rep.sampled
    assert rep.metric_ok and rep.order_ok, rep.summary()


def test_distance_matches_oracle():
    vs = "XY"
    for a, b in product(sharing_universe(vs), repeat=2):
        sa = ShareSub.bottom(vs) if a is None else ShareSub(a, frozenset(vs))
        sb = ShareSub.bottom(vs) if b is None else ShareSub(b, frozenset(vs))
        assert sh_distance(sa, sb) == pytest.approx(share_dist(a, b, 2))


def test_star():
    gs = {frozenset("X"), frozenset("Y"), frozenset("Z")}
    assert len(star(gs)) == 7
    assert star([]) == frozenset()


def test_amgu_examples():
    s = S("X", "Y", "Z")
    assert sh_amgu("X", read_term("f(Y)"), s) == S("Z", "XY")
    assert sh_amgu("X", read_term("a"), s) == S("Y", "Z")
    assert sh_amgu("X", read_term("X"), s) == s
    # X aliased with both Y and Z: the star closure links all three
    assert sh_amgu("X", read_term("g(Y,Z)"), s) == S("XY", "XZ", "XYZ")


def test_unify_clash_is_bottom():
    assert sh_unify(S("X"), read_term("f(X)"), read_term("g(X)")).is_bottom


POOL = [read_term(t) for t in ["a", "U", "V", "f(U)", "f(U,V)", "g(a,V)"]]
GOALS = [("X", "Y"), ("X", "f(Y)"), ("X", "f(Y,Z)"), ("X", "a"), ("Y", "g(X,Z)")]


def _subst(t, theta):
    from absdist.terms import Struct, Var

    if isinstance(t, Var):
        return theta.get(t.name, t)
    return Struct(t.functor, tuple(_subst(a, theta) for a in t.args))


def test_amgu_is_sound_against_concrete_unification():
    vs = "XYZ"
    checked = 0
    for images in product(POOL, repeat=3):
        theta = dict(zip(vs, images))
        before = ShareSub(occ_abstraction([theta], vs), frozenset(vs))
        for x, t in GOALS:
            term = read_term(t)
            s = mgu(theta[x], _subst(term, theta))
            if s is None:
                continue
            after = occ_abstraction([{v: apply(u, s) for v, u in theta.items()}], vs)
            got = sh_amgu(x, term, before)
            assert after <= got.groups, (theta, x, t)
            checked += 1
    assert checked > 300


def test_abstraction_matches_oracle():
    thetas = [{"X": read_term("f(U)"), "Y": read_term("U"), "Z": read_term("a")}, {"X": read_term("V"), "Y": read_term("a"), "Z": read_term("V")}]
    assert sh_abstract(thetas, "XYZ").groups == occ_abstraction(thetas, "XYZ")
    assert sh_abstract([], "XY").is_bottom


@given(st.sets(st.sampled_from([frozenset(g) for g in ["X", "Y", "Z", "XY", "XZ", "YZ", "XYZ"]])), st.integers(1, 8))
def test_widen_is_extensive_and_idempotent(groups, k):
    s = ShareSub(frozenset(groups), frozenset("XYZ"))
    w = sh_widen(s, k)
    assert sh_leq(s, w)
    assert sh_widen(w, k) == w or len(w.groups) > k


def test_widen_goes_to_top_over_occurring_vars():
    s = S("X", "Y", "XY", vars="XYZ")
    assert sh_widen(s, 3) == s
    assert sh_widen(s, 2) == S("X", "Y", "XY", vars="XYZ")
    s = S("X", "Y", vars="XYZ")
    assert sh_widen(s, 1) == S("X", "Y", "XY", vars="XYZ")
    with pytest.raises(ValueError):
        sh_widen(s, 0)


def test_project():
    assert sh_project(S("XY", "Z"), "XZ") == S("X", "Z", vars="XZ")


def test_to_gr():
    assert sh_to_gr(S("XY", vars="XYZ")) == GroundSub.of({"X": "any", "Y": "any", "Z": "g"})
    assert sh_to_gr(ShareSub.bottom("XY")).is_bottom


def test_to_gr_is_monotone():
    from absdist.groundness import gr_leq

    elems = elements("XY")
    for a in elems:
        for b in elems:
            if sh_leq(a, b):
                assert gr_leq(sh_to_gr(a, "XY"), sh_to_gr(b, "XY"))


def test_domain_builtins():
    dom = Sharing()
    s = S("X", "Y", "XY")
    assert dom.builtin(read_term("ground(X)"), s) == S("Y")
    assert dom.builtin(read_term("var(X)"), S("Y")).is_bottom
    assert dom.builtin(read_term("X = Y"), S("X", "Y")) == S("XY")


def test_domain_label_and_json():
    assert Sharing().label == "share"
    assert Sharing(2).label == "share+widen(2)"
    with pytest.raises(ValueError):
        Sharing(0)
    dom = Sharing()
    for s in elements("XY"):
        assert dom.from_json(dom.to_json(s)) == s
