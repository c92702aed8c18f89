from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from absdist.lattice import check_metric_properties
from absdist.terms import (
    NonGroundTermError,
    Struct,
    Var,
    d_term,
    format_term,
    hausdorff_terms,
    is_ground,
    mk_list,
    parse_term,
    term_size,
)
from oracles import d_term_ref, hausdorff_ref

t = parse_term


def ground_terms(depth):
    """Every ground term over {a/0, b/0, f/2} up to ``depth``."""
    out = [Struct("a"), Struct("b")]
    for _ in range(depth - 1):
        out = [Struct("a"), Struct("b")] + [Struct("f", (x, y)) for x, y in product(out, repeat=2)]
    return out


terms_st = st.recursive(
    st.sampled_from([Struct("a"), Struct("b")]),
    lambda kids: st.builds(lambda f, xs: Struct(f, tuple(xs)), st.sampled_from(["f", "g"]), st.lists(kids, min_size=1, max_size=2)),
    max_leaves=8,
)


def test_d_term_examples():
    assert d_term(t("a"), t("a")) == 0
    assert d_term(t("a"), t("g(b)")) == 1
    assert d_term(t("f(a,b)"), t("f(a,c)"), 0.5) == pytest.approx(0.25)


def test_d_term_arity_mismatch_is_one():
    assert d_term(t("f(a)"), t("f(a,a)")) == 1


def test_d_term_rejects_variables():
    with pytest.raises(NonGroundTermError):
        d_term(t("f(X)"), t("f(a)"))


def test_d_term_rejects_bad_p():
    with pytest.raises(ValueError):
        d_term(t("a"), t("b"), 1.0)


@given(terms_st, terms_st)
def test_d_term_matches_reference(x, y):
    assert d_term(x, y) == pytest.approx(float(d_term_ref(x, y)), abs=1e-12)


@given(terms_st, terms_st)
def test_d_term_bounded_and_one_iff_roots_differ(x, y):
    v = d_term(x, y)
    assert 0 <= v <= 1
    assert (v == 1) == (x.indicator != y.indicator)


@given(terms_st, terms_st)
def test_d_term_invariant_under_symbol_renaming(x, y):
    swap = {"a": "b", "b": "a", "f": "g", "g": "f"}

    def ren(u):
        return Struct(swap[u.functor], tuple(ren(a) for a in u.args))

    assert d_term(ren(x), ren(y)) == pytest.approx(d_term(x, y))


def test_d_term_is_metric_on_depth3_universe():
    universe = ground_terms(3)
    assert len(universe) == 38
    rep = check_metric_properties(universe, d_term)
    assert rep.metric_ok, rep.summary()


def test_hausdorff_terms_examples():
    assert hausdorff_terms([t("a")], [t("a")]) == 0
    assert hausdorff_terms([t("f(a,b)")], [t("f(a,c)")]) == pytest.approx(0.25)
    assert hausdorff_terms([t("a"), t("b")], [t("a")]) == 1


@given(st.lists(terms_st, min_size=1, max_size=4), st.lists(terms_st, min_size=1, max_size=4))
def test_hausdorff_terms_matches_brute_force(A, B):
    expected = hausdorff_ref(lambda x, y: d_term_ref(x, y, Fraction(1, 2)), A, B)
    assert hausdorff_terms(A, B) == pytest.approx(float(expected))


def test_hausdorff_terms_rejects_empty():
    with pytest.raises(ValueError):
        hausdorff_terms([], [t("a")])


@pytest.mark.parametrize("text,size", [("a", 1), ("f(a, X)", 2), ("f(g(a), b)", 4), ("X", 0), ("[a]", 3)])
def test_term_size(text, size):
    assert term_size(t(text)) == size


def test_parse_and_format():
    x = t("f(a, g(X), [1,2|T])")
    assert format_term(x) == "f(a,g(X),[1,2|T])"
    assert t(format_term(x)) == x
    assert not is_ground(x)
    assert mk_list([Struct("a")]) == t("[a]")
    assert isinstance(t("Xs"), Var)
