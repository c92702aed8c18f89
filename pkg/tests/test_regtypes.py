import pytest
from hypothesis import given, settings, strategies as st

from absdist.regtypes import (
    GrammarError,
    RegTuple,
    TypeGrammar,
    dprime,
    finite_language,
    grammar_of_terms,
    parse_grammars,
    regtuple_distance,
)
from absdist.terms import Struct, d_term, hausdorff_terms, parse_term

LISTS = """
LA ::= [] | [A|LA]
LB ::= [] | [B|LB]
A ::= a
B ::= b
tuple X:LA, Y:A
tuple X:LB, Y:B
"""


def gram(*terms):
    return grammar_of_terms([parse_term(t) for t in terms])


def test_list_of_a_versus_list_of_b():
    gs, _ = parse_grammars(LISTS)
    # x = max(0, p * (1 + x) / 2) at p = 1/2 gives x = 1/3
    assert dprime(gs["LA"], gs["LB"]) == pytest.approx(1 / 3, abs=1e-6)
    assert dprime(gs["LA"], gs["LA"]) == 0


def test_parse_grammars_tuples():
    gs, tuples = parse_grammars(LISTS)
    assert [t.names for t in tuples] == [("X", "Y"), ("X", "Y")]
    d = regtuple_distance(*tuples)
    assert d == pytest.approx((((1 / 3) ** 2 + 1) ** 0.5), abs=1e-6)
    assert regtuple_distance(*tuples, normalize=True) == pytest.approx(d / 2**0.5)


@pytest.mark.parametrize(
    "text,msg",
    [
        ("L ::= [A|L]", "undefined"),
        ("L ::= [X|L]\nX ::= f(X)", "empty"),
        ("L ::= a | a", "two productions"),
        ("l ::= a", "uppercase"),
        ("L ::= a\ntuple X:M", "unknown"),
        ("L a", "::="),
    ],
)
def test_parse_grammars_errors(text, msg):
    with pytest.raises(GrammarError, match=msg):
        parse_grammars(text)


def test_arity_mismatch_rejected():
    with pytest.raises(GrammarError):
        TypeGrammar("S", {"S": {("f", 2): ("S",)}})


def test_singletons():
    assert dprime(gram("f(a,b)"), gram("f(a,c)")) == pytest.approx(0.25)
    assert dprime(gram("a"), gram("b")) == 1


terms_st = st.recursive(
    st.sampled_from([Struct("a"), Struct("b"), Struct("[]")]),
    lambda kids: st.builds(lambda f, xs: Struct(f, tuple(xs)), st.sampled_from(["f", "g"]), st.lists(kids, min_size=1, max_size=2)),
    max_leaves=6,
)


@given(terms_st, terms_st, st.sampled_from([0.25, 0.5, 0.75]))
def test_singleton_languages_match_d_term(x, y, p):
    assert dprime(grammar_of_terms([x]), grammar_of_terms([y]), p) == pytest.approx(d_term(x, y, p), abs=1e-9)


def _functor_unique(ts):
    """Keep the first term for each root functor."""
    out = {}
    for t in ts:
        out.setdefault(t.indicator, t)
    return list(out.values())


@settings(max_examples=200)
@given(st.lists(terms_st, min_size=1, max_size=5), st.lists(terms_st, min_size=1, max_size=5))
def test_functor_unique_languages_match_hausdorff(A, B):
    A, B = _functor_unique(A), _functor_unique(B)
    g1, g2 = grammar_of_terms(A), grammar_of_terms(B)
    l1, done1 = finite_language(g1, 8)
    l2, done2 = finite_language(g2, 8)
    assert done1 and done2
    assert l1 == frozenset(A) and l2 == frozenset(B)
    assert dprime(g1, g2) == pytest.approx(hausdorff_terms(l1, l2), abs=1e-6)


def test_cartesian_languages_can_differ_from_hausdorff():
    # {a,b} x {c} against {a} x {c,d}: the grammar recursion takes the
    # worst argument per position, the Hausdorff distance a best match per term
    g1 = gram("f(a,c)", "f(b,c)")
    g2 = gram("f(a,c)", "f(a,d)")
    l1, _ = finite_language(g1, 4)
    l2, _ = finite_language(g2, 4)
    assert hausdorff_terms(l1, l2) == pytest.approx(0.25)
    assert dprime(g1, g2) == pytest.approx(0.5)


def test_grammar_of_terms_strict():
    with pytest.raises(GrammarError, match="cartesian"):
        gram("f(a,a)", "f(b,b)")
    loose = grammar_of_terms([parse_term("f(a,a)"), parse_term("f(b,b)")], strict=False)
    lang, done = finite_language(loose, 4)
    assert done and len(lang) == 4
    with pytest.raises(GrammarError):
        grammar_of_terms([parse_term("f(X)")])
    with pytest.raises(GrammarError):
        grammar_of_terms([])


def test_finite_language_of_recursive_grammar():
    gs, _ = parse_grammars(LISTS)
    lang, done = finite_language(gs["LA"], 3)
    assert not done
    assert parse_term("[a]") in lang and parse_term("[]") in lang


def test_bad_p():
    with pytest.raises(ValueError):
        dprime(gram("a"), gram("a"), 1.0)


def test_tuple_length_mismatch():
    g = gram("a")
    with pytest.raises(GrammarError):
        regtuple_distance(RegTuple(("X",), (g,)), RegTuple(("X", "Y"), (g, g)))


def test_str_round_trip():
    gs, _ = parse_grammars(LISTS)
    again, _ = parse_grammars(str(gs["LA"]))
    assert dprime(again["LA"], gs["LA"]) == 0
