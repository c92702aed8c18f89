"""Deterministic regular term grammars and the grammar distance ``dprime``.

A grammar maps each nonterminal to its productions, one per functor:
``{"L": {("[]", 0): (), (".", 2): ("A", "L")}, "A": {("a", 0): ()}}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from absdist.lattice import product_distance
from absdist.terms import Struct, Term, Var, format_term, is_ground

__all__ = [
    "GrammarError",
    "TypeGrammar",
    "RegTuple",
    "dprime",
    "regtuple_distance",
    "finite_language",
    "grammar_of_terms",
    "parse_grammars",
]

Functor = tuple[str, int]


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class TypeGrammar:
    start: str
    rules: Mapping[str, Mapping[Functor, tuple[str, ...]]] = field(hash=False, repr=False)

    def __post_init__(self) -> None:
        rules = {nt: dict(prods) for nt, prods in self.rules.items()}
        object.__setattr__(self, "rules", rules)
        if self.start not in rules:
            raise GrammarError(f"start symbol {self.start} has no productions")
        for nt, prods in rules.items():
            for (f, n), args in prods.items():
                if len(args) != n:
                    raise GrammarError(f"{nt}: production {f}/{n} has {len(args)} arguments")
                for a in args:
                    if a not in rules:
                        raise GrammarError(f"{nt}: undefined nonterminal {a}")
        empty = set(self.reachable()) - _productive(rules)
        if empty:
            raise GrammarError(f"nonterminals with empty language: {sorted(empty)}")

    def productions(self, nt: str) -> Mapping[Functor, tuple[str, ...]]:
        return self.rules[nt]

    def reachable(self, start: str | None = None) -> list[str]:
        seen = [start or self.start]
        for nt in seen:
            for args in self.rules[nt].values():
                for a in args:
                    if a not in seen:
                        seen.append(a)
        return seen

    def with_start(self, start: str) -> "TypeGrammar":
        return TypeGrammar(start, self.rules)

    def __str__(self) -> str:
        lines = []
        for nt in self.reachable():
            alts = []
            for (f, n), args in self.rules[nt].items():
                alts.append(format_term(Struct(f, tuple(Var(a) for a in args))))
            lines.append(f"{nt} ::= " + " | ".join(alts))
        return "\n".join(lines)


def _productive(rules: Mapping[str, Mapping[Functor, tuple[str, ...]]]) -> set[str]:
    ok: set[str] = set()
    changed = True
    while changed:
        changed = False
        for nt, prods in rules.items():
            if nt not in ok and any(all(a in ok for a in args) for args in prods.values()):
                ok.add(nt)
                changed = True
    return ok


@dataclass(frozen=True)
class RegTuple:
    names: tuple[str, ...]
    grammars: tuple[TypeGrammar, ...]

    def __post_init__(self) -> None:
        if not self.grammars:
            raise GrammarError("a type tuple needs at least one component")
        if len(self.names) != len(self.grammars):
            raise GrammarError("names and grammars differ in length")


def _check_p(p: float) -> None:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")


def dprime(g1: TypeGrammar, g2: TypeGrammar, p: float = 0.5, tol: float = 1e-9) -> float:
    """Least fixpoint of the grammar distance over the reachable pair graph."""
    _check_p(p)
    root = (g1.start, g2.start)
    pairs = [root]
    index = {root: 0}
    # per pair: None (root functor sets differ) or one child list per functor
    shape: list[list[list[int]] | None] = []
    for a, b in pairs:
        pa, pb = g1.rules[a], g2.rules[b]
        if pa.keys() != pb.keys():
            shape.append(None)
            continue
        prods = []
        for key, args in pa.items():
            kids = []
            for pair in zip(args, pb[key]):
                if pair not in index:
                    index[pair] = len(pairs)
                    pairs.append(pair)
                kids.append(index[pair])
            prods.append(kids)
        shape.append(prods)

    x = [0.0] * len(pairs)
    cap = math.ceil(math.log(tol) / math.log(p)) + 64
    for _ in range(cap):
        delta = 0.0
        for i, prods in enumerate(shape):
            if prods is None:
                new = 1.0
            else:
                new = max((p * sum(x[k] for k in kids) / len(kids) for kids in prods if kids), default=0.0)
            delta = max(delta, abs(new - x[i]))
            x[i] = new
        # geometric convergence with ratio p bounds the remaining error
        if delta * p < tol * (1 - p):
            break
    return x[0]


def regtuple_distance(
    t1: RegTuple, t2: RegTuple, p: float = 0.5, tol: float = 1e-9, normalize: bool = False
) -> float:
    if len(t1.grammars) != len(t2.grammars):
        raise GrammarError("type tuples differ in length")
    ds = [dprime(a, b, p, tol) for a, b in zip(t1.grammars, t2.grammars)]
    return product_distance(ds, normalize=normalize)


# ---------------------------------------------------------------------------
# languages


def _heights(g: TypeGrammar) -> dict[str, float]:
    """Longest derivation depth per nonterminal; inf on recursive ones."""
    memo: dict[str, float] = {}
    active: set[str] = set()

    def h(nt: str) -> float:
        if nt in memo:
            return memo[nt]
        if nt in active:
            return math.inf
        active.add(nt)
        best = 0.0
        for args in g.rules[nt].values():
            best = max(best, 1 + max((h(a) for a in args), default=0))
        active.discard(nt)
        memo[nt] = best
        return best

    for nt in g.reachable():
        h(nt)
    return memo


def finite_language(g: TypeGrammar, depth_cap: int) -> tuple[frozenset, bool]:
    """Terms derivable within ``depth_cap`` levels, and whether that is the whole language."""
    if depth_cap < 1:
        raise ValueError("depth_cap must be >= 1")
    nts = g.reachable()
    lang: dict[str, set[Term]] = {nt: set() for nt in nts}
    for _ in range(depth_cap):
        nxt: dict[str, set[Term]] = {}
        for nt in nts:
            out: set[Term] = set()
            for (f, _n), args in g.rules[nt].items():
                for combo in product(*(lang[a] for a in args)):
                    out.add(Struct(f, tuple(combo)))
            nxt[nt] = out
        lang = nxt
    exhausted = _heights(g)[g.start] <= depth_cap
    return frozenset(lang[g.start]), exhausted


def grammar_of_terms(ts: Iterable[Term], strict: bool = True) -> TypeGrammar:
    """Smallest deterministic grammar whose language contains ``ts``.

    The language is exactly ``ts`` when, for every functor at every
    position, the argument sets combine freely (a cartesian product).
    With ``strict`` the function raises when that does not hold.
    """
    terms = frozenset(ts)
    if not terms:
        raise GrammarError("cannot build a grammar for the empty set")
    for t in terms:
        if not is_ground(t):
            raise GrammarError(f"non-ground term {format_term(t)}")
    names: dict[frozenset, str] = {}
    rules: dict[str, dict[Functor, tuple[str, ...]]] = {}

    def build(group: frozenset) -> str:
        if group in names:
            return names[group]
        nt = f"T{len(names)}"
        names[group] = nt
        by_f: dict[Functor, list[Struct]] = {}
        for t in sorted(group, key=format_term):
            by_f.setdefault(t.indicator, []).append(t)
        prods: dict[Functor, tuple[str, ...]] = {}
        rules[nt] = prods
        for key, members in by_f.items():
            cols = [frozenset(m.args[i] for m in members) for i in range(key[1])]
            if strict and math.prod(len(c) for c in cols) != len(members):
                raise GrammarError(f"term set is not a cartesian product under {key[0]}/{key[1]}")
            prods[key] = tuple(build(c) for c in cols)
        return nt

    start = build(terms)
    return TypeGrammar(start, rules)


# ---------------------------------------------------------------------------
# text format


def _split_alts(rhs: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in rhs:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "|" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_grammars(text: str) -> tuple[dict[str, TypeGrammar], list[RegTuple]]:
    """Read ``N ::= alt | alt`` lines and ``tuple X:N, Y:M`` lines.

    Returns one grammar per nonterminal (sharing the rule set) and the
    declared tuples in order. ``%`` starts a comment.
    """
    from absdist.parser import read_term

    rules: dict[str, dict[Functor, tuple[str, ...]]] = {}
    tuple_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("tuple "):
            tuple_lines.append((lineno, line[len("tuple ") :]))
            continue
        if "::=" not in line:
            raise GrammarError(f"line {lineno}: expected 'N ::= ...'")
        lhs, rhs = (s.strip() for s in line.split("::=", 1))
        if not lhs[:1].isupper():
            raise GrammarError(f"line {lineno}: nonterminal {lhs!r} must start with an uppercase letter")
        prods = rules.setdefault(lhs, {})
        for alt in _split_alts(rhs):
            t = read_term(alt)
            if isinstance(t, Var) or not all(isinstance(a, Var) for a in t.args):
                raise GrammarError(f"line {lineno}: alternative {alt!r} must be f(N1, ..., Nk)")
            if t.indicator in prods:
                raise GrammarError(f"line {lineno}: {lhs} has two productions for {t.functor}/{t.arity}")
            prods[t.indicator] = tuple(a.name for a in t.args)
    grammars = {nt: TypeGrammar(nt, rules) for nt in rules}
    tuples = []
    for lineno, spec in tuple_lines:
        names, gs = [], []
        for item in spec.split(","):
            var, _, nt = (s.strip() for s in item.partition(":"))
            if nt not in grammars:
                raise GrammarError(f"line {lineno}: unknown nonterminal {nt!r}")
            names.append(var)
            gs.append(grammars[nt])
        tuples.append(RegTuple(tuple(names), tuple(gs)))
    return grammars, tuples
