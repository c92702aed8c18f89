"""Depth-bounded SLD resolution, used as a soundness oracle for the analyzer.

Besides answers, the interpreter records the bindings of every body
literal's variables at call and at exit, keyed by program point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from absdist.parser import Program
from absdist.terms import Struct, Term, Var, ordered_vars

__all__ = ["SLDResult", "concrete_sld", "resolve", "check_soundness"]

Subst = dict[str, Term]

_COMPARE = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=<": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "=:=": lambda a, b: a == b,
    "=\\=": lambda a, b: a != b,
}


@dataclass
class SLDResult:
    answers: list[Subst] = field(default_factory=list)
    truncated: bool = False
    # (program point, "call" | "exit", bindings of the literal's variables)
    trace: list[tuple[str, str, Subst]] = field(default_factory=list)


class _Fail(Exception):
    """Instantiation or type error in a builtin: the branch is abandoned."""


def _walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def resolve(t: Term, s: Subst) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var) or not t.args:
        return t
    return Struct(t.functor, tuple(resolve(a, s) for a in t.args))


def _unify(a: Term, b: Term, s: Subst) -> Subst | None:
    s = dict(s)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if isinstance(x, Var) and isinstance(y, Var) and x.name == y.name:
            continue
        if isinstance(x, Var):
            s[x.name] = y
        elif isinstance(y, Var):
            s[y.name] = x
        elif x.indicator != y.indicator:
            return None
        else:
            stack.extend(zip(x.args, y.args))
    return s


def _eval(t: Term, s: Subst) -> int:
    t = _walk(t, s)
    if isinstance(t, Var):
        raise _Fail("instantiation error")
    if not t.args:
        try:
            return int(t.functor)
        except ValueError as exc:
            raise _Fail(f"not a number: {t.functor}") from exc
    ops = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b, "//": lambda a, b: a // b}
    if t.arity == 2 and t.functor in ops:
        return ops[t.functor](_eval(t.args[0], s), _eval(t.args[1], s))
    if t.arity == 1 and t.functor == "-":
        return -_eval(t.args[0], s)
    raise _Fail(f"unknown evaluable {t.functor}/{t.arity}")


class _Machine:
    def __init__(self, program: Program, result: SLDResult):
        self.prog = program
        self.res = result
        self.fresh = itertools.count()

    def rename(self, clause) -> tuple[Struct, tuple[Term, ...], int]:
        k = next(self.fresh)
        m = {v: Var(f"{v}#{k}") for v in clause.vars}

        def r(t: Term) -> Term:
            if isinstance(t, Var):
                return m[t.name]
            return Struct(t.functor, tuple(r(a) for a in t.args)) if t.args else t

        return r(clause.head), tuple(r(b) for b in clause.body), k

    def call(self, goal: Struct, s: Subst, depth: int) -> Iterator[Subst]:
        key = goal.indicator
        if self.prog.is_defined(key):
            if depth <= 0:
                self.res.truncated = True
                return
            for clause in self.prog.clauses(key):
                head, body, k = self.rename(clause)
                s2 = _unify(head, goal, s)
                if s2 is None:
                    continue
                lits = [(lit, clause.pp(j), {v: Var(f"{v}#{k}") for v in ordered_vars([clause.body[j - 1]])})
                        for j, lit in enumerate(body, 1)]
                yield from self.conj(lits, s2, depth - 1)
            return
        yield from self.builtin(goal, s)

    def conj(self, lits, s: Subst, depth: int) -> Iterator[Subst]:
        if not lits:
            yield s
            return
        (lit, pp, names), rest = lits[0], lits[1:]
        self.record(pp, "call", names, s)
        for s2 in self.call(lit, s, depth):
            self.record(pp, "exit", names, s2)
            yield from self.conj(rest, s2, depth)

    def record(self, pp: str, port: str, names: dict[str, Var], s: Subst) -> None:
        self.res.trace.append((pp, port, {v: resolve(t, s) for v, t in names.items()}))

    def builtin(self, goal: Struct, s: Subst) -> Iterator[Subst]:
        f, n = goal.indicator
        try:
            if (f, n) in (("true", 0), ("!", 0)):
                yield s
            elif (f, n) in (("fail", 0), ("false", 0)):
                return
            elif (f, n) == ("=", 2):
                s2 = _unify(goal.args[0], goal.args[1], s)
                if s2 is not None:
                    yield s2
            elif (f, n) == ("ground", 1):
                if not any(True for _ in _vars(resolve(goal.args[0], s))):
                    yield s
            elif (f, n) == ("var", 1):
                if isinstance(_walk(goal.args[0], s), Var):
                    yield s
            elif (f, n) == ("is", 2):
                s2 = _unify(goal.args[0], Struct(str(_eval(goal.args[1], s))), s)
                if s2 is not None:
                    yield s2
            elif n == 2 and f in _COMPARE:
                if _COMPARE[f](_eval(goal.args[0], s), _eval(goal.args[1], s)):
                    yield s
            else:
                raise _Fail(f"unknown predicate {f}/{n}")
        except _Fail:
            return


def _vars(t: Term):
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            yield cur
        else:
            stack.extend(cur.args)


def concrete_sld(program: Program, goal: Term, depth: int, max_answers: int = 1000) -> SLDResult:
    """All answers to ``goal`` reachable within ``depth`` nested resolutions.

    An answer binds each variable of ``goal`` to its resolved term.
    ``truncated`` is set whenever the depth bound cut a branch.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if isinstance(goal, Var):
        raise ValueError("goal must be callable")
    res = SLDResult()
    m = _Machine(program, res)
    gvars = ordered_vars([goal])
    for s in m.call(goal, {}, depth):
        res.answers.append({v: resolve(Var(v), s) for v in gvars})
        if len(res.answers) >= max_answers:
            res.truncated = True
            break
    return res


def _subst(t: Term, theta: Subst) -> Term:
    if isinstance(t, Var):
        return theta.get(t.name, t)
    return Struct(t.functor, tuple(_subst(a, theta) for a in t.args)) if t.args else t


def check_soundness(program: Program, graph, theta: Subst, depth: int = 8) -> list[str]:
    """Run the entry head instantiated by ``theta`` and compare with ``graph``.

    Returns one message per concrete call, exit or answer whose
    abstraction is not covered by the analysis. ``theta`` must lie in
    the entry's call pattern.
    """
    dom = graph.domain
    root = graph.nodes[graph.root]
    head = root.literal
    hvars = ordered_vars([head])
    full = {v: theta.get(v, Var(v)) for v in hvars}
    if not dom.leq(dom.abstract(full), root.call):
        raise ValueError("query is outside the entry call pattern")
    res = concrete_sld(program, _subst(head, full), depth)
    problems = []
    for ans in res.answers:
        got = dom.abstract({v: _subst(t, ans) for v, t in full.items()})
        if not dom.leq(got, root.success):
            problems.append(f"answer {dom.render(got)} not below root success {dom.render(root.success)}")
    points = graph.by_point()
    cover: dict[tuple[str, str], object] = {}
    for pp, port, bindings in res.trace:
        nodes = points.get(pp)
        if not nodes:
            problems.append(f"{pp} reached concretely but absent from the analysis")
            continue
        if (pp, port) not in cover:
            acc = None
            for n in nodes:
                val = n.call if port == "call" else n.success
                acc = val if acc is None else dom.join(acc, val)
            cover[(pp, port)] = acc
        got = dom.abstract(bindings)
        if not dom.leq(got, cover[(pp, port)]):
            problems.append(f"{pp} {port}: {dom.render(got)} not below {dom.render(cover[(pp, port)])}")
    return problems
