"""Set-sharing domain: abstraction, abstract unification, metric, widening."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from absdist.groundness import ANY, G, GroundSub
from absdist.groundness import BOTTOM as GR_BOTTOM
from absdist.terms import Struct, Term, Var, mk_list, term_vars

__all__ = [
    "ShareSub",
    "sh_size",
    "sh_distance",
    "sh_abstract",
    "sh_amgu",
    "sh_widen",
    "sh_to_gr",
    "sh_join",
    "sh_meet",
    "sh_leq",
    "star",
    "Sharing",
]

Group = frozenset


@dataclass(frozen=True)
class ShareSub:
    """Sharing groups over a variable scope; ``groups is None`` encodes bottom."""

    groups: frozenset | None
    vars: frozenset

    @staticmethod
    def of(groups: Iterable[Iterable[str]], vars: Iterable[str] | None = None) -> "ShareSub":
        gs = frozenset(frozenset(g) for g in groups)
        if frozenset() in gs:
            raise ValueError("sharing groups must be non-empty")
        scope = frozenset(vars) if vars is not None else frozenset().union(*gs) if gs else frozenset()
        for g in gs:
            if not g <= scope:
                raise ValueError(f"group {sorted(g)} is not inside the scope {sorted(scope)}")
        return ShareSub(gs, scope)

    @staticmethod
    def bottom(vars: Iterable[str] = ()) -> "ShareSub":
        return ShareSub(None, frozenset(vars))

    @staticmethod
    def top(vars: Iterable[str]) -> "ShareSub":
        vs = sorted(vars)
        groups = [frozenset(c) for k in range(1, len(vs) + 1) for c in combinations(vs, k)]
        return ShareSub(frozenset(groups), frozenset(vs))

    @property
    def is_bottom(self) -> bool:
        return self.groups is None

    def render(self, order: Iterable[str] | None = None) -> str:
        if self.groups is None:
            return "bot"
        rank = {v: i for i, v in enumerate(order if order is not None else sorted(self.vars))}
        key = lambda v: (rank.get(v, len(rank)), v)  # noqa: E731
        gs = sorted((sorted(g, key=key) for g in self.groups), key=lambda g: (len(g), [key(v) for v in g]))
        return "[" + ",".join("[" + ",".join(g) + "]" for g in gs) + "]"

    def __str__(self) -> str:
        return self.render()


def _check_scope(a: ShareSub, b: ShareSub) -> None:
    if a.vars != b.vars:
        raise ValueError(f"sharing scopes differ: {sorted(a.vars)} vs {sorted(b.vars)}")


def sh_size(a: ShareSub) -> int:
    return 0 if a.groups is None else len(a.groups) + 1


def sh_join(a: ShareSub, b: ShareSub) -> ShareSub:
    _check_scope(a, b)
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return ShareSub(a.groups | b.groups, a.vars)


def sh_meet(a: ShareSub, b: ShareSub) -> ShareSub:
    _check_scope(a, b)
    if a.is_bottom or b.is_bottom:
        return ShareSub.bottom(a.vars)
    return ShareSub(a.groups & b.groups, a.vars)


def sh_leq(a: ShareSub, b: ShareSub) -> bool:
    _check_scope(a, b)
    if a.is_bottom:
        return True
    if b.is_bottom:
        return False
    return a.groups <= b.groups


def sh_distance(a: ShareSub, b: ShareSub) -> float:
    """Size-difference metric ``size(a join b) - size(a meet b)`` scaled by ``2**n``."""
    _check_scope(a, b)
    return (sh_size(sh_join(a, b)) - sh_size(sh_meet(a, b))) / 2 ** len(a.vars)


def star(groups: Iterable[frozenset]) -> frozenset:
    """Closure under pairwise union."""
    closed: set[frozenset] = set()
    for g in groups:
        if g in closed:
            continue
        closed |= {g} | {g | r for r in closed}
    return frozenset(closed)


def _bin(xs: Iterable[frozenset], ys: Iterable[frozenset]) -> frozenset:
    ys = list(ys)
    return frozenset(x | y for x in xs for y in ys)


def _amgu_groups(groups: frozenset, x: str, tvars: frozenset) -> frozenset:
    rel_x = {g for g in groups if x in g}
    rel_t = {g for g in groups if g & tvars}
    rest = groups - rel_x - rel_t
    return rest | _bin(star(rel_x), star(rel_t))


def sh_amgu(x: str | Var, t: Term, sh: ShareSub) -> ShareSub:
    """Abstract unification of variable ``x`` with term ``t``."""
    name = x.name if isinstance(x, Var) else x
    tvars = frozenset(v.name for v in term_vars(t))
    if name not in sh.vars or not tvars <= sh.vars:
        raise ValueError("unification mentions variables outside the scope")
    if sh.is_bottom:
        return sh
    if isinstance(t, Var) and t.name == name:
        return sh
    return ShareSub(_amgu_groups(sh.groups, name, tvars), sh.vars)


def sh_unify(sh: ShareSub, left: Term, right: Term) -> ShareSub:
    """Abstract ``left = right`` for arbitrary terms."""
    if isinstance(left, Var):
        return sh_amgu(left, right, sh)
    if isinstance(right, Var):
        return sh_amgu(right, left, sh)
    if left.indicator != right.indicator:
        return ShareSub.bottom(sh.vars)
    for a, b in zip(left.args, right.args):
        sh = sh_unify(sh, a, b)
        if sh.is_bottom:
            break
    return sh


def sh_widen(sh: ShareSub, threshold: int) -> ShareSub:
    """Cardinality widening: more than ``threshold`` groups jumps to top over the occurring variables."""
    if threshold < 1:
        raise ValueError("widening threshold must be >= 1")
    if sh.is_bottom or len(sh.groups) <= threshold:
        return sh
    occurring = frozenset().union(*sh.groups)
    widened = ShareSub.top(occurring)
    return ShareSub(widened.groups, sh.vars)


def sh_project(sh: ShareSub, vars: Iterable[str]) -> ShareSub:
    keep = frozenset(vars)
    if sh.is_bottom:
        return ShareSub.bottom(keep)
    groups = frozenset(g & keep for g in sh.groups) - {frozenset()}
    return ShareSub(groups, keep)


def sh_abstract(thetas: Iterable[Mapping[str, Term]], vars: Iterable[str]) -> ShareSub:
    """Jacobs-Langen abstraction of a set of concrete substitutions."""
    scope = frozenset(vars)
    groups: set[frozenset] = set()
    any_theta = False
    for theta in thetas:
        any_theta = True
        occ: dict[str, set[str]] = {}
        for x in scope:
            for u in term_vars(theta[x]):
                occ.setdefault(u.name, set()).add(x)
        groups.update(frozenset(s) for s in occ.values())
    if not any_theta:
        return ShareSub.bottom(scope)
    return ShareSub(frozenset(groups), scope)


def sh_to_gr(sh: ShareSub, vars: Iterable[str] | None = None) -> GroundSub:
    """Translate to groundness: variables in no group are ground, the rest unknown."""
    scope = list(vars) if vars is not None else sorted(sh.vars)
    if sh.is_bottom:
        return GR_BOTTOM
    occurring = frozenset().union(*sh.groups) if sh.groups else frozenset()
    return GroundSub.of((v, ANY if v in occurring else G) for v in scope)


# ---------------------------------------------------------------------------
# analyzer interface


def _pattern_vars(n: int) -> list[str]:
    return [f"${i}" for i in range(1, n + 1)]


_ARITH = frozenset([("is", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2), ("=:=", 2), ("=\\=", 2)])


class Sharing:
    """Domain object plugged into the analyzer; ``widen`` is a group-count threshold."""

    name = "share"

    def __init__(self, widen: int | None = None):
        if widen is not None and widen < 1:
            raise ValueError("widening threshold must be >= 1")
        self.widen = widen

    @property
    def label(self) -> str:
        return "share" if self.widen is None else f"share+widen({self.widen})"

    def bottom(self, vars: Iterable[str] = ()) -> ShareSub:
        return ShareSub.bottom(vars)

    def is_bottom(self, s: ShareSub) -> bool:
        return s.is_bottom

    join = staticmethod(sh_join)
    meet = staticmethod(sh_meet)
    leq = staticmethod(sh_leq)
    distance = staticmethod(sh_distance)

    def top(self, vars: Iterable[str]) -> ShareSub:
        return ShareSub.top(vars)

    def from_modes(self, modes: Mapping[str, str], vars: Iterable[str]) -> ShareSub:
        vs = list(vars)
        unstated = [v for v in vs if v not in modes]
        free = [v for v in vs if modes.get(v) == "var"]
        groups = {frozenset([v]) for v in free}
        pool = sorted(set(unstated) | set(free))
        for k in range(1, len(pool) + 1):
            for c in combinations(pool, k):
                if any(v in unstated for v in c):
                    groups.add(frozenset(c))
        return ShareSub(frozenset(groups), frozenset(vs))

    def init_clause(self, vars: Iterable[str]) -> ShareSub:
        vs = frozenset(vars)
        return ShareSub(frozenset(frozenset([v]) for v in vs), vs)

    def project(self, s: ShareSub, vars: Iterable[str]) -> ShareSub:
        return sh_project(s, vars)

    def _unify_args(self, s: ShareSub, names: list[str], terms: Iterable[Term], keep: Iterable[str]) -> ShareSub:
        for name, t in zip(names, terms):
            if s.is_bottom:
                break
            s = sh_amgu(name, t, s)
        return sh_project(s, keep)

    def call_pattern(self, s: ShareSub, args: tuple[Term, ...]) -> ShareSub:
        names = _pattern_vars(len(args))
        if s.is_bottom:
            return ShareSub.bottom(names)
        ext = ShareSub(s.groups | {frozenset([n]) for n in names}, s.vars | frozenset(names))
        return self._unify_args(ext, names, args, names)

    def entry(self, pattern: ShareSub, head: Struct, clause_vars: Iterable[str]) -> ShareSub:
        cv = frozenset(clause_vars)
        if pattern.is_bottom:
            return ShareSub.bottom(cv)
        ext = ShareSub(pattern.groups | {frozenset([v]) for v in cv}, pattern.vars | cv)
        return self._unify_args(ext, _pattern_vars(head.arity), head.args, cv)

    def extend(self, s: ShareSub, args: tuple[Term, ...], success: ShareSub) -> ShareSub:
        if s.is_bottom or success.is_bottom:
            return ShareSub.bottom(s.vars)
        ext = ShareSub(s.groups | success.groups, s.vars | success.vars)
        return self._unify_args(ext, _pattern_vars(len(args)), args, s.vars)

    def builtin(self, literal: Struct, s: ShareSub, fresh: Iterable[str] = ()) -> ShareSub:
        if s.is_bottom:
            return s
        key = literal.indicator
        lvars = frozenset(v.name for v in term_vars(literal))
        if key == ("=", 2):
            return sh_unify(s, *literal.args)
        if key == ("ground", 1) or key in _ARITH:
            return ShareSub(frozenset(g for g in s.groups if not g & lvars), s.vars)
        if key == ("var", 1):
            arg = literal.args[0]
            if not isinstance(arg, Var) or not any(arg.name in g for g in s.groups):
                return ShareSub.bottom(s.vars)
            return s
        if key in (("true", 0), ("!", 0)):
            return s
        rel = {g for g in s.groups if g & lvars}
        return ShareSub((s.groups - rel) | star(rel), s.vars)

    def top_success(self, pattern: ShareSub) -> ShareSub:
        if pattern.is_bottom:
            return pattern
        return ShareSub(star(pattern.groups), pattern.vars)

    def trust_success(self, pattern: ShareSub, decl) -> ShareSub | None:
        if pattern.is_bottom:
            return pattern
        pos = {}
        for name, arg in zip(_pattern_vars(decl.head.arity), decl.head.args):
            if not isinstance(arg, Var) or arg.name in pos:
                return None
            pos[arg.name] = name
        for p in decl.pre:
            slot = pos.get(p.args[0].name) if p.args and isinstance(p.args[0], Var) else None
            # only groundness preconditions are decidable here
            if slot is None or p.functor != "ground" or any(slot in g for g in pattern.groups):
                return None
        out = self.top_success(pattern)
        for p in decl.post:
            slot = pos.get(p.args[0].name) if p.args and isinstance(p.args[0], Var) else None
            if slot is not None and p.functor == "ground":
                out = ShareSub(frozenset(g for g in out.groups if slot not in g), out.vars)
        return out

    def widen_pattern(self, pattern: ShareSub) -> ShareSub:
        if self.widen is None:
            return pattern
        return sh_widen(pattern, self.widen)

    def abstract(self, bindings: Mapping[str, Term]) -> ShareSub:
        return sh_abstract([bindings], bindings.keys())

    def to_json(self, s: ShareSub, order: Iterable[str] | None = None):
        order = list(order) if order is not None else sorted(s.vars)
        rank = {v: i for i, v in enumerate(order)}
        if s.is_bottom:
            return {"dom": "share", "sub": "bot", "vars": order}
        groups = sorted((sorted(g, key=rank.get) for g in s.groups), key=lambda g: (len(g), [rank[v] for v in g]))
        return {"dom": "share", "sub": groups, "vars": order}

    def from_json(self, obj) -> ShareSub:
        vars = obj.get("vars")
        if obj["sub"] == "bot":
            return ShareSub.bottom(vars or ())
        return ShareSub.of(obj["sub"], vars)

    def render(self, s: ShareSub, order: Iterable[str] | None = None) -> str:
        return s.render(order)

    def as_terms(self, s: ShareSub, order: Iterable[str] | None = None) -> list[Term]:
        """List-of-lists rendering, e.g. ``[[X],[X,Y]]``."""
        if s.is_bottom:
            return [Struct("bot")]
        groups = self.to_json(s, order)["sub"]
        return [mk_list(mk_list(Var(v) for v in g) for g in groups)]
