"""The three-valued groundness domain {g, ng, any} with bottom.

``g`` is definitely ground, ``ng`` definitely non-ground and ``any``
unknown. Substitutions map every variable in scope to one of those values;
a meet that empties a variable's concretization collapses the whole
substitution to bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from absdist.lattice import product_distance
from absdist.terms import Struct, Term, Var, is_ground, term_vars

__all__ = [
    "G",
    "NG",
    "ANY",
    "GroundSub",
    "BOTTOM",
    "gr_join",
    "gr_meet",
    "gr_leq",
    "gr_distance",
    "gr_transfer",
    "value_distance",
    "Groundness",
    "ScopeError",
]

G, NG, ANY = "g", "ng", "any"
VALUES = (G, NG, ANY)

# Hasse-path length in {g, ng} < any, normalized by the diameter (g to ng)
_VAL_DIST = {
    (G, G): 0.0, (NG, NG): 0.0, (ANY, ANY): 0.0,
    (G, ANY): 0.5, (ANY, G): 0.5, (NG, ANY): 0.5, (ANY, NG): 0.5,
    (G, NG): 1.0, (NG, G): 1.0,
}


class ScopeError(ValueError):
    """Two substitutions over different variable sets were combined."""


def _vjoin(a: str, b: str) -> str:
    return a if a == b else ANY


def _vmeet(a: str, b: str) -> str | None:
    if a == b or b == ANY:
        return a
    if a == ANY:
        return b
    return None


def _vleq(a: str, b: str) -> bool:
    return a == b or b == ANY


def _persist(v: str) -> str:
    # groundness survives further instantiation, non-groundness does not
    return G if v == G else ANY


@dataclass(frozen=True)
class GroundSub:
    """A groundness substitution; ``items is None`` encodes bottom.

    Items are kept sorted by variable name so equality and hashing ignore
    insertion order.
    """

    items: tuple[tuple[str, str], ...] | None

    @staticmethod
    def of(mapping: Mapping[str, str] | Iterable[tuple[str, str]]) -> "GroundSub":
        pairs = dict(mapping)
        for v in pairs.values():
            if v not in VALUES:
                raise ValueError(f"unknown groundness value {v!r}")
        return GroundSub(tuple(sorted(pairs.items())))

    @property
    def is_bottom(self) -> bool:
        return self.items is None

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self.items or ())

    @property
    def vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.items or ())

    def __getitem__(self, var: str) -> str:
        return self.mapping[var]

    def render(self, order: Iterable[str] | None = None) -> str:
        if self.items is None:
            return "bot"
        m = self.mapping
        keys = [v for v in order if v in m] if order is not None else list(m)
        keys += [v for v in m if v not in keys]
        return "{" + ",".join(f"{v}/{m[v]}" for v in keys) + "}"

    def __str__(self) -> str:
        return self.render()


BOTTOM = GroundSub(None)


def _same_scope(a: GroundSub, b: GroundSub) -> None:
    if a.vars != b.vars:
        raise ScopeError(f"variable sets differ: {sorted(a.vars)} vs {sorted(b.vars)}")


def gr_join(a: GroundSub, b: GroundSub) -> GroundSub:
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    _same_scope(a, b)
    mb = b.mapping
    return GroundSub(tuple((v, _vjoin(x, mb[v])) for v, x in a.items))


def gr_meet(a: GroundSub, b: GroundSub) -> GroundSub:
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    _same_scope(a, b)
    mb = b.mapping
    out = []
    for v, x in a.items:
        m = _vmeet(x, mb[v])
        if m is None:
            return BOTTOM
        out.append((v, m))
    return GroundSub(tuple(out))


def gr_leq(a: GroundSub, b: GroundSub) -> bool:
    if a.is_bottom:
        return True
    if b.is_bottom:
        return False
    _same_scope(a, b)
    mb = b.mapping
    return all(_vleq(x, mb[v]) for v, x in a.items)


def value_distance(a: str, b: str) -> float:
    return _VAL_DIST[(a, b)]


def gr_distance(a: GroundSub, b: GroundSub) -> float:
    """Normalized 2-norm of per-variable Hasse distances; bottom is at 1 from everything else."""
    if a.is_bottom or b.is_bottom:
        return 0.0 if a.is_bottom and b.is_bottom else 1.0
    _same_scope(a, b)
    mb = b.mapping
    return product_distance([_VAL_DIST[(x, mb[v])] for v, x in a.items], normalize=True)


# ---------------------------------------------------------------------------
# abstract operations on terms


def term_value(t: Term, m: Mapping[str, str]) -> str:
    """Groundness of ``t`` given the values of its variables."""
    if isinstance(t, Var):
        return m[t.name]
    vals = [m[v.name] for v in term_vars(t)]
    if all(v == G for v in vals):
        return G
    if any(v == NG for v in vals):
        return NG
    return ANY


def _unify_value(current: str, incoming: str, fresh: bool) -> str:
    # a fresh variable simply takes the other side's value
    if fresh:
        return incoming
    if current == G or incoming == G:
        return G
    return ANY


def _bind(m: dict[str, str], t: Term, value: str, fresh: set[str]) -> None:
    """Unify ``t`` with a term of groundness ``value``."""
    if isinstance(t, Var):
        m[t.name] = _unify_value(m[t.name], value, t.name in fresh)
        fresh.discard(t.name)
        return
    names = [v.name for v in term_vars(t)]
    for name in names:
        if value == G:
            m[name] = G
        else:
            m[name] = G if (m[name] == G and name not in fresh) else ANY
    fresh.difference_update(names)


def gr_unify(m: dict[str, str], left: Term, right: Term, fresh: set[str]) -> bool:
    """In-place abstract unification of ``left = right``; False on definite failure."""
    touched = [v.name for v in (*term_vars(left), *term_vars(right))]
    for a, b in ((left, right), (right, left)):
        if isinstance(a, Var) and a.name in fresh:
            val = term_value(b, m)
            if val == G:
                m[a.name] = G
            else:
                # a now shares b's free variables, so neither is ng on its own any more
                m[a.name] = ANY
                for v in term_vars(b):
                    m[v.name] = _persist(m[v.name])
            fresh.difference_update(touched)
            return True
    lv, rv = term_value(left, m), term_value(right, m)
    if lv == G or rv == G:
        for v in term_vars(left):
            m[v.name] = G
        for v in term_vars(right):
            m[v.name] = G
    else:
        for v in (*term_vars(left), *term_vars(right)):
            m[v.name] = _persist(m[v.name])
    fresh.difference_update(touched)
    return True


_ARITH = frozenset([("is", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2), ("=:=", 2), ("=\\=", 2)])
_NOOP = frozenset([("true", 0), ("!", 0)])


def gr_transfer(literal: Term, sub: GroundSub, fresh: Iterable[str] = ()) -> GroundSub:
    """Abstract effect of a builtin literal on ``sub``.

    ``fresh`` names variables that are still unbound at this point of the
    clause (first occurrences); unifying one of them just copies the other
    side's groundness.
    """
    if sub.is_bottom:
        return sub
    m = sub.mapping
    fr = set(fresh)
    key = (literal.functor, literal.arity) if isinstance(literal, Struct) else None
    if key == ("=", 2):
        gr_unify(m, literal.args[0], literal.args[1], fr)
    elif key == ("ground", 1):
        for v in term_vars(literal.args[0]):
            if m[v.name] == NG:
                return BOTTOM
            m[v.name] = G
    elif key == ("var", 1):
        arg = literal.args[0]
        if not isinstance(arg, Var):
            return BOTTOM
        if m[arg.name] == G:
            return BOTTOM
        m[arg.name] = NG
    elif key in _ARITH:
        # succeeds only on ground operands (instantiation errors abort);
        # the left side of is/2 may be a free variable
        checked = literal.args[1:] if key == ("is", 2) else literal.args
        for v in (u for a in checked for u in term_vars(a)):
            if m[v.name] == NG:
                return BOTTOM
        for v in term_vars(literal):
            m[v.name] = G
    elif key in _NOOP:
        pass
    else:
        for v in term_vars(literal):
            m[v.name] = _persist(m[v.name]) if v.name not in fr else ANY
    return GroundSub.of(m)


# ---------------------------------------------------------------------------
# analyzer interface


def _pattern_vars(n: int) -> list[str]:
    return [f"${i}" for i in range(1, n + 1)]


def _arg_values(args: tuple[Term, ...], m: Mapping[str, str]) -> list[str]:
    """Groundness of each argument; ng only if the argument owns an ng variable.

    An ng variable repeated across arguments links them, so binding one
    argument inside the callee could ground another.
    """
    seen: dict[str, int] = {}
    for a in args:
        for name in {v.name for v in term_vars(a)}:
            seen[name] = seen.get(name, 0) + 1
    out = []
    for a in args:
        val = term_value(a, m)
        if val == NG and not any(m[v.name] == NG and seen[v.name] == 1 for v in term_vars(a)):
            val = ANY
        out.append(val)
    return out


class Groundness:
    """Domain object plugged into the analyzer.

    Call and success patterns are substitutions over ``$1..$n``, one
    variable per argument position of the called predicate.
    """

    name = "gr"
    label = "gr"
    widen = None

    def bottom(self, vars: Iterable[str] = ()) -> GroundSub:
        return BOTTOM

    def is_bottom(self, s: GroundSub) -> bool:
        return s.is_bottom

    join = staticmethod(gr_join)
    meet = staticmethod(gr_meet)
    leq = staticmethod(gr_leq)
    distance = staticmethod(gr_distance)

    def top(self, vars: Iterable[str]) -> GroundSub:
        return GroundSub.of((v, ANY) for v in vars)

    def from_modes(self, modes: Mapping[str, str], vars: Iterable[str]) -> GroundSub:
        conv = {"ground": G, "var": NG}
        return GroundSub.of((v, conv.get(modes.get(v, ""), ANY)) for v in vars)

    def init_clause(self, vars: Iterable[str]) -> GroundSub:
        # unbound variables are free, hence non-ground
        return GroundSub.of((v, NG) for v in vars)

    def project(self, s: GroundSub, vars: Iterable[str]) -> GroundSub:
        if s.is_bottom:
            return s
        m = s.mapping
        return GroundSub.of((v, m[v]) for v in vars)

    def call_pattern(self, s: GroundSub, args: tuple[Term, ...]) -> GroundSub:
        if s.is_bottom:
            return s
        m = s.mapping
        return GroundSub.of(zip(_pattern_vars(len(args)), _arg_values(args, m)))

    def entry(self, pattern: GroundSub, head: Struct, clause_vars: Iterable[str]) -> GroundSub:
        if pattern.is_bottom:
            return pattern
        m = {v: NG for v in clause_vars}
        fresh = set(m)
        pm = pattern.mapping
        for name, arg in zip(_pattern_vars(head.arity), head.args):
            _bind(m, arg, pm[name], fresh)
        return GroundSub.of(m)

    def extend(self, s: GroundSub, args: tuple[Term, ...], success: GroundSub) -> GroundSub:
        if s.is_bottom or success.is_bottom:
            return BOTTOM
        m = s.mapping
        sm = success.mapping
        slots = list(zip(_pattern_vars(len(args)), args))
        for name, arg in slots:
            val = sm[name]
            derived = val if isinstance(arg, Var) else (G if val == G else ANY)
            for v in term_vars(arg):
                new = _vmeet(_persist(m[v.name]), derived)
                if new is None:
                    return BOTTOM
                m[v.name] = new
        for name, arg in slots:
            if sm[name] == NG and term_value(arg, m) == G:
                return BOTTOM
        return GroundSub.of(m)

    def builtin(self, literal: Struct, s: GroundSub, fresh: Iterable[str] = ()) -> GroundSub:
        return gr_transfer(literal, s, fresh)

    def top_success(self, pattern: GroundSub) -> GroundSub:
        if pattern.is_bottom:
            return pattern
        return GroundSub.of((v, _persist(x)) for v, x in pattern.items)

    def trust_success(self, pattern: GroundSub, decl) -> GroundSub | None:
        """Success pattern from a trust assertion, or None if its precondition may not hold."""
        if pattern.is_bottom:
            return pattern
        pos = _head_positions(decl.head)
        if pos is None:
            return None
        pm = pattern.mapping
        for p in decl.pre:
            slot = pos.get(p.args[0].name) if p.args and isinstance(p.args[0], Var) else None
            if slot is None:
                return None
            want = G if p.functor == "ground" else NG if p.functor == "var" else None
            if want is None or pm[slot] != want:
                return None
        out = self.top_success(pattern).mapping
        for p in decl.post:
            slot = pos.get(p.args[0].name) if p.args and isinstance(p.args[0], Var) else None
            if slot is None:
                continue
            if p.functor == "ground":
                out[slot] = G
            elif p.functor == "var":
                out[slot] = _vmeet(out[slot], NG) or out[slot]
        return GroundSub.of(out)

    def widen_pattern(self, pattern: GroundSub) -> GroundSub:
        return pattern

    # -- concrete side -----------------------------------------------------

    def abstract(self, bindings: Mapping[str, Term]) -> GroundSub:
        """Abstraction of a single concrete substitution."""
        return GroundSub.of((v, G if is_ground(t) else NG) for v, t in bindings.items())

    # -- serialization -----------------------------------------------------

    def to_json(self, s: GroundSub, order: Iterable[str] | None = None):
        if s.is_bottom:
            return {"dom": "gr", "sub": "bot"}
        m = s.mapping
        keys = list(order) if order is not None else sorted(m)
        return {"dom": "gr", "sub": {v: m[v] for v in keys}}

    def from_json(self, obj) -> GroundSub:
        sub = obj["sub"] if isinstance(obj, dict) and "sub" in obj else obj
        if sub == "bot":
            return BOTTOM
        return GroundSub.of(sub)

    def render(self, s: GroundSub, order: Iterable[str] | None = None) -> str:
        return s.render(order)

    def as_terms(self, s: GroundSub, order: Iterable[str] | None = None) -> list[Term]:
        """Canonical rendering as ``Var/value`` pairs, one per variable."""
        if s.is_bottom:
            return [Struct("bot")]
        m = s.mapping
        keys = list(order) if order is not None else sorted(m)
        return [Struct("/", (Var(v), Struct(m[v]))) for v in keys]


def _head_positions(head: Struct) -> dict[str, str] | None:
    pos = {}
    for name, arg in zip(_pattern_vars(head.arity), head.args):
        if not isinstance(arg, Var) or arg.name in pos:
            return None
        pos[arg.name] = name
    return pos
