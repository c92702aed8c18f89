"""Herbrand terms, the Nienhuys-Cheng term distance and term size."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

from absdist.lattice import hausdorff

__all__ = [
    "Var",
    "Struct",
    "Term",
    "atom",
    "mk_list",
    "list_items",
    "is_ground",
    "term_vars",
    "term_size",
    "d_term",
    "hausdorff_terms",
    "parse_term",
    "format_term",
    "NonGroundTermError",
]

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_NUM_RE = re.compile(r"-?\d+\Z")
_SYMBOLIC = frozenset(["[]", "!", ";", "{}"])


class NonGroundTermError(ValueError):
    """Raised when a term distance is requested on a term with variables."""


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Struct:
    """A constant (``args == ()``) or a compound term."""

    functor: str
    args: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if not self.functor:
            raise ValueError("functor name must be non-empty")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, Struct]

NIL = Struct("[]")


def atom(name: str) -> Struct:
    return Struct(name)


def mk_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = Struct(".", (item, out))
    return out


def list_items(t: Term) -> tuple[list[Term], Term]:
    """Split a (possibly partial) list into its elements and its tail."""
    items: list[Term] = []
    while isinstance(t, Struct) and t.functor == "." and t.arity == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


def term_vars(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in depth-first, left-to-right order (with repeats)."""
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            yield cur
        else:
            stack.extend(reversed(cur.args))


def ordered_vars(terms: Iterable[Term]) -> list[str]:
    """Distinct variable names in order of first occurrence."""
    seen: dict[str, None] = {}
    for t in terms:
        for v in term_vars(t):
            seen.setdefault(v.name, None)
    return list(seen)


def is_ground(t: Term) -> bool:
    return next(term_vars(t), None) is None


def term_size(t: Term) -> int:
    """Number of functor and constant occurrences; variables count zero."""
    if isinstance(t, Var):
        return 0
    return 1 + sum(term_size(a) for a in t.args)


def d_term(t1: Term, t2: Term, p: float = 0.5) -> float:
    """Nienhuys-Cheng distance between two ground terms.

    Differing principal functors (name or arity) give 1; otherwise the
    distance is ``p`` times the mean distance of the arguments.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not (is_ground(t1) and is_ground(t2)):
        raise NonGroundTermError("d_term is only defined on ground terms")
    return _d_term(t1, t2, p)


@lru_cache(maxsize=65536)
def _d_term(t1: Struct, t2: Struct, p: float) -> float:
    if t1.indicator != t2.indicator:
        return 1.0
    n = t1.arity
    if n == 0:
        return 0.0
    return p * sum(_d_term(a, b, p) for a, b in zip(t1.args, t2.args)) / n


def hausdorff_terms(A: Iterable[Term], B: Iterable[Term], p: float = 0.5) -> float:
    """Hausdorff lifting of :func:`d_term` to finite sets of ground terms."""
    return hausdorff(lambda x, y: d_term(x, y, p), list(A), list(B))


def _format_atom(name: str) -> str:
    if _ATOM_RE.match(name) or _NUM_RE.match(name) or name in _SYMBOLIC:
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


_INFIX = frozenset(["=", "is", "<", ">", "=<", ">=", "=:=", "=\\=", "\\=", "==", "\\==", "+", "-", "*", "/"])


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == "." and t.arity == 2:
        items, tail = list_items(t)
        body = ",".join(format_term(i) for i in items)
        if tail == NIL:
            return f"[{body}]"
        return f"[{body}|{format_term(tail)}]"
    if t.arity == 0:
        return _format_atom(t.functor)
    if t.arity == 2 and t.functor in _INFIX:
        left, right = (format_term(a) for a in t.args)
        # parenthesise nested operator terms; keeps round trips unambiguous
        if _is_op_term(t.args[0]):
            left = f"({left})"
        if _is_op_term(t.args[1]):
            right = f"({right})"
        sep = " " if t.functor.isalpha() else ""
        return f"{left}{sep}{t.functor}{sep}{right}"
    return f"{_format_atom(t.functor)}({','.join(format_term(a) for a in t.args)})"


def _is_op_term(t: Term) -> bool:
    return isinstance(t, Struct) and t.arity == 2 and t.functor in _INFIX


def parse_term(text: str) -> Term:
    """Read a single term, e.g. ``parse_term("f(a, g(X))")``."""
    from absdist.parser import read_term

    return read_term(text)
