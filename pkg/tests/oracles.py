"""Independent reference implementations used to compute expected values.

Nothing here imports the code under test except the plain term
constructors, so a shared bug cannot make both sides agree.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import chain, combinations

from absdist.terms import Struct, Var

# -- groundness --------------------------------------------------------------

# Hasse diagram of {g, ng, any}: g - any - ng. Path length over the longest path.
_HASSE = {("g", "g"): 0, ("ng", "ng"): 0, ("any", "any"): 0, ("g", "any"): 1, ("ng", "any"): 1, ("g", "ng"): 2}


def gr_value_dist(a: str, b: str) -> float:
    return _HASSE.get((a, b), _HASSE.get((b, a))) / 2


def gr_dist(a: dict | None, b: dict | None) -> float:
    if a is None and b is None:
        return 0.0
    if a is None or b is None:
        return 1.0
    assert a.keys() == b.keys()
    n = len(a)
    if n == 0:
        return 0.0
    return math.sqrt(sum(gr_value_dist(a[v], b[v]) ** 2 for v in a) / n)


def gr_node(call1, succ1, call2, succ2) -> float:
    return 0.5 * (gr_dist(call1, call2) + gr_dist(succ1, succ2))


# -- sharing -----------------------------------------------------------------


def powerset(xs):
    xs = list(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, k) for k in range(len(xs) + 1))]


def sharing_universe(vars_):
    """Every sharing element over ``vars_`` as a frozenset of groups, plus None for bottom."""
    groups = [g for g in powerset(vars_) if g]
    return [frozenset(s) for s in powerset(groups)] + [None]


def share_size(s) -> int:
    return 0 if s is None else len(s) + 1


def share_dist(a, b, n) -> float:
    if a is None and b is None:
        return 0.0
    if a is None:
        return share_size(b) / 2**n
    if b is None:
        return share_size(a) / 2**n
    return (share_size(a | b) - share_size(a & b)) / 2**n


def occ_abstraction(thetas, vars_):
    out = set()
    for theta in thetas:
        occ = {}
        for x in vars_:
            for u in _vars(theta[x]):
                occ.setdefault(u, set()).add(x)
        out.update(frozenset(s) for s in occ.values())
    return frozenset(out)


def _vars(t):
    if isinstance(t, Var):
        return {t.name}
    return set().union(*(_vars(a) for a in t.args)) if t.args else set()


def mgu(a, b):
    """Robinson unification with occurs check; returns a triangular dict or None."""
    s = {}

    def walk(t):
        while isinstance(t, Var) and t.name in s:
            t = s[t.name]
        return t

    def occurs(name, t):
        t = walk(t)
        if isinstance(t, Var):
            return t.name == name
        return any(occurs(name, x) for x in t.args)

    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        x, y = walk(x), walk(y)
        if isinstance(x, Var) and isinstance(y, Var) and x.name == y.name:
            continue
        if isinstance(x, Var):
            if occurs(x.name, y):
                return None
            s[x.name] = y
        elif isinstance(y, Var):
            if occurs(y.name, x):
                return None
            s[y.name] = x
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return None
        else:
            todo.extend(zip(x.args, y.args))
    return s


def apply(t, s):
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    if isinstance(t, Var) or not t.args:
        return t
    return Struct(t.functor, tuple(apply(a, s) for a in t.args))


# -- term metric -------------------------------------------------------------


def d_term_ref(t1, t2, p=Fraction(1, 2)):
    if t1.functor != t2.functor or len(t1.args) != len(t2.args):
        return Fraction(1)
    if not t1.args:
        return Fraction(0)
    return p * sum((d_term_ref(a, b, p) for a, b in zip(t1.args, t2.args)), Fraction(0)) / len(t1.args)


def hausdorff_ref(d, A, B):
    A, B = list(A), list(B)
    left = max(min(d(a, b) for b in B) for a in A)
    right = max(min(d(a, b) for a in A) for b in B)
    return max(left, right)


# -- linear systems ----------------------------------------------------------


def solve_exact(rows: dict, consts: dict):
    """Solve ``X_i = consts[i] + sum_j rows[i][j] * X_j`` by Gaussian elimination over Fractions."""
    names = list(consts)
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    A = [[Fraction(0)] * n + [Fraction(consts[v])] for v in names]
    for v in names:
        i = idx[v]
        A[i][i] += 1
        for w, c in rows.get(v, {}).items():
            A[i][idx[w]] -= Fraction(c)
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return {v: A[idx[v]][n] / A[idx[v]][idx[v]] for v in names}
