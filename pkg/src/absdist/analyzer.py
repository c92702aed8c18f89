"""Goal-dependent top-down analysis producing an AND-OR graph.

The fixpoint runs in global passes. Each pass re-walks the graph from
the entry, evaluating every (predicate, call pattern) key at most once;
a key met again inside the same pass (recursion, or a second caller)
answers with its current success pattern. Success patterns only grow,
and passes repeat until one changes nothing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from absdist.domains import get_domain
from absdist.graph import AndNode, AndOrGraph, OrNode
from absdist.parser import Clause, EntryDecl, Program, entry_to_abstract, program_points
from absdist.terms import Struct, ordered_vars

__all__ = ["analyze", "AnalysisError", "AnalysisTimeout", "MAX_PASSES"]

MAX_PASSES = 10_000


class AnalysisError(RuntimeError):
    pass


class AnalysisTimeout(AnalysisError):
    pass


@dataclass
class _Memo:
    success: Any
    # clause index -> (entry, exit, child OR ids)
    ands: dict[int, tuple[Any, Any, tuple[int, ...]]] = field(default_factory=dict)


@dataclass
class _Or:
    id: int
    pp: str
    literal: Struct
    call: Any
    success: Any = None
    callee: tuple | None = None


class _Analyzer:
    def __init__(self, program: Program, domain, deadline: float | None = None):
        self.deadline = deadline
        self.prog = program
        self.dom = domain
        self.memo: dict[tuple, _Memo] = {}
        self.ors: dict[tuple, _Or] = {}
        self.next_id = 1
        self.changed = False

    # -- nodes ---------------------------------------------------------------

    def or_node(self, pp: str, literal: Struct, call) -> _Or:
        key = (pp, call)
        node = self.ors.get(key)
        if node is None:
            node = _Or(self.next_id, pp, literal, call)
            self.next_id += 1
            self.ors[key] = node
            self.changed = True
        return node

    # -- fixpoint ------------------------------------------------------------

    def solve(self, key: tuple, visited: set, stack: set) -> Any:
        pred, pattern = key
        memo = self.memo.get(key)
        if memo is None:
            slots = [f"${i}" for i in range(1, pred[1] + 1)]
            memo = self.memo[key] = _Memo(self.dom.bottom(slots))
            self.changed = True
        if key in visited or key in stack:
            return memo.success
        visited.add(key)
        stack.add(key)
        for clause in self.prog.clauses(pred):
            entry = self.dom.entry(pattern, clause.head, clause.vars)
            exit_, kids = self.body(clause, entry, visited, stack)
            memo.ands[clause.index] = (entry, exit_, kids)
            contrib = self.dom.call_pattern(exit_, clause.head.args)
            joined = self.dom.join(memo.success, contrib)
            if joined != memo.success:
                memo.success = joined
                self.changed = True
        stack.discard(key)
        return memo.success

    def body(self, clause: Clause, s, visited: set, stack: set) -> tuple[Any, tuple[int, ...]]:
        seen = set(ordered_vars([clause.head]))
        kids = []
        for j, lit in enumerate(clause.body, 1):
            lvars = ordered_vars([lit])
            fresh = [v for v in lvars if v not in seen]
            seen.update(lvars)
            call = self.dom.project(s, lvars)
            node = self.or_node(clause.pp(j), lit, call)
            kids.append(node.id)
            s = self.literal(lit, s, node, fresh, visited, stack)
            succ = self.dom.project(s, lvars)
            if node.success != succ:
                node.success = succ
                self.changed = True
        return s, tuple(kids)

    def literal(self, lit: Struct, s, node: _Or, fresh: list[str], visited: set, stack: set):
        """Clause-level substitution after ``lit``; records the callee key on ``node``."""
        node.callee = None
        if self.dom.is_bottom(s):
            return s
        key = lit.indicator
        defined = self.prog.is_defined(key)
        if not defined and not self.prog.is_imported(key) and key not in self.prog.trusts:
            return self.dom.builtin(lit, s, fresh)
        pattern = self.dom.call_pattern(s, lit.args)
        for decl in self.prog.trusts.get(key, []):
            succ = self.dom.trust_success(pattern, decl)
            if succ is not None:
                return self.dom.extend(s, lit.args, succ)
        if not defined:
            return self.dom.extend(s, lit.args, self.dom.top_success(pattern))
        pkey = (key, self.dom.widen_pattern(pattern))
        node.callee = pkey
        succ = self.solve(pkey, visited, stack)
        return self.dom.extend(s, lit.args, succ)

    # -- driver --------------------------------------------------------------

    def run(self, decl: EntryDecl) -> AndOrGraph:
        head = decl.head
        hvars = ordered_vars([head])
        call = entry_to_abstract(decl, self.dom)
        root = self.or_node(decl.pp, head, call)
        for _ in range(MAX_PASSES):
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise AnalysisTimeout("time limit exceeded")
            self.changed = False
            succ = self.literal(head, call, root, [], set(), set())
            succ = self.dom.project(succ, hvars)
            if root.success != succ:
                root.success = succ
                self.changed = True
            if not self.changed:
                break
        else:
            raise AnalysisError(f"no fixpoint after {MAX_PASSES} passes")
        return self.collect(root, decl)

    def collect(self, root: _Or, decl: EntryDecl) -> AndOrGraph:
        """Keep what the final pass reaches from the root, renumbered by creation order."""
        by_id = {n.id: n for n in self.ors.values()}
        reach = [root.id]
        seen = {root.id}
        edges: dict[int, dict[tuple[int, int], int]] = {}
        ands: list[tuple[int, int, Any, Any, tuple[int, ...], Struct]] = []
        for nid in reach:
            n = by_id[nid]
            out = edges.setdefault(nid, {})
            if n.callee is None:
                continue
            memo = self.memo[n.callee]
            clauses = {c.index: c for c in self.prog.clauses(n.callee[0])}
            for ci, (entry, exit_, kids) in sorted(memo.ands.items()):
                ands.append((nid, ci, entry, exit_, kids, clauses[ci].head))
                for j, k in enumerate(kids, 1):
                    out[(ci, j)] = k
                    if k not in seen:
                        seen.add(k)
                        reach.append(k)
        renum = {old: new for new, old in enumerate(sorted(seen), 1)}
        nodes = {}
        for old in sorted(seen):
            n = by_id[old]
            success = n.success if n.success is not None else n.call
            nodes[renum[old]] = OrNode(
                renum[old], n.pp, n.literal, n.call, success, {k: renum[t] for k, t in edges[old].items()}
            )
        and_nodes = [
            AndNode(renum[p], ci, head, entry, exit_, tuple(renum[k] for k in kids))
            for p, ci, entry, exit_, kids, head in ands
        ]
        return AndOrGraph(
            self.dom,
            f"{decl.head.functor}/{decl.head.arity}",
            renum[root.id],
            nodes,
            and_nodes,
            program_points(self.prog),
        )


def analyze(
    program: Program,
    entry: str | tuple[str, int] | None = None,
    domain="gr",
    widen: int | None = None,
    time_limit: float | None = None,
):
    """Analyze ``program`` from one of its entry declarations.

    ``domain`` is a domain object or a name (``"gr"``, ``"share"``);
    ``widen`` sets the sharing widening threshold when a name is given.
    ``time_limit`` (seconds) is checked between fixpoint passes.
    """
    dom = get_domain(domain, widen) if isinstance(domain, str) else domain
    decl = program.entry(entry)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    return _Analyzer(program, dom, deadline).run(decl)
