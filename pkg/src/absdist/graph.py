"""AND-OR graphs: the finite cyclic representation of an analysis."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from absdist.domains import get_domain
from absdist.terms import Struct, format_term, ordered_vars, parse_term

__all__ = ["OrNode", "AndNode", "AndOrGraph", "GraphError", "node_table"]


class GraphError(ValueError):
    pass


@dataclass
class OrNode:
    id: int
    pp: str
    literal: Struct
    call: Any
    success: Any
    # (clause index, literal index) -> child OR-node id
    children: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def vars(self) -> list[str]:
        return ordered_vars([self.literal])


@dataclass
class AndNode:
    parent: int
    clause: int
    head: Struct
    entry: Any
    exit: Any
    children: tuple[int, ...] = ()


@dataclass
class AndOrGraph:
    domain: Any
    entry: str
    root: int
    nodes: dict[int, OrNode]
    ands: list[AndNode] = field(default_factory=list)
    points: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.nodes)

    def children(self, node_id: int) -> list[tuple[tuple[int, int], int]]:
        return sorted(self.nodes[node_id].children.items())

    def by_point(self) -> dict[str, list[OrNode]]:
        out: dict[str, list[OrNode]] = {}
        for n in sorted(self.nodes.values(), key=lambda n: n.id):
            out.setdefault(n.pp, []).append(n)
        return out

    def point_order(self) -> list[str]:
        """Program points carrying nodes, in program order."""
        present = self.by_point()
        ordered = [p for p in self.points if p in present]
        return ordered + [p for p in present if p not in ordered]

    def table(self) -> list[tuple[int, str, str, str, str]]:
        return node_table(self)

    # -- interchange -------------------------------------------------------

    def to_json(self) -> dict:
        dom = self.domain
        nodes = []
        for n in sorted(self.nodes.values(), key=lambda n: n.id):
            order = n.vars
            nodes.append(
                {
                    "id": n.id,
                    "pp": n.pp,
                    "literal": format_term(n.literal),
                    "call": dom.to_json(n.call, order),
                    "success": dom.to_json(n.success, order),
                }
            )
        edges = [
            {"from": n.id, "clause": c, "literal": j, "to": t}
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
            for (c, j), t in sorted(n.children.items())
        ]
        return {
            "domain": dom.name,
            "widen": dom.widen,
            "entry": self.entry,
            "root": self.root,
            "points": list(self.points),
            "nodes": nodes,
            "edges": edges,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @staticmethod
    def from_json(obj: dict) -> "AndOrGraph":
        try:
            dom = get_domain(obj["domain"], obj.get("widen"))
            nodes: dict[int, OrNode] = {}
            for n in obj["nodes"]:
                lit = parse_term(n["literal"])
                if not isinstance(lit, Struct):
                    raise GraphError(f"node {n['id']}: literal is a variable")
                nodes[n["id"]] = OrNode(n["id"], n["pp"], lit, dom.from_json(n["call"]), dom.from_json(n["success"]))
            for e in obj.get("edges", []):
                nodes[e["from"]].children[(e["clause"], e["literal"])] = e["to"]
            root = obj.get("root", min(nodes) if nodes else 0)
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed analysis file: {exc}") from exc
        return AndOrGraph(dom, obj.get("entry", ""), root, nodes, [], list(obj.get("points", [])))

    @staticmethod
    def loads(text: str) -> "AndOrGraph":
        return AndOrGraph.from_json(json.loads(text))


def node_table(g: AndOrGraph) -> list[tuple[int, str, str, str, str]]:
    """Rows ``(id, pp, literal, call, success)`` ordered by node id."""
    rows = []
    for n in sorted(g.nodes.values(), key=lambda n: n.id):
        order = n.vars
        rows.append(
            (n.id, n.pp, format_term(n.literal), g.domain.render(n.call, order), g.domain.render(n.success, order))
        )
    return rows
