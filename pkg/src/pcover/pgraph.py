"""The 3-intersecting graph on the order-p subgroups of G.

Vertices are all order-p subgroups, including those inside no cell
intersection; isolated vertices become singleton components.  Two vertices
are adjacent iff they lie in a common C3-class cell.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .cover import CellClass, Cover
from .errors import UnknownVertex
from .groups import Subgroup, subgroups_of_order_p


@dataclass
class ThreeIntersectGraph:
    cover: Cover
    vertices: list[Subgroup]
    adjacency: list[list[bool]]
    component_of: list[int]
    components: list[set[int]]

    def vertex_id(self, A: Subgroup) -> int:
        try:
            return self._index[A.members]
        except (AttributeError, KeyError):
            self._index = {v.members: i for i, v in enumerate(self.vertices)}
            if A.members not in self._index:
                raise UnknownVertex(f"{A!r} is not an order-p subgroup of the group")
            return self._index[A.members]

    def edges(self) -> list[tuple[int, int]]:
        n = len(self.vertices)
        return [
            (i, j) for i in range(n) for j in range(i + 1, n) if self.adjacency[i][j]
        ]

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": [v.elements() for v in self.vertices],
                "edges": self.edges(),
                "components": [sorted(c) for c in self.components],
            },
            indent=2,
        )

    def to_dot(self) -> str:
        names = self.cover.group.names
        lines = ["graph three_intersecting {"]
        for i, v in enumerate(self.vertices):
            gen = min(g for g in v.elements() if g != 0)
            lines.append(f'  v{i} [label="<{names[gen]}>"];')
        for i, j in self.edges():
            lines.append(f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines)


def build_graph(cover: Cover) -> ThreeIntersectGraph:
    G = cover.group
    vertices = subgroups_of_order_p(G)
    n = len(vertices)
    index = {v.members: i for i, v in enumerate(vertices)}
    adjacency = [[False] * n for _ in range(n)]
    classes = cover.classes()
    for cell, cls in classes.items():
        if cls is not CellClass.C3:
            continue
        inside = [i for v, i in index.items() if v & cell.members == v]
        for a in range(len(inside)):
            for b in range(a + 1, len(inside)):
                adjacency[inside[a]][inside[b]] = True
                adjacency[inside[b]][inside[a]] = True
    component_of, components = _components(adjacency)
    return ThreeIntersectGraph(cover, vertices, adjacency, component_of, components)


def _components(adjacency) -> tuple[list[int], list[set[int]]]:
    n = len(adjacency)
    component_of = [-1] * n
    components: list[set[int]] = []
    for start in range(n):
        if component_of[start] != -1:
            continue
        cid = len(components)
        stack = [start]
        comp = set()
        component_of[start] = cid
        while stack:
            v = stack.pop()
            comp.add(v)
            for w in range(n):
                if adjacency[v][w] and component_of[w] == -1:
                    component_of[w] = cid
                    stack.append(w)
        components.append(comp)
    return component_of, components


def components(graph: ThreeIntersectGraph) -> list[set[int]]:
    return graph.components


def component_of(graph: ThreeIntersectGraph, A: Subgroup) -> int:
    return graph.component_of[graph.vertex_id(A)]
