"""Independent coordinate models of the fixture graphs.

These are built with plain loops and networkx, entirely separate from the
presentation machinery, and serve as oracles: balls must be isomorphic
(anchored at the base vertex), distances must agree, and component structure
must match a fresh union-find.
"""

from __future__ import annotations

import networkx as nx


def dr_model(halfwidth: int) -> tuple[nx.Graph, int]:
    g = nx.Graph()
    for i in range(-halfwidth, halfwidth):
        g.add_edge(i, i + 1)
    return g, 0


def ladder_model(halfwidth: int) -> tuple[nx.Graph, tuple]:
    g = nx.Graph()
    for i in range(-halfwidth, halfwidth + 1):
        g.add_edge(("a", i), ("b", i))
        if i < halfwidth:
            g.add_edge(("a", i), ("a", i + 1))
            g.add_edge(("b", i), ("b", i + 1))
    return g, ("a", 0)


def c4_model() -> tuple[nx.Graph, str]:
    g = nx.cycle_graph(["a", "b", "c", "d"])
    return g, "a"


def tri_model(generations: int) -> tuple[nx.Graph, int]:
    """Tree of triangles: every vertex lies in exactly two triangles.
    Grown breadth-first for `generations` rounds from one root triangle."""
    g = nx.Graph()
    fresh = iter(range(10**6))
    root = [next(fresh) for _ in range(3)]
    g.add_edges_from([(root[0], root[1]), (root[1], root[2]), (root[0], root[2])])
    membership = {v: 1 for v in root}
    frontier = list(root)
    for _ in range(generations):
        nxt = []
        for v in frontier:
            if membership[v] >= 2:
                continue
            x, y = next(fresh), next(fresh)
            g.add_edges_from([(v, x), (v, y), (x, y)])
            membership[v] += 1
            membership[x] = membership[y] = 1
            nxt += [x, y]
        frontier = nxt
    return g, root[0]


def trip3_model(generations: int) -> tuple[nx.Graph, int]:
    g, base = tri_model(generations)
    fresh = iter(range(10**6, 2 * 10**6))
    for v in list(g.nodes):
        p1, p2, p3 = next(fresh), next(fresh), next(fresh)
        g.add_edges_from([(v, p1), (p1, p2), (p2, p3)])
    return g, base


def tree3_model(depth: int) -> tuple[nx.Graph, int]:
    """Ball of the 3-regular tree."""
    g = nx.Graph()
    fresh = iter(range(10**6))
    base = next(fresh)
    frontier = [base]
    g.add_node(base)
    for layer in range(depth):
        nxt = []
        for v in frontier:
            need = 3 - g.degree(v)
            for _ in range(need):
                w = next(fresh)
                g.add_edge(v, w)
                nxt.append(w)
        frontier = nxt
    return g, base


def t23sub_model(generations: int) -> tuple[nx.Graph, int]:
    """Subdivision of the (2,3) semi-regular tree, grown from a degree-3 node.
    Returns the base at a degree-2 (original) vertex adjacent via one
    subdivision vertex to the root branch node."""
    g = nx.Graph()
    fresh = iter(range(10**6))
    root = next(fresh)  # degree-3 class
    g.add_node(root)
    frontier3 = [root]
    first_a = None
    for _ in range(generations):
        nxt3 = []
        for bnode in frontier3:
            need = 3 - g.degree(bnode)
            for _ in range(need):
                s = next(fresh)  # subdivision vertex
                a = next(fresh)  # degree-2 class vertex
                g.add_edges_from([(bnode, s), (s, a)])
                if first_a is None:
                    first_a = a
                # a continues into one more branch node unless truncated
                b2 = next(fresh)
                s2 = next(fresh)
                g.add_edges_from([(a, s2), (s2, b2)])
                nxt3.append(b2)
        frontier3 = nxt3
    return g, first_a


def anchored_isomorphic(g1: nx.Graph, base1, g2: nx.Graph, base2) -> bool:
    for g, b in ((g1, base1), (g2, base2)):
        for v in g.nodes:
            g.nodes[v]["anchor"] = v == b
    gm = nx.algorithms.isomorphism.GraphMatcher(
        g1, g2, node_match=lambda x, y: x["anchor"] == y["anchor"]
    )
    return gm.is_isomorphic()


def ball_graph(model: nx.Graph, base, radius: int) -> nx.Graph:
    return nx.ego_graph(model, base, radius)


class UnionFind:
    """Fresh, minimal union-find used only as a test oracle."""

    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def groups(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return sorted(out.values(), key=lambda s: sorted(map(str, s)))


def uf_components(adj: dict, removed: set) -> list[set]:
    live = [v for v in adj if v not in removed]
    uf = UnionFind(live)
    for v in live:
        for w in adj[v]:
            if w not in removed:
                uf.union(v, w)
    return uf.groups()
