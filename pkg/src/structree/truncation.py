"""Finite windows onto a (possibly infinite) generated graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InputError
from .labels import VertexId
from .presentation import GraphPresentation


@dataclass(frozen=True)
class Truncation:
    """The ball B_R(base) with its boundary marked.

    Every vertex at distance < R has its full neighborhood present; vertices
    at distance exactly R form the boundary and may miss outside neighbors.
    Value-like and immutable: safe to share.
    """

    g: GraphPresentation
    base: VertexId
    radius: int
    vertices: frozenset
    adj: dict
    dist: dict
    boundary: frozenset

    def __contains__(self, v: VertexId) -> bool:
        return v in self.vertices

    def require(self, *vs: VertexId) -> None:
        for v in vs:
            if v not in self.vertices:
                raise InputError(f"vertex {v} lies outside the truncation")

    def sorted_vertices(self) -> list[VertexId]:
        return sorted(self.vertices, key=VertexId.key)

    def interior(self) -> list[VertexId]:
        return [v for v in self.sorted_vertices() if v not in self.boundary]

    def is_induced_restriction_of(self, other: "Truncation") -> bool:
        """Monotonicity oracle: self must equal other's induced subgraph on
        the smaller ball."""
        if self.base != other.base or self.radius > other.radius:
            return False
        small = {v for v in other.vertices if other.dist[v] <= self.radius}
        if small != self.vertices:
            return False
        for v in self.vertices:
            mine = set(self.adj[v])
            theirs = {w for w in other.adj[v] if w in small}
            if mine != theirs:
                return False
        return True


def expand_ball(g: GraphPresentation, x: VertexId, radius: int) -> Truncation:
    """Deterministic BFS ball; raises BudgetError instead of silently truncating."""
    if radius < 0:
        raise InputError("radius must be non-negative")
    g.validate_vertex(x)
    dist = {x: 0}
    order = [x]
    queue = deque([x])
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                queue.append(w)
                g.charge(len(order))
    vset = frozenset(order)
    adj = {}
    for v in order:
        adj[v] = tuple(w for w in g.neighbors(v) if w in vset)
    boundary = frozenset(v for v in order if dist[v] == radius)
    return Truncation(g, x, radius, vset, adj, dist, boundary)


@dataclass(frozen=True)
class Dist:
    """Graph distance measured inside a truncation.

    `exact` means a shortest path of the full graph provably lies inside the
    window; otherwise `value` is only an upper bound and `lower_bound` is the
    best guaranteed lower bound (None value = unreachable within the window).
    """

    value: int | None
    exact: bool
    lower_bound: int


def distance(g: GraphPresentation, x: VertexId, y: VertexId, ctx: Truncation) -> Dist:
    ctx.require(x, y)
    if x == y:
        return Dist(0, True, 0)
    seen = {x: 0}
    queue = deque([x])
    found = None
    while queue:
        v = queue.popleft()
        for w in ctx.adj[v]:
            if w not in seen:
                seen[w] = seen[v] + 1
                if w == y:
                    found = seen[w]
                    queue.clear()
                    break
                queue.append(w)
    # Any x-y walk leaving the ball must first reach distance radius+1 from
    # the base and come back, so it costs at least this much:
    escape = (ctx.radius + 1 - ctx.dist[x]) + (ctx.radius + 1 - ctx.dist[y])
    if found is None:
        return Dist(None, False, escape)
    if found <= escape:
        return Dist(found, True, found)
    return Dist(found, False, min(found, escape))
