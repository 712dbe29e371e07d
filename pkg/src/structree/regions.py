"""Exact component structure of G - S for finite S.

For a tree amalgam the infinite graph minus a finite vertex set decomposes
into finitely many components, each of which is either a finite set of
realized vertices or contains whole host-free branches of the blueprint tree.
This module computes that decomposition exactly from the presentation: the
finitely many part copies that host S are materialized, every host-free
blueprint component is contracted to a single node (it is connected and
carries metric rays by construction), and pendant decoration copies are
materialized or contracted likewise.  Everything downstream (cuts, crossing,
cut systems, blocks) leans on this engine instead of guessing from a ball.

Raylessness verdicts stay honest: a component is rayless only when it is a
finite fully-realized vertex set whose decorations are all declared rayless;
ray-bearing verdicts come from blueprint branches (metric by construction,
since distinct glue-node vertex sets are disjoint) or from declared
ray-bearing decorations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InputError
from .labels import VertexId, least
from .presentation import GraphPresentation
from .truncation import Truncation


class ComponentClass(enum.Enum):
    RAYLESS = "rayless"
    RAY_BEARING = "ray_bearing"
    METRIC_RAY_BEARING = "metric_ray_bearing"
    UNKNOWN = "unknown"

    @property
    def is_ray_bearing(self) -> bool:
        return self in (ComponentClass.RAY_BEARING, ComponentClass.METRIC_RAY_BEARING)

    def refines(self, earlier: "ComponentClass") -> bool:
        """True when this class is a legal refinement of an earlier answer."""
        if earlier is ComponentClass.UNKNOWN or earlier is self:
            return True
        return earlier is ComponentClass.RAY_BEARING and self is ComponentClass.METRIC_RAY_BEARING


@dataclass(frozen=True)
class BlueprintComp:
    """A component of the blueprint tree minus the host parts."""

    core: frozenset
    open_prefixes: frozenset

    @property
    def infinite(self) -> bool:
        return bool(self.open_prefixes)

    def contains_part(self, address) -> bool:
        if address in self.core:
            return True
        return any(address[: len(p)] == p for p in self.open_prefixes)

    def key(self):
        return min(self.core) if self.core else ()


class Region:
    """One exact component of G - S."""

    def __init__(self, rid, members, comps, tails, nbrs, cls, finite):
        self.rid: str = rid
        self.members: frozenset = members  # realized labels
        self.comps: tuple[BlueprintComp, ...] = comps
        self.tails: tuple = tails  # (host label, deco index, first unrealized k)
        self.nbrs: frozenset = nbrs  # vertices of S adjacent to this region
        self.cls: ComponentClass = cls
        self.finite: bool = finite

    def __repr__(self):
        return f"Region({self.rid}, {self.cls.value}, |members|={len(self.members)})"


class _UF:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


class RegionDecomposition:
    """Components of G - S, exact at presentation level."""

    def __init__(self, g: GraphPresentation, S: frozenset):
        self.g = g
        self.S = frozenset(S)
        for s in self.S:
            g.validate_vertex(s)
        if g.kind == "finite":
            self._build_finite()
        else:
            self._build_amalgam()

    # ------------------------------------------------------------------ builds

    def _build_finite(self):
        g = self.g
        labels = [VertexId((), n) for n in sorted(g.vertices)]
        live = [v for v in labels if v not in self.S]
        uf = _UF()
        for v in live:
            uf.add(v)
        for v in live:
            for w in g.neighbors(v):
                if w not in self.S:
                    uf.union(v, w)
        self._finish(uf, set(live), {}, {})

    def _host_parts(self) -> set:
        hosts = set()
        for s in self.S:
            for address, _ in self.g.representations(s.host):
                hosts.add(address)
        return hosts

    def _blueprint_comps(self, hosts: set) -> list[BlueprintComp]:
        g = self.g
        if not hosts:
            return [BlueprintComp(frozenset({()}), frozenset({()}))]
        ancestors = {h[:k] for h in hosts for k in range(len(h))}

        def subtree_host_free(addr) -> bool:
            return addr not in ancestors and addr not in hosts

        # Frontier: parts adjacent to a host through some glue node.
        frontier = set()
        for A in hosts:
            for i in range(g.a):
                for P, _ in g.glue_parts(A, i):
                    if P not in hosts:
                        frontier.add(P)
        comps: list[BlueprintComp] = []
        assigned: dict = {}
        for start in sorted(frontier):
            if start in assigned:
                continue
            core, open_prefixes = set(), set()
            stack = [start]
            while stack:
                P = stack.pop()
                if P in core or P in hosts:
                    continue
                core.add(P)
                assigned[P] = len(comps)
                if subtree_host_free(P):
                    open_prefixes.add(P)
                    # Descendants are included implicitly; only walk upward.
                    if P != ():
                        for Q, _ in g.glue_parts(P, 0):
                            if Q not in hosts and Q not in core:
                                stack.append(Q)
                    continue
                for i in range(g.a):
                    for Q, _ in g.glue_parts(P, i):
                        if Q not in hosts and Q not in core:
                            stack.append(Q)
            comps.append(BlueprintComp(frozenset(core), frozenset(open_prefixes)))
        return comps

    def _build_amalgam(self):
        g = self.g
        hosts = self._host_parts()
        comps = self._blueprint_comps(hosts)
        finite_parts = set()
        infinite = []
        for c in comps:
            if c.infinite:
                infinite.append(c)
            else:
                finite_parts |= c.core
        realized_parts = sorted(hosts | finite_parts)
        g.charge(len(realized_parts) * max(1, len(g.part.vertices)))

        realized: set[VertexId] = set()
        for P in realized_parts:
            for name in g.part.vertices:
                realized.add(g.normalize(VertexId(P, name)))
        # Decoration copies of realized vertices.
        tail_of: dict = {}  # (host, idx) -> first unrealized ray index
        deco_labels: set[VertexId] = set()
        for v in sorted(realized, key=VertexId.key):
            for d in g.decoration_at(v):
                if d.finite:
                    for name in d.finite_vertices():
                        deco_labels.add(v.with_deco(d.index, name))
                else:
                    k_max = max(
                        (int(s.deco[1][1:]) for s in self.S
                         if s.deco is not None and s.host == v and s.deco[0] == d.index),
                        default=0,
                    )
                    for k in range(1, k_max + 1):
                        deco_labels.add(v.with_deco(d.index, f"r{k}"))
                    tail_of[(v, d.index)] = k_max + 1
        realized |= deco_labels

        comp_node = {id(c): ("comp", c.key()) for c in infinite}
        self._comp_by_node = {comp_node[id(c)]: c for c in infinite}
        self._infinite_comps = infinite

        uf = _UF()
        live = {v for v in realized if v not in self.S}
        for v in live:
            uf.add(v)
        for node in comp_node.values():
            uf.add(node)
        for key in tail_of:
            uf.add(("tail", key))

        def comp_of_part(address):
            for c in infinite:
                if c.contains_part(address):
                    return comp_node[id(c)]
            raise AssertionError(f"part {address} in no component")

        for v in sorted(live, key=VertexId.key):
            for w in g.neighbors(v):
                if w in self.S:
                    continue
                if w in realized:
                    uf.union(v, w)
                elif w.deco is not None and w.host in realized:
                    uf.union(v, ("tail", (w.host, w.deco[0])))
                else:
                    uf.union(v, comp_of_part(w.host.address))
        self._finish(uf, live, {comp_node[id(c)]: c for c in infinite}, tail_of)
        self._hosts = hosts

    def _finish(self, uf, live: set, comp_nodes: dict, tail_of: dict):
        g = self.g
        groups: dict = {}
        for v in live:
            groups.setdefault(uf.find(v), []).append(v)
        comp_groups: dict = {}
        for node, c in comp_nodes.items():
            comp_groups.setdefault(uf.find(node), []).append(c)
        tail_groups: dict = {}
        for key in tail_of:
            tail_groups.setdefault(uf.find(("tail", key)), []).append((key, tail_of[key]))

        roots = sorted(set(groups) | set(comp_groups) | set(tail_groups), key=str)
        regions = []
        self._member_region: dict = {}
        self._comp_region: dict = {}
        self._tail_region: dict = {}
        for root in roots:
            members = frozenset(groups.get(root, ()))
            comps = tuple(comp_groups.get(root, ()))
            tails = tuple((h, i, k) for (h, i), k in sorted(
                tail_groups.get(root, ()), key=lambda t: (t[0][0].key(), t[0][1])))
            candidates = list(members)
            for c in comps:
                candidates.append(self._least_interior(c))
            for h, i, k in tails:
                candidates.append(h.with_deco(i, f"r{k}"))
            rid_label = least(candidates)
            if comps:
                cls = ComponentClass.METRIC_RAY_BEARING
            elif tails:
                cls = ComponentClass.RAY_BEARING
            else:
                cls = ComponentClass.RAYLESS
            nbrs = frozenset(
                s for s in self.S
                if any(self._probe_region_root(uf, w) == root
                       for w in g.neighbors(s) if w not in self.S)
            )
            region = Region(str(rid_label), members, comps, tails, nbrs, cls,
                            finite=not comps and not tails)
            regions.append(region)
            for v in members:
                self._member_region[v] = region
            for c in comps:
                self._comp_region[id(c)] = region
            for h, i, k in tails:
                self._tail_region[(h, i)] = region
        self.regions = tuple(sorted(regions, key=lambda r: r.rid))

    def _probe_region_root(self, uf, w):
        if w in uf.parent:
            return uf.find(w)
        # Unrealized neighbor of an S vertex: resolve through its contraction.
        if w.deco is not None and w.host in uf.parent:
            node = ("tail", (w.host, w.deco[0]))
            return uf.find(node) if node in uf.parent else None
        for c in getattr(self, "_infinite_comps", ()):  # pragma: no branch
            if c.contains_part(w.host.address):
                node = ("comp", c.key())
                return uf.find(node)
        return None

    def _least_interior(self, comp: BlueprintComp) -> VertexId:
        g = self.g
        depth = min(len(p) for p in comp.core)
        cands = []
        for P in sorted(p for p in comp.core if len(p) == depth):
            for name in g.part.vertices:
                cands.append(g.normalize(VertexId(P, name)))
        return least(cands)

    # ----------------------------------------------------------------- queries

    def region_of(self, v: VertexId) -> Region | None:
        """The exact component containing v; None when v is in S."""
        if v in self.S:
            return None
        if v in self._member_region:
            return self._member_region[v]
        if self.g.kind == "finite":
            raise InputError(f"{v} is not a vertex of {self.g.name}")
        if v.deco is not None:
            key = (v.host, v.deco[0])
            if key in self._tail_region:
                return self._tail_region[key]
            return self.region_of(v.host)
        for c in self._infinite_comps:
            if c.contains_part(v.host.address):
                return self._comp_region[id(c)]
        raise AssertionError(f"vertex {v} not located in any region")

    def by_id(self, rid: str) -> Region:
        for r in self.regions:
            if r.rid == rid:
                return r
        raise InputError(f"no region {rid!r} for separator {sorted(map(str, self.S))}")

    def trace(self, region: Region, ctx: Truncation) -> frozenset:
        return frozenset(v for v in ctx.vertices
                         if v not in self.S and self.region_of(v) is region)


def decompose(g: GraphPresentation, S) -> RegionDecomposition:
    """Memoized exact decomposition of G - S."""
    key = frozenset(S)
    cached = g._region_cache.get(key)
    if cached is None:
        cached = RegionDecomposition(g, key)
        g._region_cache[key] = cached
    return cached


# -------------------------------------------------------------- truncation ops

@dataclass(frozen=True)
class CtxComponent:
    """A component of ctx - S together with its exact classification."""

    cid: str
    vertices: frozenset
    touches_boundary: bool
    region_id: str
    cls: ComponentClass


def components_minus(g: GraphPresentation, S, ctx: Truncation) -> list[CtxComponent]:
    """Components of the truncation minus S, classified via the exact engine."""
    S = frozenset(S)
    for s in S:
        if s not in ctx:
            raise InputError(f"separator vertex {s} lies outside the truncation")
    dec = decompose(g, S)
    uf = _UF()
    live = [v for v in ctx.sorted_vertices() if v not in S]
    for v in live:
        uf.add(v)
    for v in live:
        for w in ctx.adj[v]:
            if w not in S:
                uf.union(v, w)
    groups: dict = {}
    for v in live:
        groups.setdefault(uf.find(v), []).append(v)
    out = []
    for vs in groups.values():
        vset = frozenset(vs)
        region = dec.region_of(min(vs, key=VertexId.key))
        out.append(
            CtxComponent(
                cid=str(least(vs)),
                vertices=vset,
                touches_boundary=bool(vset & ctx.boundary),
                region_id=region.rid,
                cls=region.cls,
            )
        )
    return sorted(out, key=lambda c: c.cid)


def classify_direction(g: GraphPresentation, direction, ctx: Truncation) -> str:
    """Classify a direction as local / non-local / global / unknown.

    Accepts a declared end tag, an EndDecl, or a strictly nested chain of
    components (list of vertex frozensets, outermost first).  Branch
    directions are certified global by a pair of disjoint glue separators
    realized along the branch; the branch is periodic, so one disjoint pair
    repeats unboundedly.
    """
    from .presentation import EndDecl

    if isinstance(direction, str):
        direction = g.declared_end(direction)
    if isinstance(direction, EndDecl):
        if direction.cls == "local":
            return "local"
        if not direction.period:
            return "global"  # declared global at a vertex
        seps = _branch_separators(g, direction, ctx)
        return "global" if _has_disjoint_pair(seps) else "non-local"
    # Nested chain of components.
    chain = [frozenset(c) for c in direction]
    if not chain:
        raise InputError("empty component chain")
    for outer, inner in zip(chain, chain[1:]):
        if not inner < outer:
            raise InputError("chain of components is not strictly nested")
    seps = []
    for comp in chain:
        nbh = set()
        for v in comp:
            for w in ctx.adj[v]:
                if w not in comp:
                    nbh.add(w)
        seps.append(frozenset(nbh))
    inner = chain[-1]
    dec = decompose(g, seps[-1])
    probe = min((v for v in inner if v not in seps[-1]), default=None, key=VertexId.key)
    if probe is None:
        return "unknown"
    reg = dec.region_of(probe)
    if reg is None or reg.cls is not ComponentClass.METRIC_RAY_BEARING:
        return "unknown"
    return "global" if _has_disjoint_pair(seps) else "non-local"


def _branch_separators(g: GraphPresentation, end, ctx: Truncation) -> list[frozenset]:
    seps = []
    addresses = g.branch_addresses(end, ctx.radius + len(end.prefix) + 2)
    steps = list(end.prefix)
    k = 0
    while len(steps) < len(addresses) - 1:
        steps.append(end.period[k % len(end.period)])
        k += 1
    for parent, step in zip(addresses, steps):
        labels = frozenset(g.glue_vertices(parent, step[0]))
        if all(v in ctx for v in labels):
            seps.append(labels)
    return seps


def _has_disjoint_pair(seps) -> bool:
    for i, s1 in enumerate(seps):
        for s2 in seps[i + 1:]:
            if not (s1 & s2):
                return True
    return False
