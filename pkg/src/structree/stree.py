"""Structure trees: blocks, slices, the bipartite tree, ray correspondence,
orbit census and comparison up to subdivision.

A block is computed from a seed separation as the intersection of the chosen
sides over all enumerated separations, then validated against the two block
conditions (side-consistency, and containing a full separator).  Tree
vertices are named by the least canonical label of their vertex sets; blocks
touching the truncation boundary are flagged open and excluded from degree
profiles and acceptance-grade assertions.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass, field

from .actions import Action, orbit
from .cutsystems import CutSystem, region_induced_separation
from .errors import CheckFailure, InputError, PreconditionError
from .labels import VertexId, least, parse_label
from .presentation import EndDecl, GraphPresentation
from .regions import ComponentClass, decompose
from .separations import Separation
from .truncation import Truncation


def _wname(S: frozenset) -> str:
    return "W:" + "|".join(sorted(str(v) for v in S))


@dataclass(frozen=True)
class SBlock:
    vertices: frozenset
    open: bool
    witness_ii: tuple  # (separator, side ids) witnessing condition (ii)

    @property
    def name(self) -> str:
        return "B:" + "|".join(sorted(str(v) for v in self.vertices))


@dataclass(frozen=True)
class SSlice:
    separator: frozenset
    vertices: frozenset  # realized trace inside the truncation
    open: bool
    radius: int


class StructureTree:
    """Bipartite tree on separators (W) and blocks (B), realized in a ball."""

    def __init__(self, g, system, separators, blocks, ctx):
        self.g: GraphPresentation = g
        self.system: CutSystem = system
        self.separators: tuple[frozenset, ...] = tuple(separators)
        self.blocks: tuple[SBlock, ...] = tuple(blocks)
        self.ctx: Truncation = ctx
        self.adj: dict[str, tuple[str, ...]] = {}
        self._vertex_sets: dict[str, frozenset] = {}
        edges = []
        for S in self.separators:
            self._vertex_sets[_wname(S)] = S
        for b in self.blocks:
            self._vertex_sets[b.name] = b.vertices
        nbrs = {name: [] for name in self._vertex_sets}
        for S in self.separators:
            wname = _wname(S)
            for b in self.blocks:
                if S <= b.vertices:
                    nbrs[wname].append(b.name)
                    nbrs[b.name].append(wname)
                    edges.append((wname, b.name))
        self.adj = {k: tuple(sorted(v)) for k, v in nbrs.items()}
        self.edges = tuple(sorted(edges))
        self._assert_tree()

    # ------------------------------------------------------------------ basics

    def names(self) -> list[str]:
        return sorted(self._vertex_sets)

    def vertex_set(self, name: str) -> frozenset:
        return self._vertex_sets[name]

    def is_separator_vertex(self, name: str) -> bool:
        return name.startswith("W:")

    def is_open(self, name: str) -> bool:
        if self.is_separator_vertex(name):
            return False
        return next(b for b in self.blocks if b.name == name).open

    def closed_names(self) -> list[str]:
        return [n for n in self.names() if not self.is_open(n)]

    def degree(self, name: str) -> int:
        return len(self.adj[name])

    def _assert_tree(self) -> None:
        if not self._vertex_sets:
            raise CheckFailure("empty structure tree")
        names = self.names()
        seen = {names[0]}
        parent = {names[0]: None}
        queue = deque([names[0]])
        while queue:
            cur = queue.popleft()
            for nxt in self.adj[cur]:
                if nxt == parent[cur]:
                    continue
                if nxt in seen:
                    raise CheckFailure(f"structure tree has a cycle through {cur} and {nxt}")
                seen.add(nxt)
                parent[nxt] = cur
                queue.append(nxt)
        if len(seen) != len(names):
            missing = sorted(set(names) - seen)[:4]
            raise CheckFailure(f"structure tree is disconnected; unreachable: {missing}")

    def tree_distance(self, x: str, y: str) -> int:
        if x == y:
            return 0
        dist = {x: 0}
        queue = deque([x])
        while queue:
            cur = queue.popleft()
            for nxt in self.adj[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    if nxt == y:
                        return dist[nxt]
                    queue.append(nxt)
        raise InputError(f"no tree path from {x} to {y}")

    def path(self, x: str, y: str) -> list[str]:
        parent = {x: None}
        queue = deque([x])
        while queue:
            cur = queue.popleft()
            if cur == y:
                out = [cur]
                while parent[out[-1]] is not None:
                    out.append(parent[out[-1]])
                return list(reversed(out))
            for nxt in self.adj[cur]:
                if nxt not in parent:
                    parent[nxt] = cur
                    queue.append(nxt)
        raise InputError(f"no tree path from {x} to {y}")

    def leaves_towards(self, name: str, avoid: str) -> list[str]:
        """Vertices of the subtree hanging off `name` away from `avoid`."""
        out = []
        queue = deque([name])
        seen = {avoid, name}
        while queue:
            cur = queue.popleft()
            out.append(cur)
            for nxt in self.adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return out

    def system_hash(self) -> str:
        text = ";".join(",".join(sorted(map(str, s))) for s in self.separators)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# -------------------------------------------------------------------- blocks

BLOCK_SCAN_RADIUS = 4


def blocks_of(F: CutSystem, ctx: Truncation, scan_radius: int = BLOCK_SCAN_RADIUS) -> list[SBlock]:
    """Maximal side-consistent vertex sets containing a full separator.

    Computation is local: a connected neighborhood of the seed separator that
    avoids a distant separator lies in one of its components, so distant cuts
    constrain nothing; only cuts meeting the scan ball are intersected."""
    g = F.g
    if not F.is_nested(ctx):
        raise PreconditionError("blocks are only defined for nested systems")
    candidates: dict[frozenset, tuple] = {}
    for seed in F.cuts:
        X, truncated = _block_candidate(g, F, seed, ctx, scan_radius)
        if X and X not in candidates:
            candidates[X] = (seed.separator, seed.side, truncated)
    blocks = []
    for X, (wsep, wside, truncated) in sorted(candidates.items(),
                                              key=lambda kv: least(kv[0]).key()):
        if not _block_conditions(g, F, X, ctx):
            continue
        is_open = bool(X & ctx.boundary) or truncated
        blocks.append(SBlock(X, open=is_open, witness_ii=(wsep, wside)))
    # Maximality: drop candidates strictly contained in another candidate.
    out = [b for b in blocks
           if not any(b.vertices < other.vertices for other in blocks)]
    return out


def _block_candidate(g, F, seed: Separation, ctx, scan_radius: int):
    """Intersection of the chosen sides over the nearby separations, scanned
    inside a ball around the seed separator."""
    from collections import deque

    dec0 = decompose(g, seed.separator)
    dist = {v: 0 for v in seed.separator}
    queue = deque(sorted(seed.separator, key=VertexId.key))
    while queue:
        v = queue.popleft()
        if dist[v] >= scan_radius:
            continue
        for w in ctx.adj.get(v, ()):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    scan = set(dist)
    base = [v for v in scan
            if v in seed.separator
            or (dec0.region_of(v) is not None and dec0.region_of(v).rid in seed.side)]
    constraints = []
    for c in F.cuts:
        if not any(v in scan for v in c.separator):
            continue  # distant cuts leave the whole scan ball on one side
        if c.separator == seed.separator:
            if c.side != seed.side:
                constraints.append(("avoid", c))
            continue
        strictly_inside = any(_vertex_in_wing(g, c, v) for v in seed.separator)
        constraints.append(("within" if strictly_inside else "avoid", c))
    X = set()
    for v in sorted(base, key=VertexId.key):
        ok = True
        for kind, c in constraints:
            strict = _vertex_in_wing(g, c, v)
            if kind == "within" and not (strict or v in c.separator):
                ok = False
                break
            if kind == "avoid" and strict:
                ok = False
                break
        if ok:
            X.add(v)
    truncated = any(dist.get(v, 0) >= scan_radius for v in X)
    return frozenset(X), truncated


def _vertex_in_wing(g, c: Separation, v: VertexId) -> bool:
    if v in c.separator:
        return False
    return decompose(g, c.separator).region_of(v).rid in c.side


def _block_conditions(g, F: CutSystem, X: frozenset, ctx: Truncation) -> bool:
    """(i) X lies inside one side of every enumerated separation, never both;
    (ii) some separation of the family contains X in its A-set and its full
    separator inside X.

    When X is connected it can only straddle a separation whose separator it
    meets, so only those cuts need checking."""
    connected = _connected_in(ctx, X)
    for c in F.cuts:
        if connected and not (X & c.separator):
            continue
        strict_in = [v for v in X if _vertex_in_wing(g, c, v)]
        sep_in = [v for v in X if v in c.separator]
        outside = [v for v in X if v not in c.separator and not _vertex_in_wing(g, c, v)]
        if strict_in and outside:
            return False  # straddles the separation
        if not strict_in and not outside and len(sep_in) == len(X):
            return False  # inside both sides (X inside the separator)
    return any(
        c.separator <= X
        and all(v in c.separator or _vertex_in_wing(g, c, v) for v in X)
        for c in F.cuts
        if X & c.separator
    )


def _connected_in(ctx: Truncation, X: frozenset) -> bool:
    if not X:
        return False
    seen = set()
    queue = deque([min(X, key=VertexId.key)])
    while queue:
        v = queue.popleft()
        if v in seen:
            continue
        seen.add(v)
        for w in ctx.adj.get(v, ()):
            if w in X and w not in seen:
                queue.append(w)
    return len(seen) == len(X)


def build(F: CutSystem, ctx: Truncation) -> StructureTree:
    blocks = blocks_of(F, ctx)
    return StructureTree(F.g, F, F.separators(), blocks, ctx)


def slices_of(F: CutSystem, separator: frozenset, ctx: Truncation) -> list[SSlice]:
    """Components off a separator whose induced separation is not in the system."""
    g = F.g
    dec = decompose(g, separator)
    out = []
    for region in dec.regions:
        induced = region_induced_separation(g, dec, region)
        member = induced is not None and F.contains_separation(g, *induced)
        if member:
            continue
        trace = dec.trace(region, ctx)
        out.append(SSlice(separator, trace, open=bool(trace & ctx.boundary),
                          radius=ctx.radius))
    return sorted(out, key=lambda s: min((v.key() for v in s.vertices), default=()))


# ------------------------------------------------------------- correspondence

@dataclass(frozen=True)
class TreeEnd:
    """A realized end of the structure tree: a maximal separator chain."""

    chain: tuple  # tree vertex names, outermost last

    @property
    def rim_name(self) -> str:
        return self.chain[-1]


def correspond(direction, tree: StructureTree, ctx: Truncation):
    """Map a declared direction or an explicit ray prefix to a block vertex or
    a realized tree end."""
    g = tree.g
    if isinstance(direction, str):
        direction = g.declared_end(direction)
    if isinstance(direction, EndDecl):
        if direction.at_vertex is not None:
            v = g.resolve(direction.at_vertex)
            holders = [b for b in tree.blocks if v in b.vertices]
            if not holders:
                raise InputError(f"no realized block contains {g.display(v)}")
            return min(holders, key=lambda b: least(b.vertices).key()).name
        chain = _chain_towards_branch(g, tree, direction, ctx)
        if len(chain) < 2:
            raise InputError(f"direction {direction.tag} leaves the realized tree undetermined")
        return TreeEnd(tuple(chain))
    # Explicit ray prefix: a list of vertices heading somewhere.
    ray = [v for v in direction]
    if len(ray) < 2:
        raise InputError("ray prefix too short")
    tail = ray[-1]
    chain = []
    for S in tree.separators:
        dec = decompose(g, S)
        if tail in S or ctx.base in S:
            continue
        if dec.region_of(tail) is not dec.region_of(ctx.base):
            chain.append(S)
    if not chain:
        raise InputError("ray prefix crosses no realized separator: undetermined")
    chain.sort(key=lambda S: min(ctx.dist.get(v, 10**9) for v in S))
    return TreeEnd(tuple("W:" + str(least(S)) for S in chain))


def _chain_towards_branch(g, tree, end: EndDecl, ctx) -> list[str]:
    """Separator chain separating the base from the branch direction."""
    chain = []
    for S in tree.separators:
        dec = decompose(g, S)
        # The branch tail lies in the region holding deep branch parts.
        deep = _deep_branch_vertex(g, end, S, ctx)
        if deep is None or ctx.base in S:
            continue
        if dec.region_of(deep) is not dec.region_of(ctx.base):
            chain.append(S)
    chain.sort(key=lambda S: min(ctx.dist.get(v, 10**9) for v in S))
    return [_wname(S) for S in chain]


def _deep_branch_vertex(g, end: EndDecl, S: frozenset, ctx):
    addresses = g.branch_addresses(end, ctx.radius + 4)
    deepest = addresses[-1]
    for name in g.part.vertices:
        v = g.normalize(VertexId(deepest, name))
        if v not in S:
            return v
    return None


# -------------------------------------------------------------------- census

@dataclass
class Census:
    orbits_w: int
    orbits_b: int
    degrees_w: tuple
    degrees_b: tuple
    shape: str
    params: tuple | None

    def lines(self) -> list[str]:
        return [
            f"orbits: W={self.orbits_w} B={self.orbits_b}",
            f"degrees: W={sorted(set(self.degrees_w))} B={sorted(set(self.degrees_b))}",
            f"shape: {self.shape}"
            + (f"({self.params[0]},{self.params[1]})" if self.params else ""),
        ]


def census(tree: StructureTree, action: Action) -> Census:
    """Orbit counts, degree profile of the closed realization, and the shape
    classification (semi-regular / subdivided-semi-regular / other)."""
    g = tree.g
    closed = [n for n in tree.closed_names()]
    interior = [n for n in closed if _fully_interior(tree, n)]
    w_names = [n for n in interior if tree.is_separator_vertex(n)]
    b_names = [n for n in interior if not tree.is_separator_vertex(n)]
    orbits_w = _count_orbits(tree, action, w_names)
    orbits_b = _count_orbits(tree, action, b_names)
    deg_w = tuple(sorted(tree.degree(n) for n in w_names))
    deg_b = tuple(sorted(tree.degree(n) for n in b_names))
    shape, params = _shape(tree, w_names, b_names)
    return Census(orbits_w, orbits_b, deg_w, deg_b, shape, params)


def _fully_interior(tree: StructureTree, name: str) -> bool:
    """All neighbors realized: vertex set clear of the window's last layers."""
    vs = tree.vertex_set(name)
    lim = tree.ctx.radius - 1
    return all(tree.ctx.dist[v] < lim for v in vs if v in tree.ctx.dist)


def _count_orbits(tree, action, names) -> int:
    remaining = set(names)
    count = 0
    while remaining:
        seed = sorted(remaining)[0]
        seen = orbit(tree.vertex_set(seed), action, tree.ctx)
        keys = {frozenset(s) for s in seen}
        before = len(remaining)
        remaining = {n for n in remaining if frozenset(tree.vertex_set(n)) not in keys}
        if len(remaining) == before:
            remaining.discard(seed)
        count += 1
    return count


def _shape(tree, w_names, b_names):
    dw = {tree.degree(n) for n in w_names}
    db = {tree.degree(n) for n in b_names}
    if not dw or not db:
        return "other", None
    if len(dw) == 1 and len(db) == 1:
        return "semi-regular", (min(dw), min(db))
    if dw == {2} and len(db) == 2:
        # Subdivided: every separator joins blocks of the two degree classes.
        lo, hi = sorted(db)
        for n in w_names:
            degs = sorted(tree.degree(b) for b in tree.adj[n] if b in b_names)
            if len(degs) == 2 and degs != [lo, hi]:
                return "other", None
        return "subdivided-semi-regular", (lo, hi)
    return "other", None


# ------------------------------------------------------ subdivision comparison

def _contraction_profile(tree: StructureTree):
    """Branch-vertex degrees and the realized chain lengths between them."""
    names = tree.names()
    branch = [n for n in names if tree.degree(n) >= 3]
    chains = []
    for x, y in itertools.combinations(branch, 2):
        p = tree.path(x, y)
        if all(tree.degree(n) == 2 for n in p[1:-1]):
            chains.append(len(p) - 1)
    degs = sorted(tree.degree(n) for n in branch
                  if all(m in tree.adj for m in tree.adj[n]))
    return branch, sorted(chains), degs


def subdivision_equiv(t1: StructureTree, t2: StructureTree) -> str:
    """identical | t1-subdivides-t2 | t2-subdivides-t1 | distinct; based on the
    degree-2 contraction of both realized trees."""
    for t in (t1, t2):
        if max((t.tree_distance(t.names()[0], n) for n in t.names()), default=0) < 4:
            raise PreconditionError("realized trees too shallow to compare")
    b1, chains1, degs1 = _contraction_profile(t1)
    b2, chains2, degs2 = _contraction_profile(t2)
    if not b1 and not b2:
        return "identical"  # both realized portions are bare double rays
    if bool(b1) != bool(b2):
        return "distinct"
    if set(degs1) != set(degs2):
        return "distinct"
    c1 = set(chains1)
    c2 = set(chains2)
    if not c1 or not c2:
        return "distinct"
    if c1 == c2:
        return "identical"
    if {c * 2 for c in c2} == c1:
        return "t1-subdivides-t2"
    if {c * 2 for c in c1} == c2:
        return "t2-subdivides-t1"
    return "distinct"


def vertex_mapping(t1: StructureTree, t2: StructureTree) -> dict:
    """A greedy level mapping between the realized trees, rooted at the least
    branch vertices; only meaningful when the trees compare as identical."""
    r1 = min((n for n in t1.names() if t1.degree(n) >= 3), default=t1.names()[0])
    r2 = min((n for n in t2.names() if t2.degree(n) >= 3), default=t2.names()[0])
    mapping = {r1: r2}
    queue = deque([(r1, r2, None, None)])
    while queue:
        a, b, pa, pb = queue.popleft()
        nxt_a = sorted(n for n in t1.adj[a] if n != pa)
        nxt_b = sorted(n for n in t2.adj[b] if n != pb)
        for x, y in zip(nxt_a, nxt_b):
            mapping[x] = y
            queue.append((x, y, a, b))
    return mapping


# ----------------------------------------------------------------------- DOT

def to_dot(tree: StructureTree) -> str:
    lines = [
        f"// structure tree of {tree.g.name}; radius={tree.ctx.radius}; "
        f"system=sha256:{tree.system_hash()}",
        "graph structure_tree {",
        "  node [fontsize=10];",
    ]
    for name in tree.names():
        shape = "box" if tree.is_separator_vertex(name) else "ellipse"
        style = ', style="dashed"' if tree.is_open(name) else ""
        label = _dot_label(tree, name)
        lines.append(f'  "{name}" [shape={shape}, label="{label}"{style}];')
    for x, y in tree.edges:
        lines.append(f'  "{x}" -- "{y}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_label(tree: StructureTree, name: str) -> str:
    vs = tree.vertex_set(name)
    shown = ",".join(sorted(tree.g.display(v) for v in vs))
    if len(shown) > 40:
        shown = shown[:37] + "..."
    return shown


def tree_as_json(tree: StructureTree) -> dict:
    return {
        "graph": tree.g.name,
        "radius": tree.ctx.radius,
        "system": tree.system_hash(),
        "separators": [sorted(tree.g.display(v) for v in s) for s in tree.separators],
        "blocks": [
            {"vertices": sorted(tree.g.display(v) for v in b.vertices), "open": b.open}
            for b in tree.blocks
        ],
        "edges": [list(e) for e in tree.edges],
    }
