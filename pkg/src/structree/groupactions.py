"""Group actions on structure trees: translations and axes, the fixed-end
tree order with its cones, end-orbit censuses, the density probe and the
fixed-end check suite."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .actions import Action, AutoMap, WordMap, orbit, orbit_with_words
from .errors import InputError, PreconditionError
from .labels import VertexId, least, parse_label
from .regions import decompose
from .stree import StructureTree, TreeEnd, correspond
from .truncation import Truncation
from .verdict import FALSE, TRUE, UNKNOWN, Report, tri


# ------------------------------------------------------------ tree-side action

def tree_image(tree: StructureTree, m: AutoMap, name: str) -> str | None:
    """Image of a tree vertex under a graph automorphism, if realized."""
    index = getattr(tree, "_set_index", None)
    if index is None:
        index = {tree.vertex_set(n): n for n in tree.names()}
        tree._set_index = index
    try:
        img = m.apply_set(tree.vertex_set(name))
    except InputError:
        return None
    return index.get(img)


def tree_orbit_words(tree: StructureTree, action: Action, start: str,
                     max_len: int = 14) -> dict:
    """Tree vertex -> shortest word (list of generator names) reaching it."""
    cache = getattr(tree, "_word_cache", None)
    if cache is None:
        cache = {}
        tree._word_cache = cache
    key = (id(action), start, max_len)
    if key in cache:
        return cache[key]
    maps = []
    for gname in sorted(action.generators):
        maps.append((gname, action.generators[gname]))
        maps.append((f"-{gname}", action.generators[gname].inverse()))
    found = {start: []}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if len(found[cur]) >= max_len:
            continue
        for gname, m in maps:
            img = tree_image(tree, m, cur)
            if img is not None and img not in found:
                found[img] = found[cur] + [gname]
                queue.append(img)
    cache[key] = found
    return found


def class_of(tree: StructureTree, name: str) -> str:
    return "W" if tree.is_separator_vertex(name) else "B"


def verify_class_transitive(tree: StructureTree, action: Action, cls: str) -> bool:
    """Transitivity on one bipartition class, verified on the closed interior."""
    names = [n for n in tree.closed_names() if class_of(tree, n) == cls
             and _interior_name(tree, n)]
    if not names:
        return False
    words = tree_orbit_words(tree, action, names[0])
    return all(n in words for n in names)


def _interior_name(tree: StructureTree, name: str) -> bool:
    vs = tree.vertex_set(name)
    lim = tree.ctx.radius - 1
    return all(tree.ctx.dist[v] < lim for v in vs if v in tree.ctx.dist)


# ----------------------------------------------------------------- translation

@dataclass
class TranslationCertificate:
    word: list
    displacement: int
    axis: tuple  # ordered tree vertex names

    def describe(self) -> str:
        return (f"word [{' '.join(self.word) or 'id'}], displacement "
                f"{self.displacement}, axis of {len(self.axis)} realized vertices")


def find_translation(tree: StructureTree, action: Action, path: list,
                     ctx: Truncation) -> tuple[WordMap, TranslationCertificate]:
    """Given a length-4 tree path with endpoints and midpoint in a class the
    action is transitive on, produce a translation moving x0 to x2 or x4.

    Construction: take g with x0 -> x2; if it moves x1 it is a translation;
    otherwise take h with x0 -> x4; if it moves x2 it is one; otherwise g h is.
    """
    x0, x1, x2, x3, x4 = path
    cls = class_of(tree, x0)
    if class_of(tree, x2) != cls or class_of(tree, x4) != cls:
        raise PreconditionError("path endpoints and midpoint must share a class")
    if not verify_class_transitive(tree, action, cls):
        raise PreconditionError(
            f"action is not verifiably transitive on class {cls} within the window"
        )
    words = tree_orbit_words(tree, action, x0)
    if x2 not in words or x4 not in words:
        raise PreconditionError("path vertices unreachable in the realized orbit")

    def to_map(word):
        return action.word(word)

    g_word = words[x2]
    gm = to_map(g_word)
    if tree_image(tree, gm, x1) != x1:
        return _certify(tree, gm, g_word, x0)
    h_word = words[x4]
    hm = to_map(h_word)
    if tree_image(tree, hm, x2) != x2:
        return _certify(tree, hm, h_word, x0)
    f_word = g_word + h_word
    return _certify(tree, to_map(f_word), f_word, x0)


def _certify(tree: StructureTree, m: WordMap, word: list, x0: str):
    disp = displacement_profile(tree, m)
    moved = {n: d for n, d in disp.items() if d is not None}
    if not moved or min(moved.values()) == 0:
        fixed = sorted(n for n, d in moved.items() if d == 0)[:3]
        raise PreconditionError(f"candidate word fixes tree vertices {fixed}")
    ax = axis_of(tree, m)
    cert = TranslationCertificate(word, min(moved.values()), ax)
    return m, cert


def displacement_profile(tree: StructureTree, m: AutoMap) -> dict:
    out = {}
    for n in tree.names():
        img = tree_image(tree, m, n)
        out[n] = None if img is None else tree.tree_distance(n, img)
    return out


def axis_of(tree: StructureTree, m: AutoMap) -> tuple:
    """The realized invariant double ray: vertices of minimal displacement,
    ordered along the tree."""
    disp = displacement_profile(tree, m)
    moved = {n: d for n, d in disp.items() if d is not None}
    if not moved:
        raise PreconditionError("map moves every realized vertex out of the window")
    dmin = min(moved.values())
    if dmin == 0:
        fixed = sorted(n for n, d in moved.items() if d == 0)
        raise InputError(f"elliptic map: fixes {fixed[:4]}")
    axis = sorted(n for n, d in moved.items() if d == dmin)
    if not axis:
        raise PreconditionError("axis is not realized")
    # Order along the tree: walk from one extreme.
    ends = [n for n in axis if sum(1 for w in tree.adj[n] if w in axis) <= 1]
    start = min(ends) if ends else axis[0]
    ordered = [start]
    seen = {start}
    while True:
        nxt = [w for w in tree.adj[ordered[-1]] if w in moved and w in set(axis) - seen]
        if not nxt:
            break
        ordered.append(nxt[0])
        seen.add(nxt[0])
    return tuple(ordered)


def axis(m: AutoMap, tree: StructureTree, ctx: Truncation) -> tuple:
    """Public wrapper: invariant double ray of a translation; asserts
    invariance on the measurable portion (an image whose own displacement
    leaves the window cannot witness a violation)."""
    ax = axis_of(tree, m)
    axset = set(ax)
    disp = displacement_profile(tree, m)
    for n in ax:
        img = tree_image(tree, m, n)
        if img is not None and img not in axset and disp.get(img) is not None:
            raise PreconditionError(f"axis not invariant at {n} -> {img}")
    return ax


# ------------------------------------------------------------ fixed-end order

def omega_ray(tree: StructureTree, ctx: Truncation, omega_tag: str) -> list[str]:
    """The realized tree ray toward the declared end, rooted at the vertex of
    the tree nearest the window base."""
    end = correspond(omega_tag, tree, ctx)
    if not isinstance(end, TreeEnd):
        raise PreconditionError(f"declared end {omega_tag} corresponds to a tree vertex")
    return list(end.chain)


def tree_leq(x: str, y: str, omega_chain: list[str], tree: StructureTree) -> bool:
    """x <= y iff x separates y from the fixed end; strict (x == y is False)."""
    if x == y:
        return False
    ray = _ray_to_omega(tree, y, omega_chain)
    return x in ray[1:]


def _ray_to_omega(tree: StructureTree, y: str, omega_chain: list[str]) -> list[str]:
    """Path from y to the far end of the realized omega chain."""
    target = omega_chain[-1]
    return tree.path(y, target)


def cone(x: str, omega_chain: list[str], tree: StructureTree, depth: int | None = None) -> set:
    """All realized tree vertices y with y >= x in the fixed-end order,
    inclusive of x itself."""
    out = {x}
    for y in tree.names():
        if y == x:
            continue
        if tree_leq(x, y, omega_chain, tree):
            if depth is None or tree.tree_distance(x, y) <= depth:
                out.add(y)
    return out


def move_end_into_cone(tree: StructureTree, action: Action, omega_chain: list[str],
                       hat_end: TreeEnd, t: str, ctx: Truncation):
    """Find g in the stabilizer with the image of the given end inside the
    cone below t: move the minimal vertex of the connecting double ray onto t
    (or next to it inside the cone)."""
    if action.fixed_end is None:
        raise PreconditionError("density probe needs an action with a declared fixed end")
    if _two_orbit_count(tree, action) != 2:
        raise PreconditionError("action does not have exactly two orbits on the realized tree")
    tilde = _end_through(tree, t, omega_chain)
    x = _minimal_on_double_ray(tree, tilde, hat_end, omega_chain)
    words = tree_orbit_words(tree, action, x)
    the_cone = cone(t, omega_chain, tree)
    target_word = None
    if t in words:
        target_word = words[t]
    else:
        for t2 in sorted(the_cone):
            if t2 != t and tree.tree_distance(t2, t) == 1 and t2 in words:
                target_word = words[t2]
                break
    if target_word is None:
        raise PreconditionError(f"no group word realizes the move onto {t}")
    m = action.word(target_word)
    moved_chain = [tree_image(tree, m, n) for n in hat_end.chain]
    realized = [n for n in moved_chain if n is not None]
    if not realized or realized[-1] not in the_cone:
        raise PreconditionError("moved end does not verifiably enter the cone")
    return m, target_word, realized


def _two_orbit_count(tree: StructureTree, action: Action) -> int:
    names = [n for n in tree.closed_names() if _interior_name(tree, n)]
    remaining = set(names)
    count = 0
    while remaining:
        seed = sorted(remaining)[0]
        words = tree_orbit_words(tree, action, seed)
        remaining -= set(words)
        count += 1
        if count > 4:
            break
    return count


def _end_through(tree: StructureTree, t: str, omega_chain: list[str]) -> TreeEnd:
    """A realized end whose chain passes through the cone below t: extend from
    t away from omega by least labels."""
    chain = [t]
    current = t
    prev = None
    while True:
        nxt = [w for w in tree.adj[current]
               if w != prev and w not in chain
               and not tree_leq(w, current, omega_chain, tree)]
        if not nxt:
            break
        prev, current = current, sorted(nxt)[0]
        chain.append(current)
    if len(chain) < 2:
        raise PreconditionError(f"no realized end extends below {t}")
    return TreeEnd(tuple(chain))


def _minimal_on_double_ray(tree, tilde: TreeEnd, hat: TreeEnd, omega_chain) -> str:
    """The tree-order-minimal vertex on the double ray between two realized
    ends: the meet of their rim representatives."""
    p = tree.path(tilde.rim_name, hat.rim_name)
    best = p[0]
    for n in p[1:]:
        if tree_leq(n, best, omega_chain, tree):
            best = n
    return best


# --------------------------------------------------------------- end censuses

def realized_tree_ends(tree: StructureTree, depth: int) -> list[TreeEnd]:
    """Rim vertices at the requested tree depth from the least interior
    vertex, each standing for the realized ends through it."""
    root = min(tree.names())
    out = []
    for n in tree.names():
        if tree.tree_distance(root, n) == depth:
            out.append(TreeEnd(tuple(tree.path(root, n))))
    return out


def map_end(tree: StructureTree, m: AutoMap, ends: list, e1: TreeEnd) -> TreeEnd | None:
    """The realized end the image of e1 points into: map the deepest realized
    chain edge and follow its outward direction; None when undetermined."""
    for k in range(len(e1.chain) - 1, 0, -1):
        a, b = e1.chain[k - 1], e1.chain[k]
        ia, ib = tree_image(tree, m, a), tree_image(tree, m, b)
        if ia is None or ib is None:
            continue
        cands = []
        for e2 in ends:
            path = tree.path(ia, e2.rim_name)
            if len(path) >= 2 and path[1] == ib:
                cands.append(e2)
        if len(cands) == 1:
            return cands[0]
        if cands:
            return None  # direction realized too shallowly to disambiguate
    return None


def end_orbit_census(tree: StructureTree, action: Action, depth: int,
                     ctx: Truncation) -> Report:
    """Orbit partition of the depth-realized tree ends, with a density verdict
    for actions with a declared fixed end."""
    report = Report(f"end census of {tree.g.name} at depth {depth}")
    if depth < 2:
        report.add("depth", UNKNOWN, "depth < 2 is inconclusive")
        return report
    ends = realized_tree_ends(tree, depth)
    if not ends:
        report.add("ends_realized", UNKNOWN, "no ends realized at this depth")
        return report
    maps = []
    for gname in sorted(action.generators):
        maps.append(action.generators[gname])
        maps.append(action.generators[gname].inverse())
    parent = {e.rim_name: e.rim_name for e in ends}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e1 in ends:
        for m in maps:
            e2 = map_end(tree, m, ends, e1)
            if e2 is not None:
                rx, ry = find(e1.rim_name), find(e2.rim_name)
                if rx != ry:
                    parent[rx] = ry
    orbits = {find(e.rim_name) for e in ends}
    report.add("end_orbits", TRUE, f"{len(orbits)} orbit(s) on {len(ends)} realized ends")
    report.orbit_count = len(orbits)
    report.end_count = len(ends)
    if action.fixed_end is not None:
        omega_chain = omega_ray(tree, ctx, action.fixed_end)
        omega_rim = omega_chain[-1]
        hats = [e for e in ends if e.rim_name != omega_rim]
        # Cone-defining vertices: along every realized end chain, so each cone
        # provably contains a realized end.
        cones = sorted({
            n for e in ends for n in e.chain[1:]
            if tree.tree_distance(e.chain[0], n) <= depth and n != e.rim_name
        })
        failures = 0
        trials = 0
        for t in cones:
            for hat in hats:
                trials += 1
                try:
                    move_end_into_cone(tree, action, omega_chain, hat, t, ctx)
                except PreconditionError:
                    failures += 1
        report.add("density", tri(failures == 0 and trials > 0),
                   f"{trials - failures}/{trials} cone moves succeeded")
    return report


# ---------------------------------------------------------- fixed-end checks

def fixed_end_checks(F, tree: StructureTree, action: Action, ctx: Truncation) -> Report:
    """The five stabilizer-of-an-end checks: end-correspondence, block
    diameter, unique nearest separator, block transitivity, and global-end
    correspondence."""
    g = tree.g
    if action.fixed_end is None:
        raise PreconditionError("fixed-end checks need an action with a declared fixed end")
    if not _vertex_transitive(g, action, ctx):
        raise PreconditionError("action is not verifiably vertex-transitive on the window")
    report = Report(f"fixed-end checks for {g.name} with end {action.fixed_end}")
    omega_chain = omega_ray(tree, ctx, action.fixed_end)

    # 1. The fixed end corresponds to a tree end, not a block vertex.
    target = correspond(action.fixed_end, tree, ctx)
    report.add("end_corresponds_to_tree_end", tri(isinstance(target, TreeEnd)))

    # 2. Every vertex of a closed block is within distance 1 of the separator
    #    toward the fixed end.
    verdict, witness = _diam_bound(g, tree, omega_chain, ctx)
    report.add("block_diameter_bound", verdict, witness)

    # 3. Unique nearest separator separating each vertex from the end.
    verdict, witness = _unique_nearest_separator(g, tree, omega_chain, ctx)
    report.add("unique_nearest_separator", verdict, witness)

    # 4. One orbit on the realized closed blocks.
    blocks = [n for n in tree.closed_names()
              if not tree.is_separator_vertex(n) and _interior_name(tree, n)]
    if blocks:
        words = tree_orbit_words(tree, action, blocks[0])
        one = all(b in words for b in blocks)
    else:
        one = False
    report.add("block_transitivity", tri(one),
               f"{len(blocks)} interior blocks examined")

    # 5. Declared global directions correspond to tree ends.
    ok = True
    for e in g.declared_ends:
        if e.cls != "global" or not e.period:
            continue
        if not isinstance(correspond(e, tree, ctx), TreeEnd):
            ok = False
    report.add("global_ends_correspond", tri(ok))
    return report


def _vertex_transitive(g, action: Action, ctx: Truncation) -> bool:
    core = [v for v in ctx.sorted_vertices() if ctx.dist[v] <= max(1, ctx.radius - 2)]
    if not core:
        return False
    reached = set(orbit(core[0], action, ctx))
    return all(v in reached for v in core)


def _omega_side_separator(tree: StructureTree, block: str, omega_chain) -> str | None:
    nbrs = tree.adj[block]
    if not nbrs:
        return None
    target = omega_chain[-1]
    best, best_d = None, None
    for w in nbrs:
        d = tree.tree_distance(w, target)
        if best_d is None or d < best_d:
            best, best_d = w, d
    return best


def _diam_bound(g, tree, omega_chain, ctx):
    from .truncation import distance

    for name in tree.closed_names():
        if tree.is_separator_vertex(name) or not _interior_name(tree, name):
            continue
        sep_name = _omega_side_separator(tree, name, omega_chain)
        if sep_name is None:
            continue
        S = tree.vertex_set(sep_name)
        for v in sorted(tree.vertex_set(name), key=VertexId.key):
            d = min(_dval(distance(g, v, s, ctx)) for s in sorted(S, key=VertexId.key))
            if d > 1:
                return FALSE, f"{g.display(v)} is {d} away from its end-side separator"
    return TRUE, ""


def _dval(d) -> int:
    return 10**9 if d.value is None else d.value


def _unique_nearest_separator(g, tree, omega_chain, ctx):
    from .truncation import distance

    omega_rim_set = tree.vertex_set(omega_chain[-1])
    core = [v for v in ctx.sorted_vertices()
            if v.deco is None and ctx.dist[v] <= max(1, ctx.radius // 2)]
    deep = min(omega_rim_set, key=VertexId.key)
    for v in core:
        separating = []
        for S in tree.separators:
            if v in S or deep in S:
                continue
            dec = decompose(g, S)
            if dec.region_of(v) is not dec.region_of(deep):
                separating.append(S)
        if not separating:
            return UNKNOWN, f"no realized separator separates {g.display(v)} from the end"
        dists = [(min(_dval(distance(g, v, s, ctx)) for s in S), S) for S in separating]
        dmin = min(d for d, _ in dists)
        nearest = [S for d, S in dists if d == dmin]
        if len(nearest) != 1:
            shown = ["{" + ",".join(sorted(map(g.display, S))) + "}" for S in nearest]
            return FALSE, f"{g.display(v)} has {len(nearest)} nearest separators: {shown}"
    return TRUE, ""
