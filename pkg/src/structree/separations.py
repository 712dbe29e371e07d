"""Separations, cuts, crossing, nestedness and the m-count.

A separation is stored as its separator plus the component ids of G minus
that separator which make up the chosen wing; that pair is a faithful finite
encoding even when both wings are infinite.  All verdicts route through the
exact region engine, so crossing and nestedness answers are definite on tree
amalgams.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, PreconditionError
from .labels import VertexId, least, parse_label
from .presentation import GraphPresentation
from .regions import Region, RegionDecomposition, decompose
from .truncation import Truncation
from .verdict import FALSE, TRUE, Trilean, tri


@dataclass(frozen=True)
class Separation:
    """(A, B) encoded as (separator, ids of the components forming A minus B)."""

    separator: frozenset
    side: frozenset  # region id strings
    order: int

    def key(self):
        return (tuple(sorted(v.key() for v in self.separator)), tuple(sorted(self.side)))

    def __lt__(self, other):
        return self.key() < other.key()

    def describe(self, g: GraphPresentation) -> str:
        sep = ",".join(sorted(g.display(v) for v in self.separator))
        return f"({{{sep}}} | {','.join(sorted(self.side))})"


def separator_key(sep: frozenset) -> tuple:
    return tuple(sorted(v.key() for v in sep))


def separation_from(g: GraphPresentation, S, seed, ctx: Truncation) -> Separation:
    """The separation (A, ~) with A = seed component plus S, canonicalized so
    that the stored separator is exactly A intersect B."""
    S = frozenset(S)
    for s in S:
        if s not in ctx:
            raise InputError(f"separator vertex {s} outside the truncation")
    dec = decompose(g, S)
    if isinstance(seed, VertexId):
        if seed in S:
            raise InputError(f"seed {seed} lies in the separator")
        region = dec.region_of(seed)
    else:
        region = dec.by_id(str(seed))
    others = [r for r in dec.regions if r is not region]
    if not others:
        raise InputError("separation needs a non-empty second wing")
    # A = region + S; the true separator is the subset of S adjacent to the rest.
    separator = frozenset(s for s in S if any(s in r.nbrs for r in others))
    if separator == S:
        side_ids = frozenset({region.rid})
    else:
        dec2 = decompose(g, separator)
        probes = [parse_label(region.rid)] + [s for s in S - separator]
        side_ids = frozenset(dec2.region_of(p).rid for p in probes)
        if len(side_ids) == len(dec2.regions):
            raise InputError("separation needs a non-empty second wing")
    return Separation(separator, side_ids, len(separator))


def sep_order(s: Separation) -> int:
    return s.order


def side_regions(g: GraphPresentation, s: Separation) -> list[Region]:
    dec = decompose(g, s.separator)
    return [dec.by_id(rid) for rid in sorted(s.side)]


def complement_regions(g: GraphPresentation, s: Separation) -> list[Region]:
    dec = decompose(g, s.separator)
    return [r for r in dec.regions if r.rid not in s.side]


def wing_trace(g: GraphPresentation, s: Separation, ctx: Truncation) -> frozenset:
    dec = decompose(g, s.separator)
    out = set()
    for rid in s.side:
        out |= dec.trace(dec.by_id(rid), ctx)
    return frozenset(out)


def opposite(g: GraphPresentation, s: Separation) -> Separation:
    """The reversed orientation (B, A) of a separation, as stored data."""
    dec = decompose(g, s.separator)
    other = frozenset(r.rid for r in dec.regions) - s.side
    if not other:
        raise InputError("cannot reverse a separation with empty complement")
    return Separation(s.separator, other, s.order)


@dataclass(frozen=True)
class CutCheck:
    verdict: Trilean
    reason: str
    certificate: tuple  # ((wing witness, s, far witness), ...) per separator vertex


def is_cut(g: GraphPresentation, s: Separation, ctx: Truncation | None = None) -> CutCheck:
    """Connected-wing and separator-minimality check with path certificates.

    The certificate lists, for every separator vertex, one neighbor inside the
    wing and one outside: dropping that vertex from the separator reconnects
    the wings along this two-edge path.
    """
    dec = decompose(g, s.separator)
    if len(s.side) != 1:
        return CutCheck(FALSE, "wing is a union of several components", ())
    region = dec.by_id(next(iter(s.side)))
    others = [r for r in dec.regions if r is not region]
    if not others:
        return CutCheck(FALSE, "second wing is empty", ())
    cert = []
    for v in sorted(s.separator, key=VertexId.key):
        near = [w for w in g.neighbors(v) if w not in s.separator and dec.region_of(w) is region]
        far = [w for w in g.neighbors(v)
               if w not in s.separator and dec.region_of(w) is not region]
        if not near or not far:
            return CutCheck(
                FALSE,
                f"separator vertex {g.display(v)} is not needed: "
                f"{'no wing neighbor' if not near else 'no far-side neighbor'}",
                (),
            )
        cert.append((least(near), v, least(far)))
    return CutCheck(TRUE, "", tuple(cert))


def check_cut_set(g: GraphPresentation, S, seed, ctx: Truncation) -> CutCheck:
    """Cut verdict for a raw vertex set with a side choice; a set that does
    not separate at all answers FALSE instead of failing to build."""
    try:
        s = separation_from(g, S, seed, ctx)
    except InputError as exc:
        if "second wing" in str(exc):
            return CutCheck(FALSE, "does not separate: complement wing is empty", ())
        raise
    return is_cut(g, s, ctx)


def do_cross(g: GraphPresentation, S, S2, ctx: Truncation) -> Trilean:
    """Does S separate two vertices of S2 - S into distinct components?"""
    S, S2 = frozenset(S), frozenset(S2)
    for v in S | S2:
        if v not in ctx:
            raise InputError(f"separator vertex {v} outside the truncation")
    targets = sorted(S2 - S, key=VertexId.key)
    if len(targets) < 2:
        return FALSE
    dec = decompose(g, S)
    ids = {dec.region_of(v).rid for v in targets}
    return tri(len(ids) >= 2)


def are_nested(
    g: GraphPresentation,
    s1: Separation,
    s2: Separation,
    ctx: Truncation,
    mode: str = "crossing",
    family=None,
) -> Trilean:
    if mode == "crossing":
        for s in (s1, s2):
            chk = is_cut(g, s, ctx)
            if chk.verdict is not TRUE:
                raise PreconditionError(
                    f"crossing-mode nestedness needs minimal cuts: {s.describe(g)}: {chk.reason}"
                )
        if s1.order != s2.order:
            raise PreconditionError("crossing-mode nestedness needs cuts of equal order")
        crossed = do_cross(g, s1.separator, s2.separator, ctx)
        return tri(crossed is FALSE)
    if mode == "definitional":
        if family is None:
            raise PreconditionError("definitional nestedness is relative to a cut family")
        return _nested_definitional(g, s1, s2, ctx, family)
    raise InputError(f"unknown nestedness mode {mode!r}")


def _side_membership(g, s: Separation):
    """Predicate: does a vertex lie in the A-set (side union separator)?"""
    dec = decompose(g, s.separator)

    def in_a(v: VertexId) -> bool:
        if v in s.separator:
            return True
        return dec.region_of(v).rid in s.side

    return in_a


def _nested_definitional(g, s1, s2, ctx, family) -> Trilean:
    """Literal corner-wing definition, relative to the given family: the
    separations are nested when for some orientation (i, j) one wing of
    (A_i intersect B_j, ~) contains no component whose induced separation
    belongs to the family, while the opposite corner contains both separators."""
    S1, S2 = s1.separator, s2.separator
    both = S1 | S2
    in_a = {0: _side_membership(g, s1), 1: _side_membership(g, opposite(g, s1))}
    in_b = {0: _side_membership(g, s2), 1: _side_membership(g, opposite(g, s2))}
    for i in (0, 1):
        for j in (0, 1):
            if not all(in_a[1 - i](v) and in_b[1 - j](v) for v in both):
                continue

            def in_x(v, i=i, j=j):
                return in_a[i](v) and in_b[j](v)

            interior, complement = _corner_wings(g, in_x, both)
            if _wing_clean(g, interior, family) or _wing_clean(g, complement, family):
                return TRUE
    return FALSE


class _WingComponent:
    """A component of a corner wing: explicit vertices plus whole regions of a
    refined decomposition, enough to derive (C + N(C), ~) exactly."""

    def __init__(self, g, dec_ref, vertices, regions):
        self.g = g
        self.dec_ref = dec_ref
        self.vertices = frozenset(vertices)
        self.regions = tuple(regions)

    def __contains__(self, v: VertexId) -> bool:
        if v in self.vertices:
            return True
        if v in self.dec_ref.S:
            return False
        return any(self.dec_ref.region_of(v) is r for r in self.regions)

    def probe(self) -> VertexId:
        cands = list(self.vertices) + [parse_label(r.rid) for r in self.regions]
        return least(cands)

    def neighborhood(self) -> frozenset:
        out = set()
        for r in self.regions:
            out |= set(r.nbrs)
        for v in self.vertices:
            for w in self.g.neighbors(v):
                if w not in self:
                    out.add(w)
        return frozenset(out) - self.vertices


def _corner_wings(g, in_x, both):
    """Components of the two wings of (X, ~) for a corner X given by a
    predicate: X minus the neighborhood of the complement, and the complement."""
    # Vertices of X adjacent to the outside world.
    exposed_sep = set()
    rim = set()  # non-separator X-vertices adjacent to both\X (the only way out)
    outside_sep = [v for v in both if not in_x(v)]
    for v in both:
        if in_x(v):
            if any(not in_x(w) for w in g.neighbors(v)):
                exposed_sep.add(v)
    for u in outside_sep:
        for w in g.neighbors(u):
            if w not in both and in_x(w):
                rim.add(w)
    refined = decompose(g, frozenset(both) | frozenset(rim))
    interior_individual = [v for v in both if in_x(v) and v not in exposed_sep]
    complement_individual = outside_sep

    def regions_with(pred):
        return [r for r in refined.regions if pred(parse_label(r.rid))]

    interior_regions = regions_with(in_x)
    complement_regions = regions_with(lambda v: not in_x(v))
    interior = _quotient_components(g, refined, interior_individual, interior_regions)
    complement = _quotient_components(g, refined, complement_individual, complement_regions)
    return interior, complement


def _quotient_components(g, dec_ref, individuals, regions):
    """Connected components of the subgraph spanned by whole refined regions
    plus individual separator vertices."""
    nodes = {("v", v): ("v", v) for v in individuals}
    for r in regions:
        nodes[("r", r.rid)] = ("r", r.rid)
    parent = dict(nodes)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    region_by_id = {r.rid: r for r in regions}
    individual_set = set(individuals)
    for v in individuals:
        for w in g.neighbors(v):
            if w in individual_set:
                union(("v", v), ("v", w))
            elif w not in dec_ref.S:
                r = dec_ref.region_of(w)
                if r.rid in region_by_id:
                    union(("v", v), ("r", r.rid))
    groups = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    out = []
    for members in groups.values():
        vs = [m[1] for m in members if m[0] == "v"]
        rs = [region_by_id[m[1]] for m in members if m[0] == "r"]
        out.append(_WingComponent(g, dec_ref, vs, rs))
    return sorted(out, key=lambda c: c.probe().key())


def _wing_clean(g, components, family) -> bool:
    """True when no component of this wing induces a separation that belongs
    to the family."""
    for comp in components:
        nc = comp.neighborhood()
        sigma = frozenset(
            v for v in nc
            if any(w not in comp and w not in nc for w in g.neighbors(v))
        )
        if not sigma:
            continue  # C + N(C) is the whole graph; induces no separation
        dec_sigma = decompose(g, sigma)
        side = {dec_sigma.region_of(comp.probe()).rid}
        for v in nc - sigma:
            side.add(dec_sigma.region_of(v).rid)
        if len(side) == len(dec_sigma.regions):
            continue  # empty far wing: not a separation with two wings
        if family.contains_separation(g, sigma, frozenset(side)):
            return False
    return True


def m_count(family, s: Separation, ctx: Truncation, g: GraphPresentation | None = None) -> int:
    """Number of distinct family separators owning a separation not nested
    with s; for minimal cuts that is exactly the number of family separators
    crossing s's separator."""
    g = g or family.g
    count = 0
    for sep in family.separators():
        if sep == s.separator:
            continue
        if do_cross(g, sep, s.separator, ctx) is TRUE or \
           do_cross(g, s.separator, sep, ctx) is TRUE:
            count += 1
    return count
