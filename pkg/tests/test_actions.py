import itertools

import pytest

from structree.errors import InputError, PreconditionError
from structree.fixtures import load_fixture, load_action
from structree.actions import act, orbit, verify_on
from structree.cutsystems import minimal_cut_system
from structree.stree import build
from structree.groupactions import (
    axis,
    axis_of,
    class_of,
    cone,
    displacement_profile,
    end_orbit_census,
    find_translation,
    fixed_end_checks,
    move_end_into_cone,
    omega_ray,
    realized_tree_ends,
    tree_leq,
    tree_orbit_words,
)
from structree.truncation import expand_ball

ACTIONS = [
    ("DR", "shift"), ("DR", "shift-flip"), ("LADDER", "shift"),
    ("LADDER", "shift-flip"), ("TRI", "amalgam"), ("TRI", "horo"),
    ("TRIP3", "amalgam"), ("TREE3", "full"), ("TREE3", "horo"),
    ("T23SUB", "full"), ("C4", "rot"),
]


@pytest.mark.parametrize("fname,aname", ACTIONS)
def test_generators_bijective_and_adjacency_preserving(fname, aname):
    g = load_fixture(fname)
    action = load_action(g, aname)
    ctx = expand_ball(g, g.root_vertex(), 5)
    for m in action.generators.values():
        inv = m.inverse()
        seen = set()
        for v in ctx.sorted_vertices():
            w = m.apply(v)
            assert inv.apply(w) == v
            assert w not in seen
            seen.add(w)
    verify_on(action, expand_ball(g, g.root_vertex(), 3), word_len=2)


@pytest.mark.parametrize("fname,aname", ACTIONS)
def test_words_preserve_distances(fname, aname):
    """Length-4 words preserve distances between realized image pairs."""
    g = load_fixture(fname)
    action = load_action(g, aname)
    ctx = expand_ball(g, g.root_vertex(), 5)
    names = sorted(action.generators)
    words = [[a, b, c, d] for a in names for b in names for c in names for d in names][:6]
    vs = ctx.sorted_vertices()[:8]
    from structree.truncation import distance

    for word in words:
        m = action.word(word)
        for x, y in itertools.combinations(vs, 2):
            try:
                ix, iy = m.apply(x), m.apply(y)
            except InputError:
                continue
            if ix not in ctx.vertices or iy not in ctx.vertices:
                continue
            d1 = distance(g, x, y, ctx)
            d2 = distance(g, ix, iy, ctx)
            if d1.exact and d2.exact:
                assert d1.value == d2.value, (word, str(x), str(y))


def test_act_examples():
    dr = load_fixture("DR")
    action = load_action(dr, "shift")
    ctx = expand_ball(dr, dr.resolve("v0"), 5)
    assert act(action, [], dr.resolve("v0"), ctx) == dr.resolve("v0")
    assert act(action, ["shift"], dr.resolve("v0"), ctx) == dr.resolve("v1")

    lad = load_fixture("LADDER")
    sh = load_action(lad, "shift")
    rung0 = frozenset({lad.resolve("a0"), lad.resolve("b0")})
    rung2 = frozenset({lad.resolve("a2"), lad.resolve("b2")})
    assert act(sh, ["shift", "shift"], rung0) == rung2


def test_orbit_examples():
    lad = load_fixture("LADDER")
    ctx = expand_ball(lad, lad.resolve("a0"), 4)
    orb = orbit(lad.resolve("a0"), load_action(lad, "shift"), ctx)
    assert {lad.display(v) for v in orb} == {f"a{k}" for k in range(-4, 5)}

    c4 = load_fixture("C4")
    ctx4 = expand_ball(c4, c4.resolve("a"), 4)
    from structree.actions import Action

    trivial = Action(c4, {}, name="trivial")
    assert orbit(c4.resolve("a"), trivial, ctx4) == [c4.resolve("a")]


def one_class_paths(tree, depth_cap=4):
    root = min(tree.names())
    out = []
    for n in tree.names():
        if tree.tree_distance(root, n) > depth_cap:
            continue
        stack = [[n]]
        while stack:
            p = stack.pop()
            if len(p) == 5:
                if class_of(tree, p[0]) == class_of(tree, p[2]) == class_of(tree, p[4]):
                    out.append(p)
                continue
            for w in sorted(tree.adj[p[-1]]):
                if len(p) >= 2 and w == p[-2]:
                    continue
                stack.append(p + [w])
    return out


@pytest.mark.parametrize("fname,aname,radius", [
    ("TREE3", "full", 4), ("TRI", "amalgam", 4), ("DR", "shift", 5),
])
def test_find_translation_on_all_one_class_paths(fname, aname, radius):
    g = load_fixture(fname)
    action = load_action(g, aname)
    ctx = expand_ball(g, g.root_vertex(), radius)
    T = build(minimal_cut_system(g, "ends", ctx), ctx)
    paths = one_class_paths(T)
    assert paths
    for p in paths[:60]:
        m, cert = find_translation(T, action, p, ctx)
        from structree.groupactions import tree_image

        img = tree_image(T, m, p[0])
        assert img in (p[2], p[4]), (p, cert.word)
        assert cert.displacement >= 1
        ax = cert.axis
        assert len(ax) >= 3
        # the translation shifts its axis by the displacement
        for n in ax:
            img_n = tree_image(T, m, n)
            if img_n is not None:
                assert T.tree_distance(n, img_n) == cert.displacement


def test_axis_invariance_and_elliptic_error():
    t3 = load_fixture("TREE3")
    ctx = expand_ball(t3, t3.resolve("x0"), 4)
    T = build(minimal_cut_system(t3, "ends", ctx), ctx)
    horo = load_action(t3, "horo")
    shift = horo.generators["shift"]
    ax = axis(shift, T, ctx)
    assert len(ax) >= 5
    with pytest.raises(InputError) as err:
        axis_of(T, horo.generators["swap0"])
    assert "elliptic" in str(err.value)


def test_dr_shift_axis_is_whole_tree():
    dr = load_fixture("DR")
    ctx = expand_ball(dr, dr.resolve("v0"), 5)
    T = build(minimal_cut_system(dr, "ends", ctx), ctx)
    shift = load_action(dr, "shift").generators["shift"]
    ax = axis(shift, T, ctx)
    moved = [n for n, d in displacement_profile(T, shift).items() if d is not None]
    assert set(ax) == set(moved)


@pytest.fixture(scope="module")
def tree3_setup():
    g = load_fixture("TREE3")
    ctx = expand_ball(g, g.resolve("x0"), 4)
    F = minimal_cut_system(g, "ends", ctx)
    T = build(F, ctx)
    horo = load_action(g, "horo")
    return g, ctx, F, T, horo


def test_tree_order_is_strict_partial_order(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    chain = omega_ray(T, ctx, "omega")
    names = [n for n in T.names() if T.tree_distance(min(T.names()), n) <= 5]
    for x in names[:25]:
        assert not tree_leq(x, x, chain, T)
    import random

    rng = random.Random(7)
    sample = rng.sample(names, min(14, len(names)))
    for x in sample:
        for y in sample:
            for z in sample:
                if tree_leq(x, y, chain, T) and tree_leq(y, z, chain, T):
                    assert tree_leq(x, z, chain, T)
            if x != y:
                assert not (tree_leq(x, y, chain, T) and tree_leq(y, x, chain, T))


def test_cone_nesting(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    chain = omega_ray(T, ctx, "omega")
    names = sorted(T.names())[:12]
    for x in names:
        cx = cone(x, chain, T, depth=5)
        for y in sorted(cx)[:6]:
            cy = cone(y, chain, T, depth=5)
            for z in cy:
                if T.tree_distance(x, z) <= 5:
                    assert z in cone(x, chain, T, depth=None)


def test_cone_examples(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    chain = omega_ray(T, ctx, "omega")
    first = chain[0]
    c = cone(first, chain, T)
    assert first in c
    assert chain[-1] not in c  # the end-side of the ray is above the cone


def test_move_end_into_cone_and_density(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    chain = omega_ray(T, ctx, "omega")
    ends = realized_tree_ends(T, 4)
    hats = [e for e in ends if e.rim_name != chain[-1]]
    assert hats
    t = chain[1]
    m, word, moved = move_end_into_cone(T, horo, chain, hats[0], t, ctx)
    assert moved[-1] in cone(t, chain, T)

    rep = end_orbit_census(T, horo, 4, ctx)
    assert any(r.name == "density" and r.verdict.value == "true" for r in rep.results)


def test_move_end_requires_fixed_end(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    full = load_action(g, "full")
    chain = omega_ray(T, ctx, "omega")
    ends = realized_tree_ends(T, 4)
    with pytest.raises(PreconditionError):
        move_end_into_cone(T, full, chain, ends[0], chain[1], ctx)


def test_fixed_end_checks_tree3(tree3_setup):
    g, ctx, F, T, horo = tree3_setup
    rep = fixed_end_checks(F, T, horo, ctx)
    assert rep.all_pass, rep.lines()


def test_fixed_end_checks_tri_horo():
    g = load_fixture("TRI")
    ctx = expand_ball(g, g.resolve("v0"), 4)
    F = minimal_cut_system(g, "ends", ctx)
    T = build(F, ctx)
    horo = load_action(g, "horo")
    rep = fixed_end_checks(F, T, horo, ctx)
    verdicts = {r.name: r.verdict.value for r in rep.results}
    assert verdicts["block_diameter_bound"] == "true"
    assert verdicts["block_transitivity"] == "true"


def test_fixed_end_checks_need_transitive_action():
    dr = load_fixture("DR")
    ctx = expand_ball(dr, dr.resolve("v0"), 5)
    F = minimal_cut_system(dr, "ends", ctx)
    T = build(F, ctx)
    from structree.actions import Action

    lazy = Action(dr, {}, fixed_end="right", name="lazy")
    with pytest.raises(PreconditionError):
        fixed_end_checks(F, T, lazy, ctx)


def test_end_orbit_census_examples():
    dr = load_fixture("DR")
    ctx = expand_ball(dr, dr.resolve("v0"), 5)
    T = build(minimal_cut_system(dr, "ends", ctx), ctx)
    rep_shift = end_orbit_census(T, load_action(dr, "shift"), 4, ctx)
    assert rep_shift.orbit_count == 2 and rep_shift.end_count == 2
    rep_both = end_orbit_census(T, load_action(dr, "shift-flip"), 4, ctx)
    assert rep_both.orbit_count == 1

    tri = load_fixture("TRI")
    ctxt = expand_ball(tri, tri.resolve("v0"), 4)
    Tt = build(minimal_cut_system(tri, "ends", ctxt), ctxt)
    rep = end_orbit_census(Tt, load_action(tri, "amalgam"), 4, ctxt)
    assert rep.orbit_count == 1
