import pytest

from structree.errors import PreconditionError
from structree.fixtures import load_fixture, load_action
from structree.cutsystems import (
    CutSystem,
    is_basic,
    make_basic,
    minimal_cut_system,
    orbit_system,
    refine,
    verify_axioms,
)
from structree.separations import m_count, separation_from
from structree.truncation import expand_ball
from structree.verdict import FALSE, TRUE


def rung(g, i):
    return frozenset({g.resolve(f"a{i}"), g.resolve(f"b{i}")})


def test_minimal_system_dr():
    g = load_fixture("DR")
    ctx = expand_ball(g, g.resolve("v0"), 5)
    F = minimal_cut_system(g, "ends", ctx)
    assert F.order == 1
    seps = F.separators()
    assert all(len(s) == 1 for s in seps)
    assert len(seps) == len(ctx.vertices)


def test_minimal_system_ladder_kinds():
    g = load_fixture("LADDER")
    ctx = expand_ball(g, g.resolve("a0"), 6)
    F = minimal_cut_system(g, "ends", ctx)
    assert F.order == 2
    kinds = {"rung": 0, "up": 0, "down": 0}
    for s in F.separators():
        names = sorted(g.display(v) for v in s)
        ia, ib = int(names[0][1:]), int(names[1][1:])
        kinds["rung" if ia == ib else "up" if ib == ia + 1 else "down"] += 1
    assert kinds["rung"] > 0 and kinds["up"] > 0 and kinds["down"] > 0
    assert kinds["up"] == kinds["down"]


def test_minimal_system_tri():
    g = load_fixture("TRI")
    ctx = expand_ball(g, g.resolve("v0"), 4)
    F = minimal_cut_system(g, "ends", ctx)
    assert F.order == 1
    # every vertex of the amalgam separates it
    assert len(F.separators()) == len(ctx.vertices)


def test_minimal_system_finite_graph_is_precondition_error():
    g = load_fixture("C4")
    ctx = expand_ball(g, g.resolve("a"), 4)
    with pytest.raises(PreconditionError):
        minimal_cut_system(g, "ends", ctx)


def test_metric_mode_matches_ends_mode_on_trip3():
    g = load_fixture("TRIP3")
    ctx = expand_ball(g, g.resolve("v0"), 4)
    fe = minimal_cut_system(g, "ends", ctx)
    fm = minimal_cut_system(g, "metric", ctx)
    assert fe.order == fm.order == 1
    assert {tuple(sorted(map(str, s))) for s in fe.separators()} == \
        {tuple(sorted(map(str, s))) for s in fm.separators()}


@pytest.mark.parametrize("name,radius", [("DR", 4), ("LADDER", 4), ("TRI", 4)])
def test_axioms_pass_for_minimal_systems(name, radius):
    g = load_fixture(name)
    base = g.root_vertex()
    F = minimal_cut_system(g, "ends", expand_ball(g, base, radius))
    big = expand_ball(g, base, radius + 2)
    report = verify_axioms(F, big)
    assert report.all_pass, report.lines()
    assert not report.any_unknown


def test_axioms_pass_for_rungs_plus_updiagonals():
    g = load_fixture("LADDER")
    ctx = expand_ball(g, g.resolve("a0"), 6)
    shift = load_action(g, "shift")
    rungs = orbit_system(g, rung(g, 0), shift, "ends", ctx)
    ups = orbit_system(g, frozenset({g.resolve("a0"), g.resolve("b1")}), shift, "ends", ctx)
    mixed = CutSystem(g, 2, tuple(sorted(rungs.cuts + ups.cuts)), mode="ends",
                      action=shift, kind="orbit", ctx_radius=ctx.radius)
    assert mixed.is_nested(ctx)
    report = verify_axioms(mixed, ctx)
    assert report.all_pass, report.lines()


def test_single_cut_family_fails_axiom1():
    g = load_fixture("LADDER")
    ctx = expand_ball(g, g.resolve("a0"), 6)
    one = separation_from(g, rung(g, 0), g.resolve("a-1"), ctx)
    F = CutSystem(g, 2, (one,), kind="explicit")
    report = verify_axioms(F, ctx)
    assert report.results[0].name == "axiom1"
    assert report.results[0].verdict is FALSE
    assert "no (X,Y)" in report.results[0].witness


def test_is_basic_examples():
    g = load_fixture("LADDER")
    ctx = expand_ball(g, g.resolve("a0"), 6)
    shift = load_action(g, "shift")
    shiftflip = load_action(g, "shift-flip")

    rungs = orbit_system(g, rung(g, 0), shift, "ends", ctx)
    assert is_basic(rungs, shift, ctx).all_pass

    up = frozenset({g.resolve("a0"), g.resolve("b1")})
    mixed = orbit_system(g, rung(g, 0), shift, "ends", ctx)
    ups = orbit_system(g, up, shift, "ends", ctx)
    two_orbits = CutSystem(g, 2, tuple(sorted(mixed.cuts + ups.cuts)), mode="ends",
                           action=shift, kind="orbit", ctx_radius=ctx.radius)
    rep = is_basic(two_orbits, shift, ctx)
    assert not rep.all_pass
    assert any(r.name == "single_separator_orbit" and r.verdict is FALSE
               for r in rep.results)

    # up and down diagonals together are not nested
    diags = orbit_system(g, up, shiftflip, "ends", ctx)
    rep = is_basic(diags, shiftflip, ctx)
    assert any(r.name == "nested" and r.verdict is FALSE for r in rep.results)


def test_make_basic_examples():
    dr = load_fixture("DR")
    ctxd = expand_ball(dr, dr.resolve("v0"), 5)
    bd = make_basic(dr, load_action(dr, "shift"), "ends", ctxd)
    assert bd.order == 1

    lad = load_fixture("LADDER")
    ctxl = expand_ball(lad, lad.resolve("a0"), 6)
    bl = make_basic(lad, load_action(lad, "shift"), "ends", ctxl)
    names = {tuple(sorted(lad.display(v) for v in s)) for s in bl.separators()}
    assert all(a[1:] == b[1:] for a, b in names), "least seed lands on the rungs"

    tri = load_fixture("TRI")
    ctxt = expand_ball(tri, tri.resolve("v0"), 4)
    bt = make_basic(tri, load_action(tri, "amalgam"), "ends", ctxt)
    assert bt.order == 1 and len(bt.separators()) == len(ctxt.vertices)


def test_make_basic_idempotent():
    lad = load_fixture("LADDER")
    ctx = expand_ball(lad, lad.resolve("a0"), 6)
    shift = load_action(lad, "shift")
    b1 = make_basic(lad, shift, "ends", ctx)
    b2 = make_basic(lad, shift, "ends", ctx, seed=b1.separators()[0])
    assert {c.key() for c in b1.cuts} == {c.key() for c in b2.cuts}


def test_make_basic_from_diagonal_seed_refines_to_rungs():
    """Seeding with a diagonal under the flip-extended action yields a
    non-nested orbit; the refinement loop must land on the rung system."""
    lad = load_fixture("LADDER")
    ctx = expand_ball(lad, lad.resolve("a0"), 8)
    shiftflip = load_action(lad, "shift-flip")
    up = frozenset({lad.resolve("a0"), lad.resolve("b1")})
    out = make_basic(lad, shiftflip, "ends", ctx, seed=up)
    for s in out.separators():
        names = sorted(lad.display(v) for v in s)
        assert names[0][1:] == names[1][1:], names  # rungs only
    assert is_basic(out, shiftflip, ctx).all_pass


def test_refine_ladder_diagonals_to_rungs():
    lad = load_fixture("LADDER")
    ctx = expand_ball(lad, lad.resolve("a0"), 8)
    shift = load_action(lad, "shift")
    shiftflip = load_action(lad, "shift-flip")
    C = minimal_cut_system(lad, "ends", ctx)
    up = orbit_system(lad, frozenset({lad.resolve("a0"), lad.resolve("b1")}),
                      shift, "ends", ctx)
    down = orbit_system(lad, frozenset({lad.resolve("a1"), lad.resolve("b0")}),
                        shift, "ends", ctx)
    out = refine(C, up, down, ctx, action=shiftflip)
    for s in out.separators():
        names = sorted(lad.display(v) for v in s)
        assert names[0][1:] == names[1][1:], names
    # strict m-count drop, verified exhaustively on the interior cuts
    assert max(m_count(up, c, ctx) for c in out.cuts) == 0
    interior_downs = [c for c in down.cuts
                      if all(ctx.dist[v] <= ctx.radius - 2 for v in c.separator)]
    assert interior_downs
    assert all(m_count(up, c, ctx) == 1 for c in interior_downs)


def test_refine_rejects_already_nested():
    lad = load_fixture("LADDER")
    ctx = expand_ball(lad, lad.resolve("a0"), 6)
    shift = load_action(lad, "shift")
    C = minimal_cut_system(lad, "ends", ctx)
    rungs = orbit_system(lad, rung(lad, 0), shift, "ends", ctx)
    with pytest.raises(PreconditionError):
        refine(C, rungs, rungs, ctx, action=shift)


def test_refine_rejects_order_one_families():
    tri = load_fixture("TRI")
    ctx = expand_ball(tri, tri.resolve("v0"), 4)
    am = load_action(tri, "amalgam")
    C = minimal_cut_system(tri, "ends", ctx)
    s1 = orbit_system(tri, frozenset({tri.resolve("v0")}), am, "ends", ctx)
    with pytest.raises(PreconditionError):
        refine(C, s1, s1, ctx, action=am)


@pytest.mark.parametrize("name", ["DR", "LADDER", "TRI"])
def test_constructed_systems_have_uniform_order_and_raybearing_sides(name):
    g = load_fixture(name)
    ctx = expand_ball(g, g.root_vertex(), 4)
    F = minimal_cut_system(g, "ends", ctx)
    from structree.regions import decompose

    for c in F.cuts:
        assert c.order == F.order
        dec = decompose(g, c.separator)
        side = dec.by_id(next(iter(c.side)))
        others = [r for r in dec.regions if r is not side]
        assert side.cls.is_ray_bearing
        assert any(r.cls.is_ray_bearing for r in others)
