"""Bundled fixture corpus and friendly vertex aliases.

DR      double ray ((2,2) amalgam of single edges)
LADDER  Z x K2, amalgam of squares glued along rungs
TRI     tree of triangles, every vertex in exactly two triangles
TRIP3   TRI with a pendant 3-path hanging from every vertex
T23SUB  subdivision of the (2,3) semi-regular tree
TREE3   3-regular tree with a declared fixed end omega
C4      finite 4-cycle

Aliases use integer coordinates where the graph has an obvious spine
(v<k> on DR, a<k>/b<k> on LADDER, x<k> on TREE3) so tests and CLI calls can
name vertices the way one would on paper.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import InputError
from .labels import VertexId
from .presentation import Decoration, EndDecl, GraphPresentation

FIXTURE_NAMES = ("DR", "LADDER", "TRI", "TRIP3", "T23SUB", "TREE3", "C4")

_FILES = {
    "DR": "dr.json",
    "LADDER": "ladder.json",
    "TRI": "tri.json",
    "TRIP3": "trip3.json",
    "T23SUB": "t23sub.json",
    "TREE3": "tree3.json",
    "C4": "c4.json",
}

ALIAS_DEPTH = 12


def _spine_alias(prefix: str, depth: int) -> dict[str, VertexId]:
    """v0 = root u, v1 = root v, then one part per step along either branch."""
    out = {
        f"{prefix}0": VertexId((), "u"),
        f"{prefix}1": VertexId((), "v"),
    }
    for k in range(2, depth + 2):
        out[f"{prefix}{k}"] = VertexId(((1, 1),) * (k - 1), "v")
    for k in range(1, depth + 1):
        out[f"{prefix}-{k}"] = VertexId(((0, 1),) + ((1, 1),) * (k - 1), "v")
    return out


def _ladder_alias(depth: int) -> dict[str, VertexId]:
    out = {}
    for rail in ("a", "b"):
        out[f"{rail}0"] = VertexId((), f"{rail}0")
        out[f"{rail}1"] = VertexId((), f"{rail}1")
        for k in range(2, depth + 2):
            out[f"{rail}{k}"] = VertexId(((1, 1),) * (k - 1), f"{rail}1")
        for k in range(1, depth + 1):
            out[f"{rail}-{k}"] = VertexId(((0, 1),) + ((1, 1),) * (k - 1), f"{rail}1")
    return out


def _tri_alias(depth: int) -> dict[str, VertexId]:
    out = {
        "v0": VertexId((), "0"),
        "v1": VertexId((), "1"),
        "v2": VertexId((), "2"),
    }
    # w<k>: glue vertices along the omega branch (w1 coincides with v1).
    for k in range(1, depth + 1):
        out[f"w{k}"] = VertexId(((1, 1),) * (k - 1), "1")
    return out


def _aliases_for(name: str) -> dict[str, VertexId]:
    if name == "DR":
        return _spine_alias("v", ALIAS_DEPTH)
    if name == "TREE3":
        return _spine_alias("x", ALIAS_DEPTH)
    if name == "LADDER":
        return _ladder_alias(ALIAS_DEPTH)
    if name in ("TRI", "TRIP3"):
        return _tri_alias(ALIAS_DEPTH)
    if name == "T23SUB":
        return {n: VertexId((), n) for n in ("b", "s1", "a1", "s2", "a2", "s3", "a3")}
    if name == "C4":
        return {n: VertexId((), n) for n in "abcd"}
    return {}


def _fixture_text(filename: str) -> str:
    return resources.files("structree").joinpath("data", filename).read_text()


def load_fixture(name_or_path: str) -> GraphPresentation:
    """Load a bundled fixture by name, or any presentation from a JSON path."""
    key = name_or_path.upper()
    if key in _FILES:
        data = json.loads(_fixture_text(_FILES[key]))
        g = GraphPresentation.from_json(data)
        g.set_aliases(_aliases_for(key))
        return g
    path = Path(name_or_path)
    if path.exists():
        return GraphPresentation.load(path)
    raise InputError(
        f"unknown fixture {name_or_path!r}; bundled: {', '.join(FIXTURE_NAMES)}"
    )


def list_actions(fixture: str) -> list[str]:
    out = []
    for entry in (resources.files("structree") / "data" / "actions").iterdir():
        fname = entry.name
        if fname.endswith(".json") and fname.startswith(fixture.lower() + "__"):
            out.append(fname[len(fixture) + 2 : -5])
    return sorted(out)


def load_action(g: GraphPresentation, name_or_path: str):
    """Load a bundled action group for a fixture, or one from a JSON path."""
    from .actions import Action

    candidate = f"{g.name.lower()}__{name_or_path}.json"
    try:
        text = (resources.files("structree") / "data" / "actions" / candidate).read_text()
    except FileNotFoundError:
        path = Path(name_or_path)
        if not path.exists():
            raise InputError(
                f"unknown action {name_or_path!r} for {g.name}; "
                f"bundled: {', '.join(list_actions(g.name)) or 'none'}"
            )
        text = path.read_text()
    return Action.from_json(g, json.loads(text))


# ------------------------------------------------------------- test variants

def make_tri_ray() -> GraphPresentation:
    """TRI with a declared ray-bearing pendant ray at every vertex."""
    base = load_fixture("TRI")
    g = GraphPresentation(
        "TRIPRAY", "tree_amalgam",
        blueprint=(3, 2), part=base.part,
        decorations=(Decoration(0, "ray", frozenset({"0", "1", "2"}), rayless=False),),
        declared_ends=base.declared_ends,
    )
    g.set_aliases(_tri_alias(ALIAS_DEPTH))
    return g


def make_tri_local_tag() -> GraphPresentation:
    """TRI plus a declared local end sitting at the root triangle."""
    base = load_fixture("TRI")
    g = GraphPresentation(
        "TRILOC", "tree_amalgam",
        blueprint=(3, 2), part=base.part,
        declared_ends=base.declared_ends + (EndDecl("ell", "local", at_vertex="v0"),),
    )
    g.set_aliases(_tri_alias(ALIAS_DEPTH))
    return g
