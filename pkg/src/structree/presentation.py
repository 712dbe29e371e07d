"""Graph presentations: finite explicit graphs and tree amalgams.

A tree amalgam glues copies of one finite part graph along a semi-regular
blueprint tree with parameters (a, b): part nodes have degree a (one per
declared interface) and glue nodes have degree b (that many part copies are
identified along each interface copy, positionally).  The generated graph is
infinite, connected and locally finite; it is only ever materialized through
finite balls, but raylessness and component structure stay decidable from the
presentation itself.

Address convention: the root part has address ().  A step (i, j) leaves the
current part through interface i and enters the j-th sibling part at that
glue node (j in 1..b-1); every non-root part is attached to its parent glue
node through its interface 0.  Interface tuples are identified positionally.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BudgetError, InputError
from .labels import Step, VertexId, least, parse_label, valid_name

DEFAULT_MAX_VERTICES = 200_000


@dataclass(frozen=True)
class Part:
    """The finite building block of a tree amalgam."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset]
    interfaces: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen = set()
        for name in self.vertices:
            if not valid_name(name):
                raise InputError(f"bad part vertex name {name!r}")
            if name in seen:
                raise InputError(f"duplicate part vertex {name!r}")
            seen.add(name)
        for e in self.edges:
            if len(e) != 2 or not e <= seen:
                raise InputError(f"bad part edge {sorted(e)}")
        used = set()
        for iface in self.interfaces:
            if not iface or not set(iface) <= seen:
                raise InputError(f"bad interface {iface}")
            if used & set(iface):
                raise InputError("interfaces must be pairwise disjoint")
            used |= set(iface)

    @property
    def adj(self) -> dict[str, tuple[str, ...]]:
        try:
            return self._adj  # type: ignore[attr-defined]
        except AttributeError:
            pass
        nbrs: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            x, y = sorted(e)
            nbrs[x].append(y)
            nbrs[y].append(x)
        table = {v: tuple(sorted(ns)) for v, ns in nbrs.items()}
        object.__setattr__(self, "_adj", table)
        return table

    @property
    def iface_of(self) -> dict[str, tuple[int, int]]:
        """vertex name -> (interface index, position)."""
        try:
            return self._iface_of  # type: ignore[attr-defined]
        except AttributeError:
            pass
        table = {}
        for i, iface in enumerate(self.interfaces):
            for k, name in enumerate(iface):
                table[name] = (i, k)
        object.__setattr__(self, "_iface_of", table)
        return table

    def symmetries(self) -> tuple[dict[str, str], ...]:
        """All part automorphisms mapping each interface tuple onto an
        interface tuple setwise.  Brute force; parts are tiny."""
        try:
            return self._sym  # type: ignore[attr-defined]
        except AttributeError:
            pass
        verts = self.vertices
        iface_sets = [frozenset(t) for t in self.interfaces]
        found = []
        for perm in itertools.permutations(verts):
            m = dict(zip(verts, perm))
            if any(frozenset((m[x], m[y])) not in self.edges for e in self.edges for x, y in [tuple(e)]):
                continue
            ok = True
            for s in iface_sets:
                if frozenset(m[x] for x in s) not in iface_sets:
                    ok = False
                    break
            if ok:
                found.append(m)
        sym = tuple(sorted(found, key=lambda m: tuple(m[v] for v in verts)))
        object.__setattr__(self, "_sym", sym)
        return sym


@dataclass(frozen=True)
class Decoration:
    """Finite or declared-infinite pendant graph attached below designated
    part vertices.  The rayless flag is always explicit input, never inferred."""

    index: int
    kind: str  # "path" | "explicit" | "ray"
    attach_names: frozenset  # designated part-vertex names
    rayless: bool
    length: int = 0  # for kind == "path"
    vertices: tuple[str, ...] = ()
    edges: frozenset = frozenset()
    root: str = ""  # vertex joined to the host, for kind == "explicit"

    def __post_init__(self):
        if self.kind == "path":
            if self.length < 1:
                raise InputError("path decoration needs length >= 1")
            if not self.rayless:
                raise InputError("finite decorations must be declared rayless")
        elif self.kind == "explicit":
            if not self.vertices or self.root not in self.vertices:
                raise InputError("explicit decoration needs vertices and a root")
            if not self.rayless:
                raise InputError("finite decorations must be declared rayless")
        elif self.kind == "ray":
            if self.rayless:
                raise InputError("a ray decoration is ray-bearing; set rayless false")
        else:
            raise InputError(f"unknown decoration kind {self.kind!r}")

    @property
    def finite(self) -> bool:
        return self.kind in ("path", "explicit")

    def finite_vertices(self) -> tuple[str, ...]:
        if self.kind == "path":
            return tuple(f"p{k}" for k in range(1, self.length + 1))
        if self.kind == "explicit":
            return self.vertices
        raise InputError("ray decoration has no finite vertex list")

    def local_neighbors(self, name: str) -> tuple[str, ...]:
        """Neighbors of a decoration vertex inside its own copy."""
        if self.kind == "path":
            k = int(name[1:])
            out = []
            if k > 1:
                out.append(f"p{k-1}")
            if k < self.length:
                out.append(f"p{k+1}")
            return tuple(out)
        if self.kind == "ray":
            k = int(name[1:])
            out = [] if k == 1 else [f"r{k-1}"]
            out.append(f"r{k+1}")
            return tuple(out)
        nbrs = [y for e in self.edges for y in e if name in e and y != name]
        return tuple(sorted(nbrs))

    @property
    def attach_vertex(self) -> str:
        if self.kind == "path":
            return "p1"
        if self.kind == "ray":
            return "r1"
        return self.root


@dataclass(frozen=True)
class EndDecl:
    """A declared end: a tag, its class, and where it lives."""

    tag: str
    cls: str  # "local" | "global"
    prefix: tuple[Step, ...] = ()
    period: tuple[Step, ...] = ()
    at_vertex: str | None = None  # label text, for block-style local ends

    def __post_init__(self):
        if self.cls not in ("local", "global"):
            raise InputError(f"end class must be local or global, got {self.cls!r}")
        if not self.period and self.at_vertex is None:
            raise InputError(f"declared end {self.tag!r} needs a branch or a vertex")


class GraphPresentation:
    """Immutable description of a finite graph or a tree amalgam.

    Thread-safe for concurrent readers; all lazy caches are fill-once tables
    keyed by immutable values.
    """

    def __init__(
        self,
        name: str,
        kind: str,
        *,
        vertices: tuple[str, ...] = (),
        edges: frozenset = frozenset(),
        blueprint: tuple[int, int] = (0, 0),
        subdivided: bool = False,
        part: Part | None = None,
        decorations: tuple[Decoration, ...] = (),
        declared_ends: tuple[EndDecl, ...] = (),
        systems: dict | None = None,
        max_vertices: int = DEFAULT_MAX_VERTICES,
    ):
        self.name = name
        self.kind = kind
        self.max_vertices = max_vertices
        self.decorations = decorations
        self.declared_ends = declared_ends
        self.systems = dict(systems or {})
        self.aliases: dict[str, VertexId] = {}
        self._alias_rev: dict[VertexId, str] = {}
        self._region_cache: dict = {}
        if kind == "finite":
            if not vertices:
                raise InputError("finite presentation needs vertices")
            self.vertices = vertices
            self.edges = edges
            nbrs: dict[str, list[str]] = {v: [] for v in vertices}
            for e in edges:
                x, y = sorted(e)
                if x not in nbrs or y not in nbrs:
                    raise InputError(f"edge {x},{y} uses unknown vertex")
                nbrs[x].append(y)
                nbrs[y].append(x)
            self._fin_adj = {v: tuple(sorted(ns)) for v, ns in nbrs.items()}
            self.a = self.b = 0
            self.part = None
            self.subdivided = False
        elif kind == "tree_amalgam":
            assert part is not None
            a, b = blueprint
            if a != len(part.interfaces):
                raise InputError("blueprint a must equal the number of interfaces")
            if a < 2 or b < 2:
                raise InputError("blueprint parameters must both be >= 2")
            self.part = part
            self.a, self.b = a, b
            self.subdivided = subdivided
            self.vertices = ()
            self.edges = frozenset()
        else:
            raise InputError(f"unknown presentation kind {kind!r}")
        if decorations and kind == "finite":
            raise InputError("decorations are only supported on tree amalgams")
        for d in decorations:
            if not d.attach_names <= self._all_local_names():
                raise InputError("decoration attaches at unknown part vertices")

    # ------------------------------------------------------------------ basics

    def _all_local_names(self) -> frozenset:
        if self.kind == "finite":
            return frozenset(self.vertices)
        return frozenset(self.part.vertices)

    def set_aliases(self, table: dict[str, VertexId]) -> None:
        self.aliases = dict(table)
        self._alias_rev = {v: k for k, v in table.items()}

    def display(self, v: VertexId) -> str:
        """Alias name when one exists, canonical label text otherwise."""
        if v in self._alias_rev:
            return self._alias_rev[v]
        if v.deco is not None and v.host in self._alias_rev:
            return f"{self._alias_rev[v.host]}~{v.deco[0]}:{v.deco[1]}"
        return str(v)

    def resolve(self, text: str) -> VertexId:
        """Parse an alias or a canonical label and validate it."""
        if text in self.aliases:
            return self.aliases[text]
        raw = parse_label(text)
        self._validate_address(raw.address)
        if self.kind == "tree_amalgam" and raw.local not in self.part.adj:
            raise InputError(f"unknown part vertex {raw.local!r} in {text!r}")
        v = self.normalize(raw)
        self.validate_vertex(v)
        return v

    def validate_vertex(self, v: VertexId) -> None:
        if self.kind == "finite":
            if v.address or v.deco is not None or v.local not in self._fin_adj:
                raise InputError(f"{v} is not a vertex of finite graph {self.name}")
            return
        self._validate_address(v.address)
        if v.local not in self.part.adj:
            raise InputError(f"unknown part vertex {v.local!r} in {v}")
        if self.normalize(VertexId(v.address, v.local)) != VertexId(v.address, v.local):
            raise InputError(f"{VertexId(v.address, v.local)} is not in canonical form")
        if v.deco is not None:
            idx, name = v.deco
            if idx >= len(self.decorations):
                raise InputError(f"no decoration {idx} in {self.name}")
            d = self.decorations[idx]
            if v.local not in d.attach_names:
                raise InputError(f"vertex {v.host} carries no decoration {idx}")
            if d.kind == "ray":
                if not (name.startswith("r") and name[1:].isdigit() and int(name[1:]) >= 1):
                    raise InputError(f"bad ray decoration vertex {name!r}")
            elif name not in d.finite_vertices():
                raise InputError(f"bad decoration vertex {name!r}")

    def _validate_address(self, address: tuple[Step, ...]) -> None:
        if self.kind == "finite":
            if address:
                raise InputError("finite graphs have empty addresses")
            return
        for depth, (i, j) in enumerate(address):
            lo = 0 if depth == 0 else 1
            if not (lo <= i < self.a):
                raise InputError(f"invalid interface choice {i} at depth {depth}")
            if not (1 <= j <= self.b - 1):
                raise InputError(f"invalid slot choice {j} at depth {depth}")

    # ------------------------------------------------------- address navigation

    def exits(self, address: tuple[Step, ...]) -> tuple[int, ...]:
        """Interfaces through which new glue nodes hang below this part."""
        if address == ():
            return tuple(range(self.a))
        return tuple(range(1, self.a))

    def glue_parts(self, address: tuple[Step, ...], i: int):
        """All part addresses meeting the glue node on interface i of `address`,
        ordered deterministically, together with each part's attach interface."""
        if i == 0 and address != ():
            parent = address[:-1]
            ip, jp = address[-1]
            out = [(parent, ip)]
            for j in range(1, self.b):
                out.append((parent + ((ip, j),), 0))
            return out
        out = [(address, i)]
        for j in range(1, self.b):
            out.append((address + ((i, j),), 0))
        return out

    def glue_vertices(self, address: tuple[Step, ...], i: int) -> tuple[VertexId, ...]:
        """Canonical labels of the vertex set at a glue node."""
        owner, iface = self.glue_owner(address, i)
        return tuple(self.normalize(VertexId(owner, name)) for name in self.part.interfaces[iface])

    def glue_owner(self, address: tuple[Step, ...], i: int) -> tuple[tuple[Step, ...], int]:
        """The shallowest part at a glue node (owner of canonical labels)."""
        if i == 0 and address != ():
            return address[:-1], address[-1][0]
        return address, i

    # ------------------------------------------------------------- normalization

    def normalize(self, v: VertexId) -> VertexId:
        """Canonical label: pop interface-0 representations toward the root.
        Idempotent by construction."""
        if self.kind == "finite":
            return v
        address, local = v.address, v.local
        iface_of = self.part.iface_of
        while address:
            hit = iface_of.get(local)
            if hit is None or hit[0] != 0:
                break
            i_parent = address[-1][0]
            local = self.part.interfaces[i_parent][hit[1]]
            address = address[:-1]
        if v.deco is None:
            return VertexId(address, local)
        return VertexId(address, local, v.deco)

    def representations(self, v: VertexId) -> tuple[tuple[tuple[Step, ...], str], ...]:
        """All (part address, local name) incarnations of a canonical main vertex."""
        assert v.deco is None
        if self.kind == "finite":
            return ((v.address, v.local),)
        reps = [(v.address, v.local)]
        hit = self.part.iface_of.get(v.local)
        if hit is not None:
            i, pos = hit
            if i != 0 or v.address == ():
                child_name = self.part.interfaces[0][pos]
                for j in range(1, self.b):
                    reps.append((v.address + ((i, j),), child_name))
        return tuple(reps)

    # ----------------------------------------------------------------- neighbors

    def decoration_at(self, v: VertexId) -> tuple[Decoration, ...]:
        """Decorations attached below a canonical main vertex."""
        if v.deco is not None:
            return ()
        return tuple(d for d in self.decorations if v.local in d.attach_names)

    def neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        """Sorted canonical neighbor labels; the single lazy-expansion primitive."""
        if self.kind == "finite":
            return tuple(VertexId((), n) for n in self._fin_adj[v.local])
        if v.deco is not None:
            idx, name = v.deco
            d = self.decorations[idx]
            host = v.host
            out = [host.with_deco(idx, n) for n in d.local_neighbors(name)]
            if name == d.attach_vertex:
                out.append(host)
            return tuple(sorted(out, key=VertexId.key))
        out = set()
        for address, local in self.representations(v):
            for n in self.part.adj[local]:
                out.add(self.normalize(VertexId(address, n)))
        for d in self.decoration_at(v):
            out.add(v.with_deco(d.index, d.attach_vertex))
        return tuple(sorted(out, key=VertexId.key))

    def root_vertex(self) -> VertexId:
        if self.kind == "finite":
            return VertexId((), sorted(self.vertices)[0])
        return least(self.normalize(VertexId((), n)) for n in self.part.vertices)

    def declared_end(self, tag: str) -> EndDecl:
        for e in self.declared_ends:
            if e.tag == tag:
                return e
        raise InputError(f"no declared end {tag!r} in {self.name}")

    def branch_addresses(self, end: EndDecl, depth: int) -> list[tuple[Step, ...]]:
        """Part addresses along a declared branch, root first, `depth` many."""
        if not end.period:
            raise InputError(f"declared end {end.tag!r} has no branch")
        steps: list[Step] = list(end.prefix)
        k = 0
        while len(steps) < depth:
            steps.append(end.period[k % len(end.period)])
            k += 1
        out = [()]
        for s in steps[:depth]:
            out.append(out[-1] + (s,))
        for addr in out:
            self._validate_address(addr)
        return out

    # --------------------------------------------------------------------- JSON

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "GraphPresentation":
        kind = data.get("kind")
        name = data.get("name", name) or "unnamed"
        decorations = tuple(
            _decoration_from_json(i, d) for i, d in enumerate(data.get("decorations") or [])
        )
        ends = tuple(_end_from_json(e) for e in data.get("declared_ends") or [])
        systems = data.get("systems") or {}
        if kind == "finite":
            verts = tuple(data["vertices"])
            edges = frozenset(frozenset(e) for e in data["edges"])
            return cls(name, "finite", vertices=verts, edges=edges,
                       decorations=decorations, declared_ends=ends, systems=systems)
        if kind == "tree_amalgam":
            bp = data["blueprint"]
            pd = data["part"]
            part = Part(
                vertices=tuple(pd["vertices"]),
                edges=frozenset(frozenset(e) for e in pd["edges"]),
                interfaces=tuple(tuple(t) for t in data["interfaces"]),
            )
            for perm in data.get("glue") or []:
                if perm and perm != list(range(len(perm))):
                    raise InputError("only positional (identity) glue bijections are supported")
            return cls(
                name, "tree_amalgam",
                blueprint=(int(bp["a"]), int(bp["b"])),
                subdivided=bool(bp.get("subdivided", False)),
                part=part, decorations=decorations, declared_ends=ends, systems=systems,
            )
        raise InputError(f"unknown presentation kind {kind!r}")

    def to_json(self) -> dict:
        out: dict = {"name": self.name, "kind": self.kind}
        if self.kind == "finite":
            out["vertices"] = list(self.vertices)
            out["edges"] = sorted(sorted(e) for e in self.edges)
            out["blueprint"] = None
            out["part"] = None
            out["interfaces"] = []
        else:
            out["vertices"] = None
            out["edges"] = None
            out["blueprint"] = {"a": self.a, "b": self.b, "subdivided": self.subdivided}
            out["part"] = {
                "vertices": list(self.part.vertices),
                "edges": sorted(sorted(e) for e in self.part.edges),
            }
            out["interfaces"] = [list(t) for t in self.part.interfaces]
        out["glue"] = []
        out["decorations"] = [_decoration_to_json(d) for d in self.decorations]
        out["declared_ends"] = [_end_to_json(e) for e in self.declared_ends]
        if self.systems:
            out["systems"] = self.systems
        return out

    @classmethod
    def load(cls, path: str | Path) -> "GraphPresentation":
        p = Path(path)
        try:
            data = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read presentation {p}: {exc}") from exc
        return cls.from_json(data, name=p.stem)

    # ----------------------------------------------------------------- resources

    def charge(self, count: int) -> None:
        if count > self.max_vertices:
            raise BudgetError(
                f"expansion of {self.name} needs {count} vertices; "
                f"budget is {self.max_vertices}"
            )


def _decoration_from_json(index: int, d: dict) -> Decoration:
    g = d["graph"]
    kind = g["kind"]
    attach = frozenset(d["attach"])
    rayless = bool(d["rayless"])
    if kind == "path":
        return Decoration(index, "path", attach, rayless, length=int(g["length"]))
    if kind == "ray":
        return Decoration(index, "ray", attach, rayless)
    if kind == "explicit":
        return Decoration(
            index, "explicit", attach, rayless,
            vertices=tuple(g["vertices"]),
            edges=frozenset(frozenset(e) for e in g["edges"]),
            root=g["root"],
        )
    raise InputError(f"unknown decoration kind {kind!r}")


def _decoration_to_json(d: Decoration) -> dict:
    if d.kind == "path":
        g: dict = {"kind": "path", "length": d.length}
    elif d.kind == "ray":
        g = {"kind": "ray"}
    else:
        g = {"kind": "explicit", "vertices": list(d.vertices),
             "edges": sorted(sorted(e) for e in d.edges), "root": d.root}
    return {"graph": g, "attach": sorted(d.attach_names), "rayless": d.rayless}


def _end_from_json(e: dict) -> EndDecl:
    branch = e.get("branch") or {}
    return EndDecl(
        tag=e["tag"],
        cls=e["class"],
        prefix=tuple(tuple(s) for s in branch.get("prefix", [])),
        period=tuple(tuple(s) for s in branch.get("period", [])),
        at_vertex=e.get("at_vertex"),
    )


def _end_to_json(e: EndDecl) -> dict:
    out: dict = {"tag": e.tag, "class": e.cls}
    if e.period:
        out["branch"] = {"prefix": [list(s) for s in e.prefix],
                         "period": [list(s) for s in e.period]}
    if e.at_vertex is not None:
        out["at_vertex"] = e.at_vertex
    return out
