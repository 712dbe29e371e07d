"""Finitely described automorphisms and the groups they generate.

An amalgam automorphism is a label transducer: it carries the image of the
root part, a compatible part-vertex bijection, and per-node slot rules
(default alignment plus finitely many overrides).  Walking an address step by
step yields the image address and the induced part bijection; the inverse
walks the image tree while mirroring steps on the source side.  Adjacency
preservation is never trusted: it is asserted on the balls the map is applied
to (see verify_on).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError, PreconditionError
from .labels import VertexId
from .presentation import GraphPresentation
from .truncation import Truncation


class AutoMap:
    """Base interface: a bijective, adjacency-preserving label map."""

    name: str = "?"

    def apply(self, v: VertexId) -> VertexId:
        raise NotImplementedError

    def inverse(self) -> "AutoMap":
        raise NotImplementedError

    def apply_set(self, vs) -> frozenset:
        return frozenset(self.apply(v) for v in vs)

    def __call__(self, v: VertexId) -> VertexId:
        return self.apply(v)


class PermMap(AutoMap):
    """Explicit vertex permutation of a finite presentation."""

    def __init__(self, g: GraphPresentation, mapping: dict, name: str = "perm"):
        self.g = g
        self.name = name
        self.mapping = {VertexId((), k): VertexId((), v) for k, v in mapping.items()}
        if set(self.mapping) != {VertexId((), n) for n in g.vertices} or \
           set(self.mapping.values()) != set(self.mapping):
            raise InputError(f"{name}: not a permutation of V({g.name})")
        for x in self.mapping:
            for y in g.neighbors(x):
                if self.mapping[y] not in g.neighbors(self.mapping[x]):
                    raise InputError(f"{name}: does not preserve adjacency")

    def apply(self, v: VertexId) -> VertexId:
        if v not in self.mapping:
            raise InputError(f"{v} is not a vertex of {self.g.name}")
        return self.mapping[v]

    def inverse(self) -> "PermMap":
        inv = {str(v.local): w.local for w, v in self.mapping.items()}
        m = PermMap(self.g, inv, name=f"{self.name}^-1")
        return m


@dataclass(frozen=True)
class SlotOverride:
    at: tuple
    interface: int
    perm: tuple  # 1-based images: my slot j goes to candidate list position perm[j-1]


class AmalgamMap(AutoMap):
    """Blueprint motion (image of the root part plus slot rules) together with
    a part bijection, acting on canonical labels."""

    def __init__(self, g: GraphPresentation, root_to, part_map: dict,
                 slot_overrides: Iterable[SlotOverride] = (), name: str = "auto"):
        if g.kind != "tree_amalgam":
            raise InputError("AmalgamMap needs a tree amalgam")
        self.g = g
        self.name = name
        self.root_to = tuple(tuple(s) for s in root_to)
        g._validate_address(self.root_to)
        self.part_map = dict(part_map)
        if self.part_map not in [dict(m) for m in g.part.symmetries()]:
            raise InputError(f"{name}: part_map is not an interface-respecting part symmetry")
        self.slot_overrides = {(o.at, o.interface): tuple(o.perm) for o in slot_overrides}
        for (at, i), perm in self.slot_overrides.items():
            if sorted(perm) != list(range(1, g.b)):
                raise InputError(f"{name}: slot override at {at} interface {i} is not a permutation")
        self._forward_cache: dict = {(): (self.root_to, dict(self.part_map))}
        self._inv = None

    # ------------------------------------------------------------ forward walk

    def _state(self, address: tuple) -> tuple:
        """(image address, part bijection) after walking `address`."""
        if address in self._forward_cache:
            return self._forward_cache[address]
        prefix, step = address[:-1], address[-1]
        img, p = self._state(prefix)
        img2, p2 = self._advance(prefix, img, p, step)
        self._forward_cache[address] = (img2, p2)
        return img2, p2

    def _advance(self, my_addr, img, p, step):
        g = self.g
        i, j = step
        part = g.part
        # Interface on the image side receiving my interface i.
        my_iface = part.interfaces[i]
        e_pos = part.iface_of[p[my_iface[0]]]
        e = e_pos[0]
        if frozenset(p[x] for x in my_iface) != frozenset(part.interfaces[e]):
            raise InputError(f"{self.name}: part map does not respect interface {i}")
        # Candidate image parts at that glue node, deterministic order.
        if e == 0 and img != ():
            parent = img[:-1]
            ip, jp = img[-1]
            cands = [(parent, ip)]
            cands += [(parent + ((ip, jj),), 0) for jj in range(1, g.b) if jj != jp]
        else:
            cands = [(img + ((e, jj),), 0) for jj in range(1, g.b)]
        perm = self.slot_overrides.get((my_addr, i))
        pos = perm[j - 1] - 1 if perm else j - 1
        img_child, attach = cands[pos]
        # Forced assignments: positions of my child's interface 0 follow the
        # glued positions through p.
        forced = {}
        for k, child_name in enumerate(part.interfaces[0]):
            glued_parent_name = my_iface[k]
            image_vertex = p[glued_parent_name]
            k2 = part.iface_of[image_vertex][1]
            forced[child_name] = part.interfaces[attach][k2]
        for sym in part.symmetries():
            if all(sym[k] == v for k, v in forced.items()):
                return img_child, dict(sym)
        raise InputError(
            f"{self.name}: no part symmetry realizes the glue constraint at {my_addr}+{step}"
        )

    def apply(self, v: VertexId) -> VertexId:
        g = self.g
        img, p = self._state(v.address)
        host = g.normalize(VertexId(img, p[v.local]))
        if v.deco is None:
            return host
        idx, name = v.deco
        d = g.decorations[idx]
        if host.local not in d.attach_names:
            raise InputError(
                f"{self.name}: image {host} of {v.host} loses its decoration {idx}"
            )
        return host.with_deco(idx, name)

    # ------------------------------------------------------------ inverse walk

    def inverse(self) -> "AutoMap":
        if self._inv is None:
            self._inv = _InverseAmalgamMap(self)
        return self._inv


def part_neighbors(g: GraphPresentation, M: tuple) -> list:
    """All part addresses blueprint-adjacent to M (children, parent, siblings)."""
    out = []
    for i in g.exits(M):
        out += [M + ((i, j),) for j in range(1, g.b)]
    if M != ():
        parent = M[:-1]
        ip, jp = M[-1]
        out.append(parent)
        out += [parent + ((ip, j),) for j in range(1, g.b) if j != jp]
    return out


class _InverseAmalgamMap(AutoMap):
    """Mirrors the forward transducer: the preimage of an image part is found
    among the blueprint neighbors of the current preimage."""

    def __init__(self, fwd: AmalgamMap):
        self.fwd = fwd
        self.g = fwd.g
        self.name = f"{fwd.name}^-1"
        self._cache: dict = {fwd.root_to: ()}

    def _preimage_part(self, img_address: tuple) -> tuple:
        if img_address in self._cache:
            return self._cache[img_address]
        fwd = self.fwd
        if img_address == ():
            # Walk the source tree until the image reaches the root part.
            my, img = (), fwd.root_to
            while img != ():
                target = img[:-1]
                my, img = self._neighbor_towards(my, target)
            self._cache[()] = my
            return my
        my_prefix = self._preimage_part(img_address[:-1])
        my, _ = self._neighbor_towards(my_prefix, img_address)
        self._cache[img_address] = my
        return my

    def _neighbor_towards(self, my: tuple, target: tuple):
        for cand in part_neighbors(self.g, my):
            img, _ = self.fwd._state(cand)
            if img == target:
                return cand, target
        raise InputError(f"{self.name}: image part {target} has no preimage "
                         f"adjacent to {my}")

    def apply(self, v: VertexId) -> VertexId:
        g = self.g
        my_addr = self._preimage_part(v.address)
        _, p = self.fwd._state(my_addr)
        inv = {w: k for k, w in p.items()}
        if v.local not in inv:
            raise InputError(f"{self.name}: no preimage for {v}")
        host = g.normalize(VertexId(my_addr, inv[v.local]))
        if v.deco is None:
            return host
        return host.with_deco(*v.deco)

    def inverse(self) -> AutoMap:
        return self.fwd


class WordMap(AutoMap):
    """Composition of generator maps, applied left to right."""

    def __init__(self, maps: tuple, name: str = ""):
        self.maps = tuple(maps)
        self.name = name or "*".join(m.name for m in maps) or "id"

    def apply(self, v: VertexId) -> VertexId:
        for m in self.maps:
            v = m.apply(v)
        return v

    def inverse(self) -> "WordMap":
        return WordMap(tuple(m.inverse() for m in reversed(self.maps)),
                       name=f"({self.name})^-1")


class Action:
    """A finitely generated group acting on a presentation, with an optional
    declared fixed end."""

    def __init__(self, g: GraphPresentation, generators: dict, fixed_end: str | None = None,
                 name: str = "action"):
        self.g = g
        self.name = name
        self.generators = dict(generators)
        self.fixed_end = fixed_end
        if fixed_end is not None:
            g.declared_end(fixed_end)  # must exist

    @classmethod
    def from_json(cls, g: GraphPresentation, data: dict) -> "Action":
        gens = {}
        for spec in data["generators"]:
            name = spec["name"]
            if spec["kind"] == "perm":
                gens[name] = PermMap(g, spec["map"], name=name)
            elif spec["kind"] == "amalgam":
                overrides = tuple(
                    SlotOverride(tuple(tuple(s) for s in o["at"]), int(o["interface"]),
                                 tuple(o["perm"]))
                    for o in spec.get("slot_overrides", ())
                )
                gens[name] = AmalgamMap(g, spec["root_to"], spec["part_map"],
                                        overrides, name=name)
            else:
                raise InputError(f"unknown generator kind {spec['kind']!r}")
        return cls(g, gens, fixed_end=data.get("fixed_end"), name=data.get("name", "action"))

    def maps(self) -> list[AutoMap]:
        out = []
        for name in sorted(self.generators):
            m = self.generators[name]
            out.append(m)
            out.append(m.inverse())
        return out

    def word(self, names) -> WordMap:
        maps = []
        for raw in names:
            inv = raw.startswith("-")
            name = raw[1:] if inv else raw
            if name not in self.generators:
                raise InputError(f"unknown generator {name!r} in word")
            m = self.generators[name]
            maps.append(m.inverse() if inv else m)
        return WordMap(tuple(maps), name=" ".join(names) or "id")


def act(action: Action, word, x, ctx: Truncation | None = None):
    """Apply a generator word to a vertex, a vertex set, or a chain of sets."""
    m = action.word(word)
    if isinstance(x, VertexId):
        y = m.apply(x)
        if ctx is not None and x in ctx and y in ctx:
            _assert_adjacency(action.g, m, x, ctx)
        return y
    if isinstance(x, frozenset):
        return m.apply_set(x)
    return [m.apply_set(frozenset(s)) for s in x]


def _assert_adjacency(g, m, x, ctx):
    for w in ctx.adj[x]:
        iw = m.apply(w)
        ix = m.apply(x)
        if iw in ctx and ix in ctx and iw not in g.neighbors(ix):
            raise InputError(f"{m.name}: adjacency broken at {g.display(x)}")


def orbit(x, action: Action, ctx: Truncation, max_size: int | None = None) -> list:
    """Deterministic closure of {x} under the generators and their inverses,
    restricted to the truncation."""
    if isinstance(x, VertexId):
        seeds = [x]
        inside = lambda y: y in ctx
        key = VertexId.key
    else:
        seeds = [frozenset(x)]
        inside = lambda s: all(v in ctx for v in s)
        key = lambda s: tuple(sorted(v.key() for v in s))
    if not all(inside(s) for s in seeds):
        raise InputError("orbit seed lies outside the truncation")
    maps = action.maps()
    seen = set(seeds)
    queue = deque(seeds)
    cap = max_size or action.g.max_vertices
    while queue:
        cur = queue.popleft()
        for m in maps:
            try:
                img = m.apply(cur) if isinstance(cur, VertexId) else m.apply_set(cur)
            except InputError:
                continue
            if inside(img) and img not in seen:
                seen.add(img)
                if len(seen) > cap:
                    raise PreconditionError("orbit exceeded the configured budget")
                queue.append(img)
    return sorted(seen, key=key)


def orbit_with_words(x, action: Action, ctx: Truncation, max_len: int = 12) -> dict:
    """Map image -> shortest generator word (as a WordMap) reaching it."""
    maps = []
    for name in sorted(action.generators):
        maps.append((name, action.generators[name]))
        maps.append((f"-{name}", action.generators[name].inverse()))
    start = x if isinstance(x, VertexId) else frozenset(x)
    inside = (lambda y: y in ctx) if isinstance(start, VertexId) else \
             (lambda s: all(v in ctx for v in s))
    found = {start: []}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if len(found[cur]) >= max_len:
            continue
        for name, m in maps:
            try:
                img = m.apply(cur) if isinstance(cur, VertexId) else m.apply_set(cur)
            except InputError:
                continue
            if inside(img) and img not in found:
                found[img] = found[cur] + [name]
                queue.append(img)
    return found


def verify_on(action: Action, ctx: Truncation, word_len: int = 1) -> None:
    """Assert adjacency preservation for all generator words up to word_len."""
    words = [[]]
    names = []
    for name in sorted(action.generators):
        names += [name, f"-{name}"]
    frontier = [[]]
    for _ in range(word_len):
        frontier = [w + [n] for w in frontier for n in names]
        words += frontier
    for w in words:
        m = action.word(w)
        for v in ctx.sorted_vertices():
            try:
                iv = m.apply(v)
            except InputError:
                continue
            for u in ctx.adj[v]:
                try:
                    iu = m.apply(u)
                except InputError:
                    continue
                if iu not in action.g.neighbors(iv):
                    raise InputError(
                        f"word {' '.join(w) or 'id'} breaks adjacency at {action.g.display(v)}"
                    )
