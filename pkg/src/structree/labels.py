"""Canonical vertex labels.

A vertex of a generated graph is addressed by a reduced path in the blueprint
tree (a sequence of (interface, slot) edge choices starting from the root
part), a part-local vertex name, and an optional decoration coordinate for
vertices living inside an attached decoration copy.  Finite graphs use the
empty address.  Equality of vertices is equality of canonical labels; the
canonical form is computed by GraphPresentation.normalize.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InputError

Step = tuple[int, int]

_NAME_RE = re.compile(r"^[A-Za-z0-9_+-]+$")


def valid_name(name: str) -> bool:
    """Vertex names must avoid the characters used by the label syntax."""
    return bool(_NAME_RE.match(name))


@dataclass(frozen=True, order=False)
class VertexId:
    address: tuple[Step, ...] = ()
    local: str = ""
    deco: tuple[int, str] | None = None

    def key(self):
        """Fixed total order: shorter addresses first, then lexicographic."""
        d = (0, 0, "") if self.deco is None else (1, self.deco[0], self.deco[1])
        return (len(self.address), self.address, self.local, d)

    def __lt__(self, other: "VertexId") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "VertexId") -> bool:
        return self.key() <= other.key()

    @property
    def host(self) -> "VertexId":
        """The main-graph vertex a decoration vertex hangs from (self if main)."""
        if self.deco is None:
            return self
        return VertexId(self.address, self.local)

    def with_deco(self, deco_index: int, name: str) -> "VertexId":
        assert self.deco is None
        return VertexId(self.address, self.local, (deco_index, name))

    def __str__(self) -> str:
        return format_label(self)

    def __repr__(self) -> str:
        return f"VertexId({format_label(self)!r})"


def format_label(v: VertexId) -> str:
    s = v.local
    if v.address:
        s += "@" + "/".join(f"{i}.{j}" for i, j in v.address)
    if v.deco is not None:
        s += f"~{v.deco[0]}:{v.deco[1]}"
    return s


def parse_label(text: str) -> VertexId:
    """Inverse of format_label; raises InputError on malformed text."""
    deco = None
    body = text
    if "~" in text:
        body, _, dtail = text.partition("~")
        dparts = dtail.split(":")
        if len(dparts) != 2 or not dparts[0].isdigit() or not valid_name(dparts[1]):
            raise InputError(f"malformed decoration coordinate in label {text!r}")
        deco = (int(dparts[0]), dparts[1])
    local, _, atail = body.partition("@")
    if not valid_name(local):
        raise InputError(f"malformed local vertex name in label {text!r}")
    address: list[Step] = []
    if atail:
        for chunk in atail.split("/"):
            ij = chunk.split(".")
            if len(ij) != 2 or not ij[0].isdigit() or not ij[1].isdigit():
                raise InputError(f"malformed address step {chunk!r} in label {text!r}")
            address.append((int(ij[0]), int(ij[1])))
    return VertexId(tuple(address), local, deco)


def least(labels) -> VertexId:
    """Least label under the fixed total order; used for canonical ids."""
    it = iter(labels)
    try:
        best = next(it)
    except StopIteration:
        raise InputError("least() of empty label collection")
    for v in it:
        if v.key() < best.key():
            best = v
    return best
