"""Line-oriented text formats for graphs, complexes and colorings.

Every document is a list of ``key: <json value>`` lines.  Blank lines and
lines starting with ``#`` are ignored on input.  Output is canonical (sorted
edges, canonical cell classes) so emit(parse(emit(x))) == emit(x) byte for byte.
"""

from __future__ import annotations

import json

from evencw.complex import EvenComplex, from_faces
from evencw.errors import InputError
from evencw.graph import Graph, VertexMap


def parse_fields(text: str, allowed: set, required: set) -> dict:
    fields = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise InputError(f"line {n}: expected 'key: value'")
        if key not in allowed:
            raise InputError(f"line {n}: unknown field {key!r}")
        if key in fields:
            raise InputError(f"line {n}: duplicate field {key!r}")
        try:
            fields[key] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {n}: bad value for {key!r}: {exc.msg}") from None
    missing = required - set(fields)
    if missing:
        raise InputError(f"missing field(s) {sorted(missing)}")
    return fields


def _dump(value) -> str:
    return json.dumps(value, separators=(",", ":"))


def _count(fields, key="vertices") -> int:
    n = fields[key]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InputError(f"{key} must be a non-negative integer")
    return n


def _int_lists(value, key):
    if not isinstance(value, list) or not all(
        isinstance(r, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in r) for r in value
    ):
        raise InputError(f"{key} must be a list of integer lists")
    return value


# -- graphs ------------------------------------------------------------------

def dump_graph(g: Graph) -> str:
    return f"vertices: {g.vertex_count}\nedges: {_dump([list(e) for e in g.sorted_edges()])}\n"


def load_graph(text: str) -> Graph:
    fields = parse_fields(text, {"vertices", "edges"}, {"vertices", "edges"})
    edges = _int_lists(fields["edges"], "edges")
    if any(len(e) != 2 for e in edges):
        raise InputError("every edge needs exactly two endpoints")
    return Graph.from_edges(_count(fields), edges)


# -- complexes ---------------------------------------------------------------

def dump_complex(x: EvenComplex) -> str:
    x = x.canonical()
    cells = [list(c.vertices[:-1]) for c in x.cells]
    covered = set()
    for c in x.cells:
        for a, b in zip(c.vertices, c.vertices[1:]):
            covered.add((min(a, b), max(a, b)))
    extra = [list(e) for e in x.skeleton.sorted_edges() if e not in covered]
    out = f"vertices: {x.vertex_count}\ncells: {_dump(cells)}\n"
    if extra:
        out += f"edges: {_dump(extra)}\n"
    return out


def load_complex(text: str) -> EvenComplex:
    """Parse a complex; ``edges`` (optional) lists skeleton edges on no cell."""
    fields = parse_fields(text, {"vertices", "cells", "edges"}, {"vertices", "cells"})
    cells = _int_lists(fields["cells"], "cells")
    extra = _int_lists(fields.get("edges", []), "edges")
    if any(len(e) != 2 for e in extra):
        raise InputError("every edge needs exactly two endpoints")
    return from_faces(_count(fields), cells, extra)


def is_complex_text(text: str) -> bool:
    return any(line.strip().startswith("cells:") for line in text.splitlines())


# -- colorings ---------------------------------------------------------------

def dump_coloring(coloring, n: int) -> str:
    image = list(coloring.image if isinstance(coloring, VertexMap) else coloring)
    return f"colors: {n}\nassignment: {_dump(image)}\n"


def load_coloring(text: str) -> tuple:
    """(VertexMap, color count)."""
    fields = parse_fields(text, {"colors", "assignment"}, {"colors", "assignment"})
    n = _count(fields, "colors")
    assignment = fields["assignment"]
    if not isinstance(assignment, list) or not all(isinstance(c, int) for c in assignment):
        raise InputError("assignment must be a list of integers")
    if any(not 0 <= c < n for c in assignment):
        raise InputError(f"colors must lie in 0..{n - 1}")
    return VertexMap(tuple(assignment)), n
