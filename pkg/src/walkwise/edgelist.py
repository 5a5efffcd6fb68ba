"""Edge-list text format.

One edge per line as two whitespace-separated decimal vertex ids, with an
optional third field holding the edge type (directed graphs only). Lines that
are blank or start with ``#`` are comments, except that a ``vertices=N`` token
in a comment fixes the vertex count so trailing isolated vertices survive a
round trip. Self-loops never appear in the file.
"""

from __future__ import annotations

import io
import os
import re
from collections.abc import Iterable

import numpy as np

from .errors import EdgeListParseError, GraphError
from .graph import AnyGraph, Graph, build_graph

_VERTICES_TOKEN = re.compile(r"\bvertices=(\d+)\b")


def parse_edge_list(
    text: str | Iterable[str],
    directed: bool = False,
    num_vertices: int | None = None,
) -> Graph:
    """Parse edge-list text.

    ``num_vertices`` overrides a ``vertices=N`` header; without either it is
    the largest id plus one.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    edges: list[tuple[int, int]] = []
    types: list[int] = []
    line_nos: list[int] = []
    typed: bool | None = None
    declared: int | None = None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            found = _VERTICES_TOKEN.search(line)
            if found and declared is None:
                declared = int(found.group(1))
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise EdgeListParseError(line_no, f"expected 2 or 3 fields, found {len(fields)}")
        if len(fields) == 3 and not directed:
            raise EdgeListParseError(line_no, "edge type field is only allowed for directed graphs")
        has_type = len(fields) == 3
        if typed is None:
            typed = has_type
        elif typed != has_type:
            raise EdgeListParseError(line_no, "mixes typed and untyped edges")
        try:
            values = [int(f, 10) for f in fields]
        except ValueError:
            raise EdgeListParseError(line_no, f"non-integer field in {line!r}") from None
        if min(values) < 0:
            raise EdgeListParseError(line_no, "ids must be nonnegative")
        u, v = values[0], values[1]
        if u == v:
            raise EdgeListParseError(line_no, f"explicit self-loop ({u}, {v}); self-loops are implicit")
        edges.append((u, v))
        line_nos.append(line_no)
        if has_type:
            types.append(values[2])

    inferred = 1 + max((max(e) for e in edges), default=-1)
    if num_vertices is not None:
        n = int(num_vertices)
    elif declared is not None:
        n = declared
    else:
        n = inferred
    for (u, v), line_no in zip(edges, line_nos):
        if max(u, v) >= n:
            raise EdgeListParseError(line_no, f"vertex id {max(u, v)} out of range for {n} vertices")
    seen: dict[tuple[int, int], int] = {}
    for (u, v), line_no in zip(edges, line_nos):
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListParseError(line_no, f"duplicate edge {key} (first on line {seen[key]})")
        seen[key] = line_no
    try:
        return build_graph(edges, n, directed=directed, edge_types=types if typed else None)
    except GraphError as exc:
        raise EdgeListParseError(0, str(exc)) from exc


def read_edge_list(path: str | os.PathLike, directed: bool = False, num_vertices: int | None = None) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, directed=directed, num_vertices=num_vertices)


def format_edge_list(g: AnyGraph, header: bool = True) -> str:
    """Canonical text: edges in sorted order, one per line. Types are written when present."""
    snap = g.snapshot() if hasattr(g, "snapshot") else g
    buf = io.StringIO()
    if header:
        kind = "directed" if snap.directed else "undirected"
        buf.write(f"# {kind} vertices={snap.num_vertices} edges={snap.num_edges}\n")
    edges = snap.edges
    if snap.edge_types is not None:
        rows = np.column_stack([edges, snap.edge_types])
    else:
        rows = edges
    if len(rows):
        np.savetxt(buf, rows, fmt="%d", delimiter=" ")
    return buf.getvalue()


def write_edge_list(g: AnyGraph, path: str | os.PathLike, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g, header=header))
