"""Plain-text graph formats.

Edge file: one edge per line, ``i j [weight]``, whitespace separated.
Label file: ``i label`` with label ``a``/``b`` or a real rank in ``[0, 1]``.
Cell file: ``cell_id i``.  In all three, ``#`` starts a comment and blank
lines are ignored.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import numpy as np

from .graph import LABEL_A, LABEL_B, GraphError, LabeledGraph, build_graph


class IngestError(GraphError):
    """A file did not conform to its format."""


def _records(path, min_fields: int, max_fields: int):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if not min_fields <= len(fields) <= max_fields:
                raise IngestError(
                    f"{path}:{lineno}: expected {min_fields}-{max_fields} fields, got {len(fields)}"
                )
            yield lineno, fields


def _node(path, lineno, tok) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise IngestError(f"{path}:{lineno}: node id {tok!r} is not an integer") from None
    if v < 0:
        raise IngestError(f"{path}:{lineno}: negative node id {v}")
    return v


def read_edges(path) -> list[tuple[int, int, float]]:
    edges = []
    for lineno, f in _records(path, 2, 3):
        i, j = _node(path, lineno, f[0]), _node(path, lineno, f[1])
        try:
            w = float(f[2]) if len(f) == 3 else 1.0
        except ValueError:
            raise IngestError(f"{path}:{lineno}: weight {f[2]!r} is not a number") from None
        edges.append((i, j, w))
    return edges


def read_labels(path) -> dict[int, str | float]:
    out: dict[int, str | float] = {}
    for lineno, f in _records(path, 2, 2):
        i = _node(path, lineno, f[0])
        if i in out:
            raise IngestError(f"{path}:{lineno}: duplicate label for node {i}")
        tok = f[1]
        if tok in (LABEL_A, LABEL_B):
            out[i] = tok
        else:
            try:
                out[i] = float(tok)
            except ValueError:
                raise IngestError(f"{path}:{lineno}: label {tok!r} is neither a/b nor a number") from None
    return out


def read_cells(path) -> dict[str, list[int]]:
    cells: dict[str, list[int]] = defaultdict(list)
    for lineno, f in _records(path, 2, 2):
        cells[f[0]].append(_node(path, lineno, f[1]))
    return dict(cells)


def ingest(edge_path, label_path=None, cell_path=None, node_count: int | None = None) -> LabeledGraph:
    """Load and validate a labeled graph from the three text formats.

    The node count is ``node_count`` if given, else one more than the largest
    id seen in any file.  A label file must label every node.
    """
    edges = read_edges(edge_path)
    labels = read_labels(label_path) if label_path is not None else {}
    cells = read_cells(cell_path) if cell_path is not None else {}
    ids = [max(i, j) for i, j, _ in edges] + list(labels) + [max(m) for m in cells.values() if m]
    n = node_count if node_count is not None else (max(ids) + 1 if ids else 1)
    is_b = ranks = None
    if label_path is not None:
        missing = [i for i in range(n) if i not in labels]
        if missing:
            raise IngestError(f"{label_path}: no label for node {missing[0]}"
                              + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""))
        extra = [i for i in labels if i >= n]
        if extra:
            raise IngestError(f"{label_path}: node {extra[0]} is outside 0..{n - 1}")
        kinds = {isinstance(v, str) for v in labels.values()}
        if len(kinds) > 1:
            raise IngestError(f"{label_path}: mixes binary and continuous labels")
        if kinds == {True}:
            is_b = np.array([labels[i] == LABEL_B for i in range(n)])
        else:
            ranks = np.array([labels[i] for i in range(n)], dtype=float)
            bad = np.flatnonzero((ranks < 0) | (ranks > 1))
            if bad.size:
                raise IngestError(f"{label_path}: rank for node {bad[0]} outside [0, 1]")
    return build_graph(n, edges, is_b=is_b, ranks=ranks, cells=cells)


def write_edges(g: LabeledGraph, path) -> None:
    e = g.edges()
    unit = np.all(e[:, 2] == 1.0) if e.size else True
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.node_count} edges {len(e)}\n")
        for i, j, w in e:
            if unit:
                fh.write(f"{int(i)} {int(j)}\n")
            else:
                fh.write(f"{int(i)} {int(j)} {float(w)!r}\n")


def write_labels(g: LabeledGraph, path, kind: str | None = None) -> None:
    """Write binary labels (``kind='binary'``) or ranks (``kind='rank'``)."""
    if kind is None:
        kind = "binary" if g.is_b is not None else "rank"
    with open(path, "w", encoding="utf-8") as fh:
        if kind == "binary":
            if g.is_b is None:
                raise ValueError("graph has no binary labels")
            for i, b in enumerate(g.is_b):
                fh.write(f"{i} {LABEL_B if b else LABEL_A}\n")
        else:
            if g.ranks is None:
                raise ValueError("graph has no ranks")
            for i, x in enumerate(g.ranks):
                fh.write(f"{i} {float(x)!r}\n")


def write_cells(g: LabeledGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cid, members in g.cells.items():
            for i in members:
                fh.write(f"{cid} {int(i)}\n")


def write_graph(g: LabeledGraph, prefix) -> dict[str, Path]:
    """Write ``prefix.edges`` plus whichever label/cell files apply."""
    prefix = Path(prefix)
    out = {"edges": prefix.with_suffix(".edges")}
    write_edges(g, out["edges"])
    if g.is_b is not None:
        out["labels"] = prefix.with_suffix(".labels")
        write_labels(g, out["labels"], "binary")
    if g.ranks is not None:
        key = "ranks" if g.is_b is not None else "labels"
        out[key] = prefix.with_suffix(".ranks" if key == "ranks" else ".labels")
        write_labels(g, out[key], "rank")
    if g.cells:
        out["cells"] = prefix.with_suffix(".cells")
        write_cells(g, out["cells"])
    return out
