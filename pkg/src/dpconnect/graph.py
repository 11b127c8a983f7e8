"""Immutable labeled networks stored as compressed sparse rows.

Nodes are the integers ``0 .. node_count - 1``.  Binary labels are stored as a
boolean vector ``is_b`` (``True`` means label ``b``); continuous labels are
ranks in ``[0, 1]``.  Cells are named node subsets and may overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

LABEL_A = "a"
LABEL_B = "b"

WITHIN_CELL = "within_cell"
EGO_TO_ALL = "ego_to_all"
CELL_MODES = (WITHIN_CELL, EGO_TO_ALL)


class GraphError(ValueError):
    """Raised for malformed graph input."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def labels_to_mask(labels: Sequence[str] | np.ndarray) -> np.ndarray:
    """Convert a sequence of ``'a'``/``'b'`` strings (or one string like ``"abba"``) to an ``is_b`` mask."""
    arr = np.asarray(list(labels) if isinstance(labels, str) else labels)
    if arr.ndim != 1:
        raise GraphError("labels must be a one-dimensional sequence")
    if arr.dtype == bool:
        return arr.copy()
    out = np.empty(arr.shape[0], dtype=bool)
    for k, lab in enumerate(arr):
        if lab == LABEL_A:
            out[k] = False
        elif lab == LABEL_B:
            out[k] = True
        else:
            raise GraphError(f"node {k}: binary label must be 'a' or 'b', got {lab!r}")
    return out


def mask_to_labels(is_b: np.ndarray) -> list[str]:
    return [LABEL_B if v else LABEL_A for v in is_b]


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Undirected, weighted, simple graph with optional node labels.

    Do not construct directly; use :func:`build_graph` or :func:`from_csr`.
    """

    node_count: int
    adjacency: sp.csr_array
    is_b: np.ndarray | None = None
    ranks: np.ndarray | None = None
    cells: Mapping[str, np.ndarray] = field(default_factory=dict)

    # -- basic queries -----------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        """Weighted degrees ``d_i = sum_j e_ij`` for all nodes."""
        return _degree_cache(self)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    @property
    def has_binary_labels(self) -> bool:
        return self.is_b is not None

    @property
    def has_ranks(self) -> bool:
        return self.ranks is not None

    def neighbors(self, i: int) -> np.ndarray:
        _check_node(self, i)
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        _check_node(self, i)
        a = self.adjacency
        return a.data[a.indptr[i]:a.indptr[i + 1]]

    def edges(self) -> np.ndarray:
        """Return an ``(m, 3)`` float array of ``(i, j, weight)`` with ``i < j``."""
        coo = sp.triu(self.adjacency, k=1, format="coo")
        order = np.lexsort((coo.col, coo.row))
        return np.column_stack([coo.row[order], coo.col[order], coo.data[order]]).astype(float)

    def cell(self, cell_id: str) -> np.ndarray:
        try:
            return self.cells[cell_id]
        except KeyError:
            raise KeyError(f"unknown cell id {cell_id!r}") from None

    def with_labels(
        self,
        is_b: np.ndarray | None = None,
        ranks: np.ndarray | None = None,
    ) -> "LabeledGraph":
        """Return a copy carrying new label vectors (unchanged ones are kept)."""
        return _assemble(
            self.node_count,
            self.adjacency,
            self.is_b if is_b is None else is_b,
            self.ranks if ranks is None else ranks,
            self.cells,
        )

    def with_cells(self, cells: Mapping[str, Iterable[int]]) -> "LabeledGraph":
        return _assemble(self.node_count, self.adjacency, self.is_b, self.ranks, cells)

    def node_stats(self, i: int) -> "NodeStats":
        return NodeStats(degree=float(self.degrees[i]), neighborhood=self.neighbors(i))

    def row_normalized(self) -> sp.csr_array:
        """Matrix of ``a_ij = e_ij / d_i``; rows of isolated nodes are zero."""
        d = self.degrees
        inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
        return sp.csr_array(sp.diags_array(inv) @ self.adjacency)


@dataclass(frozen=True)
class NodeStats:
    degree: float
    neighborhood: np.ndarray


def _degree_cache(g: LabeledGraph) -> np.ndarray:
    # frozen dataclass: stash the degree vector on the instance dict
    d = g.__dict__.get("_degrees")
    if d is None:
        d = _frozen(np.asarray(g.adjacency.sum(axis=1)).ravel().astype(float))
        object.__setattr__(g, "_degrees", d)
    return d


def _check_node(g: LabeledGraph, i: int) -> None:
    if not 0 <= i < g.node_count:
        raise IndexError(f"node {i} out of range for graph with {g.node_count} nodes")


def _assemble(node_count, adjacency, is_b, ranks, cells) -> LabeledGraph:
    if is_b is not None:
        is_b = labels_to_mask(is_b)
        if is_b.shape != (node_count,):
            raise GraphError(
                f"binary label vector has length {is_b.shape[0]}, expected {node_count}"
            )
        is_b = _frozen(is_b)
    if ranks is not None:
        ranks = np.asarray(ranks, dtype=float)
        if ranks.shape != (node_count,):
            raise GraphError(f"rank vector has length {ranks.shape[0]}, expected {node_count}")
        if np.any(~np.isfinite(ranks)) or np.any((ranks < 0) | (ranks > 1)):
            raise GraphError("continuous labels must lie in [0, 1]")
        ranks = _frozen(ranks)
    frozen_cells = {}
    for cid, members in (cells or {}).items():
        m = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members,
                                 dtype=np.int64))
        if m.size and (m[0] < 0 or m[-1] >= node_count):
            raise GraphError(f"cell {cid!r} contains nodes outside 0..{node_count - 1}")
        frozen_cells[str(cid)] = _frozen(m)
    adjacency.data.setflags(write=False)
    adjacency.indices.setflags(write=False)
    adjacency.indptr.setflags(write=False)
    return LabeledGraph(node_count, adjacency, is_b, ranks, frozen_cells)


def from_csr(
    adjacency: sp.spmatrix | sp.sparray,
    is_b=None,
    ranks=None,
    cells: Mapping[str, Iterable[int]] | None = None,
    check: bool = True,
) -> LabeledGraph:
    """Wrap a symmetric sparse adjacency matrix (used by the generators)."""
    a = sp.csr_array(adjacency, dtype=float)
    a.sum_duplicates()
    a.sort_indices()
    n = a.shape[0]
    if a.shape != (n, n):
        raise GraphError("adjacency must be square")
    if check:
        if a.diagonal().any():
            raise GraphError("self-loops are not allowed")
        if a.nnz and a.data.min() < 0:
            raise GraphError("edge weights must be nonnegative")
        if (a != a.T).nnz:
            raise GraphError("adjacency must be symmetric")
    a.eliminate_zeros()
    return _assemble(n, a, is_b, ranks, cells)


def build_graph(
    node_count: int,
    edge_list: Iterable[Sequence[float]],
    is_b=None,
    ranks=None,
    cells: Mapping[str, Iterable[int]] | None = None,
) -> LabeledGraph:
    """Build a :class:`LabeledGraph` from ``(i, j)`` or ``(i, j, weight)`` tuples.

    Raises:
        GraphError: on self-loops, out-of-range endpoints, negative weights or
            duplicate (unordered) pairs.
    """
    if int(node_count) != node_count or node_count < 1:
        raise GraphError("node_count must be a positive integer")
    node_count = int(node_count)
    rows, cols, weights = [], [], []
    seen = set()
    for k, edge in enumerate(edge_list):
        if len(edge) == 2:
            i, j = edge
            w = 1.0
        elif len(edge) == 3:
            i, j, w = edge
        else:
            raise GraphError(f"edge {k}: expected (i, j) or (i, j, weight)")
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < node_count and 0 <= j < node_count):
            raise GraphError(f"edge {k}: endpoint out of range in ({i}, {j})")
        if i == j:
            raise GraphError(f"edge {k}: self-loop on node {i}")
        if not w >= 0:
            raise GraphError(f"edge {k}: weight must be nonnegative, got {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"edge {k}: duplicate edge {key}")
        seen.add(key)
        rows += [i, j]
        cols += [j, i]
        weights += [w, w]
    a = sp.csr_array(
        (np.asarray(weights, float), (np.asarray(rows, np.int64), np.asarray(cols, np.int64))),
        shape=(node_count, node_count),
    )
    a.sort_indices()
    # zero-weight edges carry no connection (neighborhood is {j : e_ij > 0})
    a.eliminate_zeros()
    return _assemble(node_count, a, is_b, ranks, cells)


def degree(g: LabeledGraph, i: int) -> float:
    _check_node(g, i)
    return float(g.degrees[i])


@dataclass(frozen=True)
class CellView:
    """Egos and edge filter for a (possibly cell-restricted) computation.

    ``adjacency`` is the matrix whose rows give each ego's counted connections:
    the full adjacency for ``ego_to_all`` and the cell-induced one for
    ``within_cell``.  Non-members' rows are still present but never averaged.
    """

    egos: np.ndarray
    adjacency: sp.csr_array
    mode: str

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()


def cell_subgraph_views(g: LabeledGraph, cell: str | None = None, mode: str = EGO_TO_ALL) -> CellView:
    """Resolve the egos and counted edges for a cell-level index.

    ``within_cell`` keeps only edges with both endpoints in the cell, so both
    the numerator and the denominator of each share are cell-internal.
    ``ego_to_all`` averages over cell members but keeps all their edges.
    With ``cell=None`` the whole vertex set is used and the modes coincide.
    """
    if mode not in CELL_MODES:
        raise ValueError(f"mode must be one of {CELL_MODES}, got {mode!r}")
    if cell is None:
        return CellView(np.arange(g.node_count), g.adjacency, mode)
    members = g.cell(cell)
    if mode == EGO_TO_ALL:
        return CellView(members, g.adjacency, mode)
    keep = np.zeros(g.node_count)
    keep[members] = 1.0
    mask = sp.diags_array(keep)
    sub = sp.csr_array(mask @ g.adjacency @ mask)
    sub.eliminate_zeros()
    sub.sort_indices()
    return CellView(members, sub, mode)
