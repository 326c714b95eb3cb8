"""Spreading networks: edge-list ingestion, the adjacency operator and its
dominant eigenvalue.

Arcs are stored as ``(u, v)`` pairs meaning *u can infect v*, so the
adjacency matrix has ``A[v, u] = 1`` and row ``v`` lists the in-neighbours
of ``v``.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError, EdgeListError

log = logging.getLogger(__name__)

_HEADER = re.compile(r"^\s*n\s*=\s*(\d+)\s*$")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable static graph over nodes ``0..n-1``.

    ``arcs`` is a sorted, duplicate-free ``(m, 2)`` integer array of
    ``(source, target)`` pairs. Undirected graphs carry both directions.
    ``node_ids`` maps dense indices back to the labels seen on load.
    """

    n: int
    arcs: np.ndarray
    directed: bool = False
    node_ids: np.ndarray | None = None
    dropped_self_loops: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        arcs = np.asarray(self.arcs, dtype=np.int64).reshape(-1, 2)
        if arcs.size and (arcs.min() < 0 or arcs.max() >= self.n):
            raise ValueError("arc endpoint outside [0, n)")
        if np.any(arcs[:, 0] == arcs[:, 1]):
            raise ValueError("self-loops are not allowed")
        if not self.directed:
            arcs = np.concatenate([arcs, arcs[:, ::-1]])
        arcs = np.unique(arcs, axis=0)
        arcs.setflags(write=False)
        object.__setattr__(self, "arcs", arcs)
        ids = np.arange(self.n) if self.node_ids is None else np.asarray(self.node_ids)
        if len(ids) != self.n:
            raise ValueError("node_ids must have length n")
        object.__setattr__(self, "node_ids", ids)

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    @property
    def num_edges(self) -> int:
        """Undirected edge count (arcs / 2) or arc count for directed graphs."""
        return self.num_arcs if self.directed else self.num_arcs // 2

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """CSR matrix with ``A[v, u] = 1`` iff ``u`` can infect ``v``."""
        src, dst = self.arcs[:, 0], self.arcs[:, 1]
        data = np.ones(len(src))
        return sp.csr_matrix((data, (dst, src)), shape=(self.n, self.n))

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.arcs[:, 1], minlength=self.n)

    def in_neighbors(self, v: int) -> np.ndarray:
        A = self.adjacency
        return A.indices[A.indptr[v]:A.indptr[v + 1]]

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()


def load_edge_list(source: str | TextIO, directed: bool = False) -> Graph:
    """Parse a whitespace-separated edge list.

    One ``u v`` pair per line; lines starting with ``#`` are comments and an
    optional ``n=<count>`` header fixes the node count (labels must then lie
    in ``[0, count)`` and are used as-is). Without a header, the distinct
    labels are remapped to ``0..n-1`` in sorted order. Duplicate edges are
    collapsed and self-loops dropped.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    n_header = None
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER.match(line)
        if m:
            if pairs or n_header is not None:
                raise EdgeListError("header must precede all edges", lineno)
            n_header = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) < 2:
            raise EdgeListError(f"expected two node labels, got {line!r}", lineno)
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise EdgeListError(f"non-integer node label in {line!r}", lineno) from None
    if not pairs:
        raise EdgeListError("edge list is empty")

    raw_arcs = np.array(pairs, dtype=np.int64)
    if n_header is not None:
        if raw_arcs.min() < 0 or raw_arcs.max() >= n_header:
            raise EdgeListError(f"node label outside [0, {n_header}) declared by header")
        n, arcs, ids = n_header, raw_arcs, None
    else:
        ids, flat = np.unique(raw_arcs, return_inverse=True)
        n, arcs = len(ids), flat.reshape(-1, 2)

    loops = arcs[:, 0] == arcs[:, 1]
    dropped = int(loops.sum())
    if dropped:
        log.warning("dropped %d self-loop(s)", dropped)
    return Graph(n, arcs[~loops], directed=directed, node_ids=ids, dropped_self_loops=dropped)


def read_edge_list(path, directed: bool = False) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh, directed=directed)


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    iterations: int
    residual: float
    eigenvector: np.ndarray = field(repr=False, default=None)


def _power_iteration(A, tol: float, max_iter: int, shift: float):
    m = A.shape[0]
    x = np.full(m, 1.0 / m)
    prev = np.nan
    lam = np.nan
    for k in range(1, max_iter + 1):
        y = A @ x + shift * x
        norm = y.sum()  # x >= 0 with unit 1-norm, so this is ||(A+cI)x||_1
        lam = norm - shift
        x = y / norm
        if abs(lam - prev) <= tol:
            return lam, k, x
        prev = lam
    raise ConvergenceError("power iteration did not converge", lam, max_iter)


def largest_eigenvalue(g: Graph, tol: float = 1e-12, max_iter: int = 1_000_000,
                       shift: float = 1.0) -> SpectralResult:
    """Spectral radius of the adjacency matrix by shifted power iteration.

    Iterates ``A + shift*I`` from the all-ones vector so bipartite graphs
    (eigenvalues ``+-lambda1``) still converge; the shift is removed from the
    reported value. Stops when successive estimates differ by at most
    ``tol``.

    Directed graphs are split into strongly connected components and the
    largest block radius is returned, because a reducible matrix can have a
    defective dominant eigenvalue on which power iteration stalls. The
    eigenvector is then the Perron vector of that block, zero elsewhere.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = g.adjacency
    if not g.directed:
        lam, k, x = _power_iteration(A, tol, max_iter, shift)
        residual = np.abs(A @ x - lam * x).sum()
        return SpectralResult(float(lam), k, float(residual), x)

    count, labels = connected_components(A, directed=True, connection="strong")
    best = SpectralResult(0.0, 0, 0.0, np.full(g.n, 1.0 / g.n))
    for c in range(count):
        idx = np.flatnonzero(labels == c)
        if len(idx) < 2:  # no self-loops, so a singleton block is zero
            continue
        block = A[idx][:, idx]
        lam, k, xb = _power_iteration(block, tol, max_iter, shift)
        if lam > best.lambda1:
            x = np.zeros(g.n)
            x[idx] = xb
            residual = np.abs(block @ xb - lam * xb).sum()
            best = SpectralResult(float(lam), k, float(residual), x)
    return best


# -- generators used by tests and scripts ---------------------------------

def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack([u, v]))


def star_graph(leaves: int) -> Graph:
    """Hub 0 joined to ``leaves`` outer nodes."""
    return Graph(leaves + 1, np.column_stack([np.zeros(leaves, int), np.arange(1, leaves + 1)]))


def cycle_graph(n: int) -> Graph:
    u = np.arange(n)
    return Graph(n, np.column_stack([u, (u + 1) % n]))


def path_graph(n: int) -> Graph:
    u = np.arange(n - 1)
    return Graph(n, np.column_stack([u, u + 1]).reshape(-1, 2))


def gnp_random_graph(n: int, p: float, seed: int = 0, directed: bool = False) -> Graph:
    """Erdos-Renyi G(n, p)."""
    rng = np.random.default_rng(seed)
    if directed:
        mask = rng.random((n, n)) < p
        np.fill_diagonal(mask, False)
        u, v = np.nonzero(mask)
    else:
        u, v = np.triu_indices(n, k=1)
        keep = rng.random(len(u)) < p
        u, v = u[keep], v[keep]
    return Graph(n, np.column_stack([u, v]).reshape(-1, 2), directed=directed)


def from_arcs(n: int, arcs: Iterable[tuple[int, int]], directed: bool = False) -> Graph:
    return Graph(n, np.array(list(arcs), dtype=np.int64).reshape(-1, 2), directed=directed)
