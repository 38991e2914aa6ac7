"""Simple undirected graphs, DIMACS I/O and small-structure enumeration.

Vertices are 0-based internally.  Everything that faces a user (DIMACS
files, reports, cut witnesses printed by the CLI) is 1-based.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_CYCLE_CAP = 50_000


class GraphError(ValueError):
    """Invalid graph data (self-loop, index out of range, ...)."""


class DimacsParseError(GraphError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Cycle:
    """A cycle given by its vertex sequence; the closing edge is implicit."""

    vertices: tuple[int, ...]
    chordless: bool = True

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def vertex_set(self) -> tuple[int, ...]:
        return tuple(sorted(self.vertices))


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    _adj: tuple[frozenset[int], ...] = field(repr=False, default=())
    _matrix: np.ndarray | None = field(repr=False, default=None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        norm = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise GraphError(f"self-loop at vertex {i + 1}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i + 1},{j + 1}) out of range 1..{n}")
            norm.add((i, j) if i < j else (j, i))
        edge_list = tuple(sorted(norm))
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in edge_list:
            adj[i].add(j)
            adj[j].add(i)
        mat = np.zeros((n, n), dtype=bool)
        if edge_list:
            e = np.array(edge_list)
            mat[e[:, 0], e[:, 1]] = True
            mat[e[:, 1], e[:, 0]] = True
        mat.setflags(write=False)
        return cls(n, edge_list, name, tuple(frozenset(a) for a in adj), mat)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix (read-only)."""
        return self._matrix

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range 0..{self.n - 1}")

    def neighbors(self, v: int) -> list[int]:
        self._check(v)
        return sorted(self._adj[v])

    def is_edge(self, i: int, j: int) -> bool:
        self._check(i)
        self._check(j)
        return j in self._adj[i]

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def validate(self) -> None:
        """Re-check the representation invariants; raises GraphError."""
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise GraphError(f"self-loop at vertex {i + 1}")
            if not i < j or (i, j) in seen:
                raise GraphError(f"edge ({i + 1},{j + 1}) not canonical or duplicated")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge ({i + 1},{j + 1}) out of range")
            if j not in self._adj[i] or i not in self._adj[j]:
                raise GraphError(f"adjacency out of sync at ({i + 1},{j + 1})")
            seen.add((i, j))
        if sum(self.degrees()) != 2 * self.m:
            raise GraphError("degree sum differs from 2m")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Graph{label} n={self.n} m={self.m}>"

    def non_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in combinations(range(self.n), 2) if not self._matrix[i, j]]

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Subgraph induced by ``vertices``, relabelled in sorted order."""
        vs = sorted(set(vertices))
        pos = {v: k for k, v in enumerate(vs)}
        edges = [(pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos]
        return Graph.from_edges(len(vs), edges, name=self.name)


def complement(g: Graph) -> Graph:
    edges = g.non_edges()
    name = f"co-{g.name}" if g.name else ""
    return Graph.from_edges(g.n, edges, name=name)


# -- DIMACS ---------------------------------------------------------------

def parse_dimacs(text: str | bytes, name: str = "") -> Graph:
    """Parse the DIMACS ASCII edge format (``c``/``p edge n m``/``e i j``)."""
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    n = None
    declared_m = 0
    edges = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise DimacsParseError(lineno, "duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise DimacsParseError(lineno, f"malformed problem line {line!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(lineno, f"non-integer size in {line!r}") from None
            if n <= 0:
                raise DimacsParseError(lineno, "vertex count must be positive")
        elif tag == "e":
            if n is None:
                raise DimacsParseError(lineno, "edge line before problem line")
            if len(parts) < 3:
                raise DimacsParseError(lineno, f"malformed edge line {line!r}")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsParseError(lineno, f"non-integer vertex in {line!r}") from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise DimacsParseError(lineno, f"vertex index out of range 1..{n}")
            if i == j:
                raise DimacsParseError(lineno, f"self-loop at vertex {i}")
            edges.append((i - 1, j - 1))
        else:
            raise DimacsParseError(lineno, f"unknown line type {tag!r}")
    if n is None:
        raise DimacsParseError(0, "missing 'p edge n m' line")
    g = Graph.from_edges(n, edges, name=name)
    if g.m != declared_m:
        log.warning("DIMACS header declares m=%d but %d distinct edges were read", declared_m, g.m)
    return g


def read_dimacs(path) -> Graph:
    from pathlib import Path

    p = Path(path)
    return parse_dimacs(p.read_bytes(), name=p.stem)


def write_dimacs(g: Graph, comment: str | None = None) -> bytes:
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"c {line}\n")
    elif g.name:
        out.write(f"c {g.name}\n")
    out.write(f"p edge {g.n} {g.m}\n")
    for i, j in g.edges:
        out.write(f"e {i + 1} {j + 1}\n")
    return out.getvalue().encode("ascii")


# -- enumeration ------------------------------------------------------------

def enumerate_cliques(g: Graph, max_size: int = 5, min_size: int = 2,
                      maximal_only: bool = False) -> list[tuple[int, ...]]:
    """All cliques with ``min_size..max_size`` vertices, sorted lexicographically.

    Cliques are grown by ordered extension: a clique is only extended by
    vertices larger than its current maximum that are adjacent to every
    member, so each clique is produced once.
    """
    if not 1 <= max_size <= 5:
        raise ValueError("max_size must be in 1..5")
    adj = g.adjacency
    higher = [frozenset(j for j in g._adj[i] if j > i) for i in range(g.n)]
    found: list[tuple[int, ...]] = []

    def grow(clique: tuple[int, ...], cand: frozenset[int]) -> None:
        if len(clique) >= min_size:
            found.append(clique)
        if len(clique) == max_size:
            return
        for v in sorted(cand):
            grow(clique + (v,), cand & higher[v])

    for v in range(g.n):
        grow((v,), higher[v])
    found.sort()
    if maximal_only:
        found = [q for q in found if not _extendable(adj, q)]
    return found


def _extendable(adj: np.ndarray, clique: tuple[int, ...]) -> bool:
    common = np.all(adj[list(clique)], axis=0)
    return bool(common.any())


def enumerate_chordless_cycles(g: Graph, length: int = 5,
                               cap: int = DEFAULT_CYCLE_CAP) -> list[Cycle]:
    """Induced cycles with exactly ``length`` vertices, in canonical form.

    Canonical form starts at the smallest vertex and walks towards its
    smaller cycle neighbour.  Results are sorted; when more than ``cap``
    exist the lexicographically first ``cap`` are kept.
    """
    if length < 4:
        if length == 3:
            return [Cycle(q) for q in enumerate_cliques(g, 3, 3)][:cap]
        raise ValueError("cycle length must be >= 3")
    if cap < 0:
        raise ValueError("cap must be non-negative")
    adj = g.adjacency
    nbrs = [sorted(a) for a in g._adj]
    out: list[tuple[int, ...]] = []

    # DFS over induced paths v0-v1-...; all vertices above v0.  A path is
    # induced iff each new vertex touches only its predecessor (and v0 when
    # it is the last vertex).
    def extend(path: list[int]) -> None:
        last = path[-1]
        depth = len(path)
        for w in nbrs[last]:
            if w <= path[0] or w in path:
                continue
            # w may only be adjacent to last among path[1:-1]
            if any(adj[w, u] for u in path[1:-1]):
                continue
            touches_start = adj[w, path[0]]
            if depth == length - 1:
                if touches_start and path[1] < w:
                    out.append(tuple(path) + (w,))
            elif not touches_start:
                path.append(w)
                extend(path)
                path.pop()

    for v0 in range(g.n):
        for v1 in nbrs[v0]:
            if v1 > v0:
                extend([v0, v1])
    out.sort()
    if len(out) > cap:
        log.info("chordless %d-cycle enumeration truncated to %d of %d", length, cap, len(out))
        out = out[:cap]
    return [Cycle(c) for c in out]


def enumerate_chordless_5cycles(g: Graph, cap: int = DEFAULT_CYCLE_CAP) -> list[Cycle]:
    return enumerate_chordless_cycles(g, 5, cap)


def is_stable(g: Graph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return not g.adjacency[np.ix_(vs, vs)].any()


def is_clique(g: Graph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    sub = g.adjacency[np.ix_(vs, vs)]
    return bool(sub.sum() == len(vs) * (len(vs) - 1))
