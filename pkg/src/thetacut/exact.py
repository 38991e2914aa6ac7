"""Exact ground truth for small graphs.

Everything here is exhaustive or exact search.  Size guards raise
``GuardError`` rather than returning an approximation.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .graph import Graph
from .model import Cut, Problem

ALPHA_GUARD = 60
CHI_GUARD = 40
STABLE_ENUM_GUARD = 20
COLORING_ENUM_GUARD = 10


class GuardError(ValueError):
    """Instance too large for exhaustive ground truth."""


def _guard(g: Graph, limit: int, what: str) -> None:
    if g.n > limit:
        raise GuardError(f"{what} is limited to n <= {limit}, got n = {g.n}")


def _nbr_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for i, j in g.edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def exact_alpha(g: Graph, guard: int = ALPHA_GUARD) -> int:
    """Stability number by branch and bound (max clique in the complement).

    The bound at each node is a greedy colouring of the candidate set in
    the complement, i.e. a cover of the candidates by cliques of ``g``.
    """
    _guard(g, guard, "exact_alpha")
    n = g.n
    full = (1 << n) - 1
    # non-neighbours in g = neighbours in the complement
    comp = [(full ^ m) & ~(1 << v) for v, m in enumerate(_nbr_masks(g))]
    best = 0

    def color_bound(cand: int) -> list[tuple[int, int]]:
        order = []
        color = 0
        uncolored = cand
        while uncolored:
            color += 1
            avail = uncolored
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~comp[v]
                uncolored &= ~(1 << v)
                order.append((v, color))
        return order

    def expand(size: int, cand: int) -> None:
        nonlocal best
        order = color_bound(cand)
        for v, c in reversed(order):
            if size + c <= best:
                return
            new = cand & comp[v]
            if new:
                expand(size + 1, new)
            elif size + 1 > best:
                best = size + 1
            cand &= ~(1 << v)

    if n:
        expand(0, full)
    return best


def exact_chi(g: Graph, guard: int = CHI_GUARD) -> int:
    """Chromatic number by DSATUR backtracking for k = omega, omega+1, ..."""
    _guard(g, guard, "exact_chi")
    n = g.n
    if n == 0:
        return 0
    if g.m == 0:
        return 1
    masks = _nbr_masks(g)
    lower = max(2, exact_alpha(_complement_light(g), guard=max(guard, ALPHA_GUARD)))
    for k in range(lower, n + 1):
        if _colorable(n, masks, k):
            return k
    return n


def _complement_light(g: Graph) -> Graph:
    from .graph import complement

    return complement(g)


def _colorable(n: int, masks: list[int], k: int) -> bool:
    color = [-1] * n
    # per vertex: bitmask of colours used by coloured neighbours
    seen = [0] * n

    def pick() -> int:
        best_v, best_key = -1, (-1, -1)
        for v in range(n):
            if color[v] < 0:
                key = (bin(seen[v]).count("1"), bin(masks[v]).count("1"))
                if key > best_key:
                    best_v, best_key = v, key
        return best_v

    def rec(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        for c in range(min(used + 1, k)):
            if seen[v] >> c & 1:
                continue
            color[v] = c
            changed = []
            for u in _bits(masks[v]):
                if color[u] < 0 and not seen[u] >> c & 1:
                    seen[u] |= 1 << c
                    changed.append(u)
            if rec(done + 1, max(used, c + 1)):
                return True
            for u in changed:
                seen[u] &= ~(1 << c)
            color[v] = -1
        return False

    return rec(0, 0)


def clique_number(g: Graph) -> int:
    from .graph import complement

    return exact_alpha(complement(g))


# -- STAB^2 and COL generators ----------------------------------------------------

def enumerate_stable_sets(g: Graph, guard: int = STABLE_ENUM_GUARD) -> Iterator[tuple[int, ...]]:
    """All stable sets (empty set included), lazily."""
    _guard(g, guard, "stable set enumeration")
    masks = _nbr_masks(g)
    n = g.n

    def rec(start: int, chosen: list[int], blocked: int):
        yield tuple(chosen)
        for v in range(start, n):
            if not blocked >> v & 1:
                chosen.append(v)
                yield from rec(v + 1, chosen, blocked | masks[v])
                chosen.pop()

    yield from rec(0, [], 0)


def enumerate_stable_set_matrices(g: Graph, guard: int = STABLE_ENUM_GUARD) -> Iterator[np.ndarray]:
    """Bordered rank-one matrices ``(1, s)(1, s)^T``."""
    for S in enumerate_stable_sets(g, guard):
        v = np.zeros(g.n + 1)
        v[0] = 1.0
        v[[s + 1 for s in S]] = 1.0
        yield np.outer(v, v)


def enumerate_colorings(g: Graph, guard: int = COLORING_ENUM_GUARD) -> Iterator[list[int]]:
    """Partitions of V into stable sets as restricted-growth strings."""
    _guard(g, guard, "coloring enumeration")
    n = g.n
    masks = _nbr_masks(g)
    labels = [0] * n
    members: list[int] = []

    def rec(v: int):
        if v == n:
            yield list(labels)
            return
        for c in range(len(members) + 1):
            if c == len(members):
                members.append(1 << v)
                labels[v] = c
                yield from rec(v + 1)
                members.pop()
            elif not members[c] & masks[v]:
                members[c] |= 1 << v
                labels[v] = c
                yield from rec(v + 1)
                members[c] &= ~(1 << v)

    if n == 0:
        yield []
        return
    yield from rec(0)


def coloring_matrix(labels) -> np.ndarray:
    lab = np.asarray(labels)
    return (lab[:, None] == lab[None, :]).astype(float)


def enumerate_coloring_matrices(g: Graph, guard: int = COLORING_ENUM_GUARD) -> Iterator[np.ndarray]:
    for labels in enumerate_colorings(g, guard):
        yield coloring_matrix(labels)


def _stable_vectors(g: Graph) -> np.ndarray:
    rows = []
    for S in enumerate_stable_sets(g):
        v = np.zeros(g.n + 1)
        v[0] = 1.0
        v[[s + 1 for s in S]] = 1.0
        rows.append(v)
    return np.array(rows)


class ValidityChecker:
    """Evaluates cuts on every STAB^2 / COL generator of one graph.

    The generator list is built once so that sweeping many cuts is cheap.
    With ``restrict=True`` each cut is checked on the subgraph induced by
    its support instead: every stable set (partition into stable sets) of
    the induced subgraph extends to one of ``g`` and vice versa, so the
    maximum of a functional supported there is unchanged.  This keeps COL
    checks exhaustive past the full-enumeration guard.
    """

    def __init__(self, g: Graph, problem: Problem | str, restrict: bool | None = None):
        self.g = g
        self.problem = Problem(problem)
        if restrict is None:
            limit = STABLE_ENUM_GUARD if self.problem is Problem.STABLE else COLORING_ENUM_GUARD
            restrict = g.n > limit
        self.restrict = restrict
        self._sub: dict[tuple[int, ...], ValidityChecker] = {}
        if restrict:
            return
        if self.problem is Problem.STABLE:
            self.vecs = _stable_vectors(g)
        else:
            labs = np.array(list(enumerate_colorings(g)), dtype=int).reshape(-1, g.n)
            self.labels = labs
            self.k = labs.max(axis=1) + 1 if g.n else np.zeros(len(labs), dtype=int)

    def entry(self, r: int, c: int) -> np.ndarray:
        """Value of ``Y[r, c]`` across all generators."""
        if self.problem is Problem.STABLE:
            return self.vecs[:, r] * self.vecs[:, c]
        if r == 0 and c == 0:
            return self.k.astype(float)
        if r == 0 or c == 0:
            return np.ones(len(self.labels))
        return (self.labels[:, r - 1] == self.labels[:, c - 1]).astype(float)

    def max_lhs(self, cut: Cut) -> float:
        if self.restrict:
            return self._restricted_max(cut)
        total = 0.0
        for (r, c), v in cut.coeffs.items():
            total = total + v * self.entry(r, c)
        return float(np.max(total))

    def _restricted_max(self, cut: Cut) -> float:
        if self.problem is Problem.COLORING and (0, 0) in cut.coeffs:
            raise GuardError("support restriction does not apply to cuts on Y[0,0]")
        support = tuple(sorted({v - 1 for rc in cut.coeffs for v in rc if v > 0}))
        sub = self._sub.get(support)
        if sub is None:
            sub = ValidityChecker(self.g.induced(support), self.problem, restrict=False)
            self._sub[support] = sub
        pos = {v + 1: i + 1 for i, v in enumerate(support)}
        pos[0] = 0
        local = Cut({(pos[r], pos[c]): v for (r, c), v in cut.coeffs.items()},
                    cut.rhs, cut.family, cut.witness)
        return sub.max_lhs(local)

    def valid(self, cut: Cut, tol: float = 1e-9) -> bool:
        return self.max_lhs(cut) <= cut.rhs + tol


def check_cut_validity(cut: Cut, g: Graph, problem: Problem | str) -> bool:
    """True iff ``cut`` holds on every stable-set matrix / coloring matrix of ``g``."""
    return ValidityChecker(g, problem).valid(cut)
