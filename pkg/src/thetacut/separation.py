"""Separation oracles for the cut families and the per-round cut selection.

Every oracle reads only the primal matrix ``Y`` (order n + 1) and returns a
:class:`ViolationSet`: the amounts ``lhs - rhs`` of all candidates whose
amount exceeds ``min_amount``, with their witnesses.  Cut objects are
built lazily, since a single round on a mid-size graph can see 10^5
violated triangles of which only ``2n`` are kept.

In stable-set cuts ``x_i`` is written as the diagonal entry ``Y[i, i]``;
the model pins it to ``Y[0, i]``.

Witness layouts (0-based vertices):

==============================  =========================================
nonneg                          ``(i, j)``
tri_stab_a                      ``(i, j, k)``, ``i < j``, ``k`` distinguished
tri_stab_b                      ``(i, j, k)`` sorted
tri_col                         ``(i, j, k)``, ``j`` middle, ``i < k``
clique_vertex(_col)             ``(Q, k)``
clique_join                     ``(Q, Q')`` with ``Q < Q'``
c5_pairsum_stab / _col          canonical cycle tuple
oddcycle_vertex_*               ``(C, k)``
==============================  =========================================
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .graph import Cycle, Graph
from .model import Cut, Family, functional

PAD = -1
JOIN_PAIR_LIMIT = 1_000_000


@dataclass
class Violation:
    cut: Cut
    amount: float


class ViolationSet:
    """Violations of one family as parallel arrays.

    ``keys`` is an integer matrix whose rows order the witnesses
    lexicographically (shorter tuples padded with -1).
    """

    def __init__(self, family: Family, amounts: np.ndarray, keys: np.ndarray, build):
        self.family = family
        self.amounts = np.asarray(amounts, dtype=float)
        keys = np.asarray(keys, dtype=np.int64)
        self.keys = keys.reshape(len(self.amounts), -1) if keys.size else keys.reshape(0, max(1, keys.shape[-1]))
        self._build = build

    def __len__(self) -> int:
        return len(self.amounts)

    def cut(self, idx: int) -> Cut:
        return self._build(self.keys[idx])

    def __getitem__(self, idx: int) -> Violation:
        return Violation(self.cut(idx), float(self.amounts[idx]))

    def __iter__(self) -> Iterator[Violation]:
        for i in range(len(self)):
            yield self[i]

    def count_above(self, threshold: float) -> int:
        return int(np.count_nonzero(self.amounts > threshold))

    def order(self) -> np.ndarray:
        """Indices by decreasing amount, ties by witness order."""
        cols = [self.keys[:, c] for c in range(self.keys.shape[1] - 1, -1, -1)]
        return np.lexsort(cols + [-self.amounts])

    @classmethod
    def empty(cls, family: Family) -> ViolationSet:
        return cls(family, np.empty(0), np.empty((0, 1), dtype=np.int64), None)


def _ix(i: int, j: int) -> tuple[int, int]:
    """Matrix position of X[i, j] inside Y."""
    a, b = i + 1, j + 1
    return (a, b) if a <= b else (b, a)


def _strip(row) -> tuple[int, ...]:
    return tuple(int(v) for v in row if v != PAD)


def _split_pairs(n: int):
    I, J = np.triu_indices(n, 1)
    return I, J


def _X(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = Y[1:, 1:]
    return X, np.diag(X).copy()


# -- Phase 1 families ---------------------------------------------------------------

def _nonneg_cut(key) -> Cut:
    i, j = int(key[0]), int(key[1])
    return Cut({_ix(i, j): -1.0}, 0.0, Family.NONNEG, (i, j))


def sep_nonneg(Y: np.ndarray, g: Graph, min_amount: float = 0.0) -> ViolationSet:
    """``X[i, j] >= 0`` on non-edges, stored as ``-X[i, j] <= 0``."""
    X, _ = _X(Y)
    I, J = _split_pairs(g.n)
    keep = ~g.adjacency[I, J]
    I, J = I[keep], J[keep]
    amt = -X[I, J]
    hit = amt > min_amount
    return ViolationSet(Family.NONNEG, amt[hit], np.stack([I[hit], J[hit]], axis=1), _nonneg_cut)


def _tri_a_cut(key) -> Cut:
    i, j, k = (int(v) for v in key)
    coeffs = functional([(*_ix(i, k), 1.0), (*_ix(j, k), 1.0), (*_ix(i, j), -1.0), (k + 1, k + 1, -1.0)])
    return Cut(coeffs, 0.0, Family.TRI_STAB_A, (i, j, k))


def _tri_b_cut(key) -> Cut:
    i, j, k = (int(v) for v in key)
    coeffs = functional([(i + 1, i + 1, 1.0), (j + 1, j + 1, 1.0), (k + 1, k + 1, 1.0),
                         (*_ix(i, j), -1.0), (*_ix(i, k), -1.0), (*_ix(j, k), -1.0)])
    return Cut(coeffs, 1.0, Family.TRI_STAB_B, (i, j, k))


def _tri_col_cut(key) -> Cut:
    i, j, k = (int(v) for v in key)
    coeffs = functional([(*_ix(i, j), 1.0), (*_ix(j, k), 1.0), (*_ix(i, k), -1.0)])
    return Cut(coeffs, 1.0, Family.TRI_COL, (i, j, k))


def _pair_by_vertex(n: int, X: np.ndarray):
    """Rows (i, j), i < j, against all third vertices k, with k in {i, j} flagged."""
    I, J = _split_pairs(n)
    own = np.zeros((len(I), n), dtype=bool)
    rows = np.arange(len(I))
    own[rows, I] = True
    own[rows, J] = True
    return I, J, own


def _chunks(total: int, width: int, budget: int = 4_000_000):
    step = max(1, budget // max(1, width))
    for start in range(0, total, step):
        yield slice(start, min(total, start + step))


def sep_triangle_stable(Y: np.ndarray, g: Graph, min_amount: float = 0.0) -> tuple[ViolationSet, ViolationSet]:
    """Both triangle families.

    a: ``X[i,k] + X[j,k] - X[i,j] - x_k <= 0`` for pairs {i, j} and k outside;
    b: ``x_i + x_j + x_k - X[i,j] - X[i,k] - X[j,k] <= 1`` for triples.
    """
    n = g.n
    X, x = _X(Y)
    I, J = _split_pairs(n)
    ka, aa, kb, ab = [], [], [], []
    ks = np.arange(n)
    for sl in _chunks(len(I), n):
        i, j = I[sl], J[sl]
        Xij = X[i, j][:, None]
        # a
        T = X[i, :] + X[j, :] - Xij - x[None, :]
        T[np.arange(len(i)), i] = -np.inf
        T[np.arange(len(i)), j] = -np.inf
        r, k = np.nonzero(T > min_amount)
        ka.append(np.stack([i[r], j[r], k], axis=1))
        aa.append(T[r, k])
        # b: k > j only
        S = (x[i] + x[j])[:, None] + x[None, :] - Xij - X[i, :] - X[j, :] - 1.0
        S[ks[None, :] <= j[:, None]] = -np.inf
        r, k = np.nonzero(S > min_amount)
        kb.append(np.stack([i[r], j[r], k], axis=1))
        ab.append(S[r, k])
    va = ViolationSet(Family.TRI_STAB_A, _cat(aa), _cat(ka, 3), _tri_a_cut)
    vb = ViolationSet(Family.TRI_STAB_B, _cat(ab), _cat(kb, 3), _tri_b_cut)
    return va, vb


def sep_triangle_coloring(Y: np.ndarray, g: Graph, min_amount: float = 0.0) -> ViolationSet:
    """``X[i,j] + X[j,k] - X[i,k] <= 1`` with middle vertex j."""
    n = g.n
    X, _ = _X(Y)
    I, K = _split_pairs(n)
    keys, amts = [], []
    for sl in _chunks(len(I), n):
        i, k = I[sl], K[sl]
        T = X[i, :] + X[k, :] - X[i, k][:, None] - 1.0
        T[np.arange(len(i)), i] = -np.inf
        T[np.arange(len(i)), k] = -np.inf
        r, j = np.nonzero(T > min_amount)
        keys.append(np.stack([i[r], j, k[r]], axis=1))
        amts.append(T[r, j])
    return ViolationSet(Family.TRI_COL, _cat(amts), _cat(keys, 3), _tri_col_cut)


def _cat(parts, width: int = 1) -> np.ndarray:
    parts = [p for p in parts if len(p)]
    if not parts:
        return np.empty((0, width)) if width > 1 else np.empty(0)
    return np.concatenate(parts)


# -- clique families --------------------------------------------------------------

def _padded(sets: Sequence[Sequence[int]], width: int = 5) -> np.ndarray:
    out = np.full((len(sets), width), PAD, dtype=np.int64)
    for r, s in enumerate(sets):
        out[r, :len(s)] = s
    return out


def _incidence(sets: Sequence[Sequence[int]], n: int) -> np.ndarray:
    B = np.zeros((len(sets), n))
    for r, s in enumerate(sets):
        B[r, list(s)] = 1.0
    return B


def _clique_vertex_cut(key) -> Cut:
    Q, k = _strip(key[:5]), int(key[5])
    coeffs = functional([(*_ix(i, k), 1.0) for i in Q] + [(k + 1, k + 1, -1.0)])
    return Cut(coeffs, 0.0, Family.CLIQUE_VERTEX, (Q, k))


def _clique_vertex_col_cut(key) -> Cut:
    Q, k = _strip(key[:5]), int(key[5])
    coeffs = functional([(*_ix(i, k), 1.0) for i in Q])
    return Cut(coeffs, 1.0, Family.CLIQUE_VERTEX_COL, (Q, k))


def _set_vertex(Y, g, sets, min_amount, amount_fn, family, build) -> ViolationSet:
    if not len(sets):
        return ViolationSet.empty(family)
    X, x = _X(Y)
    B = _incidence(sets, g.n)
    R = B @ X
    A = amount_fn(R, x, B)
    A[B > 0] = -np.inf
    r, k = np.nonzero(A > min_amount)
    keys = np.concatenate([_padded(sets)[r], k[:, None]], axis=1)
    return ViolationSet(family, A[r, k], keys, build)


def sep_clique_vertex(Y: np.ndarray, g: Graph, cliques, min_amount: float = 0.0) -> ViolationSet:
    """``sum_{i in Q} X[i,k] <= X[k,k]`` for k outside Q."""
    return _set_vertex(Y, g, cliques, min_amount, lambda R, x, B: R - x[None, :],
                       Family.CLIQUE_VERTEX, _clique_vertex_cut)


def sep_clique_vertex_coloring(Y: np.ndarray, g: Graph, cliques, min_amount: float = 0.0) -> ViolationSet:
    """``sum_{i in Q} X[i,k] <= 1`` for k outside Q."""
    return _set_vertex(Y, g, cliques, min_amount, lambda R, x, B: R - 1.0,
                       Family.CLIQUE_VERTEX_COL, _clique_vertex_col_cut)


def _clique_join_cut(key) -> Cut:
    Q, Qp = _strip(key[:5]), _strip(key[5:])
    terms = [(i + 1, i + 1, 1.0) for i in Q + Qp]
    terms += [(*_ix(i, j), -1.0) for i in Q for j in Qp]
    return Cut(functional(terms), 1.0, Family.CLIQUE_JOIN, (Q, Qp))


def clique_join_pairs(cliques, max_total: int = 6, limit: int = JOIN_PAIR_LIMIT,
                      seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (a, b), a < b, of disjoint cliques with |Q| + |Q'| <= max_total.

    When more than ``limit`` size-compatible pairs exist, ``limit`` of them
    are drawn uniformly (seeded) and the non-disjoint draws discarded.
    """
    nq = len(cliques)
    if nq < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    sizes = np.array([len(q) for q in cliques])
    masks = np.array([sum(1 << v for v in q) for q in cliques], dtype=object)
    by_size = {s: np.flatnonzero(sizes == s) for s in np.unique(sizes)}
    compatible = 0
    for s1, idx1 in by_size.items():
        for s2, idx2 in by_size.items():
            if s1 + s2 <= max_total:
                compatible += len(idx1) * len(idx2) - (len(idx1) if s1 == s2 else 0)
    compatible //= 2
    if compatible <= limit:
        A, Bs = [], []
        pad = _padded(cliques)
        for a in range(nq - 1):
            b = np.arange(a + 1, nq)
            b = b[sizes[b] + sizes[a] <= max_total]
            if not len(b):
                continue
            overlap = np.isin(pad[b], pad[a][pad[a] != PAD]).any(axis=1)
            b = b[~overlap]
            A.append(np.full(len(b), a))
            Bs.append(b)
        if not A:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        return np.concatenate(A).astype(np.int64), np.concatenate(Bs).astype(np.int64)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, nq, size=limit)
    b = rng.integers(0, nq, size=limit)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    ok = (lo != hi) & (sizes[lo] + sizes[hi] <= max_total)
    lo, hi = lo[ok], hi[ok]
    disjoint = np.array([(masks[u] & masks[v]) == 0 for u, v in zip(lo, hi)], dtype=bool)
    lo, hi = lo[disjoint], hi[disjoint]
    uniq = np.unique(np.stack([lo, hi], axis=1), axis=0)
    return uniq[:, 0], uniq[:, 1]


def sep_clique_join(Y: np.ndarray, g: Graph, cliques, min_amount: float = 0.0,
                    pairs: tuple[np.ndarray, np.ndarray] | None = None, seed: int = 0) -> ViolationSet:
    """``sum_{Q u Q'} x_i <= 1 + sum_{i in Q, j in Q'} X[i,j]`` for disjoint Q, Q'."""
    if pairs is None:
        pairs = clique_join_pairs(cliques, seed=seed)
    a, b = pairs
    if not len(a):
        return ViolationSet.empty(Family.CLIQUE_JOIN)
    X, x = _X(Y)
    B = _incidence(cliques, g.n)
    R = B @ X
    d = B @ x
    amt = np.empty(len(a))
    for sl in _chunks(len(a), 1, 2_000_000):
        cross = np.einsum("ij,ij->i", R[a[sl]], B[b[sl]])
        amt[sl] = d[a[sl]] + d[b[sl]] - cross - 1.0
    hit = amt > min_amount
    pad = _padded(cliques)
    keys = np.concatenate([pad[a[hit]], pad[b[hit]]], axis=1)
    return ViolationSet(Family.CLIQUE_JOIN, amt[hit], keys, _clique_join_cut)


# -- cycle families -----------------------------------------------------------------

def _cycle_tuples(cycles) -> list[tuple[int, ...]]:
    return [c.vertices if isinstance(c, Cycle) else tuple(c) for c in cycles]


def _pairsum_cut(family: Family, rhs: float):
    def build(key) -> Cut:
        C = _strip(key)
        coeffs = functional([(*_ix(i, j), 1.0) for i, j in combinations(sorted(C), 2)])
        return Cut(coeffs, rhs, family, C)
    return build


def _pairsum(Y, g, cycles, min_amount, family, rhs) -> ViolationSet:
    cyc = _cycle_tuples(cycles)
    if not cyc:
        return ViolationSet.empty(family)
    X, _ = _X(Y)
    idx = np.array([sorted(c) for c in cyc])
    L = idx.shape[1]
    total = np.zeros(len(idx))
    for p, q in combinations(range(L), 2):
        total += X[idx[:, p], idx[:, q]]
    amt = total - rhs
    hit = amt > min_amount
    keys = _padded([cyc[i] for i in np.flatnonzero(hit)], width=L)
    return ViolationSet(family, amt[hit], keys, _pairsum_cut(family, rhs))


def sep_c5_pairsum_stable(Y: np.ndarray, g: Graph, cycles, min_amount: float = 0.0) -> ViolationSet:
    """``sum_{i<j in V(C)} X[i,j] <= 1`` for 5-cycles C."""
    return _pairsum(Y, g, cycles, min_amount, Family.C5_PAIRSUM_STAB, 1.0)


def sep_c5_pairsum_coloring(Y: np.ndarray, g: Graph, cycles, min_amount: float = 0.0) -> ViolationSet:
    """``sum_{i<j in V(C)} X[i,j] <= 2`` for 5-cycles C."""
    return _pairsum(Y, g, cycles, min_amount, Family.C5_PAIRSUM_COL, 2.0)


def _cycle_vertex_build(family: Family):
    def build(key) -> Cut:
        C, k = _strip(key[:-1]), int(key[-1])
        h = (len(C) - 1) / 2
        if family is Family.ODDCYCLE_VERTEX_STAB:
            terms = [(*_ix(i, k), 1.0) for i in C] + [(k + 1, k + 1, -h)]
            rhs = 0.0
        elif family is Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT:
            terms = [(i + 1, i + 1, 1.0) for i in C] + [(k + 1, k + 1, h)]
            terms += [(*_ix(i, k), -1.0) for i in C]
            rhs = h
        else:
            terms = [(*_ix(i, k), 1.0) for i in C]
            rhs = h
        return Cut(functional(terms), rhs, family, (C, k))
    return build


def _cycle_vertex(Y, g, cycles, min_amount, family) -> ViolationSet:
    cyc = _cycle_tuples(cycles)
    if not cyc:
        return ViolationSet.empty(family)
    lengths = {len(c) for c in cyc}
    out = []
    for L in sorted(lengths):
        group = [c for c in cyc if len(c) == L]
        h = (L - 1) / 2
        if family is Family.ODDCYCLE_VERTEX_STAB:
            fn = lambda R, x, B: R - h * x[None, :]  # noqa: E731
        elif family is Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT:
            fn = lambda R, x, B: (B @ x)[:, None] + h * x[None, :] - R - h  # noqa: E731
        else:
            fn = lambda R, x, B: R - h  # noqa: E731
        X, x = _X(Y)
        B = _incidence(group, g.n)
        R = B @ X
        A = fn(R, x, B)
        A[B > 0] = -np.inf
        r, k = np.nonzero(A > min_amount)
        keys = np.concatenate([_padded([group[i] for i in r], width=L), k[:, None]], axis=1)
        out.append(ViolationSet(family, A[r, k], keys, _cycle_vertex_build(family)))
    if len(out) == 1:
        return out[0]
    width = max(v.keys.shape[1] for v in out)
    # shorter cycles are padded on the right; the vertex stays last for the builder
    fixed = []
    for v in out:
        k = v.keys
        C, vert = k[:, :-1], k[:, -1:]
        C = np.pad(C, ((0, 0), (0, width - 1 - C.shape[1])), constant_values=PAD)
        fixed.append(np.concatenate([C, vert], axis=1))
    keys = np.concatenate(fixed)
    return ViolationSet(family, np.concatenate([v.amounts for v in out]), keys, _cycle_vertex_build(family))


def sep_oddcycle_vertex_stable(Y: np.ndarray, g: Graph, cycles,
                               min_amount: float = 0.0) -> tuple[ViolationSet, ViolationSet]:
    """Odd cycle C, vertex k outside, h = (|C| - 1) / 2.

    first:  ``sum_{i in C} X[i,k] <= h X[k,k]``
    second: ``sum_{i in C} X[i,i] + h X[k,k] <= h + sum_{i in C} X[i,k]``
    """
    return (_cycle_vertex(Y, g, cycles, min_amount, Family.ODDCYCLE_VERTEX_STAB),
            _cycle_vertex(Y, g, cycles, min_amount, Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT))


def sep_oddcycle_vertex_coloring(Y: np.ndarray, g: Graph, cycles, min_amount: float = 0.0) -> ViolationSet:
    """``sum_{i in C} X[i,k] <= (|C| - 1) / 2`` for k outside C."""
    return _cycle_vertex(Y, g, cycles, min_amount, Family.ODDCYCLE_VERTEX_COL)


# -- selection ------------------------------------------------------------------------

def select_cuts(violations: dict[Family, ViolationSet] | Sequence[ViolationSet], n: int,
                threshold: float = 0.025, cap_per_family: int | None = None,
                exclude=None) -> list[Cut]:
    """Pick the cuts to add this round.

    Non-negativity violations pass through whole.  Every other family keeps
    amounts above ``threshold``, largest first (ties by witness), at most
    ``cap_per_family`` (default ``2n``).  ``exclude(cut) -> bool`` skips cuts
    already in the pool without spending the cap on them.
    """
    if cap_per_family is None:
        cap_per_family = 2 * n
    sets = violations.values() if isinstance(violations, dict) else violations
    chosen: list[Cut] = []
    for vs in sets:
        if not len(vs):
            continue
        if vs.family is Family.NONNEG:
            for idx in vs.order():
                cut = vs.cut(idx)
                if exclude is None or not exclude(cut):
                    chosen.append(cut)
            continue
        taken = 0
        for idx in vs.order():
            if taken >= cap_per_family or vs.amounts[idx] <= threshold:
                break
            cut = vs.cut(idx)
            if exclude is not None and exclude(cut):
                continue
            chosen.append(cut)
            taken += 1
    return chosen
