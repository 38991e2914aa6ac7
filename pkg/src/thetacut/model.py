"""Bordered SDP relaxations for stable set and coloring, plus their cut pools.

The matrix variable is ``Y = [[Y00, y^T], [y, X]]`` of order ``n + 1``;
graph vertex ``v`` (0-based) lives at row/column ``v + 1``.

A linear functional over ``Y`` is a dict ``{(r, c): coef}`` with ``r <= c``;
an off-diagonal key contributes ``coef * Y[r, c]`` once (not twice).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .graph import Graph


class Problem(str, Enum):
    STABLE = "stable"
    COLORING = "coloring"


class Family(str, Enum):
    NONNEG = "nonneg"
    TRI_STAB_A = "tri_stab_a"
    TRI_STAB_B = "tri_stab_b"
    TRI_COL = "tri_col"
    CLIQUE_VERTEX = "clique_vertex"
    CLIQUE_JOIN = "clique_join"
    C5_PAIRSUM_STAB = "c5_pairsum_stab"
    ODDCYCLE_VERTEX_STAB = "oddcycle_vertex_stab"
    ODDCYCLE_VERTEX_STAB_COMPLEMENT = "oddcycle_vertex_stab_complement"
    CLIQUE_VERTEX_COL = "clique_vertex_col"
    C5_PAIRSUM_COL = "c5_pairsum_col"
    ODDCYCLE_VERTEX_COL = "oddcycle_vertex_col"


STABLE_FAMILIES = frozenset({
    Family.NONNEG, Family.TRI_STAB_A, Family.TRI_STAB_B, Family.CLIQUE_VERTEX,
    Family.CLIQUE_JOIN, Family.C5_PAIRSUM_STAB, Family.ODDCYCLE_VERTEX_STAB,
    Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT,
})
COLORING_FAMILIES = frozenset({
    Family.NONNEG, Family.TRI_COL, Family.CLIQUE_VERTEX_COL,
    Family.C5_PAIRSUM_COL, Family.ODDCYCLE_VERTEX_COL,
})


class ModelError(ValueError):
    pass


@dataclass
class Cut:
    """``sum coeffs[r, c] * Y[r, c] <= rhs``.

    ``witness`` is the generating structure in 0-based vertex labels; its
    layout depends on the family (see ``separation``).
    """

    coeffs: dict[tuple[int, int], float]
    rhs: float
    family: Family
    witness: tuple
    birth_iteration: int = 0

    @property
    def key(self) -> tuple:
        return (self.family.value, self.witness)

    def lhs(self, Y: np.ndarray) -> float:
        return float(sum(c * Y[r, s] for (r, s), c in self.coeffs.items()))

    def violation(self, Y: np.ndarray) -> float:
        return self.lhs(Y) - self.rhs


def functional(terms) -> dict[tuple[int, int], float]:
    """Accumulate ``(r, c, coef)`` triples into a canonical coefficient dict."""
    out: dict[tuple[int, int], float] = {}
    for r, c, v in terms:
        key = (r, c) if r <= c else (c, r)
        out[key] = out.get(key, 0.0) + v
    return {k: v for k, v in out.items() if v != 0.0}


@dataclass
class SdpModel:
    """Primal data of one relaxation.

    ``objective`` is maximised when ``sense == "max"``.  ``equalities`` hold
    the structural rows; ``cuts`` is the append-only inequality pool.
    """

    graph: Graph
    problem: Problem
    sense: str
    objective: dict[tuple[int, int], float]
    equalities: list[tuple[dict[tuple[int, int], float], float]]
    tags: list[str]
    cuts: list[Cut] = field(default_factory=list)
    duplicates_skipped: int = 0
    _keys: set = field(default_factory=set, repr=False)

    @property
    def dim(self) -> int:
        return self.graph.n + 1

    @property
    def n(self) -> int:
        return self.graph.n

    def objective_value(self, Y: np.ndarray) -> float:
        return float(sum(c * Y[r, s] for (r, s), c in self.objective.items()))

    def has_cut(self, cut: Cut) -> bool:
        return cut.key in self._keys

    def copy(self) -> SdpModel:
        return SdpModel(self.graph, self.problem, self.sense, self.objective,
                        self.equalities, self.tags, list(self.cuts),
                        self.duplicates_skipped, set(self._keys))

    def add_cuts(self, cuts, iteration: int | None = None) -> int:
        """Append cuts not already in the pool; return how many were added."""
        added = 0
        dim = self.dim
        for cut in cuts:
            if not cut.coeffs:
                raise ModelError(f"cut {cut.key} has no coefficients")
            for r, c in cut.coeffs:
                if not (0 <= r <= c < dim):
                    raise ModelError(f"cut {cut.key} references entry ({r},{c}) outside order {dim}")
            if cut.key in self._keys:
                self.duplicates_skipped += 1
                continue
            if iteration is not None:
                cut.birth_iteration = iteration
            self._keys.add(cut.key)
            self.cuts.append(cut)
            added += 1
        return added

    def purge(self, keep) -> int:
        """Drop cuts for which ``keep(cut)`` is false.  Returns the number removed."""
        before = len(self.cuts)
        self.cuts = [c for c in self.cuts if keep(c)]
        self._keys = {c.key for c in self.cuts}
        return before - len(self.cuts)

    def equality_residual(self, Y: np.ndarray) -> float:
        worst = 0.0
        for coeffs, rhs in self.equalities:
            val = sum(c * Y[r, s] for (r, s), c in coeffs.items())
            worst = max(worst, abs(val - rhs))
        return worst

    def cut_violation(self, Y: np.ndarray) -> float:
        return max((c.violation(Y) for c in self.cuts), default=0.0)

    def dump(self) -> str:
        """Sparse text dump: one row per constraint, entries as ``r c coef``."""
        out = io.StringIO()
        out.write(f"# thetacut model problem={self.problem.value} sense={self.sense} dim={self.dim}\n")
        out.write("obj " + _fmt(self.objective) + "\n")
        for (coeffs, rhs), tag in zip(self.equalities, self.tags):
            out.write(f"eq {rhs!r} {tag} " + _fmt(coeffs) + "\n")
        for cut in self.cuts:
            out.write(f"le {cut.rhs!r} {cut.family.value} " + _fmt(cut.coeffs) + "\n")
        return out.getvalue()


def _fmt(coeffs) -> str:
    return " ".join(f"{r} {c} {v!r}" for (r, c), v in sorted(coeffs.items()))


def build_theta_stable(g: Graph) -> SdpModel:
    """max sum_i Y[0,i]  s.t.  Y00 = 1, Y[0,i] = Y[i,i], Y[i,j] = 0 on edges, Y psd."""
    n = g.n
    objective = {(0, i + 1): 1.0 for i in range(n)}
    eqs = [({(0, 0): 1.0}, 1.0)]
    tags = ["corner"]
    for i in range(1, n + 1):
        eqs.append(({(0, i): 1.0, (i, i): -1.0}, 0.0))
        tags.append("link")
    for i, j in g.edges:
        eqs.append(({(i + 1, j + 1): 1.0}, 0.0))
        tags.append("edge")
    return SdpModel(g, Problem.STABLE, "max", objective, eqs, tags)


def build_theta_coloring(g: Graph) -> SdpModel:
    """min Y00  s.t.  Y[0,i] = 1, Y[i,i] = 1, Y[i,j] = 0 on edges, Y psd."""
    n = g.n
    eqs = []
    tags = []
    for i in range(1, n + 1):
        eqs.append(({(0, i): 1.0}, 1.0))
        tags.append("border")
    for i in range(1, n + 1):
        eqs.append(({(i, i): 1.0}, 1.0))
        tags.append("diag")
    for i, j in g.edges:
        eqs.append(({(i + 1, j + 1): 1.0}, 0.0))
        tags.append("edge")
    return SdpModel(g, Problem.COLORING, "min", {(0, 0): 1.0}, eqs, tags)


def build_model(g: Graph, problem: Problem | str) -> SdpModel:
    problem = Problem(problem)
    return build_theta_stable(g) if problem is Problem.STABLE else build_theta_coloring(g)


def add_cuts(model: SdpModel, cuts) -> SdpModel:
    """Functional form: a new model with ``cuts`` appended (duplicates skipped)."""
    out = model.copy()
    out.add_cuts(cuts)
    return out


def bordered_stable(s: np.ndarray) -> np.ndarray:
    """``(1, s)(1, s)^T`` for an incidence vector ``s``."""
    v = np.concatenate(([1.0], np.asarray(s, dtype=float)))
    return np.outer(v, v)


def bordered_coloring(X: np.ndarray, t: float) -> np.ndarray:
    n = X.shape[0]
    Y = np.empty((n + 1, n + 1))
    Y[0, 0] = t
    Y[0, 1:] = 1.0
    Y[1:, 0] = 1.0
    Y[1:, 1:] = X
    return Y
