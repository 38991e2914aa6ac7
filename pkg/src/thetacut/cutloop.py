"""Two-phase cutting-plane driver producing BOUND 1 and BOUND 2.

Phase 1 separates non-negativity and triangle inequalities, phase 2 the
clique and 5-cycle families.  Each round: separate on the current primal
matrix, stop if fewer than ``stop_below`` (default n) violations were
found in total, else add the selected cuts and re-solve.  The initial
solve is round 0; at most ``max_iters`` further solves happen per phase.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import separation as sep
from .graph import Graph, enumerate_chordless_cycles, enumerate_cliques, DEFAULT_CYCLE_CAP
from .model import Family, Problem, SdpModel, build_model
from .solver import PrimalSolution, SolverConfig, Status, solve

log = logging.getLogger(__name__)

GROUPS = ("nonneg", "tri", "clique", "c5", "oddcycle")

PHASE1 = {
    Problem.STABLE: (Family.NONNEG, Family.TRI_STAB_A, Family.TRI_STAB_B),
    Problem.COLORING: (Family.NONNEG, Family.TRI_COL),
}
PHASE2 = {
    Problem.STABLE: (Family.CLIQUE_VERTEX, Family.CLIQUE_JOIN, Family.C5_PAIRSUM_STAB,
                     Family.ODDCYCLE_VERTEX_STAB, Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT),
    Problem.COLORING: (Family.CLIQUE_VERTEX_COL, Family.C5_PAIRSUM_COL, Family.ODDCYCLE_VERTEX_COL),
}
GROUP_OF = {
    Family.NONNEG: "nonneg",
    Family.TRI_STAB_A: "tri", Family.TRI_STAB_B: "tri", Family.TRI_COL: "tri",
    Family.CLIQUE_VERTEX: "clique", Family.CLIQUE_JOIN: "clique", Family.CLIQUE_VERTEX_COL: "clique",
    Family.C5_PAIRSUM_STAB: "c5", Family.C5_PAIRSUM_COL: "c5",
    Family.ODDCYCLE_VERTEX_STAB: "oddcycle", Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT: "oddcycle",
    Family.ODDCYCLE_VERTEX_COL: "oddcycle",
}


class LoopAbort(RuntimeError):
    def __init__(self, msg: str, report: BoundReport | None = None):
        super().__init__(msg)
        self.report = report


@dataclass
class LoopConfig:
    problem: Problem = Problem.STABLE
    threshold: float = 0.025
    cap_factor: int = 2
    stop_below: int | None = None
    max_iters: int = 10
    solver: SolverConfig = field(default_factory=SolverConfig)
    families: tuple[str, ...] = GROUPS
    seed: int = 0
    cycle_lengths: tuple[int, ...] = (5,)
    cycle_cap: int = DEFAULT_CYCLE_CAP
    maximal_only: bool = False
    nonneg_tol: float = 1e-6
    time_limit: float | None = None
    purge_slack: float | None = None
    integer_tol: float = 1e-5

    def __post_init__(self):
        self.problem = Problem(self.problem)
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        bad = set(self.families) - set(GROUPS)
        if bad:
            raise ValueError(f"unknown families {sorted(bad)}; choose from {GROUPS}")
        for L in self.cycle_lengths:
            if L < 5 or L % 2 == 0:
                raise ValueError("cycle lengths must be odd and >= 5")


@dataclass
class IterationRecord:
    phase: int
    iteration: int
    objective: float
    status: str
    found: dict[str, int]
    added: dict[str, int]
    pool_size: int
    solve_seconds: float
    separation_seconds: float


@dataclass
class BoundReport:
    graph: str
    n: int
    m: int
    problem: str
    theta: float
    bound1: float
    bound2: float
    integer_bound: int
    iterations: list[IterationRecord]
    timings: dict[str, float]
    config: dict
    time_limited: bool = False
    schema_version: int = 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> BoundReport:
        its = [IterationRecord(**r) for r in data.get("iterations", [])]
        return cls(**{**data, "iterations": its})

    def objectives(self, phase: int | None = None) -> list[float]:
        return [r.objective for r in self.iterations if phase is None or r.phase == phase]


def integer_bound(value: float, problem: Problem | str, tol: float = 1e-5) -> int:
    """floor for an upper bound on alpha, ceil for a lower bound on chi."""
    if Problem(problem) is Problem.STABLE:
        return int(math.floor(value + tol))
    return int(math.ceil(value - tol))


class _Candidates:
    """Graph structures feeding phase 2, built on first use."""

    def __init__(self, g: Graph, cfg: LoopConfig):
        self.g = g
        self.cfg = cfg
        self._cliques = None
        self._cycles = {}
        self._pairs = None

    @property
    def cliques(self):
        if self._cliques is None:
            self._cliques = enumerate_cliques(self.g, 5, 2, maximal_only=self.cfg.maximal_only)
        return self._cliques

    def cycles(self, length: int):
        if length not in self._cycles:
            self._cycles[length] = enumerate_chordless_cycles(self.g, length, self.cfg.cycle_cap)
        return self._cycles[length]

    @property
    def odd_cycles(self):
        out = []
        for L in self.cfg.cycle_lengths:
            out.extend(self.cycles(L))
        return out

    @property
    def join_pairs(self):
        if self._pairs is None:
            self._pairs = sep.clique_join_pairs(self.cliques, seed=self.cfg.seed)
        return self._pairs


def separate(Y: np.ndarray, g: Graph, families, cand: _Candidates, threshold: float,
             nonneg_tol: float) -> dict[Family, sep.ViolationSet]:
    """Run the oracles for ``families``; amounts are filtered at the threshold."""
    fams = set(families)
    out: dict[Family, sep.ViolationSet] = {}
    if Family.NONNEG in fams:
        out[Family.NONNEG] = sep.sep_nonneg(Y, g, nonneg_tol)
    if fams & {Family.TRI_STAB_A, Family.TRI_STAB_B}:
        a, b = sep.sep_triangle_stable(Y, g, threshold)
        if Family.TRI_STAB_A in fams:
            out[Family.TRI_STAB_A] = a
        if Family.TRI_STAB_B in fams:
            out[Family.TRI_STAB_B] = b
    if Family.TRI_COL in fams:
        out[Family.TRI_COL] = sep.sep_triangle_coloring(Y, g, threshold)
    if Family.CLIQUE_VERTEX in fams:
        out[Family.CLIQUE_VERTEX] = sep.sep_clique_vertex(Y, g, cand.cliques, threshold)
    if Family.CLIQUE_JOIN in fams:
        out[Family.CLIQUE_JOIN] = sep.sep_clique_join(Y, g, cand.cliques, threshold, pairs=cand.join_pairs)
    if Family.CLIQUE_VERTEX_COL in fams:
        out[Family.CLIQUE_VERTEX_COL] = sep.sep_clique_vertex_coloring(Y, g, cand.cliques, threshold)
    if Family.C5_PAIRSUM_STAB in fams:
        out[Family.C5_PAIRSUM_STAB] = sep.sep_c5_pairsum_stable(Y, g, cand.cycles(5), threshold)
    if Family.C5_PAIRSUM_COL in fams:
        out[Family.C5_PAIRSUM_COL] = sep.sep_c5_pairsum_coloring(Y, g, cand.cycles(5), threshold)
    if fams & {Family.ODDCYCLE_VERTEX_STAB, Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT}:
        a, b = sep.sep_oddcycle_vertex_stable(Y, g, cand.odd_cycles, threshold)
        if Family.ODDCYCLE_VERTEX_STAB in fams:
            out[Family.ODDCYCLE_VERTEX_STAB] = a
        if Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT in fams:
            out[Family.ODDCYCLE_VERTEX_STAB_COMPLEMENT] = b
    if Family.ODDCYCLE_VERTEX_COL in fams:
        out[Family.ODDCYCLE_VERTEX_COL] = sep.sep_oddcycle_vertex_coloring(Y, g, cand.odd_cycles, threshold)
    return out


class CutLoop:
    """Holds the growing model and trace for one (graph, problem) run."""

    def __init__(self, g: Graph, cfg: LoopConfig | None = None, on_cuts=None):
        self.g = g
        self.cfg = cfg or LoopConfig()
        self.cand = _Candidates(g, self.cfg)
        self.on_cuts = on_cuts
        self.model = build_model(g, self.cfg.problem)
        self.records: list[IterationRecord] = []
        self.solution: PrimalSolution | None = None
        self.time_limited = False
        self._deadline = None

    def _families(self, phase: int):
        table = PHASE1 if phase == 1 else PHASE2
        return tuple(f for f in table[self.cfg.problem] if GROUP_OF[f] in self.cfg.families)

    def _solve(self, phase: int, iteration: int, found, added, sep_seconds) -> PrimalSolution:
        sol = solve(self.model, self.cfg.solver)
        rec = IterationRecord(phase, iteration, sol.objective, sol.status.value,
                              {f.value: n for f, n in found.items()},
                              {f.value: n for f, n in added.items()},
                              len(self.model.cuts), sol.seconds, sep_seconds)
        self.records.append(rec)
        log.info("%s %s phase %d it %d: obj %.6f pool %d (%s) %.2fs",
                 self.g.name or "graph", self.cfg.problem.value, phase, iteration, sol.objective,
                 len(self.model.cuts), sol.status.value, sol.seconds)
        if sol.status is Status.NEAR_OPTIMAL:
            log.warning("accepting near-optimal solve at phase %d iteration %d", phase, iteration)
        elif not sol.usable:
            raise LoopAbort(f"solver returned {sol.status.value} at phase {phase} iteration {iteration}")
        self.solution = sol
        return sol

    def _out_of_time(self) -> bool:
        if self._deadline is not None and time.perf_counter() > self._deadline:
            self.time_limited = True
            return True
        return False

    def initial(self) -> PrimalSolution:
        return self._solve(1, 0, {}, {}, 0.0)

    def run_phase(self, phase: int) -> PrimalSolution:
        cfg = self.cfg
        n = self.g.n
        stop_below = n if cfg.stop_below is None else cfg.stop_below
        fams = self._families(phase)
        self._deadline = None if cfg.time_limit is None else time.perf_counter() + cfg.time_limit
        if self.solution is None:
            self.initial()
        if not fams:
            return self.solution
        for it in range(1, cfg.max_iters + 1):
            if self._out_of_time():
                log.warning("phase %d time limit reached after %d rounds", phase, it - 1)
                break
            t0 = time.perf_counter()
            viol = separate(self.solution.Y, self.g, fams, self.cand, cfg.threshold, cfg.nonneg_tol)
            found = {f: len(v) for f, v in viol.items()}
            total = sum(found.values())
            if total < stop_below:
                break
            cuts = sep.select_cuts(viol, n, cfg.threshold, cfg.cap_factor * n, exclude=self.model.has_cut)
            sep_seconds = time.perf_counter() - t0
            if not cuts:
                break
            if self.on_cuts is not None:
                self.on_cuts(cuts)
            if cfg.purge_slack is not None:
                self._purge()
            self.model.add_cuts(cuts, iteration=it)
            added: dict[Family, int] = {}
            for c in cuts:
                added[c.family] = added.get(c.family, 0) + 1
            self._solve(phase, it, found, added, sep_seconds)
        return self.solution

    def _purge(self) -> None:
        # off by default; drops pooled cuts whose slack at the last solve exceeds the limit
        slacks = self.solution.cut_slacks
        if slacks is None or len(slacks) != len(self.model.cuts):
            return
        loose = {id(c) for c, s in zip(self.model.cuts, slacks) if s > self.cfg.purge_slack}
        if loose:
            self.model.purge(lambda c: id(c) not in loose)


def run_phase1(g: Graph, cfg: LoopConfig | None = None) -> CutLoop:
    loop = CutLoop(g, cfg)
    loop.run_phase(1)
    return loop


def run_phase2(loop: CutLoop) -> CutLoop:
    if not loop.records:
        raise ValueError("phase 1 has not been run")
    loop.run_phase(2)
    return loop


def compute_bounds(g: Graph, cfg: LoopConfig | None = None, on_cuts=None) -> BoundReport:
    """theta, BOUND 1 and BOUND 2 for ``g`` under ``cfg``."""
    cfg = cfg or LoopConfig()
    loop = CutLoop(g, cfg, on_cuts=on_cuts)
    t0 = time.perf_counter()
    timings = {}
    try:
        sol = loop.initial()
        theta = sol.objective
        timings["theta"] = time.perf_counter() - t0
        t1 = time.perf_counter()
        b1 = loop.run_phase(1).objective
        timings["bound1"] = time.perf_counter() - t1
        t2 = time.perf_counter()
        b2 = loop.run_phase(2).objective
        timings["bound2"] = time.perf_counter() - t2
    except LoopAbort as exc:
        exc.report = _report(g, cfg, loop, float("nan"), float("nan"), float("nan"), timings)
        raise
    timings["total"] = time.perf_counter() - t0
    return _report(g, cfg, loop, theta, b1, b2, timings)


def _report(g, cfg, loop, theta, b1, b2, timings) -> BoundReport:
    conf = {
        "threshold": cfg.threshold, "cap_factor": cfg.cap_factor, "stop_below": cfg.stop_below,
        "max_iters": cfg.max_iters, "families": list(cfg.families), "seed": cfg.seed,
        "cycle_lengths": list(cfg.cycle_lengths), "maximal_only": cfg.maximal_only,
        "nonneg_tol": cfg.nonneg_tol, "feastol": cfg.solver.feastol, "gaptol": cfg.solver.gaptol,
        "time_limit": cfg.time_limit, "purge_slack": cfg.purge_slack,
    }
    ib = integer_bound(b2, cfg.problem, cfg.integer_tol) if math.isfinite(b2) else -1
    return BoundReport(g.name, g.n, g.m, cfg.problem.value, theta, b1, b2, ib,
                       list(loop.records), timings, conf, loop.time_limited)
