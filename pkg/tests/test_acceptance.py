"""Acceptance gate.

Each test prints one ``ACCEPTANCE <k> PASS|FAIL`` line (visible with or
without ``-s``) and then asserts.  Criteria 4 and 5 take minutes.
"""

import math
from functools import lru_cache

import numpy as np
import pytest

import oracles
from conftest import counterexample
from thetacut import cutloop
from thetacut.cutloop import LoopConfig, compute_bounds
from thetacut.exact import ValidityChecker, exact_alpha, exact_chi
from thetacut.generators import (
    gen_cycle,
    gen_erdos_renyi,
    gen_mycielski,
    gen_petersen,
    gen_queen,
    gen_torus,
)
from thetacut.graph import enumerate_chordless_cycles, enumerate_cliques, is_clique
from thetacut.model import Problem, SdpModel, build_theta_coloring, build_theta_stable
from thetacut.separation import (
    sep_c5_pairsum_coloring,
    sep_c5_pairsum_stable,
    sep_clique_join,
    sep_clique_vertex,
    sep_clique_vertex_coloring,
    sep_nonneg,
    sep_oddcycle_vertex_coloring,
    sep_oddcycle_vertex_stable,
    sep_triangle_coloring,
    sep_triangle_stable,
)
from thetacut.solver import certify, min_eigenvalue, solve, theta


def verdict(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {k:>2} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@lru_cache(maxsize=None)
def bounds(kind, arg, problem):
    g = {"torus": gen_torus, "queen": gen_queen, "mycielski": gen_mycielski}[kind](arg)
    return compute_bounds(g, LoopConfig(problem=Problem(problem)))


# -- 1 ------------------------------------------------------------------------------------

def test_theta_values(capsys):
    cases = [
        (gen_torus(5), "stable", 11.180, 0.01), (gen_torus(7), "stable", 23.224, 0.01),
        (gen_torus(9), "stable", 39.241, 0.01),
        (gen_mycielski(3), "coloring", 2.639, 0.01), (gen_mycielski(4), "coloring", 2.734, 0.01),
        (gen_queen(8), "coloring", 8.0, 0.005), (gen_queen(9), "coloring", 9.0, 0.005),
        (gen_queen(10), "coloring", 10.0, 0.005),
    ]
    got = [(g.name, theta(g, p), want, tol) for g, p, want, tol in cases]
    bad = [(name, round(v, 4), want) for name, v, want, tol in got if abs(v - want) > tol]
    detail = ", ".join(f"{name} {v:.4f}" for name, v, _, _ in got)
    verdict(capsys, 1, not bad, f"theta: {detail}" + (f"; off: {bad}" if bad else ""))


# -- 2 ------------------------------------------------------------------------------------

def test_odd_cycle_closed_form(capsys):
    errs = {}
    for n in (5, 7, 9, 11):
        c = math.cos(math.pi / n)
        errs[n] = abs(theta(gen_cycle(n), "stable") - n * c / (1 + c))
    worst = max(errs.values())
    verdict(capsys, 2, worst <= 1e-4, f"max |theta(C_n) - closed form| = {worst:.2e} over n = 5, 7, 9, 11")


# -- 3 ------------------------------------------------------------------------------------

def test_torus_bound1(capsys):
    want = {5: 10.0, 7: 21.0, 9: 36.0}
    lines, ok = [], True
    for d, b1 in want.items():
        r = bounds("torus", d, "stable")
        alpha = exact_alpha(gen_torus(d), guard=d * d)
        good = abs(r.bound1 - b1) <= 0.01 and r.integer_bound == alpha
        ok &= good
        lines.append(f"torus{d} B1 {r.bound1:.4f} int {r.integer_bound} alpha {alpha}")
    verdict(capsys, 3, ok, "; ".join(lines))


# -- 4 ------------------------------------------------------------------------------------

TORUS13_CAP = 1800.0


@pytest.mark.slow
def test_bound2_improves_on_torus(capsys):
    # torus(13) first; the torus(11) check only applies when it overruns the cap
    r = compute_bounds(gen_torus(13), LoopConfig(time_limit=TORUS13_CAP))
    took = r.timings["total"]
    if not r.time_limited and took <= TORUS13_CAP:
        gap = r.bound1 - r.bound2
        verdict(capsys, 4, r.bound2 <= r.bound1 - 0.2,
                f"torus13 B1 {r.bound1:.4f} B2 {r.bound2:.4f} gap {gap:.4f} (need >= 0.2) ({took:.0f}s)")
        return
    r = compute_bounds(gen_torus(11), LoopConfig())
    gap = r.bound1 - r.bound2
    ok = gap >= 0.0 and r.bound2 <= 55.05
    verdict(capsys, 4, ok, f"torus13 over {TORUS13_CAP:.0f}s ({took:.0f}s); torus11 B1 {r.bound1:.4f} "
                           f"B2 {r.bound2:.4f} gap {gap:.2e}")


# -- 5 ------------------------------------------------------------------------------------

@pytest.mark.slow
def test_mycielski_coloring_bounds(capsys):
    lines, ok = [], True
    for levels in (3, 4):
        r = bounds("mycielski", levels, "coloring")
        b1 = r.bound1
        later = r.objectives(2)
        mono = all(v >= b1 - 1e-6 for v in later)
        obj = r.objectives()
        steps = all(b >= a - 1e-6 for a, b in zip(obj, obj[1:]))
        good = math.ceil(r.bound2 - 1e-6) == 4 and r.integer_bound == 4 and mono and steps
        ok &= good
        lines.append(f"mycielski({levels}) B1 {b1:.4f} B2 {r.bound2:.4f} ceil {r.integer_bound} "
                     f"monotone {mono and steps}")
    verdict(capsys, 5, ok, "; ".join(lines))


# -- 6 ------------------------------------------------------------------------------------

def test_queen8_no_improvement(capsys):
    r = bounds("queen", 8, "coloring")
    ok = abs(r.bound1 - 8.0) <= 1e-3 and abs(r.bound2 - 8.0) <= 1e-3
    verdict(capsys, 6, ok, f"queen8 B1 {r.bound1:.5f} B2 {r.bound2:.5f}")


# -- 7 ------------------------------------------------------------------------------------

def test_pairsum_forcing(capsys):
    g = gen_cycle(5)
    Y0 = counterexample()
    base = build_theta_stable(g)
    cut = sep_c5_pairsum_stable(Y0, g, enumerate_chordless_cycles(g, 5))[0].cut
    feasible = min_eigenvalue(Y0) >= -1e-9 and certify(Y0, base, tol=1e-9).ok
    total = base.objective_value(Y0)
    amount = cut.violation(Y0)

    model = base.copy()
    model.add_cuts([cut])
    rng = np.random.default_rng(7)
    sums, certified = [], 0
    objectives = [dict(model.objective)]
    for _ in range(24):
        w = rng.uniform(-1, 1, size=(6, 6))
        objectives.append({(r, c): (1.0 if r == 0 else 0.0) + w[r, c]
                           for r in range(6) for c in range(r, 6) if (r, c) not in {(0, 0)}
                           and not (r and c and r != c and g.is_edge(r - 1, c - 1))})
    for obj in objectives:
        m = SdpModel(model.graph, model.problem, "max", obj, model.equalities, model.tags, list(model.cuts))
        sol = solve(m)
        if sol.usable and certify(sol, m, tol=1e-6).ok:
            certified += 1
            sums.append(float(np.sum(sol.Y[0, 1:])))
    ok = (feasible and abs(total - 2.0) <= 1e-12 and abs(amount - 0.045) <= 1e-9
          and certified == len(objectives) and max(sums) <= 2.0 + 1e-6)
    verdict(capsys, 7, ok, f"counterexample feasible {feasible}, sum x {total:.12f}, violation {amount:.10f}; "
                           f"{certified}/{len(objectives)} certified, max sum x {max(sums, default=float('nan')):.8f}")


# -- 8 and 10 ---------------------------------------------------------------------------

def sweep_graphs():
    out = [gen_cycle(n) for n in (5, 7, 9, 11)] + [gen_petersen()]
    for idx in range(195):
        p = (0.2, 0.5, 0.8)[idx % 3]
        n = 5 + (idx // 3) % 8
        out.append(gen_erdos_renyi(n, p, seed=1000 + idx))
    return out


@pytest.fixture(scope="module")
def sweep():
    """Full runs on both problems, checking every cut any oracle emitted."""
    results = []
    with pytest.MonkeyPatch.context() as mp:
        emitted = []
        real = cutloop.separate

        def recording(*args, **kw):
            found = real(*args, **kw)
            emitted.append(found)
            return found

        mp.setattr(cutloop, "separate", recording)
        for g in sweep_graphs():
            for problem in (Problem.STABLE, Problem.COLORING):
                emitted.clear()
                report = compute_bounds(g, LoopConfig(problem=problem))
                checker = ValidityChecker(g, problem)
                seen, invalid = set(), []
                for found in emitted:
                    for vs in found.values():
                        for v in vs:
                            if v.cut.key in seen:
                                continue
                            seen.add(v.cut.key)
                            if not checker.valid(v.cut):
                                invalid.append(v.cut.key)
                results.append((g, problem, report, len(seen), invalid))
    return results


def test_soundness_sweep(capsys, sweep):
    graphs = {id(g) for g, *_ in sweep}
    checked = sum(n for *_, n, _ in sweep)
    bad = [(g.name, p.value, inv[:3]) for g, p, _, _, inv in sweep if inv]
    verdict(capsys, 8, len(graphs) == 200 and not bad,
            f"{len(graphs)} graphs x 2 problems, {checked} distinct emitted cuts, {len(bad)} runs with invalid cuts"
            + (f": {bad[:3]}" if bad else ""))


def test_sandwich_and_monotonicity(capsys, sweep):
    tol = 1e-6
    bad = []
    for g, problem, r, _, _ in sweep:
        obj = r.objectives()
        if problem is Problem.STABLE:
            a = exact_alpha(g)
            ok = a <= r.bound2 + tol and r.bound2 <= r.bound1 + tol and r.bound1 <= r.theta + tol
            ok &= all(b <= x + tol for x, b in zip(obj, obj[1:]))
        else:
            chi = exact_chi(g)
            ok = r.theta <= r.bound1 + tol and r.bound1 <= r.bound2 + tol and r.bound2 <= chi + tol
            ok &= all(b >= x - tol for x, b in zip(obj, obj[1:]))
        if not ok:
            bad.append((g.name, problem.value, r.theta, r.bound1, r.bound2))
    verdict(capsys, 10, not bad, f"{len(sweep)} runs, {len(bad)} sandwich or monotonicity breaches"
                                 + (f": {bad[:3]}" if bad else ""))


# -- 9 ------------------------------------------------------------------------------------

def _iterates(g):
    rng = np.random.default_rng(g.n * 1000 + g.m)
    V = rng.normal(size=(g.n + 1, 3)) * 0.6
    Y = V @ V.T
    for i, j in g.edges:
        Y[i + 1, j + 1] = Y[j + 1, i + 1] = 0.0
    yield Y
    yield solve(build_theta_stable(g)).Y
    yield solve(build_theta_coloring(g)).Y


def test_oracle_equivalence(capsys):
    mismatches, compared = [], 0

    def same(tag, vs, brute, Y):
        nonlocal compared
        got = {v.cut.witness: v.amount for v in vs}
        compared += 1
        if set(got) != set(brute) or any(abs(a - brute[w]) > 1e-12 for w, a in got.items()) \
                or any(abs(v.cut.violation(Y) - v.amount) > 1e-12 for v in vs):
            mismatches.append(tag)

    graphs = [gen_cycle(n) for n in (5, 7, 9)] + [gen_petersen()]
    graphs += [gen_erdos_renyi(4 + s % 7, (0.3, 0.5, 0.7)[s % 3], seed=s) for s in range(40)]
    for g in graphs:
        cliques = enumerate_cliques(g, 5, 2)
        assert all(is_clique(g, q) for q in cliques)
        c5 = [c.vertices for c in enumerate_chordless_cycles(g, 5)]
        odd = c5 + [c.vertices for c in enumerate_chordless_cycles(g, 7)]
        for Y in _iterates(g):
            a, b = sep_triangle_stable(Y, g)
            s13, s14 = sep_oddcycle_vertex_stable(Y, g, odd)
            tag = f"{g.name}/{g.n}"
            same(tag + " nonneg", sep_nonneg(Y, g), oracles.nonneg(Y, g), Y)
            same(tag + " tri_a", a, oracles.tri_a(Y, g), Y)
            same(tag + " tri_b", b, oracles.tri_b(Y, g), Y)
            same(tag + " tri_col", sep_triangle_coloring(Y, g), oracles.tri_col(Y, g), Y)
            same(tag + " clique_vertex", sep_clique_vertex(Y, g, cliques), oracles.clique_vertex(Y, g, cliques), Y)
            same(tag + " clique_vertex_col", sep_clique_vertex_coloring(Y, g, cliques),
                 oracles.clique_vertex(Y, g, cliques, coloring=True), Y)
            same(tag + " clique_join", sep_clique_join(Y, g, cliques), oracles.clique_join(Y, g, cliques), Y)
            same(tag + " c5", sep_c5_pairsum_stable(Y, g, c5), oracles.pairsum(Y, g, c5, 1.0), Y)
            same(tag + " c5_col", sep_c5_pairsum_coloring(Y, g, c5), oracles.pairsum(Y, g, c5, 2.0), Y)
            same(tag + " oddcycle", s13, oracles.cycle_vertex(Y, g, odd, "stab"), Y)
            same(tag + " oddcycle_comp", s14, oracles.cycle_vertex(Y, g, odd, "comp"), Y)
            same(tag + " oddcycle_col", sep_oddcycle_vertex_coloring(Y, g, odd),
                 oracles.cycle_vertex(Y, g, odd, "col"), Y)
    verdict(capsys, 9, not mismatches,
            f"{compared} oracle outputs on {len(graphs)} graphs (n <= 10), {len(mismatches)} mismatches"
            + (f": {mismatches[:4]}" if mismatches else ""))


# -- 11 -----------------------------------------------------------------------------------

def test_generators(capsys):
    problems = []
    for d in (3, 5, 7):
        g = gen_torus(d)
        if g.m != 2 * g.n or set(g.degrees()) != {4}:
            problems.append(f"torus{d}")
    if gen_queen(8).m != 728:
        problems.append("queen8")
    prev = None
    for t in range(5):
        g = gen_mycielski(t)
        if prev is not None and g.n != 2 * prev.n + 1:
            problems.append(f"mycielski({t}) size")
        adj = g.adjacency.astype(np.int64)
        if np.trace(adj @ adj @ adj) != 0:
            problems.append(f"mycielski({t}) triangle")
        prev = g
    verdict(capsys, 11, not problems, "torus m = 2n and 4-regular for d = 3, 5, 7; queen8 m = 728; "
                                      "mycielski recurrence and triangle-free to level 4"
                                      + (f"; broken: {problems}" if problems else ""))
