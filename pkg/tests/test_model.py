import numpy as np
import pytest
from hypothesis import given

from thetacut.exact import enumerate_colorings, coloring_matrix, enumerate_stable_sets
from thetacut.generators import gen_cycle, gen_erdos_renyi, gen_petersen
from thetacut.model import (
    Cut,
    Family,
    ModelError,
    Problem,
    add_cuts,
    bordered_coloring,
    bordered_stable,
    build_model,
    build_theta_coloring,
    build_theta_stable,
    functional,
)
from thetacut.separation import sep_c5_pairsum_stable, sep_triangle_stable
from thetacut.graph import enumerate_chordless_5cycles

from conftest import graphs


def c5_cut():
    return Cut(functional([(i, j, 1.0) for i in range(1, 6) for j in range(i + 1, 6)]), 1.0,
               Family.C5_PAIRSUM_STAB, (0, 1, 2, 3, 4))


class TestBuild:
    def test_stable_structure(self):
        g = gen_petersen()
        m = build_theta_stable(g)
        assert m.dim == 11 and m.sense == "max"
        assert m.tags.count("corner") == 1 and m.tags.count("link") == 10 and m.tags.count("edge") == 15
        assert m.objective == {(0, i): 1.0 for i in range(1, 11)}

    def test_coloring_structure(self):
        g = gen_cycle(5)
        m = build_theta_coloring(g)
        assert m.sense == "min" and m.objective == {(0, 0): 1.0}
        assert m.tags.count("border") == 5 and m.tags.count("diag") == 5 and m.tags.count("edge") == 5

    @given(graphs(max_n=9))
    def test_stable_set_matrices_feasible(self, g):
        m = build_theta_stable(g)
        for S in enumerate_stable_sets(g):
            s = np.zeros(g.n)
            s[list(S)] = 1
            Y = bordered_stable(s)
            assert m.equality_residual(Y) == 0
            assert m.objective_value(Y) == len(S)

    @given(graphs(max_n=7))
    def test_coloring_matrices_feasible(self, g):
        m = build_theta_coloring(g)
        for lab in enumerate_colorings(g):
            Y = bordered_coloring(coloring_matrix(lab), max(lab, default=-1) + 1)
            assert m.equality_residual(Y) == 0
            # t X - J psd  <=>  bordered matrix psd
            assert np.linalg.eigvalsh(Y).min() > -1e-9


class TestCuts:
    def test_dedup(self):
        m = build_theta_stable(gen_cycle(5))
        assert m.add_cuts([c5_cut()]) == 1
        assert m.add_cuts([c5_cut()]) == 0
        assert len(m.cuts) == 1 and m.duplicates_skipped == 1

    def test_bad_index(self):
        m = build_theta_stable(gen_cycle(5))
        with pytest.raises(ModelError):
            m.add_cuts([Cut({(2, 6): 1.0}, 0.0, Family.NONNEG, (1, 5))])
        with pytest.raises(ModelError):
            m.add_cuts([Cut({(3, 2): 1.0}, 0.0, Family.NONNEG, (1, 2))])
        with pytest.raises(ModelError):
            m.add_cuts([Cut({}, 0.0, Family.NONNEG, ())])

    def test_functional_form_leaves_original(self):
        m = build_theta_stable(gen_cycle(5))
        m2 = add_cuts(m, [c5_cut()])
        assert len(m.cuts) == 0 and len(m2.cuts) == 1

    def test_birth_iteration(self):
        m = build_theta_stable(gen_cycle(5))
        cut = c5_cut()
        m.add_cuts([cut], iteration=3)
        assert cut.birth_iteration == 3

    def test_functional_canonical(self):
        assert functional([(3, 1, 1.0), (1, 3, 2.0), (2, 2, 1.0), (2, 2, -1.0)]) == {(1, 3): 3.0}

    def test_purge(self):
        m = build_theta_stable(gen_cycle(5))
        m.add_cuts([c5_cut()])
        assert m.purge(lambda c: False) == 1
        assert m.add_cuts([c5_cut()]) == 1

    def test_dump(self):
        m = build_theta_stable(gen_cycle(5))
        m.add_cuts([c5_cut()])
        lines = m.dump().splitlines()
        assert lines[0].startswith("# thetacut model problem=stable")
        assert sum(line.startswith("eq ") for line in lines) == 1 + 5 + 5
        assert lines[-1].startswith("le 1.0 c5_pairsum_stab 1 2 1.0")

    def test_oracle_cuts_index_range(self):
        g = gen_erdos_renyi(9, 0.4, 5)
        m = build_model(g, Problem.STABLE)
        Y = np.random.default_rng(0).random((10, 10))
        Y = Y + Y.T
        a, b = sep_triangle_stable(Y, g)
        cycles = enumerate_chordless_5cycles(g)
        cuts = [v.cut for v in list(a) + list(b) + list(sep_c5_pairsum_stable(Y, g, cycles))]
        assert m.add_cuts(cuts) == len({c.key for c in cuts})
