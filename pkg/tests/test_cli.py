import json
import subprocess
import sys

import pytest

from thetacut import bench, reference
from thetacut.cli import EXIT_GUARD, EXIT_PARSE, EXIT_SOLVER, main
from thetacut.cutloop import LoopConfig, compute_bounds
from thetacut.generators import gen_cycle, gen_torus
from thetacut.graph import parse_dimacs, write_dimacs

REFERENCE_SHA256 = "25eb28bdcf44d8f427ba293f78e1c5d6c41b99e971e592cc23754191b95396c3"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParsing:
    def test_unknown_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["bound", "--nope"])
        assert info.value.code == EXIT_PARSE

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_PARSE

    def test_no_graph(self, capsys):
        code, _, err = run(capsys, "theta")
        assert code == EXIT_PARSE and "no graph" in err

    def test_file_and_family(self, capsys, tmp_path):
        p = tmp_path / "c5.col"
        p.write_bytes(write_dimacs(gen_cycle(5)))
        code, _, _ = run(capsys, "theta", str(p), "--family", "cycle", "--length", "5")
        assert code == EXIT_PARSE

    def test_missing_family_parameter(self, capsys):
        code, _, err = run(capsys, "generate", "--family", "torus")
        assert code == EXIT_PARSE and "'d'" in err

    def test_malformed_dimacs_reports_line(self, capsys, tmp_path):
        p = tmp_path / "bad.col"
        p.write_text("p edge 3 1\ne 1 9\n")
        code, _, err = run(capsys, "theta", str(p))
        assert code == EXIT_PARSE and "line 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "theta", str(tmp_path / "absent.col"))
        assert code == EXIT_PARSE

    @pytest.mark.parametrize("flags", [["--families", "tri,bogus"], ["--cycle-lengths", "5,x"],
                                       ["--cycle-lengths", "6"], ["--max-iters", "0"]])
    def test_bad_loop_flags(self, capsys, flags):
        code, _, _ = run(capsys, "bound", "--family", "cycle", "--length", "5", *flags)
        assert code == EXIT_PARSE

    def test_bad_tolerance(self, capsys):
        code, _, _ = run(capsys, "bound", "--family", "cycle", "--length", "5", "--feastol", "0")
        assert code == EXIT_PARSE


class TestCommands:
    def test_generate_round_trip(self, capsysbinary):
        assert main(["generate", "--family", "torus", "--d", "5"]) == 0
        out = capsysbinary.readouterr().out
        assert parse_dimacs(out) == gen_torus(5)

    def test_generate_to_file(self, capsys, tmp_path):
        p = tmp_path / "g.col"
        code, _, _ = run(capsys, "generate", "--family", "erdos_renyi", "--n", "12", "--p", "0.4",
                         "--seed", "3", "--out", str(p))
        assert code == 0
        again = tmp_path / "h.col"
        run(capsys, "generate", "--family", "erdos_renyi", "--n", "12", "--p", "0.4", "--seed", "3",
            "--out", str(again))
        assert p.read_bytes() == again.read_bytes()

    def test_exact(self, capsys):
        code, out, _ = run(capsys, "exact", "--family", "petersen", "--problem", "coloring", "--format", "json")
        assert code == 0 and json.loads(out)["chi"] == 3
        code, out, _ = run(capsys, "exact", "--family", "petersen")
        assert code == 0 and "alpha = 4" in out

    def test_exact_guard(self, capsys):
        code, _, _ = run(capsys, "exact", "--family", "complete", "--n", "300", "--problem", "coloring")
        assert code == EXIT_GUARD

    def test_theta(self, capsys):
        code, out, _ = run(capsys, "theta", "--family", "cycle", "--length", "5", "--format", "json")
        assert code == 0
        assert json.loads(out)["theta"] == pytest.approx(5 ** 0.5, abs=1e-6)

    def test_theta_size_guard(self, capsys):
        code, _, _ = run(capsys, "theta", "--family", "empty", "--n", "401")
        assert code == EXIT_GUARD

    def test_bound_c5(self, capsys, tmp_path):
        out_file = tmp_path / "c5.json"
        code, out, _ = run(capsys, "bound", "--family", "cycle", "--length", "5", "--problem", "stable",
                           "--phase2", "--out", str(out_file))
        assert code == 0
        assert "2.000" in out
        data = json.loads(out_file.read_text())
        assert data["bound2"] == pytest.approx(2.0, abs=1e-4)
        assert data["schema_version"] == 1

    def test_bound_without_phase2_uses_early_families(self, capsys):
        code, out, _ = run(capsys, "bound", "--family", "cycle", "--length", "7", "--no-phase2",
                           "--format", "json")
        assert code == 0
        data = json.loads(out)
        added = {f for rec in data["iterations"] for f in rec["added"]}
        assert added <= {"nonneg", "tri_stab_a", "tri_stab_b"}

    def test_bound_solver_failure(self, capsys, monkeypatch):
        from thetacut import cli
        from thetacut.solver import SolverConfig

        real = cli._loop_config

        def starved(args, problem=None):
            cfg = real(args, problem)
            return LoopConfig(**{**cfg.__dict__, "solver": SolverConfig(max_solver_iters=2)})

        monkeypatch.setattr(cli, "_loop_config", starved)
        code, _, _ = run(capsys, "bound", "--family", "cycle", "--length", "5")
        assert code == EXIT_SOLVER

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "thetacut.cli", "exact", "--family", "cycle", "--length", "7"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and "alpha = 3" in res.stdout


class TestReports:
    @pytest.fixture
    def reports(self, tmp_path):
        paths = []
        for g in (gen_torus(5), gen_cycle(7), gen_cycle(5)):
            p = tmp_path / f"{g.name}.json"
            p.write_text(json.dumps(compute_bounds(g, LoopConfig()).to_dict()))
            paths.append(p)
        return paths

    def test_merge_is_sorted(self, capsys, reports):
        code, out, _ = run(capsys, "report", *map(str, reports), "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("Graph,n,m")
        assert [ln.split(",")[0] for ln in lines[1:]] == ["C5", "C7", "torus_5"]

    def test_csv_is_deterministic(self, capsys, reports):
        first = run(capsys, "report", *map(str, reports[::-1]), "--format", "csv")[1]
        second = run(capsys, "report", *map(str, reports), "--format", "csv")[1]
        assert first == second

    @pytest.mark.parametrize("fmt", ["md", "text", "json"])
    def test_other_formats(self, capsys, reports, fmt):
        code, out, _ = run(capsys, "report", *map(str, reports), "--format", fmt)
        assert code == 0 and "C7" in out

    def test_schema_version_rejected(self, capsys, reports):
        data = json.loads(reports[0].read_text())
        data["schema_version"] = 2
        reports[0].write_text(json.dumps(data))
        code, _, err = run(capsys, "report", str(reports[0]))
        assert code == EXIT_PARSE and "schema" in err

    def test_malformed_report(self, capsys, tmp_path):
        p = tmp_path / "x.json"
        p.write_text(json.dumps({"schema_version": 1, "graph": "x"}))
        code, _, _ = run(capsys, "report", str(p))
        assert code == EXIT_PARSE


class TestReproduce:
    def test_large_rows_are_skipped(self, capsys):
        code, out, err = run(capsys, "reproduce", "table5", "--max-n", "10")
        assert code == 0
        assert "skipped" in err
        rows = out.strip().splitlines()
        assert rows[0].startswith("table,name,source,status")
        assert all(",skipped," in r for r in rows[1:])

    def test_unknown_table(self, capsys):
        code, _, _ = run(capsys, "reproduce", "table9")
        assert code == EXIT_PARSE

    def test_generated_row_passes(self):
        rec = reference.lookup("torus_5")
        row = bench._run_one((rec, LoopConfig(), None, bench.DESK_MAX_N))
        assert row.source == "generated" and row.status == "pass"
        assert abs(row.d_theta) <= bench.THETA_TOL

    def test_instance_file_wins(self, tmp_path):
        rec = reference.lookup("torus_5")
        (tmp_path / "torus_5.col").write_bytes(write_dimacs(gen_torus(5)))
        assert bench.find_instance(rec, tmp_path) == tmp_path / "torus_5.col"
        row = bench._run_one((rec, LoopConfig(), tmp_path, 0))
        assert row.source == "file" and row.status == "pass"

    def test_stand_in_is_property_only(self):
        rec = next(r for r in reference.REFERENCE if r.name.startswith("rand_"))
        g = bench.random_stand_in(rec, 0)
        assert g.n == rec.n


class TestReference:
    def test_checksum_pinned(self):
        assert reference.checksum() == REFERENCE_SHA256

    def test_tables(self):
        assert sum(len(reference.table(t)) for t in range(1, 8)) == len(reference.REFERENCE)
        with pytest.raises(KeyError):
            reference.table(8)

    def test_lookup_normalizes(self):
        assert reference.lookup("Torus-5").name == "torus_5"
        assert reference.lookup("nope") is None

    def test_problem_by_table(self):
        assert reference.lookup("myciel5").problem.value == "coloring"
        assert reference.lookup("torus_5").problem.value == "stable"
