import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

import shootbvp as sb
from shootbvp import cli

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_golden_table(self, capsys):
        code, out, err = run(capsys, "solve", "--problem", "ex1")
        assert code == 0
        assert err == ""
        assert out == (GOLDEN / "ex1_solve.txt").read_text()

    def test_explicit_guess_and_jacobian(self, capsys):
        code, out, _ = run(capsys, "solve", "--problem", "ex3", "--guess", "5", "--jacobian", "adjoint")
        assert code == 0
        assert "u'(0)=6.7432737" in out

    def test_seven_decimal_formatting(self, capsys):
        _, out, _ = run(capsys, "solve", "--problem", "ex2", "--guess=-2,0")
        assert "f''(0)=-1.2108404" in out
        assert "f''(5)=0.7142624" in out
        assert "theta'(5)=-0.3115125" in out

    def test_tiny_values_use_scientific_notation(self, capsys):
        _, out, _ = run(capsys, "solve", "--problem", "ex2", "--guess=-2,0")
        line = next(l for l in out.splitlines() if l.startswith("f'(0)"))
        assert "f'(5)=" in line and "e-" in line.split("f'(5)=")[1]


class TestExitCodes:
    def test_not_converged(self, capsys):
        code, out, err = run(capsys, "solve", "--problem", "ex3", "--guess", "5", "--max-iter", "1")
        assert code == 1
        assert "did not converge" in err

    def test_unknown_problem(self, capsys):
        code, _, err = run(capsys, "solve", "--problem", "ex9")
        assert code == 2
        assert "unknown problem" in err

    def test_guess_length_mismatch(self, capsys):
        code, _, err = run(capsys, "solve", "--problem", "ex1", "--guess", "1,2")
        assert code == 2
        assert "guess" in err

    def test_unknown_parameter(self, capsys):
        code, _, err = run(capsys, "solve", "--problem", "ex2", "--set", "zeta=1")
        assert code == 2

    def test_malformed_set(self, capsys):
        code, _, err = run(capsys, "solve", "--problem", "ex2", "--set", "k0.5")
        assert code == 2

    def test_integration_failure(self, capsys):
        # initial slope outside the interval of existence for ex4
        code, _, err = run(capsys, "solve", "--problem", "ex4", "--guess", "0.5")
        assert code == 3
        assert "integration failed" in err

    def test_singular_jacobian(self, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise sb.SingularMatrixError("forced for the exit-code contract")

        monkeypatch.setattr(cli, "solve_bvp", boom)
        code, _, err = run(capsys, "solve", "--problem", "ex1")
        assert code == 4
        assert "singular" in err

    def test_io_error(self, capsys, tmp_path):
        target = tmp_path / "missing-dir" / "out.csv"
        code, _, err = run(capsys, "solve", "--problem", "ex1", "--out", str(target))
        assert code == 5
        assert "cannot write" in err


class TestTrajectoryCsv:
    def test_round_trip_15_digits(self, capsys, tmp_path, solved):
        path = tmp_path / "traj.csv"
        code, _, _ = run(capsys, "solve", "--problem", "ex4", "--out", str(path))
        assert code == 0

        with open(path) as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["t", "x1", "x2"]

        traj = solved("ex4", (0.0,)).final_trajectory
        parsed = np.array([[float(v) for v in row] for row in rows[1:]])
        assert parsed.shape == (len(traj), 3)
        np.testing.assert_allclose(parsed[:, 0], traj.t, rtol=1e-14, atol=0)
        np.testing.assert_allclose(parsed[:, 1:], traj.x, rtol=1e-14, atol=1e-280)

    def test_first_row_is_initial_state(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        run(capsys, "solve", "--problem", "ex4", "--out", str(path))
        first = path.read_text().splitlines()[1].split(",")
        assert float(first[0]) == 1.0
        assert float(first[1]) == 2.0
        assert abs(float(first[2])) <= 1e-7


class TestTraceCsv:
    def test_header_and_final_residual(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        code, _, _ = run(capsys, "solve", "--problem", "ex2", "--trace", str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "k,c1,c2,residual_inf,step_inf"
        last = lines[-1].split(",")
        assert float(last[-2]) <= 1e-8


class TestSvg:
    def test_one_polyline_per_component(self, capsys, tmp_path):
        path = tmp_path / "plot.svg"
        code, _, _ = run(capsys, "solve", "--problem", "ex1", "--svg", str(path))
        assert code == 0
        svg = path.read_text()
        assert svg.count("<polyline") == 2
        assert 'width="800" height="600"' in svg
        assert svg.count("<svg") == 1 and "</svg>" in svg

    def test_self_contained(self, capsys, tmp_path):
        path = tmp_path / "plot.svg"
        run(capsys, "solve", "--problem", "ex2", "--svg", str(path))
        svg = path.read_text()
        assert svg.count("<polyline") == 5
        assert "http" not in svg.replace("http://www.w3.org/2000/svg", "")
        assert "href" not in svg
        for label in sb.get("ex2").component_labels:
            assert f">{label}<" in svg


class TestList:
    def test_plain_listing(self, capsys):
        code, out, err = run(capsys, "list")
        assert code == 0 and err == ""
        lines = out.strip().splitlines()
        assert len(lines) == 4
        ex2 = next(l for l in lines if l.startswith("ex2"))
        assert "n=5" in ex2

    def test_json_listing(self, capsys):
        code, out, _ = run(capsys, "list", "--json")
        assert code == 0
        records = json.loads(out)
        assert [r["name"] for r in records] == ["ex1", "ex2", "ex3", "ex4"]
        ex2 = records[1]
        assert ex2["n"] == 5 and ex2["unknowns"] == 2
        assert ex2["parameters"] == {"k": 0.71}
        assert ex2["guesses"][0] == [0.0, 0.0]


class TestVerify:
    def test_at_known_solution(self, capsys):
        code, out, err = run(capsys, "verify", "--problem", "ex4", "--guess", "0")
        assert code == 0 and err == ""
        values = [float(line.rsplit("=", 1)[1]) for line in out.splitlines()[1:]]
        assert len(values) == 4
        assert all(v <= 1e-6 for v in values)

    def test_off_solution(self, capsys):
        code, out, _ = run(capsys, "verify", "--problem", "ex1", "--guess", "1")
        assert code == 0

    def test_at_solution_flag(self, capsys):
        code, out, _ = run(capsys, "verify", "--problem", "ex3", "--guess", "0", "--at-solution")
        assert code == 0
        assert "1.9447725" in out

    def test_unknown_problem(self, capsys):
        code, _, err = run(capsys, "verify", "--problem", "ex9")
        assert code == 2

    def test_integration_failure(self, capsys):
        code, _, err = run(capsys, "verify", "--problem", "ex4", "--guess", "0.6")
        assert code == 3


class TestOverrides:
    def test_prandtl_override_changes_solution(self, capsys):
        code, out, _ = run(capsys, "solve", "--problem", "ex2", "--guess=-1,-1", "--set", "k=0.5")
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("theta'(0)"))
        value = float(line.split("=", 1)[1].split()[0])
        assert abs(value - (-0.4755621)) > 1e-4  # differs from the k=0.71 solution


def test_format_value_rules():
    assert cli.format_value(2.0) == "2.0000000"
    assert cli.format_value(0.0) == "0.0000000"
    assert cli.format_value(-0.0) == "0.0000000"
    assert cli.format_value(1.044e-15) == "1.044e-15"
    assert cli.format_value(-1.2108404) == "-1.2108404"
    assert cli.format_value(9.9e-7) == "9.900e-07"
    assert cli.format_value(1.1e-6) == "0.0000011"
