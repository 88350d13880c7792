from __future__ import annotations

import math

import orjson
import pytest

from cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from heat_content.ladder import SigmaTable, extract_sigma
from heat_content.models import ParamPair


def _table(text: str) -> dict:
    return dict(line.split("\t", 1) for line in text.splitlines())


class TestCoeff:
    def test_generic_series(self, capsys) -> None:
        assert main(["coeff", "-a", "0.3", "-b", "0.4", "-N", "2"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        start = lines.index("power\tcoefficient") + 1
        powers = sorted(float(line.split("\t")[0]) for line in lines[start:start + 4])
        assert powers == pytest.approx([0.0, 0.15, 0.5, 1.0])
        assert lines[start + 4].startswith("c(a,b)")

    def test_log_plane(self, capsys) -> None:
        assert main(["coeff", "-a", "0.5", "-b", "0.5"]) == EXIT_INVALID
        captured = capsys.readouterr()
        assert "log plane k=0" in captured.err
        assert float(_table(captured.out)["log_coefficient"]) == -0.5

    def test_removable_point(self, capsys) -> None:
        assert main(["coeff", "-a", "0.25", "-b", "-2.25", "-N", "0"]) == EXIT_OK
        assert math.isfinite(float(_table(capsys.readouterr().out)["c(a,b)"]))

    def test_complex_pair(self, capsys) -> None:
        assert main(["coeff", "-a", "0.3+0.2i", "-b", "0.1", "-N", "1"]) == EXIT_OK
        assert "i" in _table(capsys.readouterr().out)["c(a,b)"]

    def test_unparseable(self, capsys) -> None:
        assert main(["coeff", "-a", "abc", "-b", "0.1"]) == EXIT_INVALID
        assert "re[+imi]" in capsys.readouterr().err

    def test_exponent_too_large(self) -> None:
        assert main(["coeff", "-a", "1.2", "-b", "0.1"]) == EXIT_INVALID


class TestHeat:
    def test_constant_data(self, capsys) -> None:
        assert main(["heat", "-a", "0", "-b", "0", "-t", "1e-4"]) == EXIT_OK
        header, row = capsys.readouterr().out.splitlines()
        assert header == "t,value,error_estimate,nodes_used"
        assert float(row.split(",")[1]) == pytest.approx(1.0 - 2.0 * math.sqrt(1e-4 / math.pi), abs=1e-10)

    def test_neumann(self, capsys) -> None:
        assert main(["heat", "-a", "0", "-b", "0", "-t", "1e-3", "--bc", "NN"]) == EXIT_OK
        assert float(capsys.readouterr().out.splitlines()[1].split(",")[1]) == pytest.approx(1.0, abs=1e-10)

    def test_t_out_of_range(self) -> None:
        assert main(["heat", "-a", "0.3", "-b", "0.4", "-t", "2"]) == EXIT_INVALID


class TestVerify:
    def test_too_few_points(self, capsys) -> None:
        assert main(["verify", "-a", "0.3", "-b", "0.4", "--points", "2"]) == EXIT_INVALID
        assert "points >= 4" in capsys.readouterr().err

    def test_constant_data_csv(self, capsys, prefect_harness) -> None:
        assert main(["verify", "-a", "0", "-b", "0", "-N", "1", "--points", "4"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "t,quad_value,quad_error,series_value,residual"
        assert lines[-1] == "pass,true"

    def test_json_to_file(self, tmp_path, prefect_harness) -> None:
        out = tmp_path / "report.json"
        argv = ["verify", "-a", "0", "-b", "0", "-N", "1", "--points", "4", "--format", "json", "--out", str(out)]
        assert main(argv) == EXIT_OK
        payload = orjson.loads(out.read_bytes())
        assert len(payload["t"]) == len(payload["residual"]) == 4
        assert payload["pass"] is True

    def test_config_file(self, tmp_path, capsys, prefect_harness) -> None:
        config = tmp_path / "run.cfg"
        config.write_text("points=5\nn=1\n")
        assert main(["verify", "-a", "0", "-b", "0", "--config", str(config)]) == EXIT_OK
        assert len(capsys.readouterr().out.splitlines()) == 1 + 5 + 3

    def test_logverify_complex(self, capsys) -> None:
        assert main(["logverify", "-a", "0.3+0.1i", "-k", "0"]) == EXIT_INVALID


class TestRecursion:
    def test_residual_table(self, capsys) -> None:
        code = main(["recursion", "-a", "0.5", "-b", "0.3", "-t", "1e-3"])
        lines = capsys.readouterr().out.splitlines()
        assert code == EXIT_OK
        assert lines[0] == "t,residual"
        assert float(lines[1].split(",")[1]) < 1e-8
        assert lines[-1] == "pass,true"

    def test_threshold(self, capsys) -> None:
        assert main(["recursion", "-a", "0.5", "-b", "0.3", "-t", "1e-3", "--threshold", "0"]) == EXIT_FAILED


class TestLadder:
    def test_certifies(self, capsys) -> None:
        assert main(["ladder", "-k", "3"]) == EXIT_OK
        assert "sigma k=3" in capsys.readouterr().out

    @pytest.mark.parametrize("k", ["5", "-1"])
    def test_out_of_range(self, k: str) -> None:
        assert main(["ladder", "-k", k]) == EXIT_INVALID

    def test_dump_reloads(self, tmp_path) -> None:
        path = tmp_path / "sigma.json"
        assert main(["ladder", "-k", "2", "--dump", str(path)]) == EXIT_OK
        table = SigmaTable.from_records(orjson.loads(path.read_bytes()))
        p = ParamPair.of(-0.6, -1.1)
        assert table.values(p) == pytest.approx(extract_sigma(2).values(p))


class TestSpectral:
    def test_constant_data(self, capsys) -> None:
        assert main(["spectral", "-a", "0", "-b", "0", "-t", "0.01", "--n-max", "512"]) == EXIT_OK
        header, row = capsys.readouterr().out.splitlines()
        assert header == "t,circle,line,log_gap"
        _, circle, line, log_gap = (float(v) for v in row.split(","))
        assert circle == pytest.approx(line, abs=1e-10)
        assert log_gap < -500.0


class TestSuite:
    def test_single_rule(self, tmp_path, capsys, prefect_harness) -> None:
        argv = ["suite", "--only", "check_coefficient_exactness", "--summary-dir", str(tmp_path)]
        assert main(argv) == EXIT_OK
        assert orjson.loads(capsys.readouterr().out)["status"] == "COMPLETED"

    def test_unknown_rule(self, tmp_path, capsys, prefect_harness) -> None:
        argv = ["suite", "--only", "check_nothing", "--summary-dir", str(tmp_path)]
        assert main(argv) == EXIT_FAILED
