import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nurs import __version__
from nurs.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VIOLATION, main


def data_rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def sample(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["sample", "--n", "12", "--distance", "hamming", "--beta", "1.0",
                 "--direction", "local:3", "--iters", "300", "--burnin", "50", "--seed", "42",
                 "--out", str(out), *extra])
    return code, out


class TestSample:
    def test_row_count_and_header(self, tmp_path):
        code, out = sample(tmp_path, "t.csv")
        assert code == EXIT_OK
        text = out.read_text().splitlines()
        meta = json.loads(text[0][2:])
        assert meta["version"] == __version__
        assert meta["config"]["seed"] == 42 and meta["config"]["n"] == 12
        assert text[1] == "iter,signed_index,orbit_len,stop_reason,energy,fixed_points,cycle_len_1,lis"
        assert len(data_rows(out)) == 250

    def test_spec_sized_run(self, tmp_path):
        out = tmp_path / "t.csv"
        code = main(["sample", "--n", "200", "--distance", "hamming", "--beta", "1.0",
                     "--direction", "local:7", "--eps", "0.01", "--max-doublings", "7",
                     "--iters", "10000", "--burnin", "2000", "--seed", "42", "--out", str(out)])
        assert code == EXIT_OK
        assert len(data_rows(out)) == 8000

    def test_byte_determinism(self, tmp_path):
        _, a = sample(tmp_path, "a.csv")
        _, b = sample(tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()
        _, c = sample(tmp_path, "c.csv", "--start", "uniform")
        assert c.read_bytes() != a.read_bytes()

    def test_beta0_orbit_length(self, tmp_path):
        out = tmp_path / "z.csv"
        assert main(["sample", "--n", "30", "--beta", "0", "--iters", "200", "--out", str(out)]) == 0
        assert {r["orbit_len"] for r in data_rows(out)} == {"128"}

    def test_chains(self, tmp_path):
        code, _ = sample(tmp_path, "m.csv", "--chains", "3")
        assert code == EXIT_OK
        files = [tmp_path / f"m_{k}.csv" for k in range(3)]
        assert all(f.exists() for f in files)
        assert len({f.read_bytes() for f in files}) == 3
        code, _ = sample(tmp_path, "m2.csv", "--chains", "3")
        assert all((tmp_path / f"m_{k}.csv").read_bytes() == (tmp_path / f"m2_{k}.csv").read_bytes()
                   for k in range(3))

    def test_barker(self, tmp_path):
        out = tmp_path / "b.csv"
        assert main(["sample", "--n", "10", "--beta", "1", "--direction", "transposition",
                     "--kernel", "barker", "--iters", "100", "--out", str(out)]) == 0
        assert {r["orbit_len"] for r in data_rows(out)} == {"2"}
        assert main(["sample", "--n", "10", "--direction", "local:3", "--kernel", "barker",
                     "--iters", "10", "--out", str(out)]) == EXIT_CONFIG

    @pytest.mark.parametrize("bad", [
        ["--iters", "10", "--burnin", "10"],
        ["--iters", "10", "--eps", "1.5"],
        ["--iters", "10", "--max-doublings", "0"],
        ["--iters", "10", "--direction", "local:99"],
        ["--iters", "10", "--distance", "manhattan"],
        ["--iters", "ten"],
    ])
    def test_config_errors(self, tmp_path, bad):
        assert main(["sample", "--n", "8", "--out", str(tmp_path / "x.csv"), *bad]) == EXIT_CONFIG

    def test_io_error(self, tmp_path):
        out = tmp_path / "missing" / "x.csv"
        assert main(["sample", "--n", "5", "--iters", "10", "--out", str(out)]) == EXIT_IO


class TestVerify:
    ARGS = ["verify", "--n", "4", "--distance", "cayley", "--beta", "0.7", "--direction", "uniform",
            "--max-doublings", "2", "--eps", "0.25"]

    def test_pass(self, capsys):
        assert main(self.ARGS) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["pass"] is True
        assert report["detailed_balance_residual"] <= 1e-12

    def test_perturbed(self, capsys):
        assert main([*self.ARGS, "--perturb"]) == EXIT_VIOLATION
        assert json.loads(capsys.readouterr().out)["pass"] is False

    def test_size_guard(self):
        assert main(["verify", "--n", "6", "--direction", "transposition"]) == EXIT_CONFIG


class TestMix:
    def test_envelope(self, tmp_path):
        out = tmp_path / "mix.csv"
        assert main(["mix", "--n", "5", "--beta", "0.01", "--t-max", "200", "--out", str(out)]) == 0
        rows = data_rows(out)
        assert len(rows) == 200
        assert all(r["within_envelope"] == "true" for r in rows)

    def test_beta0_decay(self, tmp_path):
        out = tmp_path / "mix.csv"
        assert main(["mix", "--n", "4", "--beta", "0", "--t-max", "100", "--out", str(out)]) == 0
        assert float(data_rows(out)[-1]["tv"]) < 1e-6

    def test_errors(self):
        assert main(["mix", "--n", "5", "--t-max", "x"]) == EXIT_CONFIG
        assert main(["mix", "--n", "6"]) == EXIT_CONFIG


class TestCouple:
    def test_beta0(self, tmp_path):
        out = tmp_path / "c.jsonl"
        assert main(["couple", "--n", "4", "--beta", "0", "--samples", "20000", "--out", str(out)]) == 0
        reports = [json.loads(ln) for ln in out.read_text().splitlines()]
        assert len(reports) == 6
        for rep in reports:
            assert abs(rep["empirical_mean_dist"] - (1 - 2 / 12)) <= 4 * rep["std_error"] + 1e-12
            assert abs(rep["aligned_fraction"] - 2 / 12) < 0.02
            assert "local_jump_table" in rep and "local_jump_brute" in rep

    def test_random_edges(self, tmp_path):
        out = tmp_path / "c.jsonl"
        assert main(["couple", "--n", "5", "--beta", "0.01", "--samples", "500", "--edges", "3",
                     "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 3

    def test_guard(self):
        assert main(["couple", "--n", "9"]) == EXIT_CONFIG


class TestStats:
    @pytest.fixture
    def trace(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["sample", "--n", "40", "--beta", "0", "--iters", "2000", "--seed", "3",
                     "--out", str(out)]) == 0
        return out

    def test_poisson_reference(self, trace, tmp_path):
        out = tmp_path / "h.csv"
        assert main(["stats", "--in", str(trace), "--report", "fixed_points", "--ref", "poisson:2.718",
                     "--out", str(out)]) == 0
        rows = data_rows(out)
        assert list(rows[0]) == ["k", "count", "empirical_p", "reference_p"]
        assert float(rows[0]["reference_p"]) == pytest.approx(np.exp(-2.718))

    def test_triangular_reference(self, trace, tmp_path):
        out = tmp_path / "h.csv"
        assert main(["stats", "--in", str(trace), "--report", "signed_index",
                     "--ref", "triangular:7:derived", "--out", str(out)]) == 0
        meta = json.loads(out.read_text().splitlines()[0][2:])
        assert meta["tv"] < 0.3
        assert len(data_rows(out)) == 257

    def test_acf(self, trace, tmp_path):
        out = tmp_path / "a.csv"
        assert main(["stats", "--in", str(trace), "--report", "acf:energy", "--max-lag", "20",
                     "--out", str(out)]) == 0
        rows = data_rows(out)
        assert len(rows) == 21 and float(rows[0]["acf"]) == 1.0

    def test_errors(self, trace, tmp_path):
        empty = tmp_path / "e.csv"
        empty.write_text("")
        assert main(["stats", "--in", str(empty), "--report", "lis"]) == EXIT_IO
        assert main(["stats", "--in", str(tmp_path / "none.csv"), "--report", "lis"]) == EXIT_IO
        assert main(["stats", "--in", str(trace), "--report", "bogus"]) == EXIT_CONFIG
        assert main(["stats", "--in", str(trace), "--report", "lis", "--ref", "gauss:1"]) == EXIT_CONFIG


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "nurs.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__


def test_log_level_env(tmp_path, monkeypatch):
    monkeypatch.setenv("NURS_LOG", "loud")
    assert main(["verify", "--n", "3"]) == EXIT_CONFIG
