import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from lowcostmi import cli
from lowcostmi.errors import BracketError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestSweep:
    def test_helstrom_default_grid(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "helstrom", "--threads", "1"], capsys)
        assert code == 0
        table = rows(out)
        assert table[0] == ["nbar", "pie", "param_opt"]
        assert len(table) == 51
        assert float(table[1][0]) == pytest.approx(1e-4)
        assert float(table[-1][0]) == pytest.approx(1.0)
        assert float(table[1][1]) == pytest.approx(2.0, abs=1e-3)
        assert table[1][2] == ""
        assert "\r" not in out

    def test_two_symbol_small_nbar(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "two_symbol", "--points", "1", "--threads", "1"], capsys)
        assert code == 0
        _, pie, u = map(float, rows(out)[1])
        assert pie == pytest.approx(2.0498, abs=2e-3)
        assert u == pytest.approx(0.0498, abs=1e-2)

    def test_three_symbol_small_nbar(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "three_symbol", "--points", "1", "--threads", "1"], capsys)
        assert code == 0
        assert float(rows(out)[1][1]) == pytest.approx(2.0679, abs=3e-3)

    def test_fixed_parameters(self, capsys):
        argv = ["sweep", "--scheme", "two_symbol", "--u", "0.1", "--points", "2", "--nbar-min", "0.01",
                "--nbar-max", "0.1", "--threads", "1"]
        code, out, _ = run(argv, capsys)
        assert code == 0
        assert [r[2] for r in rows(out)[1:]] == ["0.1", "0.1"]

    def test_hadamard_rows(self, capsys):
        code, out, _ = run(["sweep", "--scheme", "hadamard", "--M", "16", "--points", "2", "--threads", "1"], capsys)
        assert code == 0
        assert float(rows(out)[1][1]) == pytest.approx(np.log(16))

    def test_thermal_shannon_hartley(self, capsys):
        argv = ["sweep", "--scheme", "shannon_hartley", "--nb", "0.5", "--points", "1", "--nbar-min", "1e-6",
                "--threads", "1"]
        code, out, _ = run(argv, capsys)
        assert float(rows(out)[1][1]) == pytest.approx(1.0, rel=1e-5)

    def test_threads_do_not_change_output(self, capsys):
        base = ["sweep", "--scheme", "two_symbol", "--points", "4", "--nbar-min", "1e-3", "--nbar-max", "0.1"]
        _, serial, _ = run(base + ["--threads", "1"], capsys)
        _, parallel, _ = run(base + ["--threads", "2"], capsys)
        assert serial == parallel

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "pie.csv"
        code, out, _ = run(["sweep", "--scheme", "homodyne_bpsk", "--points", "3", "--out", str(path)], capsys)
        assert code == 0 and out == ""
        data = path.read_bytes()
        assert b"\r\n" not in data
        assert len(rows(data.decode("utf-8"))) == 4


class TestConfig:
    def test_config_then_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scheme": "helstrom", "points": 3, "nbar-min": 0.01, "nbar_max": 0.1}))
        code, out, _ = run(["sweep", "--config", str(cfg), "--threads", "1"], capsys)
        assert code == 0
        table = rows(out)
        assert len(table) == 4
        assert float(table[1][0]) == pytest.approx(0.01)

        code, out, _ = run(["sweep", "--config", str(cfg), "--points", "5", "--scheme", "shannon_hartley"], capsys)
        assert len(rows(out)) == 6
        assert float(rows(out)[-1][1]) == pytest.approx(np.log(1.4) / 2 / 0.1)

    def test_invalid_scheme_in_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scheme": "dolinar"}))
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep", "--config", str(cfg)])
        assert exc.value.code == 2

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep", "--config", str(cfg)])
        assert exc.value.code == 2

    def test_missing_scheme(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep"])
        assert exc.value.code == 2


class TestExitCodes:
    def test_invalid_scheme_flag(self):
        res = subprocess.run(
            [sys.executable, "-m", "lowcostmi", "sweep", "--scheme", "bogus"], capture_output=True, text=True
        )
        assert res.returncode == 2
        assert "invalid choice" in res.stderr

    def test_domain_error(self, capsys):
        code, _, err = run(["sweep", "--scheme", "helstrom", "--nbar-min", "0.5", "--nbar-max", "0.1"], capsys)
        assert code == 2
        assert "error" in err

    def test_unsupported_hadamard_order(self, capsys):
        code, _, _ = run(["bound", "--scheme", "hadamard", "--M", "6"], capsys)
        assert code == 2

    def test_numerical_failure(self, capsys, monkeypatch):
        def fail(*args, **kwargs):
            raise BracketError("no sign change")

        monkeypatch.setattr(cli, "superadditivity_threshold", fail)
        code, _, err = run(["threshold"], capsys)
        assert code == 3
        assert "numerical" in err

    def test_unwritable_output(self, tmp_path, capsys):
        code, _, _ = run(["bound", "--scheme", "two_symbol", "--out", str(tmp_path / "no" / "x.csv")], capsys)
        assert code == 1


class TestThreshold:
    def test_value_and_curves(self, tmp_path, capsys):
        path = tmp_path / "thr.csv"
        code, out, _ = run(["threshold", "--out", str(path), "--threads", "1"], capsys)
        assert code == 0
        assert float(out.strip()) == pytest.approx(0.0117, abs=5e-4)
        table = rows(path.read_text())
        assert table[0] == ["nbar", "pie_two_symbol", "pie_helstrom"]
        data = np.array(table[1:], dtype=float)
        gap = data[:, 1] - data[:, 2]
        assert gap[0] > 0 > gap[-1]
        crossing = data[np.argmax(gap < 0), 0]
        assert crossing >= float(out)

    def test_deterministic(self, capsys):
        first = run(["threshold"], capsys)[1]
        assert run(["threshold"], capsys)[1] == first


class TestBound:
    def test_all_blocks(self, capsys):
        code, out, _ = run(["bound"], capsys)
        assert code == 0
        blocks = [b for b in out.split("# ") if b]
        assert [b.splitlines()[0] for b in blocks] == ["two_symbol", "three_symbol", "hadamard"]

    def test_two_symbol(self, capsys):
        _, out, _ = run(["bound", "--scheme", "two_symbol"], capsys)
        u, pie = map(float, rows(out)[1])
        assert pie == pytest.approx(2 + np.exp(-3))
        assert u == pytest.approx(np.exp(-3))

    def test_three_symbol_curve(self, capsys):
        _, out, _ = run(["bound", "--scheme", "three_symbol", "--points", "201"], capsys)
        data = np.array(rows(out)[1:], dtype=float)
        assert len(data) == 201
        assert data[:, 1].max() == pytest.approx(2.0679, abs=1e-3)

    def test_hadamard_table(self, capsys):
        _, out, _ = run(["bound", "--scheme", "hadamard"], capsys)
        table = rows(out)
        assert table[0] == ["M", "strategy", "pie"]
        assert {int(r[0]): r[1] for r in table[1:]} == {
            2: "mixed", 4: "mixed", 8: "mixed", 12: "mixed", 16: "ppm", 32: "ppm"
        }
