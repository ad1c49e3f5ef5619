import csv
import io
import json
import subprocess
import sys

import pytest

from ddr import __version__
from ddr.cli import csv_header, main, parse_config, probe_report, run
from ddr.errors import SchemaError
from helpers import config_doc


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(json.dumps(config_doc()))
        assert cfg.spec.terms[0].lam == 0.5
        assert cfg.grid.points == 10 and cfg.grid.spacing == "log"
        xs = cfg.grid.values()
        assert len(xs) == 10 and xs[0] == pytest.approx(2.0) and xs[-1] == pytest.approx(100.0)
        assert cfg.backends == ("oracle", "closed")

    def test_lambda_too_large(self):
        with pytest.raises(SchemaError) as exc:
            parse_config(json.dumps(config_doc(terms=[(1.0, 1.2, 0)])))
        assert exc.value.path == "terms[0].lambda"
        assert "terms[0].lambda" in str(exc.value)

    def test_start_at_threshold(self):
        with pytest.raises(SchemaError) as exc:
            parse_config(json.dumps(config_doc(start=1.0)))
        assert "grid.start must exceed 1.001" in str(exc.value)

    @pytest.mark.parametrize("mutate,path", [
        (lambda d: d.pop("mass_scale"), "mass_scale"),
        (lambda d: d.update(parity="both"), "parity"),
        (lambda d: d.update(terms=[]), "terms"),
        (lambda d: d["terms"][0].update(n=-1), "terms[0].n"),
        (lambda d: d["terms"][0].pop("c"), "terms[0].c"),
        (lambda d: d["grid"].update(points=0), "grid.points"),
        (lambda d: d["grid"].update(stop=1.5), "grid.stop"),
        (lambda d: d["grid"].update(spacing="cubic"), "grid.spacing"),
        (lambda d: d.update(backends=["magic"]), "backends[0]"),
        (lambda d: d.update(tolerances={"nope": 1}), "tolerances.nope"),
        (lambda d: d.update(tolerances={"series_rel_tol": 0}), "tolerances"),
    ])
    def test_errors_carry_path(self, mutate, path):
        doc = config_doc()
        mutate(doc)
        with pytest.raises(SchemaError) as exc:
            parse_config(json.dumps(doc))
        assert exc.value.path == path

    def test_not_json(self):
        with pytest.raises(SchemaError):
            parse_config("mass_scale = 1")

    def test_all_backends(self):
        cfg = parse_config(json.dumps(config_doc(backends="all")))
        assert cfg.backends == ("oracle", "standard", "double-sum", "closed", "avila-menon")

    def test_linear_grid(self):
        cfg = parse_config(json.dumps(config_doc(start=2.0, stop=4.0, points=3, spacing="linear")))
        assert list(cfg.grid.values()) == [2.0, 3.0, 4.0]


def test_header_order():
    assert csv_header(("oracle", "closed")) == [
        "x", "im_g", "re_g_oracle", "re_g_closed", "abs_diff_closed", "rel_diff_closed"]
    assert csv_header(("closed", "standard")) == ["x", "im_g", "re_g_closed", "re_g_standard"]


class TestRun:
    def test_oracle_closed_ten_rows(self, tmp_path):
        out = tmp_path / "out.csv"
        code = main(["run", "--config", write_config(tmp_path, config_doc()), "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == csv_header(("oracle", "closed"))
        assert len(rows) == 11 and all(len(r) == 6 for r in rows)
        assert all(float(r[5]) < 1e-8 for r in rows[1:])
        assert b"\r\n" not in out.read_bytes()

    def test_divergent_standard(self, tmp_path, capsys):
        doc = config_doc(terms=[(1.0, -1.0, 0)], backends=["standard"], points=3)
        code = main(["run", "--config", write_config(tmp_path, doc), "--out", str(tmp_path / "o.csv")])
        assert code == 2
        err = capsys.readouterr().err
        assert "divergence" in err and "non-decaying" in err
        rows = read_csv(tmp_path / "o.csv")
        assert len(rows) == 4 and rows[1][2] == "nan"

    def test_all_backends_agree(self, tmp_path):
        out = tmp_path / "all.csv"
        doc = config_doc(backends="all")
        assert main(["run", "--config", write_config(tmp_path, doc), "--out", str(out)]) == 0
        rows = read_csv(out)
        rel = [i for i, h in enumerate(rows[0]) if h.startswith("rel_diff_")]
        assert len(rel) == 4
        assert all(float(r[i]) < 1e-8 for r in rows[1:] for i in rel)

    def test_backend_override(self, tmp_path, capsys):
        doc = config_doc(points=2)
        code = main(["run", "--config", write_config(tmp_path, doc), "--backend", "double-sum"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x,im_g,re_g_double-sum" and len(lines) == 3

    def test_tol_override(self, tmp_path, capsys):
        doc = config_doc(points=1, backends=["closed"])
        assert main(["run", "--config", write_config(tmp_path, doc), "--tol", "1e-6"]) == 0
        assert main(["run", "--config", write_config(tmp_path, doc), "--tol", "-1"]) == 1

    def test_output_from_config(self, tmp_path):
        out = tmp_path / "cfg_out.csv"
        doc = config_doc(points=2, output=str(out))
        assert main(["run", "--config", write_config(tmp_path, doc)]) == 0
        assert len(read_csv(out)) == 3

    def test_bad_config_exit_1(self, tmp_path, capsys):
        assert main(["run", "--config", write_config(tmp_path, config_doc(start=1.0))]) == 1
        assert "grid.start must exceed 1.001" in capsys.readouterr().err
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1

    def test_unsupported_term_exit_1(self, tmp_path, capsys):
        doc = config_doc(terms=[(1.0, 0.5, 5)], backends=["closed"], points=2)
        assert main(["run", "--config", write_config(tmp_path, doc)]) == 1
        assert "x=" in capsys.readouterr().err

    def test_round_trip_17_digits(self, tmp_path):
        out = tmp_path / "rt.csv"
        cfg = parse_config(json.dumps(config_doc(points=5, output=str(out))))
        assert run(cfg) == 0
        from ddr.cli import compute_rows
        _, rows, _ = compute_rows(cfg)
        text = read_csv(out)[1:]
        for row, strings in zip(rows, text):
            for v, s in zip(row, strings):
                assert float(s) == v
                assert s == format(v, ".17g")

    def test_run_to_stream(self):
        cfg = parse_config(json.dumps(config_doc(points=2, backends=["closed"])))
        buf = io.StringIO()
        assert run(cfg, stdout=buf) == 0
        assert buf.getvalue().count("\n") == 3


class TestProbe:
    def test_inverse_energy(self, tmp_path, capsys):
        doc = config_doc(terms=[(1.0, -1.0, 0)])
        assert main(["probe", "--config", write_config(tmp_path, doc), "--kmax", "5"]) == 0
        assert "NON-DECAYING" in capsys.readouterr().out

    def test_polynomial(self, tmp_path, capsys):
        doc = config_doc(terms=[(1.0, 0.0, 3)])
        assert main(["probe", "--config", write_config(tmp_path, doc), "--kmax", "5"]) == 0
        assert "TERMINATES at k=1" in capsys.readouterr().out

    def test_geometric(self, tmp_path, capsys):
        doc = config_doc(terms=[(1.0, 0.5, 0)])
        assert main(["probe", "--config", write_config(tmp_path, doc), "--kmax", "5", "--x", "4"]) == 0
        out = capsys.readouterr().out
        assert "geometric ratio 0.25" in out and "E/m = 4" in out

    def test_report_lists_magnitudes(self):
        cfg = parse_config(json.dumps(config_doc(terms=[(1.0, 0.5, 0), (2.0, -1.0, 0)])))
        text = probe_report(cfg, 3)
        assert text.count("|Im G^(2k+1)|") == 2
        assert len(text.splitlines()[2].split(":")[1].split()) == 4

    def test_negative_kmax(self, tmp_path):
        assert main(["probe", "--config", write_config(tmp_path, config_doc()), "--kmax", "-1"]) == 1


def test_version_module_entry():
    out = subprocess.run([sys.executable, "-m", "ddr", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == f"ddr {__version__}"


def test_help_mentions_threshold():
    out = subprocess.run([sys.executable, "-m", "ddr", "run", "--help"], capture_output=True, text=True)
    assert "1.001" in out.stdout
