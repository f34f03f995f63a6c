import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import trapezoid

from rmtdensity import __version__
from rmtdensity.cli.writers import Table, format_cell, render_csv, render_json
from rmtdensity.config import settings
from rmtdensity.main import main

REPO_ROOT = Path(__file__).resolve().parent.parent


def _run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(cell) for cell in row] for row in rows[1:]]


class TestExact:
    def test_gue_normalized_on_grid(self, capsys):
        code, out, _ = _run(capsys, "exact", "--ensemble", "gue", "--n", "10", "--points", "801")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["x", "value"]
        data = np.array(rows)
        assert data.shape == (801, 2)
        assert abs(trapezoid(data[:, 1], data[:, 0]) - 1.0) <= 1e-4

    def test_float_formatting(self, capsys):
        _, out, _ = _run(capsys, "exact", "--n", "3", "--points", "3", "--xmin", "-1", "--xmax", "1")
        lines = out.split("\n")
        assert lines[1].startswith("-1.0000000000000000e+00,")
        assert out.endswith("\n") and "\r" not in out

    def test_json_document(self, capsys):
        code, out, _ = _run(capsys, "exact", "--n", "4", "--points", "11", "--format", "json", "--epsilon", "1e-5")
        assert code == 0
        document = json.loads(out)
        assert sorted(document) == ["columns", "config", "metadata", "rows", "version"]
        assert document["version"] == __version__
        assert document["config"]["epsilon"] == 1e-5
        assert document["config"]["n"] == 4
        assert document["columns"] == ["x", "value"]
        assert len(document["rows"]) == 11
        assert document["metadata"]["method"] == "exact_kernel"

    def test_deterministic(self, capsys):
        argv = ["exact", "--ensemble", "lue", "--alpha", "0.5", "--n", "12", "--format", "json"]
        first = _run(capsys, *argv)[1]
        second = _run(capsys, *argv)[1]
        assert first == second

    def test_lue_grid_is_clamped_at_hard_edge(self, capsys):
        code, out, _ = _run(capsys, "exact", "--ensemble", "lue", "--alpha", "0.5", "--n", "10")
        assert code == 0
        _, rows = _csv(out)
        assert rows[0][0] == 1e-6
        assert all(row[1] > 0 for row in rows)


class TestValidation:
    @pytest.mark.parametrize(
        "argv",
        [
            ["exact", "--n", "0"],
            ["exact", "--xmin", "1", "--xmax", "0"],
            ["exact", "--points", "1"],
            ["exact", "--ensemble", "lue", "--alpha", "-1"],
            ["exact", "--ensemble", "goe"],
            ["bulk", "--order", "2"],
            ["edge", "--order", "3"],
            ["match", "--ximax", "0.5"],
            ["oracle-check", "--contour-points", "65"],
            ["moments", "--pmax", "21"],
            ["exact", "--epsilon", "0"],
            ["nonsense"],
        ],
    )
    def test_rejected_before_computing(self, capsys, argv):
        code, out, err = _run(capsys, *argv)
        assert code == 1
        assert out == ""
        assert err

    def test_lue_negative_x_is_a_domain_error(self, capsys):
        code, _, err = _run(capsys, "bulk", "--ensemble", "lue", "--xmin", "-0.5", "--xmax", "0.5")
        assert code == 1
        assert "error" in err

    def test_lue_exact_grid_below_hard_edge(self, capsys):
        code, out, err = _run(capsys, "exact", "--ensemble", "lue", "--xmin", "-1", "--xmax", "1")
        assert code == 1
        assert out == ""
        assert "hard edge" in err

    def test_bulk_grid_reaching_the_edge(self, capsys):
        code, _, err = _run(capsys, "bulk", "--xmin", "-1", "--xmax", "1")
        assert code == 1
        assert "edge" in err


class TestCommands:
    def test_bulk(self, capsys):
        code, out, _ = _run(capsys, "bulk", "--n", "20", "--points", "21")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["x", "value"]
        assert len(rows) == 21

    def test_edge(self, capsys):
        code, out, _ = _run(capsys, "edge", "--ensemble", "lue", "--alpha", "2", "--n", "30", "--points", "9", "--format", "json")
        assert code == 0
        document = json.loads(out)
        assert document["columns"] == ["xi", "value"]
        assert document["metadata"]["order"] == 2

    def test_match(self, capsys):
        code, out, _ = _run(capsys, "match", "--n", "40")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["xi", "reexpanded", "bulk", "edge"]
        assert len(rows) == 51
        assert rows[0][0] == -6.0
        assert rows[-1][0] == -1.0

    def test_oracle_check_passes(self, capsys):
        code, out, _ = _run(capsys, "oracle-check", "--ensemble", "lue", "--alpha", "0.5", "--n", "10")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["x", "kernel", "contour", "rel_gap"]
        assert len(rows) == 50
        assert max(row[3] for row in rows) <= 1e-6

    def test_oracle_check_gap_exit_code(self, capsys):
        code, out, err = _run(capsys, "oracle-check", "--n", "6", "--points", "5", "--tolerance", "1e-300")
        assert code == 2
        assert out.startswith("x,kernel,contour,rel_gap")
        assert "exceeds tolerance" in err

    def test_oracle_size_guard(self, capsys):
        code, _, _ = _run(capsys, "oracle-check", "--n", "200")
        assert code == 1

    def test_moments(self, capsys):
        code, out, _ = _run(capsys, "moments", "--ensemble", "lue", "--alpha", "0.5", "--n", "10", "--pmax", "2")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["p", "value", "error_estimate"]
        assert [row[0] for row in rows] == [0, 1, 2]
        assert rows[0][1] == pytest.approx(1.0, abs=1e-8)
        assert rows[1][1] == pytest.approx(0.25 + 0.5 / 40, rel=1e-10)

    def test_scaling_report(self, capsys):
        code, out, _ = _run(capsys, "scaling-report")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert "verdict" in rows[0]
        verdicts = [row[rows[0].index("verdict")] for row in rows[1:]]
        assert len(verdicts) == 8
        assert set(verdicts) == {"PASS"}


class TestFigure:
    def test_all_needs_directory(self, capsys):
        code, out, err = _run(capsys, "figure", "--which", "all")
        assert code == 1
        assert out == ""
        assert "--out" in err

    def test_all_writes_one_file_per_figure(self, capsys, tmp_path):
        target = tmp_path / "figures"
        code, _, _ = _run(capsys, "figure", "--which", "all", "--out", str(target))
        assert code == 0
        names = sorted(path.name for path in target.iterdir())
        assert names == ["figure-gue-bulk.csv", "figure-gue-edge.csv", "figure-lue-bulk.csv", "figure-lue-edge.csv"]

    def test_lue_edge_has_limit_column(self, capsys):
        code, out, _ = _run(capsys, "figure", "--which", "lue-edge")
        assert code == 0
        header, rows = _csv(out)
        assert header == ["xi", "exact", "asymptotic", "abs_error", "limit"]
        assert len(rows) == 201

    def test_single_figure_to_file(self, capsys, tmp_path):
        target = tmp_path / "gue-bulk.json"
        code, out, _ = _run(capsys, "figure", "--which", "gue-bulk", "--format", "json", "--out", str(target))
        assert code == 0
        assert out == ""
        document = json.loads(target.read_text())
        assert document["metadata"]["figure"] == "gue-bulk"

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = _run(capsys, "exact", "--points", "5", "--out", str(tmp_path / "missing" / "out.csv"))
        assert code == 1
        assert "cannot write" in err


class TestWriters:
    def test_format_cell(self):
        assert format_cell(0.1) == "1.0000000000000001e-01"
        assert format_cell(3) == "3"
        assert format_cell(True) == "true"
        assert format_cell("PASS") == "PASS"

    def test_render_csv(self):
        table = Table(columns=["a", "b"], rows=[[1.5, "x"]])
        assert render_csv(table) == "a,b\n1.5000000000000000e+00,x\n"

    def test_render_csv_echoes_overrides(self):
        table = Table(columns=["a"], rows=[[1.0]])
        text = render_csv(table, {"quadrature_panels": 32, "bulk_density_floor": 0.002})
        assert text.split("\n")[:3] == [
            "# settings: bulk_density_floor=2.0000000000000000e-03",
            "# settings: quadrature_panels=32",
            "a",
        ]

    def test_render_json_uses_full_precision(self):
        table = Table(columns=["x"], rows=[[0.1], [2]], metadata={"flag": True, "empty": []})
        text = render_json(table, {"n": 3, "radius": None})
        assert '"rows": [\n    [\n      1.0000000000000001e-01\n    ],\n    [\n      2\n    ]\n  ]' in text
        assert text.endswith("}\n")
        document = json.loads(text)
        assert document["rows"] == [[0.1], [2]]
        assert document["metadata"] == {"empty": [], "flag": True}
        assert document["config"] == {"n": 3, "radius": None}
        assert list(document) == ["columns", "config", "metadata", "rows", "version"]


class TestSettingsEcho:
    def test_json_carries_numeric_settings(self, capsys):
        code, out, _ = _run(capsys, "exact", "--n", "3", "--points", "5", "--format", "json")
        assert code == 0
        echoed = json.loads(out)["config"]["settings"]
        assert echoed == settings.numeric_settings()
        assert echoed["quadrature_max_panels"] == 2048

    def test_csv_has_no_comments_by_default(self, capsys):
        _, out, _ = _run(capsys, "exact", "--n", "3", "--points", "5")
        assert out.startswith("x,value\n")

    def test_overridden_setting_changes_header(self, capsys, monkeypatch):
        monkeypatch.setattr(settings, "bulk_density_floor", 0.002)
        code, out, _ = _run(capsys, "bulk", "--n", "20", "--points", "5")
        assert code == 0
        lines = out.split("\n")
        assert lines[0] == "# settings: bulk_density_floor=2.0000000000000000e-03"
        assert lines[1].startswith("x,")

    def test_overridden_setting_in_json(self, capsys, monkeypatch):
        monkeypatch.setattr(settings, "quadrature_panels", 32)
        _, out, _ = _run(capsys, "moments", "--n", "3", "--pmax", "2", "--format", "json")
        assert json.loads(out)["config"]["settings"]["quadrature_panels"] == 32


def test_version(capsys):
    code, out, _ = _run(capsys, "--version")
    assert code == 0
    assert __version__ in out


def test_module_entry_point():
    completed = subprocess.run(
        [sys.executable, "-m", "rmtdensity", "exact", "--n", "2", "--points", "3"],
        cwd=REPO_ROOT,
        capture_output=True,
        text=True,
        check=False,
    )
    assert completed.returncode == 0
    assert completed.stdout.splitlines()[0] == "x,value"
    assert len(completed.stdout.splitlines()) == 4
