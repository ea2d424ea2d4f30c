"""
Tests for the CSV and JSON artifact writers.
"""
import json

import numpy as np

from inverse_square_oscillator.utils.output import format_value, write_csv, write_json

CONFIG = {"task": "spectrum", "g": 0.15625, "options": {"n_max": np.int64(5)}}


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(np.int32(7)) == "7"
    assert format_value(0.1) == "0.1"
    assert float(format_value(np.float64(1.0 / 3.0))) == 1.0 / 3.0
    assert format_value("plus") == "plus"


def test_write_csv_header(tmp_path):
    path = write_csv(tmp_path / "sub" / "levels.csv", CONFIG, ("n", "lambda"), [(0, 0.25), (1, 2.25)])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert json.loads(lines[0][len("# config: "):]) == {"g": 0.15625, "options": {"n_max": 5}, "task": "spectrum"}
    assert lines[1:] == ["n,lambda", "0,0.25", "1,2.25"]


def test_write_csv_blocks(tmp_path):
    blocks = [("k=0", [(0, 1.0, 0.5)]), ("k=1", [(1, 1.0, 0.25)])]
    path = write_csv(tmp_path / "copy.csv", CONFIG, ("k", "x", "rho"), blocks, blocks=True)
    lines = path.read_text().splitlines()
    assert lines[1:] == ["k,x,rho", "# block: k=0", "0,1.0,0.5", "# block: k=1", "1,1.0,0.25"]


def test_write_json(tmp_path):
    path = write_json(tmp_path / "spectrum.json", CONFIG, {"levels": np.array([0.25, 1.75]), "ok": np.bool_(True)})
    document = json.loads(path.read_text())
    assert document["config"]["options"]["n_max"] == 5
    assert document["levels"] == [0.25, 1.75]
    assert document["ok"] is True
