from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from dfsfinder.cli import main


def emit(tmp_path, name, *params):
    path = tmp_path / f"{name}.json"
    args = ["gallery", "emit", name, "--out", str(path)]
    for p in params:
        args += ["--param", p]
    assert main(args) == 0
    return path


def test_gallery_list(capsys):
    assert main(["gallery", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("three_level_counterexample", "two_level_nonsemisimple", "igc_two_level",
                 "squeezed_vacuum_two_level", "dicke_squeezed", "damped_oscillator_truncated",
                 "two_photon_absorber_truncated"):
        assert name in out


def test_gallery_emit_dicke(tmp_path):
    path = emit(tmp_path, "dicke_squeezed", "N=3", "n_plus=2", "r=0.5")
    assert json.loads(path.read_text())["dim"] == 8


def test_gallery_unknown(capsys):
    assert main(["gallery", "emit", "nosuch"]) == 1
    assert "nosuch" in capsys.readouterr().err
    assert main(["gallery", "emit", "igc_two_level", "--param", "zz=1"]) == 1


def test_analyze_three_level(tmp_path, capsys):
    model = emit(tmp_path, "three_level_counterexample")
    report = tmp_path / "rep.json"
    assert main(["analyze", str(model), "--out", str(report)]) == 0
    out = capsys.readouterr().out
    assert "Restricted" in out and "DFS found: 1" in out
    doc = json.loads(report.read_text())
    assert doc["schema_version"].startswith("1.") and len(doc["records"]) == 1
    assert doc["tool_version"]


def test_analyze_none_found(tmp_path, capsys):
    model = emit(tmp_path, "two_level_nonsemisimple")
    assert main(["analyze", str(model)]) == 3
    assert "DFS found: 0" in capsys.readouterr().out


def test_analyze_json_output(tmp_path, capsys):
    model = emit(tmp_path, "igc_two_level")
    capsys.readouterr()
    assert main(["analyze", str(model), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["records"][0]["classification"] == "IGC"


def test_analyze_non_hermitian(tmp_path, capsys):
    model = emit(tmp_path, "igc_two_level")
    doc = json.loads(model.read_text())
    doc["h_eff"][1] = [3.0, 0.0]
    model.write_text(json.dumps(doc))
    assert main(["analyze", str(model)]) == 1
    assert "h_eff" in capsys.readouterr().err


def test_analyze_missing_file_and_bad_tol(tmp_path):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 1
    model = emit(tmp_path, "igc_two_level")
    assert main(["analyze", str(model), "--tol", "bogus=1"]) == 1
    assert main(["analyze", str(model), "--tol", "rank=1e-9"]) == 0


def test_verify_pass_and_determinism(tmp_path, capsys):
    model = emit(tmp_path, "three_level_counterexample")
    report = tmp_path / "rep.json"
    main(["analyze", str(model), "--out", str(report)])
    capsys.readouterr()
    args = ["verify", str(model), str(report), "--trials", "4", "--seed", "3"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert "PASS" in first


def test_verify_corrupted(tmp_path, capsys):
    model = emit(tmp_path, "three_level_counterexample")
    report = tmp_path / "rep.json"
    main(["analyze", str(model), "--out", str(report)])
    doc = json.loads(report.read_text())
    basis = np.array([[complex(*z) for z in v] for v in doc["records"][0]["basis"]]).T
    basis[:, 0] = np.cos(0.1) * basis[:, 0] + np.sin(0.1) * np.array([0, 1, 1]) / np.sqrt(2)
    q = np.linalg.qr(basis)[0]
    doc["records"][0]["basis"] = [[[z.real, z.imag] for z in q[:, k]] for k in range(q.shape[1])]
    report.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(model), str(report), "--trials", "3"]) == 4
    assert "FAIL" in capsys.readouterr().out


def test_verify_label_mismatch(tmp_path):
    m1 = emit(tmp_path, "three_level_counterexample")
    m2 = emit(tmp_path, "igc_two_level")
    report = tmp_path / "rep.json"
    main(["analyze", str(m1), "--out", str(report)])
    assert main(["verify", str(m2), str(report)]) == 1


def _columns(text):
    rows = [line.split("\t") for line in text.strip().splitlines()]
    assert rows[0] == ["time", "purity", "fidelity"]
    return np.array(rows[1:], dtype=float)


def test_propagate_igc_constant(tmp_path, capsys):
    model = emit(tmp_path, "igc_two_level")
    capsys.readouterr()
    assert main(["propagate", str(model), "--state", "dfs:0", "--t-final", "10"]) == 0
    cols = _columns(capsys.readouterr().out)
    assert np.allclose(cols[:, 1], 1, atol=1e-9) and np.allclose(cols[:, 2], 1, atol=1e-9)


def test_propagate_decay_dips_to_half(tmp_path, capsys):
    doc = {
        "format": "dfsfinder-model", "schema_version": "1.0", "label": "decay", "dim": 2,
        "h_eff": [[0, 0]] * 4,
        "dissipator": {"diagonal": [{"lambda": 1.0, "J": [[0, 0], [1, 0], [0, 0], [0, 0]]}]},
    }
    model = tmp_path / "decay.json"
    model.write_text(json.dumps(doc))
    out = tmp_path / "ts.tsv"
    t_half = float(np.log(2))
    assert main(["propagate", str(model), "--state", "basis:1", "--t-final", str(t_half),
                 "--out", str(out)]) == 0
    cols = _columns(out.read_text())
    assert cols[-1, 1] == pytest.approx(0.5, abs=1e-6)
    assert cols[:, 1].min() >= 0.5 - 1e-9


def test_propagate_closed_system_from_file(tmp_path, capsys):
    doc = {
        "format": "dfsfinder-model", "schema_version": "1.0", "label": "closed", "dim": 2,
        "h_eff": [[1, 0], [0, 0], [0, 0], [-1, 0]], "dissipator": {"diagonal": []},
    }
    model = tmp_path / "closed.json"
    model.write_text(json.dumps(doc))
    state = tmp_path / "state.json"
    state.write_text(json.dumps({"state": [[2 ** -0.5, 0], [0, 2 ** -0.5]]}))
    capsys.readouterr()
    assert main(["propagate", str(model), "--state", str(state), "--t-final", "3"]) == 0
    cols = _columns(capsys.readouterr().out)
    assert np.allclose(cols[:, 1], 1, atol=1e-12)


def test_propagate_step_cap(tmp_path, monkeypatch):
    import dfsfinder.cli as cli
    from dfsfinder.oracle import propagate as real

    monkeypatch.setattr(cli, "propagate", lambda *a, **k: real(*a, **{**k, "max_steps": 64}))
    model = emit(tmp_path, "igc_two_level")
    assert main(["propagate", str(model), "--state", "basis:0", "--t-final", "100"]) == 2


def test_propagate_bad_state(tmp_path):
    model = emit(tmp_path, "igc_two_level")
    assert main(["propagate", str(model), "--state", "dfs:5"]) == 1
    assert main(["propagate", str(model), "--state", "basis:7"]) == 1


@pytest.mark.parametrize("name", ["three_level_counterexample", "igc_two_level",
                                  "squeezed_vacuum_two_level", "dicke_squeezed", "random_model"])
def test_pipeline(tmp_path, name, capsys):
    model = emit(tmp_path, name)
    report = tmp_path / "rep.json"
    code = main(["analyze", str(model), "--out", str(report)])
    assert code in (0, 3)
    assert main(["verify", str(model), str(report), "--trials", "2"]) == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dfsfinder", "gallery", "list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "igc_two_level" in proc.stdout
