import json
import re

import pytest

from sgnft import cli, spectral


def write_config(path, **cfg):
    cfg.setdefault("version", 1)
    path.write_text(json.dumps(cfg))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_times(text):
    return re.sub(r'"(started|finished)": "[^"]*"', '"T": ""', text)


def test_verify_trivial_data(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", data={"family": "zero"},
                       k_grid={"values": [0.5, 1.0, 3.0]})
    code, out, _ = run(capsys, "verify", "--config", cfg)
    assert code == 0
    res = json.loads(out)["residuals"]
    assert all(v < 1e-10 for v in res.values())


def test_spectral_rejects_k_zero(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", data={"family": "zero"}, k_grid={"values": [1.0, 0.0]})
    code, out, err = run(capsys, "spectral", "--config", cfg)
    assert code == 3 and out == ""
    assert json.loads(err)["error"]["message"] == "spectral parameter k = 0 excluded"


def test_global_relation_kink(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json",
                       data={"family": "kink", "params": {"x0": 2, "v": 0.5, "sign": -1}})
    code, out, _ = run(capsys, "global-relation", "--config", cfg, "--threads", "2")
    doc = json.loads(out)
    assert code == 0 and doc["residuals"]["sup_c"] <= 1e-5 and len(doc["samples"]) == 50


def test_spectral_csv_matches_json(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", data={"family": "kink", "params": {"x0": 2, "v": 0.5}},
                       k_grid={"values": [0.3, 2.0, [1.5, 0.5]]}, quantity="cd")
    _, js, _ = run(capsys, "spectral", "--config", cfg)
    _, cs, _ = run(capsys, "spectral", "--config", cfg, "--format", "csv")
    samples = json.loads(js)["samples"]
    lines = cs.strip().split("\n")
    header = lines[0].split(",")
    for s, line in zip(samples, lines[1:]):
        row = dict(zip(header, line.split(",")))
        for name, v in s["values"].items():
            assert float(row[name]) == v


def test_csv_profiles_relative_to_config(tmp_path, capsys):
    data = tmp_path / "data"
    data.mkdir()
    (data / "u1.csv").write_text("x,value\n" + "".join(f"{i / 10},0.0\n" for i in range(200)))
    cfg = write_config(tmp_path / "c.json",
                       initial={"family": "csv", "params": {"rate": "data/u1.csv", "truncation_L": 15}},
                       k_grid={"values": [2.0]})
    code, out, _ = run(capsys, "spectral", "--config", cfg)
    assert code == 0
    vals = json.loads(out)["samples"][0]["values"]
    assert abs(vals["a_re"] - 1) < 1e-10 and abs(vals["b_re"]) < 1e-10


def test_malformed_csv_is_config_error(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("x,value\n0,0\n0.1,nan\n0.2,0\n0.3,0\n")
    cfg = write_config(tmp_path / "c.json", initial={"family": "csv", "params": {"field": "bad.csv"}})
    code, out, err = run(capsys, "spectral", "--config", cfg)
    assert code == 2 and out == ""
    e = json.loads(err)["error"]
    assert e["kind"] == "parse_error" and "line 3" in e["message"]


@pytest.mark.parametrize("command, cfg, code, kind", [
    ("spectral", {"version": 7, "data": {"family": "zero"}}, 2, "config_error"),
    ("spectral", {"data": {"family": "nope"}}, 2, "config_error"),
    ("verify", {"data": {"family": "kink", "params": {"v": 0.0}}}, 3, "decay_error"),
    ("spectral", {"data": {"family": "zero"}, "k_grid": {"values": [[1, -1]]}}, 3, "region_error"),
])
def test_error_exit_codes(tmp_path, capsys, command, cfg, code, kind):
    path = write_config(tmp_path / "c.json", **cfg)
    got, out, err = run(capsys, command, "--config", path)
    assert got == code and out == ""
    assert json.loads(err)["error"]["kind"] == kind


def test_missing_config_is_io_error(tmp_path, capsys):
    code, out, err = run(capsys, "verify", "--config", str(tmp_path / "none.json"))
    assert code == 5 and json.loads(err)["error"]["exit_code"] == 5


def test_unwritable_output(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", data={"family": "zero"}, k_grid={"values": [2.0]})
    code, _, _ = run(capsys, "spectral", "--config", cfg, "--out", str(tmp_path / "no" / "x.json"))
    assert code == 5


def test_threads_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SG_NFT_THREADS", "x")
    cfg = write_config(tmp_path / "c.json", data={"family": "zero"})
    code, _, err = run(capsys, "compat", "--config", cfg)
    assert code == 2 and "SG_NFT_THREADS" in err


def test_deterministic_reports(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", data={"family": "kink", "params": {"x0": 2, "v": 0.5}},
                       k_grid={"values": [0.3, 1.0, 4.0]})
    outs = [strip_times(run(capsys, "verify", "--config", cfg)[1]) for _ in range(2)]
    assert outs[0] == outs[1]
    threaded = strip_times(run(capsys, "verify", "--config", cfg, "--threads", "3")[1])
    assert json.loads(threaded)["residuals"] == json.loads(outs[0])["residuals"]


@pytest.mark.parametrize("command", ["expand", "compat", "conservation"])
def test_other_commands_run(tmp_path, capsys, command):
    cfg = write_config(tmp_path / "c.json", data={"family": "kink", "params": {"x0": 2, "v": 0.5}})
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, command, "--config", cfg, "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["command"] == command


def test_default_grid_shape():
    grid = spectral.default_k_grid()
    real, hatted = grid[:200], grid[200:]
    assert min(abs(k) for k in real) == pytest.approx(0.05) and max(abs(k) for k in real) == pytest.approx(100)
    assert min(abs(k) for k in hatted) == pytest.approx(1e-3) and max(abs(k) for k in hatted) < 1
    assert all(-k in grid for k in grid)
