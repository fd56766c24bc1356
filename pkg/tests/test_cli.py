import json
import subprocess
import sys
from pathlib import Path

import pytest

from semiwf import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("raw, path", [
    ({}, "experiment.name"),
    ({"experiment": {"name": "nope"}}, "experiment.name"),
    ({"experiment": {"name": "bounds"}, "extra": {}}, "extra"),
    ({"experiment": {"name": "bounds"}, "params": {"foo": "1"}}, "params.foo"),
    ({"experiment": {"name": "bounds"}, "params": {"dx": "abc"}}, "params.dx"),
    ({"experiment": {"name": "bounds"}, "ladder": {"kmin": "4", "kmax": "5"}}, "ladder"),
    ({"experiment": {"name": "example1"}, "params": {"eps": "0.3"}}, "params.eps"),
    ({"experiment": {"name": "example2"}, "params": {"eps": "0.05", "delta": "0.4"}}, "params.eps"),
    ({"experiment": {"name": "theorem1"}, "params": {"symbol": "x"}}, "params.symbol"),
    ({"experiment": {"name": "example1"}, "params": {"radii": "0.25,0.5"}}, "params.radii"),
    ({"experiment": {"name": "scan"}, "params": {"rect": "0,1"}}, "params.rect"),
    ({"experiment": {"name": "wkb"}, "params": {"counts": "3"}}, "params.counts"),
])
def test_schema_errors_name_the_key(raw, path):
    with pytest.raises(cli.SchemaError, match=path.replace(".", r"\.")):
        cli.resolve(raw)


def test_defaults_are_filled():
    cfg = cli.resolve({"experiment": {"name": "example2"}})
    assert cfg["params"]["radii"] == [0.5, 0.25, 0.125, 0.0625]
    assert cfg["ladder"] == {"kmin": 4, "kmax": 14}


def test_bad_config_exits_1(capsys):
    code, _, err = run(["run", str(CONFIGS / "bad_eps.cfg")], capsys)
    assert code == 1 and "params.eps" in err


def test_missing_config_exits_1(capsys, tmp_path):
    code, _, _ = run(["run", str(tmp_path / "none.cfg")], capsys)
    assert code == 1


def test_true_verdict_exits_0(capsys):
    code, out, _ = run(["transform", "--h", "0.015625"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] is True
    assert set(doc) == {"config", "verdict", "result", "sha256"}


def test_false_verdict_exits_2(capsys):
    # a bump centred at the origin: its fixed-centre series does not decay
    code, out, _ = run(["theorem1", "--kmin", "4", "--kmax", "8", "--radii", "0.5"], capsys)
    assert code == 2 and json.loads(out)["verdict"] is False


def test_reruns_are_byte_identical(tmp_path, capsys):
    # the output path is part of the hashed config, so both runs write to the same stem
    outs = []
    stem = tmp_path / "scan"
    for _ in range(2):
        code, _, _ = run(["scan", "--kmin", "4", "--kmax", "9", "--counts", "9,9", "--output", str(stem)], capsys)
        assert code == 0
        outs.append((stem.with_suffix(".json").read_bytes(), stem.with_suffix(".csv").read_bytes()))
    assert outs[0] == outs[1]
    csv_text = outs[0][1].decode()
    lines = csv_text.splitlines()
    assert lines[0].startswith("# config: ") and lines[1].startswith("# sha256: ")
    assert lines[2] == "x,xi,slope,residual,class"
    assert json.loads(outs[0][0])["sha256"] == lines[1].split()[-1]


def test_hash_depends_on_config():
    cfg = cli.resolve({"experiment": {"name": "bounds"}})
    other = cli.resolve({"experiment": {"name": "bounds"}, "params": {"dx": "0.002"}})
    assert cli.content_hash(cfg, {"a": 1}) != cli.content_hash(other, {"a": 1})
    assert cli.content_hash(cfg, {"a": 1}) == cli.content_hash(cfg, {"a": 1})


def test_thread_env_overrides_config(monkeypatch):
    cfg = cli.resolve({"experiment": {"name": "scan"}, "run": {"workers": "3"}})
    monkeypatch.delenv(cli.THREADS_ENV, raising=False)
    assert cli._workers(cfg) == 3
    monkeypatch.setenv(cli.THREADS_ENV, "7")
    assert cli._workers(cfg) == 7


def test_shipped_configs_parse():
    for path in sorted(CONFIGS.glob("*.cfg")):
        if path.stem == "bad_eps":
            continue
        assert cli.load_config(path)["experiment"]["name"] in cli.EXPERIMENTS


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "semiwf", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "run" in proc.stdout


def test_scan_flags_give_single_non_decay_cell(capsys):
    code, out, _ = run(["scan", "--u", "coherent", "--x0", "0.5", "--xi0", "-1", "--counts", "9,9", "--kmax", "10"],
                       capsys)
    rows = [r.split(",") for r in out.splitlines() if not r.startswith("#")][1:]
    assert code == 0 and len(rows) == 81
    decaying = {"rapid_decay", "underflow"}
    assert [(r[0], r[1]) for r in rows if r[4] not in decaying] == [("0.5", "-1")]


def test_bounds_recurrence_table(capsys):
    code, out, _ = run(["bounds", "--recurrence", "10", "--dx", "0.002", "--scaling", "false"], capsys)
    eps = json.loads(out)["result"]["epsilon"]
    assert code == 0 and len(eps) == 11
    assert eps[:4] == [1.0, 0.5, 0.375, 0.3046875]
