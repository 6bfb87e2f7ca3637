import json
import os
import subprocess
import sys

import pytest

from fillvol import cli
from fillvol.cli import main, report_body, run_job


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    o, e = capsys.readouterr()
    return code, (json.loads(o) if o.strip().startswith("{") and code == 0 else o), e


def read_csv_rows(path):
    lines = [l for l in open(path).read().splitlines() if not l.startswith("#")]
    return [l.split(",") for l in lines]


def test_fv_job(out, capsys):
    code, res, _ = run(capsys, "fv", "--complex", "z2-torus", "--max-k", "4")
    assert code == 0
    rows = read_csv_rows(res["output"])
    assert rows[0] == ["k", "value", "status", "mode", "witness_id", "radius"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4"]
    assert rows[-1][:4] == ["4", "1", "exact", "exhaustive"]
    assert os.path.dirname(res["output"]) == str(out)


def test_fill_gersten(out, capsys):
    code, res, _ = run(capsys, "fill", "--complex", "gersten(2)", "--target", '[[2, "e", ""]]',
                       "--format", "json")
    assert code == 0
    doc = json.load(open(res["output"]))
    assert doc["report"]["result"]["value"] == 1
    assert doc["report"]["result"]["lp_bound"] == "1/2"


def test_malformed_document(out, capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"version": 1, "kind": "job", "task": "fv",
                               "complex": "z2-torus", "maxk": 3}))
    code, _, err = run(capsys, "run", str(job))
    assert code == 2
    e = json.loads(err)
    assert e["path"] == str(job) and e["field"] == "maxk"


def test_malformed_complex_document(out, capsys, tmp_path):
    doc = tmp_path / "c.json"
    doc.write_text(json.dumps({"version": 1, "kind": "complex", "group": "z2",
                               "orbits": [{"id": "v", "dim": 0, "colour": 1}]}))
    code, _, err = run(capsys, "fv", "--complex", str(doc))
    assert code == 2
    e = json.loads(err)
    assert e["path"] == str(doc) and e["field"] == "orbits[0]"


def test_inconsistent_complex_exit_code(out, capsys, tmp_path):
    doc = tmp_path / "c.json"
    doc.write_text(json.dumps({"version": 1, "kind": "complex", "group": "z2", "orbits": [
        {"id": "v", "dim": 0},
        {"id": "x", "dim": 1, "boundary": [[1, "x", "v"], [-1, "", "v"]]},
        {"id": "s", "dim": 2, "boundary": [[1, "", "x"]]}]}))
    code, _, err = run(capsys, "fv", "--complex", str(doc))
    assert code == 4
    assert json.loads(err)["error"] == "SpecConsistencyError"


def test_gersten_needs_parameter(out, capsys):
    code, _, err = run(capsys, "fill", "--complex", "gersten", "--target", "[]")
    assert code == 2 and json.loads(err)["field"] == "k"


def test_resource_limit_exit_code(out, capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"version": 1, "kind": "job", "task": "fv", "complex": "z3-cubes",
                               "dim": 2, "max_k": 6, "radius": 2, "caps": {"max_enum": 1}}))
    code, _, err = run(capsys, "run", str(job))
    assert code == 3
    e = json.loads(err)
    assert e["error"] == "ResourceLimitError" and e["partial"] is True


def test_caps_cannot_be_raised_without_override(out, capsys, tmp_path):
    job = {"task": "fv", "complex": "z2-torus", "max_k": 4, "caps": {"max_nodes": 10 ** 9}}
    with pytest.raises(Exception) as e:
        run_job(job, str(out))
    assert getattr(e.value, "exit_code", None) == 2
    run_job(job, str(out), cap_override=True)


def test_config_file(out, capsys, tmp_path):
    cfg = tmp_path / "caps.json"
    cfg.write_text(json.dumps({"version": 1, "caps": {"max_radius": 2}}))
    code, _, err = run(capsys, "fv", "--complex", "z2-torus", "--radius", "3",
                       "--config", str(cfg))
    assert code == 2 and json.loads(err)["field"] == "radius"


def test_determinism_and_cache(out, capsys, tmp_path):
    args = ["equivalence", "--samples", "20", "--seed", "5"]
    code, first, _ = run(capsys, *args, "--out", str(tmp_path / "a"))
    code2, second, _ = run(capsys, *args, "--out", str(tmp_path / "b"))
    assert code == code2 == 0
    assert not first["cache_hit"] and not second["cache_hit"]
    assert report_body(first["output"]) == report_body(second["output"])
    code3, third, _ = run(capsys, *args, "--out", str(tmp_path / "a"))
    assert third["cache_hit"]
    assert report_body(third["output"]) == report_body(first["output"])


def test_cache_skips_solver(out, monkeypatch):
    job = {"task": "fv", "complex": "z2-torus", "max_k": 4}
    run_job(job, str(out))

    def boom(*a, **k):
        raise AssertionError("solver called on a cached job")

    monkeypatch.setitem(cli.TASK_FUNCS, "fv", boom)
    _, _, hit = run_job(job, str(out))
    assert hit


def test_cache_key_changes_with_input():
    from fillvol.config import Caps
    a = cli.cache_key({"task": "fv", "complex": "z2-torus", "max_k": 4}, Caps())
    b = cli.cache_key({"task": "fv", "complex": "z2-torus", "max_k": 5}, Caps())
    c = cli.cache_key({"task": "fv", "complex": "z2-torus", "max_k": 4}, Caps(max_nodes=5))
    assert len({a, b, c}) == 3
    assert a == cli.cache_key({"max_k": 4, "complex": "z2-torus", "task": "fv"}, Caps())


def test_every_command_runs(out, capsys):
    cmds = [
        ["operator-bound", "--map", "z2-subdivide", "--samples", "50"],
        ["dehn-consistency", "--complex", "z2-torus", "--max-k", "6"],
        ["confluence", "--presentation", "heisenberg3"],
        ["subgroup-check", "--max-k", "4"],
        ["fill", "--complex", "z3-cubes", "--radius", "3", "--max-radius", "4",
         "--target", '[[1,"x",""],[1,"y","x"],[1,"z","x y"],[-1,"x","y z"],[-1,"y","z"],[-1,"z",""]]'],
    ]
    for argv in cmds:
        code, res, err = run(capsys, *argv)
        assert code == 0, err
        assert os.path.isfile(res["output"])


def test_list_builtins(capsys):
    assert main(["list-builtins"]) == 0
    cat = json.loads(capsys.readouterr().out)
    names = {c["name"] for c in cat["complexes"]}
    assert {"z2-torus", "z3-cubes", "free2", "heisenberg3", "gersten(k)"} <= names


def test_console_script(tmp_path):
    env = dict(os.environ, FILLVOL_OUT=str(tmp_path))
    proc = subprocess.run([sys.executable, "-m", "fillvol.cli", "fv", "--complex", "z2-torus",
                           "--max-k", "4"], capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "ok"
