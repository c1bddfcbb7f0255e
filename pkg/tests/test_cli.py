import csv
import io
import json
import subprocess
import sys

import pytest

from tatecoh import cli
from tatecoh.algebra import preset
from tatecoh.complexes import ChainMap, concentrated, cone
from tatecoh.modrep import regular_module
from tatecoh.stable import ConsistencyError


def call(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tate_dual_numbers_table(capsys):
    code, out, _ = call(capsys, "tate", "--preset", "k[t]/t^2@F2", "--source", "k", "--target", "k",
                        "--window", "-5", "5")
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == 1 and body["regime"] == "SelfInjective" and body["window"] == [-5, 5]
    assert {int(n): d for n, d in body["dims"].items()} == {n: 1 for n in range(-5, 6)}


def test_tate_csv(capsys):
    code, out, _ = call(capsys, "tate", "--preset", "kC2@F2", "--window", "-2", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["degree"]) for r in rows] == [-2, -1, 0, 1, 2]
    assert all(r["dim"] == "1" and r["regime"] == "SelfInjective" for r in rows)
    assert all((r["window_lo"], r["window_hi"]) == ("-2", "2") for r in rows)


def test_regime(capsys):
    code, out, _ = call(capsys, "regime", "--preset", "T2@F2")
    assert code == 0 and json.loads(out)["regime"] == "FiniteGlobalDimension"


def test_preset_roundtrip_through_file(capsys, tmp_path):
    code, out, _ = call(capsys, "preset", "kV4@F2")
    assert code == 0
    path = tmp_path / "v4.json"
    path.write_text(out)
    code, out, _ = call(capsys, "ext", "--algebra", str(path), "--window", "0", "3")
    assert code == 0
    assert {int(n): d for n, d in json.loads(out)["dims"].items()} == {0: 1, 1: 2, 2: 3, 3: 4}


def test_resolve_and_stable_hom(capsys):
    code, out, _ = call(capsys, "resolve", "--preset", "kV4@F2", "--kind", "complete", "--window", "-2", "2")
    assert code == 0
    body = json.loads(out)
    assert body["window"] == [-2, 2]
    code, out, _ = call(capsys, "stable-hom", "--preset", "k[t]/t^2@F2")
    assert code == 0 and json.loads(out)["dim"] == 1


def test_ring_and_approximate(capsys):
    code, out, _ = call(capsys, "ring", "--preset", "kC2@F2", "--window", "-2", "2")
    assert code == 0
    code, out, _ = call(capsys, "approximate", "--preset", "T2@F2", "--module", "Lambda")
    assert code == 0 and json.loads(out)["regime"] == "FiniteGlobalDimension"


def test_les_from_file(capsys, tmp_path):
    ses = tmp_path / "ses.json"
    ses.write_text(json.dumps({"module": "Lambda", "generators": [[0, 1]]}))
    code, out, _ = call(capsys, "les", "--preset", "k[t]/t^2@F2", "--ses", str(ses), "--window", "-2", "2")
    assert code == 0 and json.loads(out)["passed"] is True


def test_minimize_cone_of_identity(capsys, tmp_path):
    a = preset("k[t]/t^2@F2")
    x = cone(ChainMap.identity(concentrated(regular_module(a))))
    path = tmp_path / "cone.json"
    path.write_text(json.dumps(x.to_json(-1, 0)))
    code, out, _ = call(capsys, "minimize", "--preset", "k[t]/t^2@F2", "--complex", str(path))
    assert code == 0
    body = json.loads(out)
    assert all(r["minimal"] == 0 and r["contractible"] == r["input"] for r in body["table"])


def test_verify_small(capsys):
    code, out, _ = call(capsys, "verify", "--preset", "T2@F2", "--count", "3", "--window", "-1", "1")
    assert code == 0 and json.loads(out)["passed"] is True


def test_domain_errors_exit_1(capsys, tmp_path):
    code, _, err = call(capsys, "tate", "--preset", "nosuch@F2")
    assert code == 1 and json.loads(err)["error"] == "domain"
    code, _, err = call(capsys, "ext", "--preset", "kV4@F2", "--window", "-1", "2")
    assert code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = call(capsys, "regime", "--algebra", str(bad))
    assert code == 1 and json.loads(err)["type"] == "InputError"
    code, _, err = call(capsys, "tate", "--preset", "k[t]/t^2@F2", "--window", "3", "1")
    assert code == 1


def test_unsupported_algebra_exit_1(capsys, tmp_path):
    alg = {"field": {"p": 2}, "dim": 3, "unit": [1, 0, 0],
           "mult": [[0, 0, [1, 0, 0]], [0, 1, [0, 1, 0]], [1, 0, [0, 1, 0]], [0, 2, [0, 0, 1]], [2, 0, [0, 0, 1]]],
           "radical": [[0, 1, 0], [0, 0, 1]]}
    path = tmp_path / "local.json"
    path.write_text(json.dumps(alg))
    code, _, err = call(capsys, "tate", "--algebra", str(path), "--source", "Lambda", "--target", "Lambda",
                        "--cutoff", "5")
    assert code == 1 and json.loads(err)["type"] == "UnsupportedAlgebraError"


def test_consistency_failure_exit_2(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise ConsistencyError("routes disagree")

    monkeypatch.setattr(cli, "tate_cohomology", broken)
    code, _, err = call(capsys, "tate", "--preset", "kC2@F2", "--window", "0", "0")
    assert code == 2 and json.loads(err)["error"] == "consistency"


def test_failed_check_exit_2(capsys, monkeypatch):
    real = cli.approximation

    def failing(*args, **kwargs):
        pair = real(*args, **kwargs)
        pair.report.add("forced", False)
        return pair

    monkeypatch.setattr(cli, "approximation", failing)
    code, out, err = call(capsys, "approximate", "--preset", "kC2@F2")
    assert code == 2 and json.loads(err)["error"] == "check_failed"
    assert json.loads(out)["schema"] == 1


def test_deterministic_output(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        assert cli.run(["tate", "--preset", "kV4@F2", "--window", "-2", "2", "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tatecoh", "regime", "--preset", "kV4@F2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["regime"] == "SelfInjective"


@pytest.mark.parametrize("argv", [["--version"], ["preset", "--list"]])
def test_info_commands(capsys, argv):
    code, out, _ = call(capsys, *argv)
    assert code == 0 and out


def test_malformed_algebra_file(capsys, tmp_path):
    path = tmp_path / "alg.json"
    path.write_text(json.dumps({"dim": 2}))
    code, _, err = call(capsys, "regime", "--algebra", str(path))
    assert code == 1 and json.loads(err)["type"] == "InputError"
