import csv
import io
import json

import pytest

from rainbowpack import cli
from rainbowpack.model import RandomizedFailure

WORKED = ('{"dimension":1,"capacity":["1"],'
          '"vectors":[["0.1"],["0.15"],["0.2"],["0.3"],["0.4"],["0.9"]]}')
KNAP = '{"dimension":1,"capacity":["1"],"vectors":[["0.6"],["0.7"]],"profits":[5,6],"containers":1}'


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("worked", WORKED), ("knap", KNAP), ("bad", "{"),
                       ("big", '{"dimension":1,"capacity":["1"],"vectors":[["2"]]}'),
                       ("twod", '{"dimension":2,"capacity":["1","1"],"vectors":[["1","1"]]}')]:
        p = tmp_path / f"{name}.json"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv", [("binpack", "--deterministic"), ("pack", "--seed", "7"),
                                  ("pack", "--oracle"), ("binpack",)])
def test_worked_example_objective(capsys, files, argv):
    code, out, _ = run(capsys, *argv, files["worked"])
    assert code == 0
    assert out.startswith('{"objective":3,')


def test_certificate_and_text_format(capsys, files):
    code, out, _ = run(capsys, "pack", "--emit-certificate", files["worked"])
    data = json.loads(out)
    assert data["certificate"]["validation"]["valid"] is True
    assert data["certificate"]["trace"]["containers"] == 3
    code, out, _ = run(capsys, "knapsack", "--format", "text", files["knap"])
    assert code == 0 and out.splitlines() == ["objective 6", "placement - 0"]


def test_identical_runs_are_byte_identical(capsys, files):
    outs = {run(capsys, "cover", "--seed", "5", "--emit-certificate", files["worked"])[1]
            for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("problem", ["pack", "cover", "knapsack", "binpack"])
def test_exit_codes_for_bad_inputs(capsys, files, problem):
    assert run(capsys, problem, files["bad"])[0] == 2
    assert run(capsys, problem, "/nonexistent/instance.json")[0] == 2


def test_exit_codes_for_unsatisfiable_and_misused_flags(capsys, files):
    assert run(capsys, "pack", files["big"])[0] == 2
    assert run(capsys, "binpack", files["twod"])[0] == 2
    assert run(capsys, "knapsack", files["worked"])[0] == 2
    assert run(capsys, "cover", "--deterministic", files["worked"])[0] == 2
    assert run(capsys, "pack", "--seed", "-1", files["worked"])[0] == 2
    assert run(capsys, "cover", files["twod"])[0] == 0


def test_randomized_failure_exit_code(capsys, files, monkeypatch):
    def boom(*a, **k):
        raise RandomizedFailure("forced", {"containers": 2})
    monkeypatch.setattr(cli.solver_vp, "solve", boom)
    code, _, err = run(capsys, "pack", files["worked"])
    assert code == 3 and '"containers":2' in err


def bench(capsys, tmp_path, spec, env=None, monkeypatch=None):
    p = tmp_path / "spec.json"
    p.write_text(spec)
    if env:
        monkeypatch.setenv("RAINBOWPACK_THREADS", env)
    code, out, err = run(capsys, "bench", str(p))
    return code, list(csv.DictReader(io.StringIO(out))), out


def test_bench_empty_spec(capsys, tmp_path):
    code, rows, out = bench(capsys, tmp_path, "")
    assert code == 0 and rows == [] and out == "problem,n,d,k,seed,wall_time,objective\n"


def test_bench_repetitions_are_consistent(capsys, tmp_path, monkeypatch):
    spec = json.dumps({"runs": [
        {"problem": "pack", "n": 6, "k": 2, "seeds": [4], "repetitions": 3},
        {"problem": "binpack", "n": 6, "k": 1, "deterministic": True},
        {"problem": "cover", "n": 5, "k": 1},
        {"problem": "knapsack", "n": 4, "k": 1, "containers": 2}]})
    code, rows, _ = bench(capsys, tmp_path, spec, "2", monkeypatch)
    assert code == 0 and len(rows) == 6
    assert len({r["objective"] for r in rows[:3]}) == 1
    assert [r["problem"] for r in rows] == ["pack"] * 3 + ["binpack", "cover", "knapsack"]


@pytest.mark.parametrize("spec", ['{"runs": 3}', '{"runs": [{"problem": "sort", "n": 1, "k": 0}]}',
                                  '{"runs": [{"problem": "pack", "n": -1, "k": 0}]}', "[1"])
def test_bench_malformed_spec(capsys, tmp_path, spec):
    assert bench(capsys, tmp_path, spec)[0] == 2


def test_bench_bad_thread_variable(capsys, tmp_path, monkeypatch):
    assert bench(capsys, tmp_path, "{}", "many", monkeypatch)[0] == 2
