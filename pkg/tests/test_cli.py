import json
import subprocess
import sys

import pytest

from subteam import BAConfig, KernelParams, generate_ba, sample_team
from subteam import cli


@pytest.fixture
def netdir(tmp_path):
    assert cli.main(["gen", "--n", "20", "--attach", "3", "--skills", "3", "--seed", "7",
                     "--out", str(tmp_path / "net")]) == 0
    return tmp_path / "net"


def team_args(netdir, seed=7):
    net = generate_ba(BAConfig(n=20, attach=3, l=3, seed=seed))
    team = [net.node_ids[v] for v in sample_team(net, 5, seed=1)]
    return ["--edges", str(netdir / "edges.tsv"), "--skills", str(netdir / "skills.csv"),
            "--W", str(netdir / "W.csv"), "--team", ",".join(team),
            "--out-of", ",".join(team[1:3])], team


def test_gen_writes_files_and_is_byte_stable(tmp_path, capsys):
    for d in ("a", "b"):
        assert cli.main(["gen", "--n", "50", "--attach", "3", "--skills", "6", "--rate", "1",
                         "--seed", "7", "--out", str(tmp_path / d)]) == 0
    out = capsys.readouterr().out
    assert "n=50" in out
    for name in ("edges.tsv", "skills.csv", "W.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_gen_rejects_bad_config(tmp_path, capsys):
    assert cli.main(["gen", "--n", "3", "--attach", "3", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_replace_prints_two_ids(netdir, capsys, tmp_path):
    args, team = team_args(netdir)
    report = tmp_path / "r.json"
    assert cli.main(["replace", *args, "--json", str(report)]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("replacement:"))
    picks = line.split(":", 1)[1].strip().split(",")
    assert len(picks) == 2 and not set(picks) & set(team)
    data = json.loads(report.read_text())
    assert data["replacement"] == picks and len(data["rounds"]) == 2


@pytest.mark.parametrize("algo", ["iterative", "local_best", "brute"])
def test_replace_other_algorithms(netdir, capsys, algo):
    args, _ = team_args(netdir)
    assert cli.main(["replace", *args, "--algorithm", algo]) == 0
    assert "score:" in capsys.readouterr().out


def test_replace_brute_over_budget(netdir, capsys):
    args, _ = team_args(netdir)
    assert cli.main(["replace", *args, "--algorithm", "brute", "--budget", "5"]) == 2
    assert "budget" in capsys.readouterr().err


def test_replace_bound_not_above_brute(netdir, capsys):
    args, _ = team_args(netdir)
    assert cli.main(["replace", *args, "--bound"]) == 0
    out = dict(l.split(": ", 1) for l in capsys.readouterr().out.splitlines() if ": " in l)
    bound, brute, score = float(out["bound"]), float(out["brute score"]), float(out["score"])
    assert bound <= brute + 1e-12
    assert score >= bound - 1e-9


def test_curvature_command(netdir, capsys, tmp_path):
    args, _ = team_args(netdir)
    assert cli.main(["curvature", *args, "--json", str(tmp_path / "c.json")]) == 0
    assert "kappa:" in capsys.readouterr().out
    data = json.loads((tmp_path / "c.json").read_text())
    assert 0 <= data["kappa"] <= 1


def test_curvature_pool_cap(netdir, capsys):
    args, _ = team_args(netdir)
    assert cli.main(["curvature", *args, "--pool-cap", "3"]) == 2


@pytest.mark.parametrize("mutate", [
    lambda a: a[:a.index("--out-of") + 1] + ["nobody"],
    lambda a: a[:a.index("--out-of") + 1] + [a[a.index("--team") + 1]],
    lambda a: a + ["--safety", "1.5"],
    lambda a: [x if not x.endswith("edges.tsv") else x + ".missing" for x in a],
])
def test_replace_invalid_inputs_exit_2(netdir, capsys, mutate):
    args, _ = team_args(netdir)
    assert cli.main(["replace", *mutate(args)]) == 2


def test_numerical_failure_exit_3(netdir, capsys, monkeypatch):
    args, _ = team_args(netdir)
    monkeypatch.setattr(cli, "instance_decay", lambda *a, **k: KernelParams(50.0))
    assert cli.main(["replace", *args]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_ingest_command(tmp_path, capsys):
    path = tmp_path / "r.jsonl"
    path.write_text("\n".join([
        json.dumps({"members": ["a", "b", "c"], "tags": ["ml"], "year": 2001}),
        json.dumps({"members": ["a", "b"], "tags": ["db"], "year": 2002}),
        "garbage",
    ]) + "\n")
    assert cli.main(["ingest", "--records", str(path), "--skill-mode", "decay",
                     "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert "records=2 skipped=1" in out and "n=3" in out
    edges = (tmp_path / "o" / "edges.tsv").read_text().splitlines()
    assert "a\tb\t2.0" in edges


def test_bench_command(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"source": {"ba": {"n": 14, "attach": 3, "l": 2}}, "batch_size": 2,
                               "t_range": [3, 4], "s_range": [2, 2]}))
    outs = []
    for threads, d in ((1, "a"), (3, "b")):
        assert cli.main(["bench", str(cfg), "--out", str(tmp_path / d), "--seed", "9",
                         "--threads", str(threads), "--audit"]) == 0
        outs.append((tmp_path / d / "instances.csv").read_bytes())
    assert outs[0] == outs[1]
    assert "audit: ok" in capsys.readouterr().out


def test_bench_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"s_range": [1, 2]}))
    assert cli.main(["bench", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "subteam", "gen", "--n", "3", "--attach", "3",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 2
