import json

import pytest

from hurdlelab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(line):
    return dict(kv.split("=", 1) for kv in line.split())


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", "--n", "6", "--w", "3", "--zeros", "0")
    f = fields(out)
    assert code == 0 and f["f"] == "0" and f["local_optimum"] == "true" and f["global"] == "true"
    f = fields(run(capsys, "eval", "--n", "6", "--w", "3", "--zeros", "4")[1])
    assert f["f"] == "-7/3" and f["scaled"] == "-7" and f["local_optimum"] == "false"
    f = fields(run(capsys, "eval", "--n", "6", "--w", "3", "--bits", "000111")[1])
    assert f["zeros"] == "3" and f["f"] == "-1" and f["local_optimum"] == "true"


@pytest.mark.parametrize("argv", [
    ["eval", "--n", "6", "--w", "3", "--bits", "0011"],
    ["eval", "--n", "6", "--w", "3", "--bits", "00a111"],
    ["eval", "--n", "6", "--w", "7", "--zeros", "1"],
    ["eval", "--n", "6", "--w", "3", "--zeros", "9"],
    ["run", "--algo", "ea", "--n", "8", "--w", "1"],
    ["run", "--algo", "ea", "--n", "8", "--w", "2", "--budget", "0"],
    ["oracle", "--algo", "ma-fils", "--n", "4", "--w", "2"],
    ["oracle", "--n", "4", "--w", "2", "--pm", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2():
    for argv in (["run", "--algo", "ga", "--n", "8", "--w", "2"], ["nope"],
                 ["run", "--algo", "ea", "--n", "8", "--w", "2", "--pm", "2"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_run_examples(capsys):
    code, out, _ = run(capsys, "run", "--algo", "ea", "--n", "2", "--w", "2", "--pm", "0.5",
                       "--seed", "1")
    rec = json.loads(out)
    assert code == 0 and rec["success"]
    assert rec["evaluations_total"] == 1 + rec["generations"]
    code, out, _ = run(capsys, "run", "--algo", "ma-fils", "--n", "64", "--w", "4", "--seed", "7")
    rec = json.loads(out)
    assert code == 0 and rec["success"] and rec["ls_evaluations"] % 64 == 0
    code, out, _ = run(capsys, "run", "--algo", "ls-bils", "--n", "30", "--w", "6",
                       "--budget", "100000", "--seed", "3")
    rec = json.loads(out)
    assert code == 1 and not rec["success"] and rec["evaluations_total"] == 100_000


def test_run_pm_literals(capsys):
    rec = json.loads(run(capsys, "run", "--algo", "ea", "--n", "12", "--w", "3", "--pm", "w/n")[1])
    assert rec["pm"] == 0.25
    rec = json.loads(run(capsys, "run", "--algo", "ea", "--n", "12", "--w", "3", "--pm", "1/4")[1])
    assert rec["pm"] == 0.25


def test_oracle_golden(capsys):
    code, out, _ = run(capsys, "oracle", "--algo", "ea", "--n", "2", "--w", "2", "--pm", "0.5")
    res = json.loads(out)
    assert code == 0 and abs(res["expected_generations"] - 3) <= 1e-10
    assert res["expected_evaluations"] == pytest.approx(4)


def test_oracle_table_and_missing_file(capsys, tmp_path):
    t = tmp_path / "t.txt"
    t.write_text("2\n-1 -2 0\n")
    code, out, _ = run(capsys, "oracle", "--table", str(t), "--pm", "0.5")
    assert code == 0 and json.loads(out)["expected_generations"] > 0
    assert run(capsys, "oracle", "--table", str(tmp_path / "nope.txt"))[0] == 3


def test_sweep_fit_report_pipeline(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"algorithms": ["ea", "ma-fils"], "n": [8, 12, 16], "w": [2],
                               "reps": 5, "base_seed": 2}))
    csv = tmp_path / "results.csv"
    assert run(capsys, "sweep", "--config", str(cfg), "--out", str(csv), "--threads", "2")[0] == 0
    assert len(csv.read_text().splitlines()) == 1 + 2 * 3 * 5
    code, out, _ = run(capsys, "fit", "--in", str(csv), "--group", "algo,w", "--x", "n",
                       "--y", "evaluations")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    assert {l.split("\t")[0] for l in lines[1:]} == {"ea|w=2", "ma-fils|w=2"}
    code, out, _ = run(capsys, "report", "--in", str(csv), "--theory")
    rows = [l.split("\t") for l in out.splitlines()]
    hdr = rows[0]
    for row in rows[1:]:
        r = dict(zip(hdr, row))
        assert float(r["ratio"]) == pytest.approx(float(r["mean"]) / float(r["theory"]),
                                                  rel=1e-5)


def test_sweep_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"algorithms": ["ea"], "n": [8], "w": [2], "extra": 1}))
    assert run(capsys, "sweep", "--config", str(bad), "--out", str(tmp_path / "o.csv"))[0] == 2
    assert run(capsys, "sweep", "--config", str(tmp_path / "none.json"),
               "--out", str(tmp_path / "o.csv"))[0] == 3
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"algorithms": ["ea"], "n": [8], "w": [2], "reps": 1}))
    assert run(capsys, "sweep", "--config", str(good),
               "--out", str(tmp_path / "no" / "o.csv"))[0] == 3
    assert run(capsys, "fit", "--in", str(tmp_path / "none.csv"))[0] == 3


def test_fit_with_too_few_points_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"algorithms": ["ea"], "n": [8, 12], "w": [2], "reps": 2}))
    csv = tmp_path / "r.csv"
    run(capsys, "sweep", "--config", str(cfg), "--out", str(csv))
    assert run(capsys, "fit", "--in", str(csv))[0] == 2


def test_argv_determinism(capsys):
    argv = ["run", "--algo", "ma-bils", "--n", "24", "--w", "3", "--seed", "11"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
