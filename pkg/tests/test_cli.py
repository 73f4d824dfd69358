import json
import subprocess
import sys

import pytest

from egocircles.cli import run, strip_timestamp


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run(["synth", "--seed", "5", "--out", str(d), "--groups", "20", "--papers-per-year", "15"]) == 0
    assert run(["detect", "--seed", "5", "--corpus", str(d / "corpus.csv"), "--cutoff-year", "2000",
                "--out", str(d / "circles.json"), "--profiles-out", str(d / "profiles.csv")]) == 0
    return d


def test_detect_output(workdir):
    payload = json.loads((workdir / "circles.json").read_text())
    assert len(payload["egos"]) >= 1
    assert payload["cutoff_year"] == 2000
    meta = payload["meta"]
    assert meta["config"]["seed"] == 5 and meta["kernel_backend"] in ("cython", "python")
    for ego in payload["egos"]:
        for c in ego["circles"]:
            assert c["tau"] >= 0.2 and c["members"]
    header = (workdir / "profiles.csv").read_text().splitlines()[0].split(",")
    assert header[:2] == ["ego", "alter"] and len(header) == 2 + 67


def test_eval_outputs(workdir):
    out = workdir / "eval"
    assert run(["eval", "--corpus", str(workdir / "corpus.csv"), "--circles", str(workdir / "circles.json"),
                "--out-dir", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert "mean_q_ov" in summary
    for name in ("fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig6"):
        assert (out / f"{name}.tsv").exists()


def test_predict_and_report(workdir, capsys):
    reports = []
    for mode in ("NE", "NEBC"):
        path = workdir / f"pred_{mode}.json"
        args = ["predict", "--seed", "2", "--corpus", str(workdir / "corpus.csv"), "--train-end", "2000",
                "--window", "2001:2004", "--mode", mode, "--lr-epochs", "300", "--out", str(path)]
        if mode == "NEBC":
            args += ["--circles", str(workdir / "circles.json")]
        assert run(args) == 0
        reports.append(str(path))
    r = json.loads(open(reports[1]).read())
    assert 0 <= r["auc"] <= 1 and "prec@20" in r
    capsys.readouterr()
    assert run(["report", *reports]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("report\t") and len(lines) == 4


def test_predict_rejects_leaking_circles(workdir):
    assert run(["predict", "--seed", "2", "--corpus", str(workdir / "corpus.csv"), "--train-end", "1995",
                "--window", "1996:1999", "--circles", str(workdir / "circles.json"),
                "--out", str(workdir / "x.json")]) == 1


def test_circle_modes_need_circles(workdir):
    assert run(["predict", "--seed", "2", "--corpus", str(workdir / "corpus.csv"), "--train-end", "2000",
                "--window", "2001:2004", "--mode", "NEB", "--out", str(workdir / "x.json")]) == 1


def test_missing_corpus_exit_1(tmp_path):
    assert run(["detect", "--seed", "1", "--corpus", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "c.json")]) == 1


def test_unknown_flag_exit_2():
    with pytest.raises(SystemExit) as exc:
        run(["detect", "--bogus"])
    assert exc.value.code == 2
    proc = subprocess.run([sys.executable, "-m", "egocircles.cli", "eval", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_seed_required():
    with pytest.raises(SystemExit):
        run(["detect", "--corpus", "x.csv", "--out", "y.json"])


def test_synth_ego(tmp_path):
    assert run(["synth", "--kind", "ego", "--seed", "3", "--sizes", "4", "5", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "ego.json").read_text())
    assert len(payload["alters"]) == 9 and len(payload["profiles"]) == 9


def test_strip_timestamp():
    assert strip_timestamp({"meta": {"generated_at": "x", "tool": "t"}, "a": 1}) == {"meta": {"tool": "t"}, "a": 1}
