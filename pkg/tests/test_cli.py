import json
import os
import subprocess
import sys

import pytest

from wordentropy.cli import content_hash, main


def run(*argv):
    return main(list(argv))


def test_analyze_golden(tmp_path):
    out = tmp_path / "g.json"
    assert run("analyze", "--preset", "golden", "--max-n", "20", "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["schema"] == "wordentropy.report/1"
    assert rep["hash"] == content_hash(rep)
    assert rep["ew"]["certified"]
    assert abs(rep["ratio"] - 0.876037) < 1e-5
    assert rep["e0"]["exact"] == "log(3)/2"
    assert rep["function"]["q"] == 2
    assert rep["ew"]["certificate"]["schema"] == "wordentropy.certificate/1"
    assert run("verify", "--in", str(out), "--out", str(tmp_path / "v.json")) == 0
    assert json.loads((tmp_path / "v.json").read_text())["ok"]


def test_analyze_loose_full_shift(tmp_path):
    out = tmp_path / "l.json"
    assert run("analyze", "--f", "2*2^n", "--q", "2", "--max-n", "12", "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["ew"]["lower"] == pytest.approx(0.6931471805599453, abs=1e-12)
    assert rep["ew"]["upper"] == pytest.approx(0.6931471805599453, abs=1e-12)


def test_tampered_report_fails_verification(tmp_path):
    out = tmp_path / "g.json"
    run("analyze", "--preset", "golden", "--max-n", "12", "--out", str(out))
    rep = json.loads(out.read_text())
    rep["ew"]["upper"] = 0.1
    out.write_text(json.dumps(rep))
    assert run("verify", "--in", str(out), "--out", str(tmp_path / "v.json")) == 3


def test_analyze_exit_codes(tmp_path):
    assert run("analyze") == 1
    assert run("analyze", "--f", "2^m") == 1
    out = tmp_path / "b.json"
    assert run("analyze", "--preset", "golden", "--budget", "500", "--out", str(out)) == 2
    rep = json.loads(out.read_text())
    assert rep["slice"]["truncated"] and rep["slice"]["N"] < 20
    assert run("analyze", "--f", "n+1", "--max-n", "10", "--require-certified",
               "--out", str(tmp_path / "n.json")) == 3
    with pytest.raises(SystemExit) as info:
        run("no-such-command")
    assert info.value.code == 1


def test_config_file_presets_budgets(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# budgets\nmax_n = 9\nsft-memory = 2\n")
    out = tmp_path / "c.json"
    assert run("analyze", "--preset", "golden", "--config", str(cfg), "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["budgets"]["max_n"] == 9 and rep["budgets"]["sft_memory"] == 2
    assert rep["slice"]["N"] == 9
    # explicit flags override the file
    assert run("analyze", "--preset", "golden", "--config", str(cfg), "--max-n", "7",
               "--out", str(out)) == 0
    assert json.loads(out.read_text())["slice"]["N"] == 7
    cfg.write_text("bogus = 1\n")
    assert run("analyze", "--preset", "golden", "--config", str(cfg)) == 1


def test_generate_words(tmp_path):
    out = tmp_path / "c.txt"
    assert run("generate", "--word", "champernowne", "--q", "2", "--length", "10", "--out", str(out)) == 0
    assert out.read_text().strip() == "0110111001"
    meta = json.loads((tmp_path / "c.txt.meta.json").read_text())
    assert meta["length"] == 10 and meta["q"] == 2
    g = tmp_path / "g.txt"
    assert run("generate", "--word", "sft", "--forbid", "11", "--length", "100", "--out", str(g)) == 0
    text = g.read_text().strip()
    assert len(text) == 100 and "11" not in text
    p = tmp_path / "p.txt"
    assert run("generate", "--word", "prop6", "--c", "0.3", "--length", "200", "--out", str(p)) == 0
    assert p.read_text().strip().startswith("0" * 27 + "1")
    assert run("generate", "--word", "exp-order", "--length", "10") == 1
    assert run("generate", "--word", "sft", "--length", "10") == 1


def test_generate_large_alphabet_uses_commas(tmp_path):
    out = tmp_path / "c12.txt"
    assert run("generate", "--word", "champernowne", "--q", "12", "--length", "14", "--out", str(out)) == 0
    assert out.read_text().strip() == "0,1,2,3,4,5,6,7,8,9,10,11,1,0"


def test_exp_order_round_trip(tmp_path):
    out = tmp_path / "e.txt"
    assert run("generate", "--word", "exp-order", "--h", "0.405", "--length", "100000", "--out", str(out)) == 0
    v = tmp_path / "v.json"
    assert run("verify", "--in", str(out), "--out", str(v)) == 0
    checks = json.loads(v.read_text())["checks"]
    assert checks["e^(hn) <= p(n)"] and checks["p(n) <= C e^(hn)"]


def test_profile_rows(tmp_path):
    out = tmp_path / "g.csv"
    assert run("profile", "--word", "sft", "--forbid", "11", "--max-n", "5", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,count"
    assert [int(l.split(",")[1]) for l in lines[1:]] == [1, 2, 3, 5, 8, 13]
    const = tmp_path / "k.txt"
    const.write_text("0" * 50 + "\n")
    assert run("profile", "--in", str(const), "--max-n", "3", "--out", str(out)) == 0
    assert [int(l.split(",")[1]) for l in out.read_text().splitlines()[1:]] == [1, 1, 1, 1]
    assert run("profile", "--word", "sft", "--forbid", "111", "--max-n", "4", "--special", "--rate",
               "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,count,s,rate"
    assert lines[-1].split(",")[1] == "13"
    assert run("profile", "--max-n", "3") == 1


def test_min_command(tmp_path):
    out = tmp_path / "m.json"
    assert run("min", "--f", "preset:golden", "--g", "preset:cassaigne", "--max-n", "12",
               "--sft-memory", "2", "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["consistent"]


def _cli(*argv, env_extra=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "wordentropy", *argv], capture_output=True, env=env)


def test_determinism_across_runs_and_workers(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.json", "b.json", "c.json"))
    r1 = _cli("analyze", "--preset", "cassaigne", "--max-n", "18", "--out", str(a))
    r2 = _cli("analyze", "--preset", "cassaigne", "--max-n", "18", "--out", str(b))
    r3 = _cli("analyze", "--preset", "cassaigne", "--max-n", "18", "--workers", "3", "--out", str(c))
    assert r1.returncode == r2.returncode == r3.returncode == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_numpy_fallback_gives_same_report(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _cli("analyze", "--preset", "golden", "--max-n", "14", "--out", str(a)).returncode == 0
    r = _cli("analyze", "--preset", "golden", "--max-n", "14", "--out", str(b),
             env_extra={"WORDENTROPY_DISABLE_NUMBA": "1"})
    assert r.returncode == 0
    assert a.read_bytes() == b.read_bytes()
