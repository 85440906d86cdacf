import io
import json
from fractions import Fraction

import pytest

from groupoidvn.cli import RunConfig, emit_report, encode, from_json, run, to_json
from groupoidvn.exactnum import Interval
from groupoidvn.vndim import pipeline_gz
from test_tds import tiny


def call(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_gz_report_has_closed_form():
    code, out, _ = call("gz", "--window", "12")
    assert code == 0
    d = json.loads(out)
    assert d["extra"]["closed_form"]["value"] == "1/3"
    assert d["passed"] is True
    assert d["type"] == "vn_report"


def test_json_roundtrip():
    rep = pipeline_gz(window=10)
    assert from_json(to_json(rep)) == rep
    summary = {"omega1": Interval(Fraction(1, 3), Fraction(1, 2)), "n": 3, "ok": True,
               "chains": [{"initial": "tape0[0]=1", "steps": 7}], "x": Fraction(-5, 7)}
    assert from_json(to_json(summary)) == summary


def test_decimal_annotation():
    assert encode(Fraction(11, 768), 8) == {"type": "rational", "value": "11/768", "decimal": "0.01432291"}


def test_text_format():
    text = emit_report(pipeline_gz(window=8), "text", digits=6)
    assert "check PASS: interval contains closed form" in text
    assert "closed_form" not in text or "1/3" in text


def test_validate_x_list():
    code, out, _ = call("tds", "validate", "--system", "builtin:x", "--sigma", "list:1,2,3", "--k-max", "3")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_tds_omega_and_explore():
    code, out, _ = call("tds", "omega", "--system", "builtin:y", "--depth", "46", "--k-max", "4",
                        "--binary-digits", "40")
    assert code == 0
    d = from_json(out)
    assert d["omega1"].lo == d["reference"]
    code, out, _ = call("tds", "explore", "--system", "builtin:y", "--depth", "16")
    assert code == 0 and json.loads(out)["accepted_chains"] == 2


def test_tds_check(tmp_path):
    code, out, _ = call("tds", "check", "--system", "builtin:y", "--depth", "30",
                        "--stopping-depths", "5,10,20", "--stopping-floor", "2^-40")
    assert code == 0
    d = from_json(out)
    assert d["no_restart"] and d["stopping_monotone"]


def test_restart_exit_code(tmp_path):
    p = tmp_path / "restart.json"
    p.write_text(json.dumps(tiny(True)), encoding="utf-8")
    report = tmp_path / "r.json"
    code, _, err = call("tds", "check", "--system", str(p), "--report", str(report))
    assert code == 2 and "precondition" in err
    assert not report.exists()


def test_malformed_config_no_outputs(tmp_path):
    cfg = tmp_path / "cfg.json"
    report = tmp_path / "out.json"
    cfg.write_text(json.dumps({"command": "gz", "windw": 10, "report": str(report)}), encoding="utf-8")
    code, _, err = call("--config", str(cfg))
    assert code == 1 and "unknown config key" in err
    assert not report.exists()
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, _ = call("tds", "explore", "--system", str(bad), "--report", str(report))
    assert code == 1 and not report.exists()
    code, _, _ = call("gz", "--window", "zero")
    assert code == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    report = tmp_path / "out.json"
    cfg.write_text(json.dumps({"command": "tds", "action": "validate", "system": "builtin:x",
                               "sigma": "list:1,2", "k_max": 2, "report": str(report)}), encoding="utf-8")
    code, _, _ = call("--config", str(cfg))
    assert code == 0
    assert json.loads(report.read_text(encoding="utf-8"))["passed"] is True
    assert RunConfig("gz", {"window": 10}).argv() == ["gz", "--window", "10"]


def test_resource_exit_code():
    code, _, err = call("percolation", "--mc-samples", "1000", "--mc-window", "1")
    assert code == 3 and "resource" in err
    seed = "; ".join(["tape0[-1]=1"] + [f"tape0[{i}]=0" for i in range(20)])
    code, _, _ = call("schreier", "--seed", seed, "--edges", "builtin:gz", "--cap", "5")
    assert code == 3


def test_threads_env(monkeypatch):
    monkeypatch.setenv("VNDIM_THREADS", "zero")
    code, _, err = call("gz", "--window", "6")
    assert code == 1 and "VNDIM_THREADS" in err
    monkeypatch.setenv("VNDIM_THREADS", "4")
    assert call("gz", "--window", "6")[0] == 0


def test_deterministic_outputs():
    a = call("percolation", "--n-max", "10", "--mc-samples", "5000", "--seed", "3")
    b = call("percolation", "--n-max", "10", "--mc-samples", "5000", "--seed", "3")
    assert a == b and a[0] == 0


def test_percolation_flags():
    code, out, _ = call("percolation", "--group", "z2", "--n-max", "4", "--include-complement")
    d = from_json(out)
    assert code == 0 and d["tail"] == "unavailable"
    assert d["complement_mass"] == Fraction(1, 2)
    assert d["partial_with_complement"] == d["partial"] + Fraction(1, 2)


def test_schreier_dot(tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = call("schreier", "--seed", "tape0[-1]=1; tape0[0]=0; tape0[1]=1",
                        "--edges", "builtin:gz", "--dot", str(dot))
    assert code == 0 and json.loads(out)["vertices"] == 2
    assert dot.read_text(encoding="utf-8").startswith("digraph")
    code, _, err = call("schreier", "--seed", "tape0[0]=0", "--edges", "builtin:gz")
    assert code == 1 and "constrain more cells" in err


def test_translate_and_moments(tmp_path):
    f = tmp_path / "e.sexp"
    f.write_text("(scale 1/2 (sum (id) (lamp 0 1)))\n", encoding="utf-8")
    code, out, _ = call("translate", "--expr", str(f))
    d = from_json(out)
    assert code == 0 and d["terms"] == [{"coefficient": 1, "word": "e", "domain": "tape0[0]=0"}]
    code, out, _ = call("moments", "--n", "4", "--window", "10")
    d = from_json(out)
    assert code == 0 and all(m["contains_formal_trace"] for m in d["moments"].values())
    code, _, _ = call("translate", "--expr", "(lamp 0 1)", "--p", "3")
    assert code == 1


def test_vndim_expr():
    code, out, _ = call("vndim", "--expr", "builtin:gz", "--window", "12", "--mass-floor", "0")
    d = from_json(out)
    assert code == 0 and Fraction(1, 3) in d.value
    code, _, _ = call("vndim")
    assert code == 1
