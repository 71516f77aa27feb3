import json
import subprocess
import sys

import pytest

from qkroots import __version__
from qkroots.cli import (
    CATALOG,
    REPORT_SCHEMA,
    STATUSES,
    ConfigError,
    list_checks,
    main,
    make_cases,
    parse_config,
    run_config,
    strip_timing,
)


def _write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def _run(tmp_path, cfg, *extra):
    out = tmp_path / "report.json"
    code = main(["run", "--config", _write(tmp_path, cfg), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_catalog_entries():
    items = list_checks()
    assert len(items) >= 16
    assert len({c["name"] for c in items}) == len(items)
    for c in items:
        assert c["tags"] and c["module"] in {"qde", "frobenius", "bethe", "vertex", "pcurvature"}
        assert c["default_budget_s"] > 0


def test_list_command(capsys):
    assert main(["list"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == len(CATALOG)


def test_stirling_all_pass(tmp_path):
    code, rep = _run(tmp_path, {"check": "stirling"})
    assert code == 0
    chk = rep["checks"][0]
    assert chk["counts"] == {"pass": 9, "fail": 0, "finding": 0}


def test_report_schema(tmp_path):
    code, rep = _run(tmp_path, {"check": "coh-limit"})
    assert code == 0
    assert rep["schema"] == REPORT_SCHEMA and rep["version"] == __version__
    assert rep["conventions"]["cohomological_h"].startswith("2h")
    assert isinstance(rep["runtime_ms"], float)
    chk = rep["checks"][0]
    for key in ("check", "module", "tags", "mode", "seed", "status", "counts", "cases", "runtime_ms", "budget_s"):
        assert key in chk
    assert chk["cases"][0]["data"]["convention"] == "2h"
    assert all(c["status"] in STATUSES for c in chk["cases"])


def test_explicit_qde_char(tmp_path):
    cfg = {"check": "qde-char", "mode": "explicit",
           "params": [{"a1": "2", "a2": "3", "hbar": "5", "p": 1}, {"a1": "1/2", "a2": "-3", "hbar": "2/3", "p": 3}]}
    code, rep = _run(tmp_path, cfg)
    assert code == 0
    assert [c["status"] for c in rep["checks"][0]["cases"]] == ["pass", "pass"]


def test_explicit_bethe_at_z_zero(tmp_path):
    cfg = {"check": "bethe-solve", "mode": "explicit",
           "params": {"k": 1, "n": 2, "a": [[2, 0], [3, 0]], "hbar": [1.7, 0], "z": [0, 0]}}
    code, rep = _run(tmp_path, cfg)
    assert code == 0
    roots = sorted(r[0][0] for r in rep["checks"][0]["cases"][0]["data"]["roots"])
    assert roots == pytest.approx([2.0, 3.0])


def test_failing_case_reports_error(tmp_path):
    cfg = {"check": "bethe-solve", "mode": "explicit",
           "params": {"k": 1, "n": 2, "a": [[2, 0], [2, 0]], "hbar": [1.7, 0], "z": [0.1, 0]}}
    code, rep = _run(tmp_path, cfg)
    assert code == 1
    case = rep["checks"][0]["cases"][0]
    assert case["status"] == "fail" and "ValueError" in case["error"] and case["params"]["k"] == 1


def test_printed_closed_form_fails_and_corrected_passes(tmp_path):
    code, rep = _run(tmp_path, {"check": "tpp0-closed", "primes": [2]})
    assert code == 1 and rep["status"] == "fail"
    code, rep = _run(tmp_path, {"check": "tpp0-closed", "primes": [2], "options": {"form": "corrected"}})
    assert code == 0


def test_findings_do_not_fail(tmp_path):
    cfg = {"check": "frobenius-conj", "options": {"product": "literal"}}
    code, rep = _run(tmp_path, cfg)
    assert code == 0 and rep["checks"][0]["status"] == "finding"


def test_determinism_across_jobs(tmp_path):
    cfg = {"checks": [{"check": "qde-spectrum", "draws": 3}, {"check": "bethe-frobenius", "draws": 2}], "seed": 11}
    a = run_config(parse_config(cfg), jobs=1)
    b = run_config(parse_config(cfg), jobs=3)
    assert strip_timing(a) == strip_timing(b)
    c = run_config(parse_config(cfg, seed=12), jobs=1)
    assert strip_timing(a) != strip_timing(c)


def test_seed_flag_overrides(tmp_path):
    _, rep = _run(tmp_path, {"check": "qde-spectrum", "draws": 1, "seed": 3}, "--seed", "9")
    assert rep["checks"][0]["seed"] == 9


def test_case_generation_is_reproducible():
    cfg = parse_config({"check": "qde-spectrum", "seed": 1})[0]
    assert make_cases(cfg) == make_cases(cfg)
    assert make_cases(cfg) != make_cases(parse_config({"check": "qde-spectrum", "seed": 2})[0])


@pytest.mark.parametrize("cfg", [
    "{not json",
    {"check": "no-such-check"},
    {"check": "stirling", "bogus": 1},
    {"check": "stirling", "mode": "weird"},
    {"check": "stirling", "draws": 0},
    {"check": "stirling", "primes": "2,3"},
    {"check": "stirling", "options": {"shapes": []}},
    {"checks": []},
    {"checks": [{"check": "stirling"}], "extra": 1},
])
def test_config_errors_exit_2(tmp_path, cfg):
    code, rep = _run(tmp_path, cfg)
    assert code == 2 and rep is None


def test_missing_config_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "r.json")]) == 2


def test_bad_jobs_exit_2(tmp_path):
    assert main(["run", "--config", _write(tmp_path, {"check": "stirling"}), "--out", str(tmp_path / "r.json"),
                 "--jobs", "0"]) == 2


def test_parse_config_rejects_non_object():
    with pytest.raises(ConfigError):
        parse_config([1, 2])


def test_matrix_file_option(tmp_path):
    mfile = tmp_path / "m.txt"
    mfile.write_text("(1)/(z) z\n0 (z+1)/(z-2)\n")
    cfg = {"check": "pcurv-log", "primes": [3], "draws": 1, "options": {"matrix_file": str(mfile)}}
    code, rep = _run(tmp_path, cfg)
    assert code == 0 and rep["checks"][0]["counts"]["pass"] >= 1


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qkroots.cli", "list"], capture_output=True, text=True)
    assert out.returncode == 0 and "stirling" in out.stdout
