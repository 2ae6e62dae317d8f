import json

import pytest

from cmverify.report import CheckResult, DuplicateCheckId, render_report, report_merge, run_check, witness


def test_empty_merge_passes():
    doc = report_merge([])
    assert doc["status"] == "pass" and doc["total"] == 0


def test_one_failure_fails_whole():
    results = [CheckResult("s", "a", "pass"), CheckResult("s", "b", "fail", "x"), CheckResult("s", "c", "skipped")]
    doc = report_merge(results)
    assert doc["status"] == "fail"
    assert doc["counts"] == {"pass": 1, "fail": 1, "skipped": 1}


def test_duplicate_ids_rejected():
    with pytest.raises(DuplicateCheckId):
        report_merge([CheckResult("s", "a", "pass"), CheckResult("t", "a", "pass")])


def test_failure_requires_witness():
    with pytest.raises(ValueError):
        CheckResult("s", "a", "fail")
    with pytest.raises(ValueError):
        CheckResult("s", "a", "maybe")


def test_run_check_outcomes():
    assert run_check("s", "ok", lambda: None).passed
    assert run_check("s", "ok2", lambda: []).passed
    bad = run_check("s", "bad", lambda: "residual 3")
    assert bad.status == "fail" and bad.residual_witness == "residual 3"
    boom = run_check("s", "boom", lambda: 1 / 0)
    assert boom.status == "fail" and boom.residual_witness.startswith("ZeroDivisionError")


def test_witness_clipped():
    r = run_check("s", "long", lambda: "x" * 10_000)
    assert len(r.residual_witness) < 4100


def test_witness_helper():
    assert witness(0) is None
    assert witness([0, 0]) is None
    assert witness([0, 5]) == "5"


def test_render_deterministic():
    results = [CheckResult("s", "a", "pass", None, 3), CheckResult("s", "b", "fail", "w", 7)]
    a = render_report("cmd", results)
    assert a == render_report("cmd", results)
    doc = json.loads(a)
    assert doc["schema"] == "cmverify-report/1"
    assert doc["summary"]["slowest"][0]["check_id"] == "b"
    assert [r["check_id"] for r in doc["results"]] == ["a", "b"]
