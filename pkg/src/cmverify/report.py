"""Check results and report assembly shared by every verification suite."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable, Iterable

__all__ = ["CheckResult", "DuplicateCheckId", "run_check", "witness", "report_merge", "render_report", "WITNESS_LIMIT"]

STATUSES = ("pass", "fail", "skipped")
WITNESS_LIMIT = 4000


class DuplicateCheckId(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check_id: str
    status: str
    residual_witness: str | None = None
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "fail" and not self.residual_witness:
            raise ValueError("a failing check needs a residual witness")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "check_id": self.check_id,
            "status": self.status,
            "residual_witness": self.residual_witness,
            "elapsed_ms": self.elapsed_ms,
        }


def _clip(text: str) -> str:
    if len(text) <= WITNESS_LIMIT:
        return text
    return text[:WITNESS_LIMIT] + f" ... [{len(text) - WITNESS_LIMIT} more chars]"


def witness(residual) -> str | None:
    """Canonical text of a residual, or None when it is zero."""
    if isinstance(residual, (list, tuple)):
        parts = [witness(r) for r in residual]
        bad = [w for w in parts if w]
        return "; ".join(bad) if bad else None
    return str(residual) if residual else None


def run_check(suite: str, check_id: str, fn: Callable[[], object]) -> CheckResult:
    """Run ``fn``; a falsy return means pass, anything else is the witness.

    Exceptions count as failures, with the exception text as witness.
    """
    start = time.perf_counter()
    try:
        witness = fn()
    except Exception as exc:  # a crash inside a check is a failed check
        witness = f"{type(exc).__name__}: {exc}"
    elapsed = int(round((time.perf_counter() - start) * 1000))
    if witness is None or witness is False or witness == "" or witness == []:
        return CheckResult(suite, check_id, "pass", None, elapsed)
    return CheckResult(suite, check_id, "fail", _clip(str(witness)), elapsed)


def report_merge(results: Iterable[CheckResult], slowest: int = 5) -> dict:
    results = list(results)
    seen = set()
    for r in results:
        key = r.check_id
        if key in seen:
            raise DuplicateCheckId(f"duplicate check_id {key!r}")
        seen.add(key)
    counts = {s: sum(1 for r in results if r.status == s) for s in STATUSES}
    slow = sorted(results, key=lambda r: (-r.elapsed_ms, r.check_id))[:slowest]
    return {
        "status": "fail" if counts["fail"] else "pass",
        "total": len(results),
        "counts": counts,
        "slowest": [{"check_id": r.check_id, "elapsed_ms": r.elapsed_ms} for r in slow],
    }


def render_report(command: str, results: Iterable[CheckResult], extra: dict | None = None) -> str:
    results = list(results)
    doc = {
        "schema": "cmverify-report/1",
        "command": command,
        "summary": report_merge(results),
        "results": [r.to_dict() for r in results],
    }
    if extra:
        doc["extra"] = extra
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
