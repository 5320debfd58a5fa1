"""Verification reports and their deterministic serialization."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError

SCHEMA = "qll-report/1"
STATUSES = ("pass", "fail", "inconclusive", "config-error")
EXIT_CODES = {"pass": 0, "fail": 1, "config-error": 2, "inconclusive": 3}


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    status: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    table: list | None = None
    timing: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "fail" and not self.witnesses:
            raise ValueError(f"suite {self.suite!r} failed without a witness")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self, timing: bool = False) -> dict:
        out = {"schema": SCHEMA, "suite": self.suite, "status": self.status,
               "parameters": self.parameters, "witnesses": self.witnesses,
               "details": self.details}
        if self.table is not None:
            out["table"] = self.table
        if timing and self.timing is not None:
            out["timing_seconds"] = round(self.timing, 3)
        return out


def combine(name: str, parameters: dict, reports: list[VerificationReport]) -> VerificationReport:
    """Aggregate suite reports; suites are ordered by name."""
    reports = sorted(reports, key=lambda r: r.suite)
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        status = "fail"
    elif "config-error" in statuses:
        status = "config-error"
    elif "inconclusive" in statuses:
        status = "inconclusive"
    else:
        status = "pass"
    witnesses = [{"suite": r.suite, **w} if isinstance(w, dict) else {"suite": r.suite, "witness": w}
                 for r in reports for w in r.witnesses]
    details = {"suites": [r.to_dict() for r in reports]}
    timing = sum(r.timing for r in reports if r.timing is not None) if reports else None
    return VerificationReport(name, parameters, status, witnesses, details, None, timing)


def emit_report(report: VerificationReport, fmt: str = "json", timing: bool = False) -> bytes:
    if fmt == "json":
        text = json.dumps(report.to_dict(timing), sort_keys=True, indent=2, ensure_ascii=False)
        return (text + "\n").encode()
    if fmt == "csv":
        if not report.table:
            raise ConfigError(f"report {report.suite!r} has no table; csv is for coefficient tables", "format")
        buf = io.StringIO()
        cols = list(report.table[0].keys())
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in report.table:
            w.writerow({k: _cell(v) for k, v in row.items()})
        return buf.getvalue().encode()
    if fmt == "text":
        lines = [f"{report.suite}: {report.status}"]
        for k, v in sorted(report.parameters.items()):
            lines.append(f"  {k} = {v}")
        for k, v in sorted(report.details.items()):
            if k != "suites":
                lines.append(f"  {k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
        for sub in report.details.get("suites", []):
            lines.append(f"  [{sub['status']}] {sub['suite']}")
        for w in report.witnesses[:10]:
            lines.append(f"  witness: {json.dumps(w, sort_keys=True, ensure_ascii=False)}")
        if timing and report.timing is not None:
            lines.append(f"  time: {report.timing:.3f}s")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown output format {fmt!r}", "format")


def _cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, ensure_ascii=False)
    return v
