"""Verification reports and number formatting for human and machine output."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .arith import ErrorBoundedValue

VERDICTS = ("pass", "fail", "inconclusive", "skipped")
COLUMNS = ("suite", "check", "n", "value", "reference", "bound", "verdict")


def _as_mpf(x) -> mpf:
    # mpf(x) would round an existing mpf to the ambient precision
    return x if isinstance(x, mpf) else mpf(x)


def justified_digits(value, err) -> int:
    """Significant digits of ``value`` that an absolute error ``err`` supports."""
    value, err = _as_mpf(value), _as_mpf(err)
    if not value:
        return 1
    if not err:
        return 10**6
    return max(1, int(math.floor(float(mpmath.log10(abs(value) / err)))))


def fmt(x, digits: int = 20, err=None) -> str:
    """Decimal text for ``x`` with ``min(digits, justified)`` significant digits.

    ``x`` may be an :class:`ErrorBoundedValue`, in which case its own bound is used.
    """
    if x is None:
        return ""
    if isinstance(x, ErrorBoundedValue):
        x, err = x.value, x.abs_err
    if isinstance(x, (int, str)):
        return str(x)
    x = _as_mpf(x)
    if not x:
        return "0"
    if mpmath.isint(x) and abs(x) < 10**digits:
        return str(int(x))
    if err is not None:
        digits = min(digits, justified_digits(x, err))
    with mp.workdps(digits + 10):
        return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=digits + 1)


@dataclass
class VerificationReport:
    suite: str
    fingerprint: str
    rows: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, check: str, verdict: str, n=None, value="", reference="", bound="", suite=None):
        if verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {verdict!r}")
        self.rows.append(
            {
                "suite": suite or self.suite,
                "check": check,
                "n": "" if n is None else str(n),
                "value": value,
                "reference": reference,
                "bound": bound,
                "verdict": verdict,
            }
        )

    def extend(self, other: "VerificationReport") -> None:
        self.rows.extend(other.rows)
        self.wall_time += other.wall_time

    @property
    def summary(self) -> dict:
        counts = Counter(r["verdict"] for r in self.rows)
        return {v: counts.get(v, 0) for v in VERDICTS}

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "suite": self.suite,
            "fingerprint": self.fingerprint,
            "wall_time": round(self.wall_time, 3),
            "summary": self.summary,
            "rows": self.rows,
        }
        return json.dumps(doc, indent=1)

    def to_table(self) -> str:
        widths = {c: max([len(c)] + [len(r[c]) for r in self.rows]) for c in COLUMNS}
        widths = {c: min(w, 44) for c, w in widths.items()}
        line = "  ".join(c.ljust(widths[c]) for c in COLUMNS)
        out = [line, "-" * len(line)]
        for r in self.rows:
            out.append("  ".join(r[c][: widths[c]].ljust(widths[c]) for c in COLUMNS))
        s = self.summary
        out.append("")
        out.append(
            f"q = {self.fingerprint}: {s['pass']} pass, {s['fail']} fail, "
            f"{s['inconclusive']} inconclusive, {s['skipped']} skipped ({self.wall_time:.1f} s)"
        )
        return "\n".join(out)

    def render(self, fmt_name: str) -> str:
        return {"table": self.to_table, "csv": self.to_csv, "json": self.to_json}[fmt_name]()


def rows_from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
