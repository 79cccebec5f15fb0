"""Structured experiment reports with deterministic CSV/JSON emission.

Each row is (check, f_id, g_id, params, value, budget, flag, config_hash).
Floats are always written with 17 significant digits and the row order is
fixed by the check registry, so identical configurations produce
byte-identical files.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field

__all__ = ["ExperimentReport", "FLAG_OK", "FLAG_VIOLATED", "FLAG_INFO"]

FLAG_OK = "ok"
FLAG_VIOLATED = "violated"
FLAG_INFO = "info"

_FIELDS = ("check", "f_id", "g_id", "params", "value", "budget", "flag",
           "config_hash")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def _params_str(params: dict | None) -> str:
    if not params:
        return ""
    items = []
    for key in sorted(params):
        items.append(f"{key}={_fmt(params[key])}")
    return ";".join(items)


@dataclass
class ExperimentReport:
    config_hash: str
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, check: str, value, *, params: dict | None = None,
            f_id: str = "", g_id: str = "", budget=None,
            flag: str = FLAG_OK) -> None:
        self.rows.append({
            "check": check,
            "f_id": f_id,
            "g_id": g_id,
            "params": _params_str(params),
            "value": value,
            "budget": budget,
            "flag": flag,
        })

    def add_bounded(self, check: str, value: float, budget: float, *,
                    params: dict | None = None, f_id: str = "",
                    g_id: str = "") -> None:
        """Row whose value must stay <= budget."""
        flag = FLAG_OK if value <= budget else FLAG_VIOLATED
        self.add(check, value, params=params, f_id=f_id, g_id=g_id,
                 budget=budget, flag=flag)

    def violations(self) -> list[dict]:
        return [r for r in self.rows if r["flag"] == FLAG_VIOLATED]

    def finish_summary(self) -> dict:
        by_check: dict[str, dict] = {}
        for row in self.rows:
            entry = by_check.setdefault(row["check"], {
                "rows": 0, "violations": 0, "max_value": None})
            entry["rows"] += 1
            if row["flag"] == FLAG_VIOLATED:
                entry["violations"] += 1
            val = row["value"]
            if isinstance(val, (int, float)) and not (isinstance(val, float) and math.isnan(val)):
                cur = entry["max_value"]
                entry["max_value"] = val if cur is None else max(cur, val)
        self.summary = {
            "config_hash": self.config_hash,
            "total_rows": len(self.rows),
            "total_violations": len(self.violations()),
            "checks": by_check,
        }
        return self.summary

    # -- emission -----------------------------------------------------------

    def to_csv_text(self) -> str:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(_FIELDS)
        for row in self.rows:
            writer.writerow([
                row["check"], row["f_id"], row["g_id"], row["params"],
                _fmt(row["value"]), _fmt(row["budget"]), row["flag"],
                self.config_hash,
            ])
        return buf.getvalue()

    def to_json_text(self) -> str:
        payload = {
            "config_hash": self.config_hash,
            "rows": [
                {
                    "check": r["check"], "f_id": r["f_id"], "g_id": r["g_id"],
                    "params": r["params"], "value": _fmt(r["value"]),
                    "budget": _fmt(r["budget"]), "flag": r["flag"],
                }
                for r in self.rows
            ],
            "summary": self.finish_summary(),
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"

    def write(self, path, fmt: str) -> None:
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        mode = "w"
        newline = "" if fmt == "csv" else None
        with open(path, mode, newline=newline) as fh:
            fh.write(text)
