"""Machine-readable run reports: canonical JSON and gnuplot-friendly CSV."""
from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

from . import __version__


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def scenario_hash(scenario: dict) -> str:
    return hashlib.sha256(canonical_json(scenario).encode()).hexdigest()[:16]


def build_report(command: str, scenario: dict, seed: int, checks: list[dict], payload: dict) -> dict:
    """Assemble the standard report envelope.

    ``checks`` entries are {"name", "pass", and numeric fields}; the
    overall ``pass`` is their conjunction.  No timestamps are included so
    identical (scenario, seed) runs produce byte-identical reports.
    """
    return {
        "tool": "anisowave",
        "version": __version__,
        "command": command,
        "seed": int(seed),
        "scenario_hash": scenario_hash(scenario),
        "pass": all(bool(c.get("pass", False)) for c in checks) if checks else True,
        "checks": checks,
        "payload": payload,
    }


def emit_report(report: dict, out: str | None, to_stdout: bool) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        path = Path(out)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text + "\n")
        except OSError as exc:
            raise ReportError(f"cannot write report to {out}: {exc}") from exc
    if to_stdout or not out:
        print(text)


def write_csv(path: str, columns: list[str], rows, comments: list[str] | None = None) -> None:
    """CSV with '#'-prefixed comment header lines (gnuplot compatible)."""
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("w") as fh:
            for line in comments or []:
                fh.write(f"# {line}\n")
            fh.write("# " + ",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    except OSError as exc:
        raise ReportError(f"cannot write CSV to {path}: {exc}") from exc


class ReportError(RuntimeError):
    pass
