"""CSV ingestion and JSON reports for the command line."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_PROTOCOL = 4


class CliError(Exception):
    """Error carrying the process exit code."""

    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Record:
    line: int
    label: str | None
    value: float
    order: float | None


def _parse_float(text: str, line: int, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise CliError(f"line {line}: cannot parse {what} {text!r}") from None
    if not math.isfinite(v):
        raise CliError(f"line {line}: {what} must be finite, got {text!r}")
    return v


def read_records(path) -> list[Record]:
    """Rows of ``value``, ``label,value`` or ``label,value,order``.

    A first row whose value column is not a number is taken as a header.
    Blank lines are skipped.  The column count must not change.
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    records = []
    width = None
    with fh:
        for line, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or all(c == "" for c in row):
                continue
            if len(row) > 3:
                raise CliError(f"{path}: line {line}: expected 1 to 3 columns, got {len(row)}")
            value_text = row[0] if len(row) == 1 else row[1]
            if width is None:
                width = len(row)
                try:
                    float(value_text)
                except ValueError:
                    continue  # header
            if len(row) != width:
                raise CliError(
                    f"{path}: line {line}: expected {width} columns, got {len(row)}"
                )
            label = None if len(row) == 1 else row[0]
            try:
                value = _parse_float(value_text, line, "value")
                order = None if len(row) < 3 else _parse_float(row[2], line, "order")
            except CliError as exc:
                raise CliError(f"{path}: {exc}") from None
            records.append(Record(line, label, value, order))
    return records


def check_records(records, bounds, source) -> None:
    for r in records:
        if not bounds.contains(r.value):
            raise CliError(
                f"{source}: line {r.line}: value {r.value!r} outside the declared "
                f"bounds [{bounds.a}, {bounds.b}]"
            )


def group_series(records, default_label: str) -> dict[str, list[Record]]:
    """Split labelled records into series, keeping first-appearance order."""
    series: dict[str, list[Record]] = {}
    for r in records:
        series.setdefault(r.label if r.label is not None else default_label, []).append(r)
    return series


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def report(command: str, body: dict) -> dict:
    out = {"tool": "evoverlap", "version": version(), "command": command}
    out.update(body)
    return out


def dumps(doc) -> str:
    # insertion order is the field order; repr floats round-trip exactly
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
