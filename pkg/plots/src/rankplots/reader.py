"""CSV and sidecar loading with strict schema validation."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

EXPECTED_HEADER = ["experiment", "trial", "q", "m", "n", "param_json", "outcome", "count"]
_INT_COLUMNS = ("trial", "q", "m", "n", "outcome", "count")


class SchemaError(Exception):
    """The input file does not match the experiment CSV contract."""


@dataclass(frozen=True)
class LoadedRun:
    path: Path
    experiment: str | None  # None for a header-only file
    rows: tuple[dict, ...]
    config: dict | None  # sidecar config echo, when the sidecar exists
    summaries: tuple[dict, ...] | None

    def summary(self, label: str | None = None) -> dict | None:
        """First summary, or the one with the given label."""
        if not self.summaries:
            return None
        if label is None:
            return self.summaries[0]
        for s in self.summaries:
            if s.get("label") == label:
                return s
        return None


def sidecar_path(csv_path: Path) -> Path:
    name = csv_path.name[:-4] if csv_path.name.endswith(".csv") else csv_path.name
    return csv_path.with_name(name + ".summary.json")


def load_run(path) -> LoadedRun:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file, expected the header row") from None
    if header != EXPECTED_HEADER:
        for col, (got, want) in enumerate(zip(header, EXPECTED_HEADER), 1):
            if got != want:
                raise SchemaError(f"{path}: header column {col}: expected {want!r}, got {got!r}")
        raise SchemaError(
            f"{path}: header has {len(header)} columns, expected {len(EXPECTED_HEADER)}"
        )
    rows = []
    experiment = None
    for lineno, raw in enumerate(reader, 2):
        if len(raw) != len(EXPECTED_HEADER):
            raise SchemaError(f"{path}: row {lineno}: {len(raw)} fields, expected {len(EXPECTED_HEADER)}")
        row = dict(zip(EXPECTED_HEADER, raw))
        for col in _INT_COLUMNS:
            try:
                row[col] = int(row[col])
            except ValueError:
                raise SchemaError(f"{path}: row {lineno}, column {col}: not an integer: {row[col]!r}") from None
        try:
            row["param_json"] = json.loads(row["param_json"])
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: row {lineno}, column param_json: {exc}") from None
        if experiment is None:
            experiment = row["experiment"]
        elif row["experiment"] != experiment:
            raise SchemaError(f"{path}: row {lineno}: mixed experiment ids in one file")
        rows.append(row)
    config = summaries = None
    side = sidecar_path(path)
    if side.exists():
        try:
            doc = json.loads(side.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{side}: invalid JSON: {exc}") from exc
        config = doc.get("config")
        summaries = tuple(doc.get("summaries", ()))
    return LoadedRun(path, experiment, tuple(rows), config, summaries)
