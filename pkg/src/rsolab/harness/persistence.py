"""Content-addressed storage of experiment results: one manifest plus one CSV per table.

Manifest schema (UTF-8, one ``key = value`` per line, keys sorted):

``kind``
    ``phase_sweep``, ``localization`` or ``wegner``.
``version``
    package version that produced the run.
``config.<key>``
    every experiment config field in its string form.
``seeds``
    comma-separated per-realization seeds.
``tolerance.<name>``
    solver tolerances in effect.
``table.<name>.sha256`` / ``table.<name>.rows``
    digest and row count of each CSV file.
``timestamp.*``
    informational only; excluded from the run id.

The run id is the first 16 hex digits (64 bits) of the SHA-256 of the
canonical manifest bytes without timestamp keys.  Files are named
``<run_id>.manifest`` and ``<run_id>.<table>.csv``.
"""
from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .. import __version__
from ..errors import IntegrityError, RunNotFoundError, SchemaError
from .config import ExperimentConfig
from .experiments import (
    LocalizationRow,
    LocalizationStudyResult,
    PhaseDiagramResult,
    PhaseRow,
    WegnerResult,
    WegnerRow,
    realization_seeds,
)

MANIFEST_SUFFIX = ".manifest"
_VOLATILE_PREFIX = "timestamp."

# kind -> (result class, table name, row class, column types)
_KINDS = {
    "phase_sweep": (PhaseDiagramResult, "phase_sweep", PhaseRow, (float, float, int, int, int, int, float)),
    "localization": (LocalizationStudyResult, "localization", LocalizationRow, (int, float, "center", float, float, float)),
    "wegner": (WegnerResult, "wegner", WegnerRow, (float, float, float, int)),
}


def result_kind(result) -> str:
    for kind, (cls, *_rest) in _KINDS.items():
        if isinstance(result, cls):
            return kind
    raise TypeError(f"cannot persist object of type {type(result).__name__}")


@dataclass
class RunManifest:
    entries: dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_result(cls, result, tolerances: dict | None = None, timestamp: bool = True) -> "RunManifest":
        config = result.config
        entries = {"kind": result_kind(result), "version": __version__}
        entries.update({f"config.{k}": v for k, v in config.to_mapping().items() if k != "out"})
        entries["seeds"] = ",".join(str(s) for s in realization_seeds(config))
        tol = {"solver": repr(config.tol)}
        tol.update({k: repr(float(v)) for k, v in (tolerances or {}).items()})
        entries.update({f"tolerance.{k}": v for k, v in tol.items()})
        if timestamp:
            entries["timestamp.created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(entries)

    @property
    def kind(self) -> str:
        return self.entries["kind"]

    def config(self) -> ExperimentConfig:
        return ExperimentConfig.from_mapping(
            {k[len("config."):]: v for k, v in self.entries.items() if k.startswith("config.")}
        )

    def canonical_bytes(self, include_volatile: bool = False) -> bytes:
        keys = sorted(k for k in self.entries if include_volatile or not k.startswith(_VOLATILE_PREFIX))
        return "".join(f"{k} = {self.entries[k]}\n" for k in keys).encode("utf-8")

    @property
    def run_id(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()[:16]

    def dumps(self) -> str:
        return self.canonical_bytes(include_volatile=True).decode("utf-8")

    @classmethod
    def loads(cls, text: str, source: str = "<manifest>") -> "RunManifest":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            key, sep, value = line.partition(" = ")
            if not sep or not key:
                raise SchemaError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
            entries[key] = value
        return cls(entries)


def _fmt_cell(value) -> str:
    if isinstance(value, tuple):
        return ";".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str, kind, where: str):
    try:
        if kind == "center":
            return tuple(float(x) for x in text.split(";"))
        if kind is int:
            return int(text)
        return float(text)
    except ValueError:
        raise SchemaError(f"{where}: cannot parse {text!r} as {getattr(kind, '__name__', kind)}") from None


def _table_csv(row_cls, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(row_cls._fields)
    for row in rows:
        writer.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def save_run(result, manifest: RunManifest | None = None, directory=".") -> tuple[str, list[Path]]:
    """Write the CSV table and manifest of ``result``; returns the run id and paths."""
    kind = result_kind(result)
    _cls, table, row_cls, _types = _KINDS[kind]
    manifest = manifest or RunManifest.for_result(result)
    if manifest.entries.get("kind") != kind:
        raise IntegrityError(f"manifest kind {manifest.entries.get('kind')!r} does not match result kind {kind!r}")
    data = _table_csv(row_cls, result.rows)
    manifest.entries[f"table.{table}.sha256"] = hashlib.sha256(data).hexdigest()
    manifest.entries[f"table.{table}.rows"] = str(len(result.rows))
    run_id = manifest.run_id
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{run_id}.{table}.csv"
        csv_path.write_bytes(data)
        man_path = directory / f"{run_id}{MANIFEST_SUFFIX}"
        man_path.write_text(manifest.dumps(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write run {run_id} to {directory}: {exc}") from exc
    return run_id, [man_path, csv_path]


def list_runs(directory) -> list[str]:
    return sorted(p.name[: -len(MANIFEST_SUFFIX)] for p in Path(directory).glob(f"*{MANIFEST_SUFFIX}"))


def load_run(directory, run_id: str):
    """Inverse of :func:`save_run`; returns ``(result, manifest)`` after integrity checks."""
    directory = Path(directory)
    man_path = directory / f"{run_id}{MANIFEST_SUFFIX}"
    if not man_path.is_file():
        if not directory.is_dir() or not list_runs(directory):
            raise RunNotFoundError(f"no runs found in {directory}")
        raise RunNotFoundError(f"manifest {man_path} is missing")
    manifest = RunManifest.loads(man_path.read_text(encoding="utf-8"), str(man_path))
    if manifest.run_id != run_id:
        raise IntegrityError(f"{man_path}: content hash {manifest.run_id} does not match run id {run_id}")
    kind = manifest.entries.get("kind")
    if kind not in _KINDS:
        raise SchemaError(f"{man_path}: unknown result kind {kind!r}")
    cls, table, row_cls, types = _KINDS[kind]
    csv_path = directory / f"{run_id}.{table}.csv"
    if not csv_path.is_file():
        raise IntegrityError(f"table file {csv_path} is missing")
    data = csv_path.read_bytes()
    expected = manifest.entries.get(f"table.{table}.sha256")
    if hashlib.sha256(data).hexdigest() != expected:
        raise IntegrityError(f"{csv_path}: SHA-256 does not match the manifest")
    rows = _parse_table(data.decode("utf-8"), row_cls, types, str(csv_path))
    if str(len(rows)) != manifest.entries.get(f"table.{table}.rows"):
        raise SchemaError(f"{csv_path}: row count {len(rows)} does not match the manifest")
    return cls(manifest.config(), tuple(rows)), manifest


def _parse_table(text: str, row_cls, types, source: str):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != row_cls._fields:
        raise SchemaError(f"{source}: header {header} does not match columns {list(row_cls._fields)}")
    rows = []
    for lineno, cells in enumerate(reader, 2):
        if len(cells) != len(types):
            raise SchemaError(f"{source}: row {lineno} has {len(cells)} cells, expected {len(types)}")
        values = [
            _parse_cell(c, t, f"{source}: row {lineno}, column {name!r}")
            for c, t, name in zip(cells, types, row_cls._fields)
        ]
        rows.append(row_cls(*values))
    return rows
