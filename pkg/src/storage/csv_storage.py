"""Flat-file persistence for experiment tables and the run manifest."""

import csv
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from src.config import config

logger = logging.getLogger(__name__)


def format_cell(value: Any) -> str:
    """Round-trip decimal text for floats; everything else via ``str``."""

    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


@dataclass
class ExperimentRecord:
    name: str
    started_at_utc: str
    finished_at_utc: Optional[str]
    ok: bool
    message: str
    files: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunManifest:
    tool_version: str
    started_at_utc: str
    finished_at_utc: str
    config: Dict[str, Any]
    checksums: Dict[str, str]
    experiments: List[ExperimentRecord]


class ResultStore:
    """Writes one CSV per table under ``out_dir`` and a single ``manifest.json``."""

    def __init__(self, out_dir: str) -> None:
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.started = datetime.now(timezone.utc).isoformat()
        self.checksums: Dict[str, str] = {}
        self.records: List[ExperimentRecord] = []
        self._manifest_written = False
        logger.info("Writing results to %s", os.path.abspath(out_dir))

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Write ``<name>.csv`` and remember its sha256 for the manifest."""

        path = os.path.join(self.out_dir, f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"Row of {len(row)} cells does not match the {len(header)}-column header of {name}")
                writer.writerow([format_cell(v) for v in row])
                count += 1
        self.checksums[os.path.basename(path)] = file_sha256(path)
        logger.info("Wrote %s rows to %s", count, path)
        return path

    def log_experiment(
        self,
        name: str,
        started: str,
        ok: bool,
        message: str,
        files: Optional[List[str]] = None,
        summary: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Record the outcome of a single experiment for the manifest."""

        self.records.append(
            ExperimentRecord(
                name=name,
                started_at_utc=started,
                finished_at_utc=datetime.now(timezone.utc).isoformat(),
                ok=ok,
                message=message,
                files=[os.path.basename(f) for f in files or []],
                summary=summary or {},
            )
        )

    def write_manifest(self, config_echo: Dict[str, Any]) -> str:
        if self._manifest_written:
            raise RuntimeError("The manifest has already been written for this run")
        manifest = RunManifest(
            tool_version=config.TOOL_VERSION,
            started_at_utc=self.started,
            finished_at_utc=datetime.now(timezone.utc).isoformat(),
            config=config_echo,
            checksums=dict(sorted(self.checksums.items())),
            experiments=self.records,
        )
        path = os.path.join(self.out_dir, "manifest.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(asdict(manifest), handle, indent=2, default=_json_default)
            handle.write("\n")
        self._manifest_written = True
        logger.info("Wrote manifest %s", path)
        return path


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)
