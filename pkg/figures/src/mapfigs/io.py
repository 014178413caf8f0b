"""CSV loading and manifest validation for the runner's output format."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path


class ManifestError(RuntimeError):
    """Missing or mismatched manifest for an input file."""


def check_manifest(path: Path) -> dict:
    """Require a manifest.json next to the input that lists it with a
    matching SHA-256; returns the manifest."""
    path = Path(path)
    manifest_path = path.parent / "manifest.json"
    if not manifest_path.exists():
        raise ManifestError(f"no manifest.json next to {path}")
    manifest = json.loads(manifest_path.read_text())
    files = manifest.get("files", {})
    if path.name not in files:
        raise ManifestError(f"{path.name} not listed in {manifest_path}")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if digest != files[path.name]:
        raise ManifestError(f"checksum mismatch for {path.name}")
    return manifest


def read_csv_columns(path: Path) -> dict[str, list[float]]:
    """Read a runner CSV into named float columns; empty data is an error."""
    with open(path, newline="") as fp:
        reader = csv.reader(fp)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(float(value))
    if not any(columns.values()):
        raise ValueError(f"{path} has a header but no rows")
    return columns


def load_input(path: Path, require_manifest: bool = True) -> dict[str, list[float]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if require_manifest:
        check_manifest(path)
    return read_csv_columns(path)


def write_report(path: Path, report: dict) -> None:
    """Byte-stable JSON: sorted keys, repr floats via json defaults."""
    with open(path, "w") as fp:
        json.dump(report, fp, indent=2, sort_keys=True)
        fp.write("\n")
