"""Run manifests: config snapshot, input/output digests, stage timings.

Every pipeline run writes one; a rerun whose stage inputs digest the same
may skip the stage and keep the recorded outputs.  Wall-clock fields are
the only part allowed to differ between identical runs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

MANIFEST_FORMAT = "scoi-manifest"
MANIFEST_VERSION = 1


def sha256_file(path: Path | str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def digest_map(paths: dict[str, Path | str]) -> dict[str, str]:
    return {name: sha256_file(path) for name, path in paths.items()}


class RunManifest:
    """Mutable builder for one run's manifest, with skip-check helpers."""

    def __init__(self, config_snapshot: dict, toolkit_version: str):
        self.data = {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "toolkit_version": toolkit_version,
            "config": config_snapshot,
            "stages": {},
        }

    def record_stage(
        self,
        name: str,
        inputs: dict[str, str],
        outputs: dict[str, str],
        seconds: float,
        skipped: bool = False,
    ) -> None:
        self.data["stages"][name] = {
            "inputs": inputs,
            "outputs": outputs,
            "seconds": seconds,
            "skipped": skipped,
        }

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, ensure_ascii=False, indent=2)
            fh.write("\n")


def read_manifest(path: Path | str) -> dict | None:
    path = Path(path)
    if not path.is_file():
        return None
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError):
        return None
    if data.get("format") != MANIFEST_FORMAT:
        return None
    return data


def stage_is_current(
    previous: dict | None, name: str, inputs: dict[str, str], output_paths: dict[str, Path]
) -> bool:
    """True when a prior manifest proves this stage's outputs are reusable."""
    if previous is None:
        return False
    stage = previous.get("stages", {}).get(name)
    if stage is None or stage.get("inputs") != inputs:
        return False
    recorded = stage.get("outputs", {})
    if set(recorded) != set(map(str, output_paths)):
        return False
    for key, path in output_paths.items():
        path = Path(path)
        if not path.is_file() or sha256_file(path) != recorded.get(str(key)):
            return False
    return True
