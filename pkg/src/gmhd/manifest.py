"""Run manifests: resolved settings, seed, digests of every emitted file.

The run digest covers tool version, resolved settings, and seed, so two runs
with the same manifest identity must produce byte-identical outputs; wall
times are recorded but excluded from the digest.
"""

from __future__ import annotations

import hashlib
import json
import os
from datetime import datetime, timezone

TOOL = "gmhd"


def _version():
    from . import __version__

    return __version__


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def run_digest(settings: dict, seed) -> str:
    canonical = json.dumps(
        {"tool": TOOL, "version": _version(), "seed": seed, "settings": settings},
        sort_keys=True,
        separators=(",", ":"),
        default=str,
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_manifest(settings: dict, seed, outputs, started_utc, extra=None) -> dict:
    entries = []
    for path in outputs:
        entries.append(
            {
                "path": os.path.basename(str(path)),
                "sha256": file_digest(path),
                "bytes": os.path.getsize(path),
            }
        )
    manifest = {
        "tool": TOOL,
        "version": _version(),
        "seed": seed,
        "settings": settings,
        "run_digest": run_digest(settings, seed),
        "started_utc": started_utc,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": entries,
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def manifest_path_for(output_path) -> str:
    base, _ = os.path.splitext(str(output_path))
    return base + ".manifest.json"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()
