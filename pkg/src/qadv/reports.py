"""CSV/JSON outputs and run manifests."""

from __future__ import annotations

import contextlib
import csv
import json
import os
import subprocess
import time
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np


def to_jsonable(value):
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(doc, path):
    with open(path, "w") as fh:
        json.dump(to_jsonable(doc), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return v


def write_records(records, path, extra_columns=()):
    """Per-epoch metrics: ``epoch,split,loss,accuracy`` plus optional extras."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "split", "loss", "accuracy", *extra_columns])
        for r in records:
            w.writerow([r.epoch, r.split, _fmt(r.loss), _fmt(r.accuracy),
                        *(_fmt(r.extra.get(c, "")) for c in extra_columns)])


def git_describe(cwd=None):
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=cwd, capture_output=True, text=True, timeout=10, check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


@contextlib.contextmanager
def run_outputs(out_dir, command, config, seed):
    """Create ``out_dir``, yield it, and write ``manifest.json`` on exit.

    While the block runs an ``.incomplete`` marker sits in the directory; it
    is removed only on success, so failed runs stay flagged.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    marker = out_dir / ".incomplete"
    marker.write_text(f"{command} started\n")
    start = time.perf_counter()
    status = "failed"
    try:
        yield out_dir
        status = "ok"
    finally:
        manifest = {
            "command": command,
            "config": config,
            "seed": seed,
            "git_describe": git_describe(Path(__file__).parent),
            "wall_time_s": round(time.perf_counter() - start, 3),
            "status": status,
            "outputs": sorted(p.name for p in out_dir.iterdir()
                              if p.name not in (".incomplete", "manifest.json")),
        }
        write_json(manifest, out_dir / "manifest.json")
        if status == "ok":
            os.remove(marker)
