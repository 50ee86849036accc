#!/usr/bin/env python3
"""Rewrites corpus/golden/ from single-threaded runs of the CLI."""
import json
import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent / "corpus"
cli = sys.argv[1] if len(sys.argv) > 1 else "build/adelikit"
manifest = json.loads((root / "manifest.json").read_text())
(root / "golden").mkdir(exist_ok=True)
for job in manifest["jobs"]:
    name = job["name"]
    out = root / "golden" / f"{name}.json"
    cmd = [cli, job["command"], str(root / "jobs" / f"{name}.json"), str(out), *job["args"], "--threads", "1"]
    rc = subprocess.run(cmd, stderr=subprocess.DEVNULL).returncode
    want = job.get("expect_exit", 0)
    print(f"{name}: exit {rc}" + ("" if rc == want else f" (expected {want})"))
