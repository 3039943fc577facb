#!/usr/bin/env python3
"""Regenerate the frozen demo-corpus golden fixtures used by the CLI tests.

Runs a clean build+select on the bundled demo corpus into a temp directory
and copies a pinned subset of outputs into tests/fixtures/.  Only run this
deliberately after an intended behavior change; the point of the fixtures
is to make unintended output drift loud.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

from scoi.cli import main

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"
GOLDENS = {
    "selections_scoi.jsonl": "demo_selections_scoi.jsonl",
    "selections_random.jsonl": "demo_selections_random.jsonl",
    "prompts_scoi.jsonl": "demo_prompts_scoi.jsonl",
}


def run() -> None:
    config = REPO / "data" / "demo" / "demo.cfg"
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "out"
        assert main(["build", "--config", str(config), "--out-dir", str(out)]) == 0
        assert main(["select", "--config", str(config), "--out-dir", str(out)]) == 0
        FIXTURES.mkdir(parents=True, exist_ok=True)
        for source, target in GOLDENS.items():
            shutil.copyfile(out / source, FIXTURES / target)
            print(f"froze {target}")


if __name__ == "__main__":
    run()
