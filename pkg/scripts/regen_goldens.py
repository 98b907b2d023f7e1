#!/usr/bin/env python3
"""Regenerate the committed golden replay outputs in fixtures/demo/golden.

Run this only after deliberately changing the demo fixtures or the replay
semantics, then re-audit the traces by hand before committing: the golden tree
is the acceptance baseline, not a scratch area.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from byrne.pipeline import run_replay  # noqa: E402

DEMO = REPO / "fixtures" / "demo"
GOLDEN = DEMO / "golden"

if __name__ == "__main__":
    if GOLDEN.exists():
        shutil.rmtree(GOLDEN)
    code = run_replay(
        DEMO / "game.log", DEMO / "announcer.profile", DEMO / "announcer.style", GOLDEN
    )
    if code != 0:
        sys.exit(code)
    files = sorted(p.name for p in GOLDEN.iterdir())
    print(f"wrote {len(files)} golden files to {GOLDEN}")
