#!/usr/bin/env python3
"""Regenerate fixtures/demo/game.log.

The demo match script lists each play with its initial relevance; this tool
expands it into a tick-by-tick log, re-scoring every live fact downward on the
one-second analysis grid (factor 0.67 per second) until it drops below one and
is purged. Event times off the grid (62.4, 63.4) are kept as their own ticks
so the replay exercises mid-utterance interruption.
"""

from __future__ import annotations

from pathlib import Path

DECAY_PER_S = 0.67

EVENTS: list[tuple[float, str, float]] = [
    (0, "(kickoff team: a)", 6),
    (4, "(pass from: a3 to: a1 fromloc: (12 30) toloc: (18 26))", 7),
    (8, "(has-ball player: a1)", 4),
    (12, "(move player: a1 fromloc: (18 26) toloc: (24 22))", 3),
    (16, "(pass from: a1 to: a2 fromloc: (24 22) toloc: (28 14))", 7),
    (20, "(has-ball player: a2)", 5),
    (28, "(move player: b1 fromloc: (2 12) toloc: (6 12))", 3),
    (34, "(corner team: a)", 6),
    (40, "(pass from: a2 to: a3 fromloc: (30 18) toloc: (26 8))", 6),
    (46, "(foul by: b2 against: a)", 7),
    (54, "(move player: a3 fromloc: (26 8) toloc: (30 6))", 3),
    (60, "(has-ball player: a2 location: (22 8))", 5),
    (61, "(shot player: a2 location: (22 8))", 8),
    (62.4, "(save player: b1)", 9),
    (63.4, "(scores team: a time: 63)", 10),
    (66, "(kickoff team: b)", 6),
    (72, "(pass from: b1 to: b2 fromloc: (20 20) toloc: (14 24))", 5),
    (80, "(move player: b2 fromloc: (14 24) toloc: (10 18))", 3),
    (88, "(has-ball player: b2)", 4),
    (100, "(shot player: b2 location: (8 14))", 8),
    (102, "(save player: a1)", 9),
    (110, "(corner team: b)", 6),
    (118, "(pass from: a1 to: a2 fromloc: (26 12) toloc: (22 12))", 6),
    (120, "(pass from: a1 to: a2 fromloc: (30 10) toloc: (20 10) begintime: 120 endtime: 125)", 10),
    (120, "(has-ball player: a2 location: (20 10))", 5),
    (120, "(move player: b1 fromloc: (5 10) toloc: (10 10) begintime: 115 endtime: 120)", 3),
    (126, "(has-ball player: a2 location: (18 6))", 4),
    (130, "(move player: a2 fromloc: (18 6) toloc: (14 4))", 3),
]


def build() -> str:
    last = max(t for t, _, _ in EVENTS)
    ticks = sorted({t for t, _, _ in EVENTS} | {float(g) for g in range(0, int(last) + 1)})
    live: dict[str, tuple[float, float]] = {}  # fact text -> (event time, initial relevance)
    lines = [
        "# demo match: the Highlanders (a) vs the Wolves (b)",
        "# relevance decays on the analysis side; facts below 1 are purged",
        "",
    ]
    for t in ticks:
        tick = f"{t:g}"
        lines.append(f"(tick {tick})")
        for when, fact, rel in EVENTS:
            if when == t:
                live[fact] = (when, rel)
                lines.append(f"(fact {fact} relevance: {rel:g})")
        if t == int(t):
            for fact, (when, rel) in list(live.items()):
                if when == t:
                    continue
                scored = round(rel * DECAY_PER_S ** (t - when), 2)
                lines.append(f"(fact {fact} relevance: {scored:g})")
                if scored < 1:
                    del live[fact]
        lines.append("")
    return "\n".join(lines)


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "fixtures" / "demo" / "game.log"
    out.write_text(build(), encoding="utf-8")
    print(f"wrote {out}")
