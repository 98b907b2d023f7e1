"""Per-tick commentary loop and deterministic replay.

Each step applies the tick's fact updates, fires emotion rules, decays the
pool, and then speaks: an idle announcer picks the most relevant fact, renders
it through a template, layers the winning behaviors' markup on top, and splits
the merged document into outputs. A busy announcer checks whether something
more relevant has appeared; if so the running utterance is cut at its next
phrase boundary and the new one starts there.

Replays are fully deterministic: identical inputs give byte-identical output
trees. The seed is recorded in the trace header for future stochastic
extensions but nothing consumes it yet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .behaviors import activate_behaviors, arbitrate, expand
from .emotions import EmotionPool, apply_rules, decay_pool, intensity_at
from .errors import ByrneError
from .facts import (
    FactBoard,
    GameFact,
    TickUpdate,
    apply_tick,
    parse_game_log,
    select_fact,
    should_interrupt,
)
from .profile import CharacterProfile, load_profile
from .seeml import OutputBundle, apply_directives, format_face_timeline, merge_tags, verify_and_split
from .sexpr import to_text
from .style import StyleFile, load_style
from .textgen import CoverageError, UsageHistory, instantiate, record_usage, select_template

logger = logging.getLogger("byrne")

UTTERANCE_START = "start"
UTTERANCE_END = "end"
INTERRUPTED = "interrupted"

_TRACE_KIND = {UTTERANCE_START: "START", UTTERANCE_END: "END", INTERRUPTED: "INTERRUPT"}


@dataclass(frozen=True)
class CommentaryEvent:
    time: float  # seconds
    kind: str
    fact_identity: str
    utterance: int
    bundle: Optional[OutputBundle] = None


@dataclass(frozen=True)
class InProgress:
    fact: GameFact
    index: int
    start_time: float
    duration_ms: float
    boundaries_ms: tuple[float, ...]

    def end_time(self) -> float:
        return self.start_time + self.duration_ms / 1000.0


@dataclass(frozen=True)
class PipelineState:
    board: FactBoard
    pool: EmotionPool
    history: UsageHistory
    in_progress: Optional[InProgress]
    clock: float
    rng_seed: int = 0
    utterance_count: int = 0


def initial_state(seed: int = 0) -> PipelineState:
    return PipelineState(
        board=FactBoard(),
        pool=EmotionPool(),
        history=UsageHistory(),
        in_progress=None,
        clock=float("-inf"),
        rng_seed=seed,
    )


def _begin_utterance(
    board: FactBoard,
    pool: EmotionPool,
    history: UsageHistory,
    profile: CharacterProfile,
    style: StyleFile,
    start_at: float,
    now: float,
    count: int,
) -> tuple[Optional[InProgress], UsageHistory, int, list[CommentaryEvent]]:
    names = profile.name_table()
    skipped: set[str] = set()
    while True:
        candidates = FactBoard(
            {k: f for k, f in board.entries.items() if k not in skipped}, board.clock
        )
        fact = select_fact(candidates)
        if fact is None:
            return None, history, count, []
        try:
            template, binding = select_template(
                fact,
                profile.templates,
                history,
                now,
                statics=profile.statics,
                lambda_use_penalty=profile.lambda_use_penalty,
            )
        except CoverageError as e:
            logger.warning("skipping fact with no template: %s", fact.identity)
            skipped.add(fact.identity)
            continue
        doc = instantiate(template, binding, names)
        winners = arbitrate(activate_behaviors(profile.behaviors, pool, profile.statics, now))
        doc = merge_tags(apply_directives(doc, expand(winners, profile.behaviors)))
        bundle = verify_and_split(doc, style)
        history = record_usage(history, template.id, now)
        count += 1
        utterance = InProgress(
            fact, count, start_at, bundle.total_duration_ms, bundle.seg_boundaries_ms
        )
        event = CommentaryEvent(start_at, UTTERANCE_START, fact.identity, count, bundle)
        return utterance, history, count, [event]


def step(
    state: PipelineState,
    update: TickUpdate,
    profile: CharacterProfile,
    style: StyleFile,
) -> tuple[PipelineState, list[CommentaryEvent]]:
    """Advance one tick; returns the new state and the events it produced."""
    events: list[CommentaryEvent] = []
    board = apply_tick(state.board, update)
    now = board.clock
    pool = decay_pool(
        apply_rules(state.pool, board, profile.statics, profile.emotion_rules, now), now
    )
    history = state.history
    count = state.utterance_count
    current = state.in_progress

    if current is not None and current.end_time() <= now:
        events.append(
            CommentaryEvent(current.end_time(), UTTERANCE_END, current.fact.identity, current.index)
        )
        current = None

    start_at = now
    if current is not None and should_interrupt(current.fact, board):
        elapsed_ms = (now - current.start_time) * 1000.0
        cut = next((b for b in current.boundaries_ms if b >= elapsed_ms - 1e-6), None)
        if cut is not None:
            cut_time = current.start_time + cut / 1000.0
            events.append(
                CommentaryEvent(cut_time, INTERRUPTED, current.fact.identity, current.index)
            )
            current = None
            start_at = cut_time

    if current is None:
        current, history, count, started = _begin_utterance(
            board, pool, history, profile, style, start_at, now, count
        )
        events.extend(started)

    new_state = replace(
        state,
        board=board,
        pool=pool,
        history=history,
        in_progress=current,
        clock=now,
        utterance_count=count,
    )
    return new_state, events


def driver_ticks(updates: tuple[TickUpdate, ...], tick_seconds: float) -> list[TickUpdate]:
    """Log updates plus empty filler ticks on a uniform grid between them.

    Filler ticks let utterances start, finish, and be snapshotted between
    sparse log entries; the board itself only changes on log ticks.
    """
    if not updates:
        return []
    if tick_seconds <= 0:
        raise ByrneError(f"tick length must be positive, got {tick_seconds:g}")
    start, last = updates[0].tick_time, updates[-1].tick_time
    times: dict[float, TickUpdate] = {round(u.tick_time, 9): u for u in updates}
    k = 1
    while (t := start + k * tick_seconds) < last - 1e-9:
        key = round(t, 9)
        times.setdefault(key, TickUpdate(t))
        k += 1
    return [times[key] for key in sorted(times)]


def _emotion_lines(pool: EmotionPool, now: float) -> list[str]:
    lines = []
    for e in pool.structures:
        target = to_text(e.target) if e.target is not None else "nil"
        lines.append(
            f"{now:.3f}\t{e.type}\t{target}\t{to_text(e.cause)}\t{intensity_at(e, now):.3f}"
        )
    return lines


def run_replay(
    log_path: str | Path,
    profile_path: str | Path,
    style_path: str | Path,
    out_dir: str | Path,
    *,
    tick_seconds: float = 1.0,
    seed: int = 0,
    echo: bool = False,
) -> int:
    """Replay a game log and write the commentary outputs; returns the exit code.

    Exit 0 on success, 1 when an input fails to load, 2 on a runtime error.
    Outputs: per-utterance `utt-<n>.sable` and `utt-<n>.facs`, plus
    `commentary.trace` and `emotions.trace`.
    """
    import sys

    try:
        updates = parse_game_log(Path(log_path).read_text(encoding="utf-8"))
        profile = load_profile(Path(profile_path).read_text(encoding="utf-8"))
        style = load_style(Path(style_path).read_text(encoding="utf-8"))
    except (OSError, ByrneError) as e:
        print(f"commentate: load error: {e}", file=sys.stderr)
        return 1

    state = initial_state(seed)
    commentary_lines = [f"# commentary-trace v1 seed={seed}"]
    emotion_lines = ["# emotions-trace v1"]
    bundles: list[tuple[int, OutputBundle]] = []

    try:
        for update in driver_ticks(updates, tick_seconds):
            state, events = step(state, update, profile, style)
            for ev in events:
                line = f"{ev.time:.3f}\t{_TRACE_KIND[ev.kind]}\t{ev.utterance}\t{ev.fact_identity}"
                commentary_lines.append(line)
                if echo:
                    print(line)
                if ev.bundle is not None:
                    bundles.append((ev.utterance, ev.bundle))
            emotion_lines.extend(_emotion_lines(state.pool, state.clock))
        if state.in_progress is not None:
            final = state.in_progress
            commentary_lines.append(
                f"{final.end_time():.3f}\t{_TRACE_KIND[UTTERANCE_END]}\t{final.index}\t{final.fact.identity}"
            )
    except ByrneError as e:
        print(f"commentate: runtime error: {e}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def write(name: str, content: str) -> None:
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)

    for index, bundle in bundles:
        write(f"utt-{index}.sable", bundle.speech_script + "\n")
        write(f"utt-{index}.facs", format_face_timeline(bundle))
    write("commentary.trace", "".join(line + "\n" for line in commentary_lines))
    write("emotions.trace", "".join(line + "\n" for line in emotion_lines))
    logger.info("replay wrote %d utterances to %s", len(bundles), out)
    return 0
