"""Game fact board: log parsing, per-tick relevance upkeep, fact selection.

Input logs are pre-analysed: every fact arrives already scored, and re-listing
a fact under a new score updates it in place. Entries whose relevance drops
below one are purged, so the board only ever holds facts worth mentioning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ByrneError
from .patterns import is_ground, parse_keyed
from .sexpr import SexprError, Sexpr, Symbol, is_keyword, keyword_name, kw, read_one, to_text


class LogError(ByrneError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class LogSyntaxError(LogError):
    pass


class LogStructureError(LogError):
    pass


class LogOrderError(LogError):
    pass


@dataclass(frozen=True)
class GameFact:
    predicate: Symbol
    args: tuple[tuple[str, Sexpr], ...]
    relevance: float

    def as_sexpr(self) -> tuple:
        items: list[Sexpr] = [self.predicate]
        for name, term in self.args:
            items.append(kw(name))
            items.append(term)
        return tuple(items)

    @property
    def identity(self) -> str:
        """Canonical text of predicate+args; the relevance score is not part of it."""
        return to_text(self.as_sexpr())

    def arg(self, name: str, default: Optional[Sexpr] = None) -> Optional[Sexpr]:
        for key, term in self.args:
            if key == name:
                return term
        return default

    @property
    def begin_time(self) -> float | None:
        t = self.arg("begintime")
        return float(t) if isinstance(t, (int, float)) else None

    @property
    def end_time(self) -> float | None:
        t = self.arg("endtime")
        return float(t) if isinstance(t, (int, float)) else None


def fact_from_sexpr(form: Sexpr, relevance: float, line: int | None = None) -> GameFact:
    keyed = parse_keyed(form)
    if keyed is None or keyed[0] is None:
        raise LogSyntaxError(f"not a fact form: {to_text(form)}", line)
    if not is_ground(form):
        raise LogSyntaxError(f"fact contains variables: {to_text(form)}", line)
    head, pairs = keyed
    for name in ("begintime", "endtime"):
        if name in pairs and not isinstance(pairs[name], (int, float)):
            raise LogSyntaxError(f"{name} must be a number of seconds", line)
    return GameFact(head, tuple(pairs.items()), float(relevance))


@dataclass(frozen=True)
class FactBoard:
    entries: dict[str, GameFact] = field(default_factory=dict)
    clock: float = float("-inf")

    def facts(self) -> tuple[GameFact, ...]:
        return tuple(self.entries.values())


@dataclass(frozen=True)
class TickUpdate:
    tick_time: float
    facts: tuple[GameFact, ...] = ()


def parse_game_log(text: str) -> tuple[TickUpdate, ...]:
    """Parse a line-oriented game log into tick updates, ascending in time.

    Lines are ``(tick <seconds>)`` headers or ``(fact <s-expr> relevance: <n>)``
    entries attached to the preceding header; ``#`` lines are comments.
    """
    updates: list[TickUpdate] = []
    current: list[GameFact] | None = None
    current_time: float | None = None

    def flush() -> None:
        if current_time is not None:
            updates.append(TickUpdate(current_time, tuple(current or ())))

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            form = read_one(line)
        except SexprError as e:
            raise LogSyntaxError(str(e).split(": ", 1)[-1], line_no) from e
        if not isinstance(form, tuple) or not form or not isinstance(form[0], Symbol):
            raise LogSyntaxError("expected (tick ...) or (fact ...)", line_no)
        head = str(form[0])
        if head == "tick":
            if len(form) != 2 or not isinstance(form[1], (int, float)):
                raise LogSyntaxError("tick header needs one numeric time", line_no)
            t = float(form[1])
            if current_time is not None and t <= current_time:
                raise LogOrderError(f"tick {t:g} does not advance past {current_time:g}", line_no)
            flush()
            current, current_time = [], t
        elif head == "fact":
            if current is None:
                raise LogStructureError("fact before any (tick ...) header", line_no)
            if len(form) != 4 or not is_keyword(form[2]) or keyword_name(form[2]) != "relevance":
                raise LogSyntaxError("expected (fact <s-expr> relevance: <number>)", line_no)
            if not isinstance(form[3], (int, float)):
                raise LogSyntaxError("relevance must be a number", line_no)
            current.append(fact_from_sexpr(form[1], float(form[3]), line_no))
        else:
            raise LogSyntaxError(f"unknown form ({head} ...)", line_no)
    flush()
    return tuple(updates)


def apply_tick(board: FactBoard, update: TickUpdate) -> FactBoard:
    """Insert or re-score the update's facts, purge relevance < 1, advance the clock."""
    if update.tick_time <= board.clock:
        raise LogOrderError(
            f"tick {update.tick_time:g} does not advance past clock {board.clock:g}"
        )
    entries = dict(board.entries)
    for fact in update.facts:
        entries[fact.identity] = fact
    entries = {key: f for key, f in entries.items() if f.relevance >= 1.0}
    return FactBoard(entries, float(update.tick_time))


def _selection_key(fact: GameFact) -> tuple:
    end = fact.end_time if fact.end_time is not None else float("-inf")
    return (-fact.relevance, -end, fact.identity)


def select_fact(board: FactBoard) -> GameFact | None:
    """Most relevant entry; ties go to the latest end_time, then smallest identity."""
    if not board.entries:
        return None
    return min(board.entries.values(), key=_selection_key)


def should_interrupt(reported: GameFact, board: FactBoard) -> bool:
    """True iff some board entry is strictly more relevant than `reported` is now.

    The comparison uses the reported fact's current board score; a fact that
    has been purged counts as relevance 0, so anything still worth saying wins.
    """
    current = board.entries.get(reported.identity)
    rel = current.relevance if current is not None else 0.0
    return any(f.relevance > rel for f in board.entries.values())
