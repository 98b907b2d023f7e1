"""Template-based surface generation.

Templates pair precondition patterns with a SEEML body whose ``seg`` elements
double as interrupt markers. When several templates cover a fact, the least
recently and least often used one wins, keeping the phrasing from looping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import ByrneError
from .facts import GameFact
from .patterns import Binding, match_all
from .seeml import SeemlDocument, parse_seeml
from .sexpr import Sexpr, Symbol, to_text


class CoverageError(ByrneError):
    def __init__(self, predicate: str):
        self.predicate = predicate
        super().__init__(f"no template matches fact predicate '{predicate}'")


class InstantiationError(ByrneError):
    pass


@dataclass(frozen=True)
class Template:
    id: str
    preconditions: tuple[Sexpr, ...]
    body: str


@dataclass(frozen=True)
class UsageRecord:
    use_count: int = 0
    last_used_tick: Optional[float] = None


@dataclass(frozen=True)
class UsageHistory:
    records: Mapping[str, UsageRecord] = field(default_factory=dict)

    def record(self, template_id: str) -> UsageRecord:
        return self.records.get(template_id, UsageRecord())


def select_template(
    fact: GameFact,
    templates: Iterable[Template],
    history: UsageHistory,
    now: float,
    *,
    statics: Iterable[Sexpr] = (),
    lambda_use_penalty: float = 5.0,
) -> tuple[Template, Binding]:
    """Best-scoring template whose preconditions match the fact (plus statics).

    Score is seconds-since-last-use minus a per-use penalty; a never-used
    template scores infinitely fresh. Ties break on template id.
    """
    universe = [fact.as_sexpr(), *statics]
    best: tuple[tuple, Template, Binding] | None = None
    for template in templates:
        bindings = match_all(template.preconditions, universe)
        if not bindings:
            continue
        rec = history.record(template.id)
        recency = float("inf") if rec.last_used_tick is None else now - rec.last_used_tick
        score = recency - lambda_use_penalty * rec.use_count
        key = (-score, template.id)
        if best is None or key < best[0]:
            best = (key, template, bindings[0])
    if best is None:
        raise CoverageError(str(fact.predicate))
    return best[1], best[2]


_VAR_RE = re.compile(r"\?[A-Za-z][A-Za-z0-9_-]*")


def render_term(term: Sexpr, names: Mapping[str, str] | None = None) -> str:
    """Surface form of a bound term; player/team ids go through the name table."""
    if isinstance(term, Symbol):
        return (names or {}).get(str(term), str(term))
    if isinstance(term, str):
        return term
    if isinstance(term, int):
        return str(term)
    if isinstance(term, float):
        return f"{term:g}"
    return to_text(term)


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def instantiate(
    template: Template, binding: Binding, names: Mapping[str, str] | None = None
) -> SeemlDocument:
    """Substitute bound terms into the body and re-parse it, markup intact."""

    def replace(m: re.Match[str]) -> str:
        var = Symbol(m.group(0))
        if var not in binding:
            raise InstantiationError(f"template '{template.id}': unbound variable {var}")
        return _escape(render_term(binding[var], names))

    return parse_seeml(_VAR_RE.sub(replace, template.body))


def record_usage(history: UsageHistory, template_id: str, now: float) -> UsageHistory:
    records = dict(history.records)
    rec = records.get(template_id, UsageRecord())
    records[template_id] = UsageRecord(rec.use_count + 1, float(now))
    return UsageHistory(records)
