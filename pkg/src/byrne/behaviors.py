"""Emotion-expressing behaviors: activation, per-group arbitration, expansion.

Behaviors in the same group are mutually inconsistent, so only the strongest
activation in each group is performed; behaviors in different groups all run,
which is how mixed expressions (a smile plus a raised pitch) come about. A
behavior motivated by several emotions sums their intensities, letting a broad
mood beat one strong feeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .emotions import EmotionPool, EmotionStructure, NIL, intensity_at
from .errors import ByrneError
from .patterns import match_all, unify
from .sexpr import Sexpr


class BehaviorError(ByrneError):
    pass


@dataclass(frozen=True)
class Scope:
    kind: str  # utterance | every-phrase | word | point
    word: str = ""
    position: str = ""  # start | end


UTTERANCE = Scope("utterance")
EVERY_PHRASE = Scope("every-phrase")


def word_trigger(word: str) -> Scope:
    if not str(word):
        raise BehaviorError("word trigger needs a non-empty word")
    return Scope("word", word=str(word))


def at_point(position: str) -> Scope:
    if position not in ("start", "end"):
        raise BehaviorError(f"point scope must be start or end, not '{position}'")
    return Scope("point", position=position)


@dataclass(frozen=True)
class FacialExpressionDirective:
    name: str
    level: float
    scope: Scope


@dataclass(frozen=True)
class ActionUnitDirective:
    au: int
    level: float
    scope: Scope


@dataclass(frozen=True)
class AuralEventDirective:
    name: str
    scope: Scope


@dataclass(frozen=True)
class SpeechTagDirective:
    tag: str
    attrs: tuple[tuple[str, str], ...]
    scope: Scope


MarkupDirective = Union[
    FacialExpressionDirective, ActionUnitDirective, AuralEventDirective, SpeechTagDirective
]


@dataclass(frozen=True)
class MotivationPattern:
    emotion_type: str
    target: Sexpr | None = None


@dataclass(frozen=True)
class BehaviorSpec:
    """Node in the behavior hierarchy: either an expansion (children) or a leaf (directives).

    A spec with no motivation patterns never activates on its own; it exists to
    be expanded by a parent.
    """

    id: str
    group: str
    motivated_by: tuple[MotivationPattern, ...] = ()
    preconditions: tuple[Sexpr, ...] = ()
    children: tuple[str, ...] = ()
    directives: tuple[MarkupDirective, ...] = ()


@dataclass(frozen=True)
class ActivatedBehavior:
    spec: BehaviorSpec
    activation: float
    motivating: tuple[EmotionStructure, ...]


def _target_matches(pattern: Sexpr, structure: EmotionStructure, static_bindings) -> bool:
    actual = structure.target if structure.target is not None else NIL
    return any(unify(pattern, actual, dict(b)) is not None for b in static_bindings)


def activate_behaviors(
    specs: Sequence[BehaviorSpec],
    pool: EmotionPool,
    statics: Iterable[Sexpr],
    now: float,
) -> list[ActivatedBehavior]:
    """Specs whose static preconditions hold and whose every motivation pattern
    matches at least one pool structure; activation sums the matched intensities."""
    statics = list(statics)
    out: list[ActivatedBehavior] = []
    for spec in specs:
        if not spec.motivated_by:
            continue
        static_bindings = match_all(spec.preconditions, statics)
        if not static_bindings:
            continue
        motivating: list[EmotionStructure] = []
        satisfied = True
        for pattern in spec.motivated_by:
            matched = [
                e
                for e in pool.structures
                if e.type == pattern.emotion_type
                and (pattern.target is None or _target_matches(pattern.target, e, static_bindings))
            ]
            if not matched:
                satisfied = False
                break
            for e in matched:
                if e not in motivating:
                    motivating.append(e)
        if not satisfied:
            continue
        activation = sum(intensity_at(e, now) for e in motivating)
        out.append(ActivatedBehavior(spec, activation, tuple(motivating)))
    return out


def arbitrate(activated: Sequence[ActivatedBehavior]) -> list[ActivatedBehavior]:
    """Keep the highest activation per group; ties go to the smallest spec id."""
    winners: dict[str, ActivatedBehavior] = {}
    for a in activated:
        best = winners.get(a.spec.group)
        if best is None or (-a.activation, a.spec.id) < (-best.activation, best.spec.id):
            winners[a.spec.group] = a
    return list(winners.values())


def expand(
    winners: Sequence[ActivatedBehavior], specs: Sequence[BehaviorSpec]
) -> list[MarkupDirective]:
    """Depth-first expansion of each winner to its leaf directives, in spec order."""
    index = {s.id: s for s in specs}
    out: list[MarkupDirective] = []

    def walk(spec: BehaviorSpec, path: tuple[str, ...]) -> None:
        if spec.id in path:
            raise BehaviorError(f"behavior cycle involving '{spec.id}'")
        if spec.directives:
            out.extend(spec.directives)
            return
        for child_id in spec.children:
            child = index.get(child_id)
            if child is None:
                raise BehaviorError(f"behavior '{spec.id}' expands to unknown child '{child_id}'")
            walk(child, path + (spec.id,))

    for winner in winners:
        walk(winner.spec, ())
    return out
