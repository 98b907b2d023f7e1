"""Style file: the face- and voice-specific interpretation rules.

A style maps expression names to weighted action-unit sets, aural events to
sound files, and fixes the speech timing used in place of synthesizer-reported
word times. Sections are ``[expressions]``, ``[aural]``, ``[speech]``, and
``[visemes]``; only the first and third are mandatory.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ByrneError
from .seeml import AU_MAX, AU_MIN, DEFAULT_VISEMES, EXPRESSION_NAMES


class StyleError(ByrneError):
    pass


@dataclass(frozen=True)
class StyleFile:
    expressions: dict[str, tuple[tuple[int, float], ...]]
    aural: dict[str, str] = field(default_factory=dict)
    words_per_minute: float = 180.0
    break_ms: float = 300.0
    speech_params: dict[str, str] = field(default_factory=dict)
    visemes: dict[str, str] = field(default_factory=dict)


_AU_WEIGHT = re.compile(r"^AU(\d+):([0-9.]+)$", re.IGNORECASE)


def load_style(text: str) -> StyleFile:
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1].strip().lower(), {})
            continue
        if current is None:
            raise StyleError(f"line {line_no}: entry before any [section] header")
        key, sep, value = line.partition("=")
        if not sep:
            raise StyleError(f"line {line_no}: expected key = value")
        current[key.strip()] = value.strip()

    for required in ("expressions", "speech"):
        if required not in sections:
            raise StyleError(f"missing section [{required}]")

    expressions: dict[str, tuple[tuple[int, float], ...]] = {}
    for name, value in sections["expressions"].items():
        weights: list[tuple[int, float]] = []
        for token in value.split():
            m = _AU_WEIGHT.match(token)
            if m is None:
                raise StyleError(f"expression '{name}': expected AU<k>:<w> terms, got '{token}'")
            au, weight = int(m.group(1)), float(m.group(2))
            if not AU_MIN <= au <= AU_MAX:
                raise StyleError(f"expression '{name}': AU{au} outside {AU_MIN}-{AU_MAX}")
            if not 0.0 <= weight <= 1.0:
                raise StyleError(f"expression '{name}': weight {weight} outside [0,1]")
            weights.append((au, weight))
        if not weights:
            raise StyleError(f"expression '{name}' maps to no action units")
        expressions[name] = tuple(weights)
    for required in EXPRESSION_NAMES:
        if required not in expressions:
            raise StyleError(f"style maps no action units for expression '{required}'")

    speech = dict(sections["speech"])
    wpm_text = speech.pop("words_per_minute", None)
    if wpm_text is None:
        raise StyleError("speech section missing words_per_minute")
    try:
        wpm = float(wpm_text)
        break_ms = float(speech.pop("break_ms", 300.0))
    except ValueError as e:
        raise StyleError(f"speech section: {e}") from None
    if wpm <= 0:
        raise StyleError(f"words_per_minute must be positive, got {wpm:g}")
    if break_ms < 0:
        raise StyleError(f"break_ms must be non-negative, got {break_ms:g}")

    visemes = sections.get("visemes", {})
    for cls in visemes:
        if cls not in DEFAULT_VISEMES:
            raise StyleError(f"unknown viseme letter class '{cls}'")

    return StyleFile(
        expressions=expressions,
        aural=dict(sections.get("aural", {})),
        words_per_minute=wpm,
        break_ms=break_ms,
        speech_params=speech,
        visemes=dict(visemes),
    )
