"""SEEML tag trees: parse, serialize, decorate, merge, verify, split.

SEEML is a thin superset of three SGML vocabularies plus a local supplement:
structural text annotation (lower-case: su, seg, np, vp, w), speech prosody
(upper-case: RATE, PITCH, VOLUME, EMPH, BREAK, AUDIO under a SABLE root),
facial mark-up (EXPR for whole expressions, AU for single action units), and
AURAL/AFFECT extras. The verifier turns one merged document into two outputs:
a speech script that keeps only the spoken side, and a millisecond timeline of
facial action units and lip-sync visemes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence, Union

from .behaviors import (
    ActionUnitDirective,
    AuralEventDirective,
    FacialExpressionDirective,
    MarkupDirective,
    SpeechTagDirective,
)
from .errors import ByrneError

if TYPE_CHECKING:
    from .style import StyleFile


class SeemlError(ByrneError):
    pass


class VerifyError(ByrneError):
    pass


GDA_TAGS = ("su", "seg", "np", "vp", "w")
SABLE_TAGS = ("SABLE", "RATE", "PITCH", "VOLUME", "EMPH", "BREAK", "AUDIO")
FACE_TAGS = ("EXPR", "AU")
SUPPLEMENT_TAGS = ("AURAL", "AFFECT")

# BREAK/AURAL are momentary and AUDIO is an insertion: none of them enclose text.
CHILDLESS_TAGS = frozenset({"BREAK", "AURAL", "AUDIO"})

EXPRESSION_NAMES = ("smile", "sadness", "fear", "anger", "disgust", "surprise")
AU_MIN, AU_MAX = 1, 46

_CANONICAL = {t.lower(): t for t in (*GDA_TAGS, *SABLE_TAGS, *FACE_TAGS, *SUPPLEMENT_TAGS)}

MIN_VISEME_MS = 60.0  # cartoon coarseness: at most one mouth shape per 60 ms
GESTURE_MS = 250.0  # nominal span for a point gesture that encloses no words

DEFAULT_VISEMES = {
    "a": "AA",
    "e": "EH",
    "i": "IY",
    "o": "OW",
    "u": "UW",
    "mbp": "MM",
    "fv": "FV",
    "w": "WW",
    "wide": "WIDE",
}


@dataclass(frozen=True)
class Text:
    text: str


@dataclass(frozen=True)
class Element:
    tag: str
    attrs: tuple[tuple[str, str], ...] = ()
    children: tuple["Node", ...] = ()

    def attr(self, name: str, default: Optional[str] = None) -> Optional[str]:
        for key, value in self.attrs:
            if key == name:
                return value
        return default


Node = Union[Text, Element]


@dataclass(frozen=True)
class SeemlDocument:
    children: tuple[Node, ...] = ()


def _normalize(children: Iterable[Node]) -> tuple[Node, ...]:
    # canonical trees never hold empty or adjacent text nodes
    out: list[Node] = []
    for child in children:
        if isinstance(child, Text):
            if not child.text:
                continue
            if out and isinstance(out[-1], Text):
                out[-1] = Text(out[-1].text + child.text)
                continue
        out.append(child)
    return tuple(out)


_SIGNED = re.compile(r"^[+-](?:\d+\.?\d*|\.\d+)%?$")


def _validate(tag: str, attrs: dict[str, str]) -> None:
    if tag == "AU":
        num = attrs.get("NUM")
        if num is None or not num.isdigit() or not AU_MIN <= int(num) <= AU_MAX:
            raise SeemlError(f"AU needs NUM between {AU_MIN} and {AU_MAX}, got {num!r}")
    if tag == "EXPR":
        name = attrs.get("NAME")
        if name not in EXPRESSION_NAMES:
            raise SeemlError(
                f"unknown expression name {name!r}; expected one of {', '.join(EXPRESSION_NAMES)}"
            )
    if tag == "AURAL" and not attrs.get("NAME"):
        raise SeemlError("AURAL needs a NAME attribute")
    if tag == "AUDIO" and not attrs.get("SRC"):
        raise SeemlError("AUDIO needs a SRC attribute")
    if tag in ("EXPR", "AU", "AFFECT"):
        level = attrs.get("LEVEL")
        if level is not None and not _SIGNED.match(level):
            try:
                value = float(level)
            except ValueError:
                raise SeemlError(f"{tag} LEVEL must be numeric, got {level!r}") from None
            if not 0.0 <= value <= 1.0:
                raise SeemlError(f"{tag} LEVEL must lie in [0,1], got {level}")


def element(
    tag: str,
    attrs: Mapping[str, str] | Iterable[tuple[str, str]] = (),
    children: Iterable[Node] = (),
) -> Element:
    canon = _CANONICAL.get(tag.lower())
    if canon is None:
        raise SeemlError(f"unknown tag <{tag}>")
    case = str.lower if canon in GDA_TAGS else str.upper
    items = dict(attrs)
    attr_map: dict[str, str] = {}
    for name, value in items.items():
        key = case(name)
        if key in attr_map:
            raise SeemlError(f"duplicate attribute {key} on <{canon}>")
        attr_map[key] = str(value)
    _validate(canon, attr_map)
    kids = _normalize(children)
    if canon in CHILDLESS_TAGS and kids:
        raise SeemlError(f"<{canon}> does not enclose content")
    return Element(canon, tuple(sorted(attr_map.items())), kids)


def document(children: Iterable[Node]) -> SeemlDocument:
    return SeemlDocument(_normalize(children))


_TAG_RE = re.compile(
    r"<\s*(/)?([A-Za-z][A-Za-z0-9]*)((?:\s+[A-Za-z][A-Za-z0-9]*\s*=\s*\"[^\"<>]*\")*)\s*(/)?\s*>"
)
_ATTR_RE = re.compile(r"([A-Za-z][A-Za-z0-9]*)\s*=\s*\"([^\"]*)\"")
_ENTITY_RE = re.compile(r"&(amp|lt|gt|quot);")
_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"'}


def _unescape(text: str) -> str:
    return _ENTITY_RE.sub(lambda m: _ENTITIES[m.group(1)], text)


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return _escape_text(value).replace('"', "&quot;")


def parse_seeml(text: str) -> SeemlDocument:
    """Parse SGML-style markup; tags are case-insensitive, unknown tags are errors."""
    stack: list[tuple[Element, list[Node]]] = []
    top: list[Node] = []

    def attach(node: Node) -> None:
        (stack[-1][1] if stack else top).append(node)

    pos = 0
    while pos < len(text):
        lt = text.find("<", pos)
        if lt == -1:
            attach(Text(_unescape(text[pos:])))
            break
        if lt > pos:
            attach(Text(_unescape(text[pos:lt])))
        m = _TAG_RE.match(text, lt)
        if m is None:
            raise SeemlError(f"malformed tag at offset {lt}: {text[lt:lt + 30]!r}")
        closing, name, attr_text, selfclose = m.groups()
        pos = m.end()
        if closing:
            if selfclose or attr_text.strip():
                raise SeemlError(f"malformed closing tag </{name}>")
            if not stack:
                raise SeemlError(f"unmatched closing tag </{name}>")
            open_el, kids = stack.pop()
            canon = _CANONICAL.get(name.lower())
            if canon != open_el.tag:
                raise SeemlError(f"closing tag </{name}> does not match <{open_el.tag}>")
            attach(Element(open_el.tag, open_el.attrs, _normalize(kids)))
            continue
        attrs = {}
        for am in _ATTR_RE.finditer(attr_text):
            key, value = am.group(1), _unescape(am.group(2))
            if key.lower() in {k.lower() for k in attrs}:
                raise SeemlError(f"duplicate attribute {key} on <{name}>")
            attrs[key] = value
        el = element(name, attrs)
        if selfclose or el.tag in CHILDLESS_TAGS:
            attach(el)
        else:
            stack.append((el, []))
    if stack:
        raise SeemlError(f"unclosed tag <{stack[-1][0].tag}>")
    return document(top)


def serialize_seeml(doc: SeemlDocument) -> str:
    """Canonical text: attributes sorted and double-quoted, childless tags self-closed."""
    return "".join(_serialize_node(n) for n in doc.children)


def _serialize_node(node: Node) -> str:
    if isinstance(node, Text):
        return _escape_text(node.text)
    attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in node.attrs)
    if not node.children:
        return f"<{node.tag}{attrs}/>"
    inner = "".join(_serialize_node(c) for c in node.children)
    return f"<{node.tag}{attrs}>{inner}</{node.tag}>"


def strip_text(doc: SeemlDocument) -> str:
    out: list[str] = []

    def walk(node: Node) -> None:
        if isinstance(node, Text):
            out.append(node.text)
        else:
            for child in node.children:
                walk(child)

    for node in doc.children:
        walk(node)
    return "".join(out)


# --- directive application -------------------------------------------------


def _fmt_level(level: float) -> str:
    return f"{level:g}"


def _directive_element(d: MarkupDirective, children: Iterable[Node] = ()) -> Element:
    if isinstance(d, FacialExpressionDirective):
        return element("EXPR", {"NAME": d.name, "LEVEL": _fmt_level(d.level)}, children)
    if isinstance(d, ActionUnitDirective):
        return element("AU", {"NUM": str(d.au), "LEVEL": _fmt_level(d.level)}, children)
    if isinstance(d, AuralEventDirective):
        return element("AURAL", {"NAME": d.name})
    if isinstance(d, SpeechTagDirective):
        return element(d.tag, dict(d.attrs), children)
    raise SeemlError(f"unknown directive {d!r}")


def _is_insertion(d: MarkupDirective) -> bool:
    # directives whose element cannot enclose text are inserted beside it instead
    if isinstance(d, AuralEventDirective):
        return True
    if isinstance(d, SpeechTagDirective):
        canon = _CANONICAL.get(d.tag.lower())
        return canon in CHILDLESS_TAGS
    return False


def _with_children(el: Element, children: Iterable[Node]) -> Element:
    return Element(el.tag, el.attrs, _normalize(children))


def _wrap_phrases(nodes: Sequence[Node], d: MarkupDirective) -> list[Node]:
    out: list[Node] = []
    for node in nodes:
        if isinstance(node, Element):
            node = _with_children(node, _wrap_phrases(node.children, d))
            if node.tag == "seg":
                if _is_insertion(d):
                    out.extend([node, _directive_element(d)])
                else:
                    out.append(_directive_element(d, (node,)))
                continue
        out.append(node)
    return out


def _word_regex(word: str) -> re.Pattern[str]:
    return re.compile(rf"(?<!\w){re.escape(word)}(?!\w)", re.IGNORECASE)


def _wrap_words(nodes: Sequence[Node], d: MarkupDirective) -> list[Node]:
    rx = _word_regex(d.scope.word)
    out: list[Node] = []
    for node in nodes:
        if isinstance(node, Element):
            node_text = strip_text(SeemlDocument((node,))).strip()
            if node.tag == "w" and node_text.lower() == d.scope.word.lower():
                if _is_insertion(d):
                    out.extend([node, _directive_element(d)])
                else:
                    out.append(_directive_element(d, (node,)))
            else:
                out.append(_with_children(node, _wrap_words(node.children, d)))
            continue
        pos = 0
        for m in rx.finditer(node.text):
            if m.start() > pos:
                out.append(Text(node.text[pos : m.start()]))
            hit = Text(m.group(0))
            if _is_insertion(d):
                out.extend([hit, _directive_element(d)])
            else:
                out.append(_directive_element(d, (hit,)))
            pos = m.end()
        if pos < len(node.text):
            out.append(Text(node.text[pos:]))
    return out


def apply_directives(doc: SeemlDocument, directives: Sequence[MarkupDirective]) -> SeemlDocument:
    """Layer behavior-driven markup over an already marked-up utterance."""
    nodes: Sequence[Node] = doc.children
    for d in directives:
        kind = d.scope.kind
        if kind == "utterance":
            if _is_insertion(d):
                nodes = [*nodes, _directive_element(d)]
            else:
                nodes = [_directive_element(d, nodes)]
        elif kind == "point":
            mark = _directive_element(d) if _is_insertion(d) else _directive_element(d, ())
            nodes = [mark, *nodes] if d.scope.position == "start" else [*nodes, mark]
        elif kind == "every-phrase":
            nodes = _wrap_phrases(nodes, d)
        elif kind == "word":
            nodes = _wrap_words(nodes, d)
        else:
            raise SeemlError(f"unknown directive scope '{kind}'")
    return document(nodes)


# --- merge algebra ----------------------------------------------------------

_DELTA_RE = re.compile(r"^([+-](?:\d+\.?\d*|\.\d+))(%?)$")


def _split_attrs(el: Element) -> tuple[tuple[tuple[str, str], ...], dict[str, tuple[float, str]]]:
    """Separate absolute attributes from signed relative ("delta") ones."""
    plain: list[tuple[str, str]] = []
    deltas: dict[str, tuple[float, str]] = {}
    for name, value in el.attrs:
        m = _DELTA_RE.match(value)
        if m:
            deltas[name] = (float(m.group(1)), m.group(2))
        else:
            plain.append((name, value))
    return tuple(plain), deltas


def _identity(el: Element) -> tuple:
    """Merge identity: tag, absolute attributes, and delta attribute names+units.

    Delta magnitudes are excluded, so two RATE tags asking for different signed
    speed changes count as identical and combine additively.
    """
    plain, deltas = _split_attrs(el)
    return (el.tag, plain, tuple(sorted((name, unit) for name, (_, unit) in deltas.items())))


def _format_delta(value: float, unit: str) -> str:
    return f"{value:+g}{unit}"


def merge_tags(doc: SeemlDocument) -> SeemlDocument:
    """Resolve stacked markup with the three combination rules.

    Non-identical tags are independent and untouched. An element identical to a
    strict ancestor is redundant: without delta attributes the inner copy goes
    (the larger scope stands); with delta attributes the tags collapse onto the
    innermost span and their deltas sum.
    """
    below_memo: dict[int, frozenset] = {}

    def idents_below(node: Node) -> frozenset:
        if isinstance(node, Text):
            return frozenset()
        cached = below_memo.get(id(node))
        if cached is None:
            found: set = set()
            for child in node.children:
                if isinstance(child, Element):
                    found.add(_identity(child))
                found |= idents_below(child)
            cached = frozenset(found)
            below_memo[id(node)] = cached
        return cached

    def rebuild(node: Node, plain_anc: frozenset, delta_in: dict) -> list[Node]:
        if isinstance(node, Text):
            return [node]
        ident = _identity(node)
        plain, deltas = _split_attrs(node)
        if deltas:
            if ident in idents_below(node):
                inherited = dict(delta_in.get(ident, {}))
                for name, (mag, _) in deltas.items():
                    inherited[name] = inherited.get(name, 0.0) + mag
                passed = {**delta_in, ident: inherited}
                out: list[Node] = []
                for child in node.children:
                    out.extend(rebuild(child, plain_anc, passed))
                return out
            inherited = delta_in.get(ident, {})
            attrs = dict(plain)
            for name, (mag, unit) in deltas.items():
                attrs[name] = _format_delta(inherited.get(name, 0.0) + mag, unit)
            kids: list[Node] = []
            for child in node.children:
                kids.extend(rebuild(child, plain_anc, delta_in))
            return [element(node.tag, attrs, kids)]
        if ident in plain_anc:
            out = []
            for child in node.children:
                out.extend(rebuild(child, plain_anc, delta_in))
            return out
        kids = []
        for child in node.children:
            kids.extend(rebuild(child, plain_anc | {ident}, delta_in))
        return [element(node.tag, dict(node.attrs), kids)]

    roots: list[Node] = []
    for node in doc.children:
        roots.extend(rebuild(node, frozenset(), {}))
    return document(roots)


# --- verifier: timing, split, lip sync ---------------------------------------


@dataclass(frozen=True)
class TimedWord:
    word: str
    onset_ms: float
    duration_ms: float


@dataclass(frozen=True)
class FacsEvent:
    onset_ms: float
    au: int
    intensity: float
    duration_ms: float


@dataclass(frozen=True)
class VisemeEvent:
    onset_ms: float
    viseme: str
    duration_ms: float


@dataclass(frozen=True)
class OutputBundle:
    speech_script: str
    timeline: tuple[Union[FacsEvent, VisemeEvent], ...]
    total_duration_ms: float
    seg_boundaries_ms: tuple[float, ...]


def _letter_class(ch: str) -> str:
    if ch in "aeiou":
        return ch
    if ch in "mbp":
        return "mbp"
    if ch in "fv":
        return "fv"
    if ch == "w":
        return "w"
    return "wide"


def lip_sync(
    words: Sequence[TimedWord], visemes: Mapping[str, str] | None = None
) -> list[VisemeEvent]:
    """Cartoon-style mouth shapes from a letter-class scan, spread evenly per word."""
    table = dict(DEFAULT_VISEMES)
    table.update(visemes or {})
    events: list[VisemeEvent] = []
    for w in words:
        runs: list[str] = []
        for ch in w.word.lower():
            if not ch.isalpha():
                continue
            cls = _letter_class(ch)
            if not runs or runs[-1] != cls:
                runs.append(cls)
        if not runs:
            runs = ["wide"]
        cap = max(1, int(w.duration_ms / MIN_VISEME_MS))
        runs = runs[:cap]
        dur = w.duration_ms / len(runs)
        events.extend(
            VisemeEvent(w.onset_ms + i * dur, table[cls], dur) for i, cls in enumerate(runs)
        )
    return events


def _timeline_key(ev: Union[FacsEvent, VisemeEvent]) -> tuple:
    if isinstance(ev, FacsEvent):
        return (ev.onset_ms, 0, ev.au, ev.duration_ms, "")
    return (ev.onset_ms, 1, 0, ev.duration_ms, ev.viseme)


def verify_and_split(doc: SeemlDocument, style: "StyleFile") -> OutputBundle:
    """Assign word timings, resolve facial markup through the style file, and
    split the document into a speech script plus a facial/viseme timeline."""
    word_ms = 60000.0 / style.words_per_minute
    words: list[TimedWord] = []
    seg_closes: list[float] = []
    spans: list[tuple[Element, float, float]] = []
    cursor = 0.0

    def walk(node: Node) -> None:
        nonlocal cursor
        if isinstance(node, Text):
            for token in node.text.split():
                words.append(TimedWord(token, cursor, word_ms))
                cursor += word_ms
            return
        if node.tag == "BREAK":
            cursor += style.break_ms
            return
        if node.tag == "AURAL":
            return
        start = cursor
        for child in node.children:
            walk(child)
        end = cursor
        if node.tag in ("EXPR", "AU"):
            spans.append((node, start, end))
        elif node.tag == "seg":
            seg_closes.append(end)

    for node in doc.children:
        walk(node)
    total = cursor

    facs: list[FacsEvent] = []
    for el, start, end in spans:
        if not words:
            raise VerifyError("facial mark-up with no words to anchor a timeline")
        if end <= start:  # point gesture: give it a nominal span
            end = start + GESTURE_MS
            total = max(total, end)
        duration = max(0.0, min(end, total) - start)
        level = float(el.attr("LEVEL", "1.0"))
        if el.tag == "AU":
            facs.append(FacsEvent(start, int(el.attr("NUM")), level, duration))
        else:
            name = el.attr("NAME")
            weights = style.expressions.get(name)
            if weights is None:
                raise VerifyError(f"expression '{name}' missing from style")
            facs.extend(
                FacsEvent(start, au, min(1.0, weight * level), duration) for au, weight in weights
            )

    def project(node: Node) -> list[Node]:
        if isinstance(node, Text):
            return [node]
        if node.tag in ("EXPR", "AU"):
            out: list[Node] = []
            for child in node.children:
                out.extend(project(child))
            return out
        if node.tag == "AURAL":
            name = node.attr("NAME")
            path = style.aural.get(name)
            if path is None:
                raise VerifyError(f"aural event '{name}' missing from style")
            return [element("AUDIO", {"SRC": path})]
        kids: list[Node] = []
        for child in node.children:
            kids.extend(project(child))
        return [_with_children(node, kids)]

    body: list[Node] = []
    for node in doc.children:
        body.extend(project(node))
    script = serialize_seeml(document([element("SABLE", (), body)]))

    timeline = sorted([*facs, *lip_sync(words, style.visemes)], key=_timeline_key)
    return OutputBundle(script, tuple(timeline), total, tuple(sorted(seg_closes)))


def format_face_timeline(bundle: OutputBundle) -> str:
    """Tab-separated timeline rows under the `#byrne-facs v1` header."""
    lines = ["#byrne-facs v1"]
    for ev in bundle.timeline:
        if isinstance(ev, FacsEvent):
            kind, ident, intensity = "AU", str(ev.au), ev.intensity
        else:
            kind, ident, intensity = "VIS", ev.viseme, 1.0
        lines.append(
            f"{round(ev.onset_ms)}\t{kind}\t{ident}\t{intensity:.3f}\t{round(ev.duration_ms)}"
        )
    return "\n".join(lines) + "\n"
