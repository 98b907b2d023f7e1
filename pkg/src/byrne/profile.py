"""Character profiles: statics, emotion rules, behaviors, templates.

One declarative file defines a character, so the same announcer can front any
content source. Everything is s-expressions; see the README for the grammar.
Loading validates the whole profile and reports every problem it finds, each
diagnostic naming the offending rule, behavior, template, or variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .behaviors import (
    ActionUnitDirective,
    AuralEventDirective,
    BehaviorSpec,
    EVERY_PHRASE,
    FacialExpressionDirective,
    MarkupDirective,
    MotivationPattern,
    Scope,
    SpeechTagDirective,
    UTTERANCE,
    at_point,
    word_trigger,
)
from .emotions import (
    DecayFunction,
    EMOTION_TYPES,
    EmotionRule,
    EmotionSchema,
    NIL,
    RuleError,
)
from .errors import ByrneError
from .patterns import is_ground, variables_in
from .sexpr import (
    SexprError,
    Sexpr,
    Symbol,
    is_keyword,
    keyword_name,
    kw,
    read_top_level,
    to_text,
)
from .seeml import EXPRESSION_NAMES, SeemlDocument, SeemlError, parse_seeml
from .textgen import Template, _VAR_RE


class ProfileError(ByrneError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class CharacterProfile:
    statics: tuple[Sexpr, ...] = ()
    names: tuple[tuple[str, str], ...] = ()
    emotion_rules: tuple[EmotionRule, ...] = ()
    behaviors: tuple[BehaviorSpec, ...] = ()
    templates: tuple[Template, ...] = ()
    lambda_use_penalty: float = 5.0

    def name_table(self) -> dict[str, str]:
        return dict(self.names)

    def behavior_index(self) -> dict[str, BehaviorSpec]:
        return {b.id: b for b in self.behaviors}


def _split_form(items: Iterable[Sexpr]) -> tuple[dict[str, Sexpr], list[tuple]]:
    """Separate `key: value` pairs from (sub ...) forms inside one body."""
    pairs: dict[str, Sexpr] = {}
    subforms: list[tuple] = []
    items = list(items)
    i = 0
    while i < len(items):
        item = items[i]
        if is_keyword(item):
            if i + 1 >= len(items):
                raise SexprError(f"keyword {item} has no value")
            pairs[keyword_name(item)] = items[i + 1]
            i += 2
        elif isinstance(item, tuple):
            subforms.append(item)
            i += 1
        else:
            raise SexprError(f"unexpected item {to_text(item)}")
    return pairs, subforms


def _sub(subforms: list[tuple], head: str) -> Optional[tuple]:
    for form in subforms:
        if form and isinstance(form[0], Symbol) and str(form[0]) == head:
            return form
    return None


def _parse_scope(form: Sexpr) -> Scope:
    if isinstance(form, Symbol):
        if str(form) == "utterance":
            return UTTERANCE
        if str(form) == "every-phrase":
            return EVERY_PHRASE
    if isinstance(form, tuple) and len(form) == 2 and isinstance(form[0], Symbol):
        head, arg = str(form[0]), form[1]
        if head == "word":
            return word_trigger(str(arg))
        if head == "point" and isinstance(arg, Symbol):
            return at_point(str(arg))
    raise SexprError(f"unknown scope {to_text(form)}")


def _level(value: Sexpr, where: str) -> float:
    if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
        raise SexprError(f"{where}: level must be a number in [0,1], got {to_text(value)}")
    return float(value)


def _parse_directive(form: tuple) -> MarkupDirective:
    if not form or not isinstance(form[0], Symbol):
        raise SexprError(f"bad directive {to_text(form)}")
    head = str(form[0])
    if head == "expr":
        if len(form) != 4:
            raise SexprError("expected (expr <name> <level> <scope>)")
        name = str(form[1])
        if name not in EXPRESSION_NAMES:
            raise SexprError(f"unknown expression name '{name}'")
        return FacialExpressionDirective(name, _level(form[2], "expr"), _parse_scope(form[3]))
    if head == "au":
        if len(form) != 4:
            raise SexprError("expected (au <num> <level> <scope>)")
        if not isinstance(form[1], int) or not 1 <= form[1] <= 46:
            raise SexprError(f"action unit id must lie in 1-46, got {to_text(form[1])}")
        return ActionUnitDirective(form[1], _level(form[2], "au"), _parse_scope(form[3]))
    if head == "aural":
        if len(form) != 3:
            raise SexprError("expected (aural <name> <scope>)")
        return AuralEventDirective(str(form[1]), _parse_scope(form[2]))
    if head == "speech":
        if len(form) < 3 or not isinstance(form[1], Symbol):
            raise SexprError("expected (speech <TAG> <scope> [ATTR: <value> ...])")
        attrs, subforms = _split_form(form[3:])
        if subforms:
            raise SexprError("speech directive attributes must be ATTR: value pairs")
        pairs = tuple((name, str(value)) for name, value in attrs.items())
        return SpeechTagDirective(str(form[1]), pairs, _parse_scope(form[2]))
    raise SexprError(f"unknown directive ({head} ...)")


def _parse_motivations(form: tuple) -> tuple[MotivationPattern, ...]:
    out: list[MotivationPattern] = []
    i = 1
    while i < len(form):
        item = form[i]
        if is_keyword(item) and keyword_name(item) == "target":
            if not out:
                raise SexprError("target: before any emotion type in motivated-by")
            if i + 1 >= len(form):
                raise SexprError("target: has no pattern")
            out[-1] = MotivationPattern(out[-1].emotion_type, form[i + 1])
            i += 2
            continue
        if not isinstance(item, Symbol) or str(item) not in EMOTION_TYPES:
            raise SexprError(f"unknown emotion type {to_text(item)} in motivated-by")
        out.append(MotivationPattern(str(item)))
        i += 1
    return tuple(out)


def _parse_schema(form: Sexpr) -> EmotionSchema:
    pairs, subforms = (None, None)
    if isinstance(form, tuple):
        try:
            pairs, subforms = _split_form(form)
        except SexprError:
            pairs = None
    if pairs is None or subforms:
        raise SexprError(f"bad emotion schema {to_text(form)}")
    unknown = set(pairs) - {"type", "intensity", "target", "cause", "decay"}
    if unknown:
        raise SexprError(f"emotion schema has unknown keys {sorted(unknown)}")
    for required in ("type", "intensity", "cause", "decay"):
        if required not in pairs:
            raise SexprError(f"emotion schema missing {required}:")
    etype = pairs["type"]
    if not isinstance(etype, Symbol) or str(etype) not in EMOTION_TYPES:
        raise SexprError(f"unknown emotion type {to_text(etype)}")
    intensity = pairs["intensity"]
    if not isinstance(intensity, (int, float)) or not 0 < float(intensity) <= 10:
        raise SexprError(f"emotion intensity must lie in (0,10], got {to_text(intensity)}")
    target = pairs.get("target")
    if isinstance(target, Symbol) and target == NIL:
        target = None
    return EmotionSchema(
        type=str(etype),
        intensity=float(intensity),
        target=target,
        cause=pairs["cause"],
        decay=DecayFunction.from_sexpr(pairs["decay"]),
    )


def _body_variables(body: str) -> set[Symbol]:
    return {Symbol(m.group(0)) for m in _VAR_RE.finditer(body)}


def _count_segs(doc: SeemlDocument) -> int:
    count = 0
    stack = list(doc.children)
    while stack:
        node = stack.pop()
        if hasattr(node, "tag"):
            if node.tag == "seg":
                count += 1
            stack.extend(node.children)
    return count


def load_profile(text: str) -> CharacterProfile:
    """Parse and validate a profile; raises ProfileError listing every diagnostic."""
    diags: list[str] = []
    statics: list[Sexpr] = []
    names: list[tuple[str, str]] = []
    rules: list[EmotionRule] = []
    behaviors: list[BehaviorSpec] = []
    templates: list[Template] = []
    lambda_penalty = 5.0

    try:
        forms = read_top_level(text)
    except SexprError as e:
        raise ProfileError([str(e)]) from e

    for form, line in forms:
        if not isinstance(form, tuple) or not form or not isinstance(form[0], Symbol):
            diags.append(f"line {line}: expected a (head ...) form")
            continue
        head = str(form[0])
        try:
            if head == "static":
                if len(form) != 2:
                    raise SexprError("expected (static <fact>)")
                if not is_ground(form[1]):
                    raise SexprError(f"static fact contains variables: {to_text(form[1])}")
                statics.append(form[1])
            elif head == "names":
                for entry in form[1:]:
                    if (
                        not isinstance(entry, tuple)
                        or len(entry) != 2
                        or not isinstance(entry[0], Symbol)
                        or not isinstance(entry[1], str)
                    ):
                        raise SexprError(f"expected (<id> \"<display>\"), got {to_text(entry)}")
                    names.append((str(entry[0]), str(entry[1])))
            elif head == "params":
                pairs, _ = _split_form(form[1:])
                lam = pairs.pop("lambda", None)
                if pairs:
                    raise SexprError(f"unknown params {sorted(pairs)}")
                if lam is not None:
                    if not isinstance(lam, (int, float)) or float(lam) < 0:
                        raise SexprError("lambda: must be a non-negative number of seconds")
                    lambda_penalty = float(lam)
            elif head == "emotion-rule":
                rules.append(_load_rule(form, line, diags))
            elif head == "behavior":
                spec = _load_behavior(form, line, diags)
                if spec is not None:
                    if any(b.id == spec.id for b in behaviors):
                        diags.append(f"line {line}: duplicate behavior id '{spec.id}'")
                    else:
                        behaviors.append(spec)
            elif head == "template":
                tmpl = _load_template(form, line, diags)
                if tmpl is not None:
                    if any(t.id == tmpl.id for t in templates):
                        diags.append(f"line {line}: duplicate template id '{tmpl.id}'")
                    else:
                        templates.append(tmpl)
            else:
                raise SexprError(f"unknown form ({head} ...)")
        except (SexprError, RuleError) as e:
            diags.append(f"line {line}: {e}")

    _check_behavior_graph(behaviors, diags)

    if diags:
        raise ProfileError(diags)
    return CharacterProfile(
        statics=tuple(statics),
        names=tuple(names),
        emotion_rules=tuple(rules),
        behaviors=tuple(behaviors),
        templates=tuple(templates),
        lambda_use_penalty=lambda_penalty,
    )


def _load_rule(form: tuple, line: int, diags: list[str]) -> EmotionRule:
    _, subforms = _split_form(form[1:])
    pre = _sub(subforms, "pre")
    add = _sub(subforms, "add")
    dele = _sub(subforms, "del")
    preconditions = tuple(pre[1:]) if pre else ()
    additions = tuple(_parse_schema(s) for s in (add[1:] if add else ()))
    deletions = tuple(dele[1:]) if dele else ()
    bound: set[Symbol] = set()
    for p in preconditions:
        bound |= variables_in(p)
    used: set[Symbol] = set()
    for schema in additions:
        used |= variables_in(schema.cause)
        if schema.target is not None:
            used |= variables_in(schema.target)
    for p in deletions:
        used |= variables_in(p)
    for var in sorted(used - bound):
        diags.append(f"line {line}: emotion-rule uses unbound variable {var}")
    return EmotionRule(preconditions, additions, deletions)


def _load_behavior(form: tuple, line: int, diags: list[str]) -> Optional[BehaviorSpec]:
    pairs, subforms = _split_form(form[1:])
    bid, group = pairs.get("id"), pairs.get("group")
    if not isinstance(bid, Symbol) or not isinstance(group, Symbol):
        diags.append(f"line {line}: behavior needs id: and group: symbols")
        return None
    motivated = _sub(subforms, "motivated-by")
    pre = _sub(subforms, "pre")
    children = _sub(subforms, "children")
    directives = _sub(subforms, "directives")
    if (children is None) == (directives is None):
        diags.append(f"line {line}: behavior '{bid}' needs (children ...) xor (directives ...)")
        return None
    parsed: list[MarkupDirective] = []
    for d in directives[1:] if directives else ():
        try:
            parsed.append(_parse_directive(d))
        except (SexprError, ByrneError) as e:
            diags.append(f"line {line}: behavior '{bid}': {e}")
    child_ids = tuple(str(c) for c in (children[1:] if children else ()))
    if children is not None and not child_ids:
        diags.append(f"line {line}: behavior '{bid}' has an empty (children) form")
    if directives is not None and len(directives) == 1:
        diags.append(f"line {line}: behavior '{bid}' has an empty (directives) form")
    return BehaviorSpec(
        id=str(bid),
        group=str(group),
        motivated_by=_parse_motivations(motivated) if motivated else (),
        preconditions=tuple(pre[1:]) if pre else (),
        children=child_ids,
        directives=tuple(parsed),
    )


def _load_template(form: tuple, line: int, diags: list[str]) -> Optional[Template]:
    pairs, subforms = _split_form(form[1:])
    tid = pairs.get("id")
    if not isinstance(tid, Symbol):
        diags.append(f"line {line}: template needs an id: symbol")
        return None
    pre = _sub(subforms, "pre")
    text_form = _sub(subforms, "text")
    if text_form is None or len(text_form) != 2 or not isinstance(text_form[1], str):
        diags.append(f"line {line}: template '{tid}' needs (text \"...\")")
        return None
    body = text_form[1]
    preconditions = tuple(pre[1:]) if pre else ()
    try:
        doc = parse_seeml(body)
        if _count_segs(doc) < 1:
            diags.append(f"line {line}: template '{tid}' body has no <seg> phrase markers")
    except SeemlError as e:
        diags.append(f"line {line}: template '{tid}' body: {e}")
    bound: set[Symbol] = set()
    for p in preconditions:
        bound |= variables_in(p)
    for var in sorted(_body_variables(body) - bound):
        diags.append(f"line {line}: template '{tid}' uses unbound variable {var}")
    return Template(str(tid), preconditions, body)


def _check_behavior_graph(behaviors: list[BehaviorSpec], diags: list[str]) -> None:
    index = {b.id: b for b in behaviors}
    for b in behaviors:
        for child in b.children:
            if child not in index:
                diags.append(f"behavior '{b.id}' names unknown child '{child}'")

    # white/grey/black walk over the child graph
    state: dict[str, int] = {}

    def visit(bid: str, path: tuple[str, ...]) -> None:
        if state.get(bid) == 2:
            return
        if state.get(bid) == 1:
            diags.append(f"behavior cycle involving '{bid}'")
            return
        state[bid] = 1
        for child in index[bid].children if bid in index else ():
            if child in index:
                visit(child, path + (bid,))
        state[bid] = 2

    for b in behaviors:
        visit(b.id, ())


# --- canonical dump ----------------------------------------------------------


def _scope_sexpr(scope: Scope) -> Sexpr:
    if scope.kind == "utterance":
        return Symbol("utterance")
    if scope.kind == "every-phrase":
        return Symbol("every-phrase")
    if scope.kind == "word":
        return (Symbol("word"), scope.word)
    return (Symbol("point"), Symbol(scope.position))


def _directive_sexpr(d: MarkupDirective) -> tuple:
    if isinstance(d, FacialExpressionDirective):
        return (Symbol("expr"), Symbol(d.name), d.level, _scope_sexpr(d.scope))
    if isinstance(d, ActionUnitDirective):
        return (Symbol("au"), d.au, d.level, _scope_sexpr(d.scope))
    if isinstance(d, AuralEventDirective):
        return (Symbol("aural"), Symbol(d.name), _scope_sexpr(d.scope))
    items: list[Sexpr] = [Symbol("speech"), Symbol(d.tag), _scope_sexpr(d.scope)]
    for name, value in d.attrs:
        items.extend((kw(name), value))
    return tuple(items)


def _schema_sexpr(s: EmotionSchema) -> tuple:
    return (
        kw("type"),
        Symbol(s.type),
        kw("intensity"),
        s.intensity,
        kw("target"),
        s.target if s.target is not None else NIL,
        kw("cause"),
        s.cause,
        kw("decay"),
        s.decay.to_sexpr(),
    )


def dump_profile(profile: CharacterProfile) -> str:
    """Canonical text form; load_profile(dump_profile(p)) == p."""
    lines: list[str] = []
    if profile.lambda_use_penalty != 5.0:
        lines.append(to_text((Symbol("params"), kw("lambda"), profile.lambda_use_penalty)))
    for fact in profile.statics:
        lines.append(to_text((Symbol("static"), fact)))
    if profile.names:
        entries = tuple((Symbol(i), n) for i, n in profile.names)
        lines.append(to_text((Symbol("names"), *entries)))
    for rule in profile.emotion_rules:
        items: list[Sexpr] = [Symbol("emotion-rule"), (Symbol("pre"), *rule.preconditions)]
        if rule.additions:
            items.append((Symbol("add"), *(_schema_sexpr(s) for s in rule.additions)))
        if rule.deletions:
            items.append((Symbol("del"), *rule.deletions))
        lines.append(to_text(tuple(items)))
    for b in profile.behaviors:
        items = [Symbol("behavior"), kw("id"), Symbol(b.id), kw("group"), Symbol(b.group)]
        if b.motivated_by:
            mot: list[Sexpr] = [Symbol("motivated-by")]
            for m in b.motivated_by:
                mot.append(Symbol(m.emotion_type))
                if m.target is not None:
                    mot.extend((kw("target"), m.target))
            items.append(tuple(mot))
        if b.preconditions:
            items.append((Symbol("pre"), *b.preconditions))
        if b.children:
            items.append((Symbol("children"), *(Symbol(c) for c in b.children)))
        else:
            items.append((Symbol("directives"), *(_directive_sexpr(d) for d in b.directives)))
        lines.append(to_text(tuple(items)))
    for t in profile.templates:
        lines.append(
            to_text(
                (
                    Symbol("template"),
                    kw("id"),
                    Symbol(t.id),
                    (Symbol("pre"), *t.preconditions),
                    (Symbol("text"), t.body),
                )
            )
        )
    return "".join(line + "\n" for line in lines)
