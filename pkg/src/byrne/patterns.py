"""One-way pattern matching over ground s-expressions.

Patterns are s-expressions with ``?name`` variables. Keyworded forms such as
``(pass from: ?x to: ?y)`` match a candidate when the heads agree and every
keyword the pattern mentions is present on the candidate with a matching term;
extra keywords on the candidate are ignored, so ``(scores team: ?t)`` matches
``(scores team: a time: 125)``. Plain tuples (coordinate pairs and the like)
match positionally. Candidates are always ground, so this is matching rather
than full unification.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import ByrneError
from .sexpr import Sexpr, Symbol, is_keyword, keyword_name, to_text

Binding = dict[Symbol, Sexpr]


class PatternError(ByrneError):
    pass


def is_variable(x: Sexpr) -> bool:
    return isinstance(x, Symbol) and len(x) > 1 and x.startswith("?")


def variables_in(x: Sexpr) -> set[Symbol]:
    if is_variable(x):
        return {x}
    if isinstance(x, tuple):
        out: set[Symbol] = set()
        for c in x:
            out |= variables_in(c)
        return out
    return set()


def is_ground(x: Sexpr) -> bool:
    return not variables_in(x)


def parse_keyed(form: Sexpr) -> Optional[tuple[Optional[Symbol], dict[str, Sexpr]]]:
    """Split ``(head k1: v1 ...)`` or headless ``(k1: v1 ...)`` into head + keyword map.

    Returns None when the form is not keyword-shaped (then it matches positionally).
    """
    if not isinstance(form, tuple) or not form:
        return None
    head: Optional[Symbol] = None
    i = 0
    if isinstance(form[0], Symbol) and not is_keyword(form[0]) and not is_variable(form[0]):
        head = form[0]
        i = 1
    rest = form[i:]
    if not rest or len(rest) % 2:
        return None
    pairs: dict[str, Sexpr] = {}
    for k, v in zip(rest[::2], rest[1::2]):
        if not is_keyword(k):
            return None
        name = keyword_name(k)
        if name in pairs:
            return None
        pairs[name] = v
    return head, pairs


def _atoms_match(pattern: Sexpr, value: Sexpr) -> bool:
    if isinstance(pattern, (int, float)) and isinstance(value, (int, float)):
        return pattern == value
    if isinstance(pattern, Symbol) and isinstance(value, Symbol):
        return str(pattern) == str(value)
    if isinstance(pattern, str) and isinstance(value, str):
        # quoted strings never match bare symbols
        return isinstance(pattern, Symbol) == isinstance(value, Symbol) and pattern == value
    return False


def unify(pattern: Sexpr, value: Sexpr, binding: Binding) -> Optional[Binding]:
    """Extend `binding` so that `pattern` matches ground `value`, or None."""
    if is_variable(pattern):
        bound = binding.get(pattern)
        if bound is None:
            out = dict(binding)
            out[pattern] = value
            return out
        return binding if _equal(bound, value) else None
    if isinstance(pattern, tuple) and isinstance(value, tuple):
        pk, vk = parse_keyed(pattern), parse_keyed(value)
        if pk is not None and vk is not None:
            (ph, pp), (vh, vp) = pk, vk
            if (ph is None) != (vh is None) or (ph is not None and str(ph) != str(vh)):
                return None
            b: Optional[Binding] = binding
            for name, pv in pp.items():
                if name not in vp:
                    return None
                b = unify(pv, vp[name], b)
                if b is None:
                    return None
            return b
        if pk is None and vk is None:
            if len(pattern) != len(value):
                return None
            b = binding
            for p, v in zip(pattern, value):
                b = unify(p, v, b)
                if b is None:
                    return None
            return b
        return None
    if isinstance(pattern, tuple) or isinstance(value, tuple):
        return None
    return binding if _atoms_match(pattern, value) else None


def _equal(a: Sexpr, b: Sexpr) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_equal(x, y) for x, y in zip(a, b))
    return _atoms_match(a, b)


def substitute(x: Sexpr, binding: Binding) -> Sexpr:
    if is_variable(x):
        if x not in binding:
            raise PatternError(f"unbound variable {x}")
        return binding[x]
    if isinstance(x, tuple):
        return tuple(substitute(c, binding) for c in x)
    return x


def match_all(
    patterns: Iterable[Sexpr],
    candidates: Iterable[Sexpr],
    binding: Optional[Binding] = None,
) -> list[Binding]:
    """Every binding satisfying all patterns against the candidate set.

    Patterns are tried left to right against candidates in their given order,
    so the result order is deterministic; duplicate bindings are dropped.
    """
    patterns = list(patterns)
    candidates = list(candidates)
    results: list[Binding] = []

    def go(i: int, b: Binding) -> None:
        if i == len(patterns):
            results.append(b)
            return
        for cand in candidates:
            nb = unify(patterns[i], cand, b)
            if nb is not None:
                go(i + 1, nb)

    go(0, dict(binding or {}))
    seen: set[tuple] = set()
    out: list[Binding] = []
    for b in results:
        key = tuple(sorted((str(k), to_text(v)) for k, v in b.items()))
        if key not in seen:
            seen.add(key)
            out.append(b)
    return out
