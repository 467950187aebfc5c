"""State-Application and State-Prediction.

A parser state is a goal atom, the list of categories it still expects
(nearest first) and one lambda term: the partial interpretation, which
abstracts over the expected arguments in list order.

Semantic conventions
--------------------
* A lexical entry's semantics abstracts over its right arguments first
  (list order), then its left arguments (list order).
* The value of an expected argument ``(x, L, R, H)`` takes its headed
  arguments ``H`` first, then ``R``, then the rest of ``L``.  For
  lexical categories (``H`` empty) this is the lexical convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .category import Category, is_prefix, is_suffix, render_category
from .terms import (
    DEFAULT_FUEL,
    Abs,
    App,
    Const,
    Term,
    Var,
    abs_n,
    app_n,
    constants,
    free_vars,
    is_normal,
    normalize,
    render_term,
)

__all__ = [
    "APPLY",
    "PREDICT",
    "LexEntry",
    "ConditioningContext",
    "TransitionRecord",
    "ParserState",
    "application_term",
    "prediction_term",
    "state_apply",
    "state_predict",
    "successors",
    "check_state",
    "InvariantViolation",
]

APPLY = "apply"
PREDICT = "predict"


@dataclass(frozen=True)
class LexEntry:
    form: str
    cat: Category
    sem: Term

    def __str__(self):
        return f"{self.form} : {render_category(self.cat)} = {render_term(self.sem)}"


@dataclass(frozen=True)
class ConditioningContext:
    """Generalised state seen by a transition: the word's category and the
    first expected argument.  The rest of the expected list is dropped."""

    word: str
    expected: str

    @property
    def key(self) -> str:
        return f"{self.word} | {self.expected}"

    @classmethod
    def from_key(cls, key: str) -> "ConditioningContext":
        word, sep, expected = key.partition(" | ")
        if not sep:
            raise ValueError(f"bad context key {key!r}")
        return cls(word, expected)

    @classmethod
    def of(cls, entry_cat: Category, first_expected: Category):
        return cls(render_category(entry_cat), render_category(first_expected))


@dataclass(frozen=True)
class TransitionRecord:
    rule: str
    word: str
    entry_index: int
    l1_len: int
    r1_len: int
    context: Optional[ConditioningContext] = None

    @property
    def outcome(self):
        return (self.rule, self.l1_len, self.r1_len)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "word": self.word,
            "entry": self.entry_index,
            "l1": self.l1_len,
            "r1": self.r1_len,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d) -> "TransitionRecord":
        if d["rule"] not in (APPLY, PREDICT):
            raise ValueError(f"unknown rule {d['rule']!r}")
        return cls(d["rule"], d["word"], int(d["entry"]), int(d["l1"]), int(d["r1"]))


@dataclass(frozen=True)
class ParserState:
    goal: str
    expected: tuple
    sem: Term
    history: tuple = field(default=(), compare=False)

    @property
    def accepting(self) -> bool:
        return not self.expected


def _names(base, n):
    if n == 1:
        return [base]
    return [f"{base}{i + 1}" for i in range(n)]


def application_term(f: Term, g: Term, first: Category, k: int) -> Term:
    """Unreduced semantics of State-Application exposing ``k`` new arguments."""
    vs = _names("v", k)
    value = app_n(g, [Var(v) for v in vs])
    if first.headed and first.right:
        # the slot takes its headed arguments before its right arguments
        hs = _names("a", len(first.headed))
        rs = _names("b", len(first.right))
        value = abs_n(hs + rs, app_n(value, [Var(x) for x in rs + hs]))
    return abs_n(vs, App(f, value))


def prediction_term(f: Term, g: Term, m: int, p: int, q: int) -> Term:
    """Unreduced semantics of State-Prediction with ``|R1|=m``, ``|L1|=p``, ``|R|=q``."""
    us = _names("u", m)
    ws = _names("w", p)
    ts = _names("t", q)
    inner = abs_n(ts, app_n(g, [Var(x) for x in us + ts + ws]))
    body = App(f, abs_n(ws, App(Var("h"), inner)))
    return abs_n(us + ["h"], body)


def state_apply(state: ParserState, entry: LexEntry, entry_index: int = 0,
                fuel: int = DEFAULT_FUEL):
    """The word fills the first expected argument, exposing any extra right
    arguments it needs as new expectations.  Returns ``None`` when
    inapplicable; there is never more than one instantiation."""
    if not state.expected:
        return None
    first = state.expected[0]
    w = entry.cat
    if w.head != first.head or w.left != first.left or not is_suffix(first.right, w.right):
        return None
    k = len(w.right) - len(first.right)
    sem = normalize(application_term(state.sem, entry.sem, first, k), fuel)
    record = TransitionRecord(
        APPLY, entry.form, entry_index, 0, k, ConditioningContext.of(w, first)
    )
    new = ParserState(
        state.goal, w.right[:k] + state.expected[1:], sem, state.history + (record,)
    )
    return new, record


def state_predict(state: ParserState, entry: LexEntry, entry_index: int = 0,
                  fuel: int = DEFAULT_FUEL):
    """The word becomes (part of) a left argument of a head not yet seen.

    One result per split ``(l1, r1)``: ``l1`` leading left arguments of the
    word are fillers already waiting on the expected argument's headed list;
    ``r1`` leading right arguments of the word become expectations of
    their own.  Results come in ascending ``(l1, r1)`` order.
    """
    if not state.expected:
        return []
    first = state.expected[0]
    rest = state.expected[1:]
    w = entry.cat
    lw, rw = w.left, w.right
    la, ha = first.left, first.headed
    context = ConditioningContext.of(w, first)
    out = []
    for p in range(min(len(lw), len(la), len(ha)) + 1):
        if lw[:p] != ha[:p] or la[:p] != ha[:p]:
            break
        for m in range(len(rw) + 1):
            z = Category(w.head, lw[p:], rw[m:])
            slot = Category(first.head, (z,) + la[p:], first.right, (z,) + ha[p:])
            assert is_prefix(slot.headed, slot.left)
            term = prediction_term(state.sem, entry.sem, m, p, len(rw) - m)
            sem = normalize(term, fuel)
            record = TransitionRecord(PREDICT, entry.form, entry_index, p, m, context)
            new = ParserState(
                state.goal, rw[:m] + (slot,) + rest, sem, state.history + (record,)
            )
            out.append((new, record))
    return out


def successors(state: ParserState, entries: Sequence[LexEntry],
               fuel: int = DEFAULT_FUEL):
    """All transitions on one word: per entry, application then predictions."""
    out = []
    for i, entry in enumerate(entries):
        applied = state_apply(state, entry, i, fuel)
        if applied is not None:
            out.append(applied)
        out.extend(state_predict(state, entry, i, fuel))
    return out


class InvariantViolation(AssertionError):
    pass


def check_state(state: ParserState, fuel: int = DEFAULT_FUEL, strict: bool = True):
    """Raise :class:`InvariantViolation` unless the state is well formed.

    Checks: every expected argument has a headed list that prefixes its
    left list and lexical contents; the semantics is beta-normal and
    closed; applying it to one fresh constant per expected argument
    normalises to a closed term that is not an abstraction.  With
    ``strict`` each of those constants must also survive into the result.
    """
    for cat in state.expected:
        if not cat.is_state_argument():
            raise InvariantViolation(f"malformed expected argument {cat}")
    if not is_normal(state.sem):
        raise InvariantViolation(f"semantics not beta-normal: {render_term(state.sem)}")
    if free_vars(state.sem):
        raise InvariantViolation(
            f"free variables {sorted(free_vars(state.sem))} in {render_term(state.sem)}"
        )
    taken = constants(state.sem)
    fresh = []
    i = 0
    while len(fresh) < len(state.expected):
        name = f"arg{i}'"
        i += 1
        if name not in taken:
            fresh.append(name)
    result = normalize(app_n(state.sem, [Const(c) for c in fresh]), fuel)
    if free_vars(result) or isinstance(result, Abs):
        raise InvariantViolation(f"arity mismatch: {render_term(result)}")
    if strict:
        missing = set(fresh) - constants(result)
        if missing:
            raise InvariantViolation(
                f"arguments {sorted(missing)} unused by {render_term(state.sem)}"
            )
