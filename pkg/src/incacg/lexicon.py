"""Lexicon files.

One entry per line::

    likes : (np\\s)/np = \\y.\\x. likes'(x,y)

``#`` starts a comment; blank lines are ignored.  Categories are written
in curried slash notation and flattened on load.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Tuple

from .category import (
    Category,
    CategorySyntaxError,
    flatten,
    parse_slash,
    render_category,
    render_slash,
    to_curried,
)
from .terms import Abs, TermSyntaxError, alpha_key, constants, free_vars, parse_term, render_term
from .transitions import LexEntry

__all__ = [
    "Lexicon",
    "LexiconError",
    "ValidationReport",
    "load_lexicon",
    "load_lexicon_file",
    "toy_lexicon",
    "toy_corpus",
    "dump_lexicon",
    "validate_lexicon",
    "leading_abstractions",
]

logger = logging.getLogger(__name__)


class LexiconError(ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class Lexicon:
    """Ordered multimap from word form to lexical entries (file order)."""

    def __init__(self, entries=()):
        self._entries: Dict[str, List[LexEntry]] = {}
        self.warnings: List[str] = []
        for e in entries:
            self.add(e)

    def add(self, entry: LexEntry):
        bucket = self._entries.setdefault(entry.form, [])
        key = (entry.cat, alpha_key(entry.sem))
        if any((e.cat, alpha_key(e.sem)) == key for e in bucket):
            raise LexiconError(f"duplicate entry for {entry.form!r}")
        bucket.append(entry)

    def __contains__(self, form):
        return form in self._entries

    def __getitem__(self, form) -> Tuple[LexEntry, ...]:
        return tuple(self._entries[form])

    def get(self, form, default=()):
        return tuple(self._entries.get(form, default))

    def __iter__(self):
        for bucket in self._entries.values():
            yield from bucket

    def __len__(self):
        return sum(len(b) for b in self._entries.values())

    @property
    def words(self):
        return list(self._entries)

    @property
    def constants(self) -> frozenset:
        out = set()
        for e in self:
            out |= constants(e.sem)
        return frozenset(out)


def leading_abstractions(t) -> int:
    n = 0
    while isinstance(t, Abs):
        n += 1
        t = t.body
    return n


def _arity_warning(entry: LexEntry):
    need = len(entry.cat.left) + len(entry.cat.right)
    have = leading_abstractions(entry.sem)
    if have < need:
        return (
            f"{entry.form}: semantics has {have} leading abstraction(s), "
            f"category {render_category(entry.cat)} takes {need} argument(s)"
        )
    return None


def load_lexicon(text: str) -> Lexicon:
    lex = Lexicon()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        form, sep, rest = line.partition(":")
        form = form.strip()
        if not sep or not form or any(ch.isspace() for ch in form):
            raise LexiconError("expected 'word : CATEGORY = LAMBDA'", lineno)
        cat_text, sep, sem_text = rest.partition("=")
        if not sep:
            raise LexiconError("missing '=' before semantics", lineno)
        try:
            cat = flatten(parse_slash(cat_text.strip()))
        except CategorySyntaxError as exc:
            raise LexiconError(f"bad category: {exc}", lineno) from None
        try:
            sem = parse_term(sem_text.strip())
        except TermSyntaxError as exc:
            raise LexiconError(f"bad semantics: {exc}", lineno) from None
        entry = LexEntry(form, cat, sem)
        try:
            lex.add(entry)
        except LexiconError as exc:
            raise LexiconError(str(exc), lineno) from None
        warning = _arity_warning(entry)
        if warning:
            logger.warning("line %d: %s", lineno, warning)
            lex.warnings.append(f"line {lineno}: {warning}")
    return lex


def load_lexicon_file(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh.read())


def toy_lexicon() -> Lexicon:
    text = resources.files("incacg").joinpath("data/toy-english.lex").read_text("utf-8")
    return load_lexicon(text)


def toy_corpus() -> List[List[str]]:
    text = resources.files("incacg").joinpath("data/toy-corpus.txt").read_text("utf-8")
    return read_corpus(text)


def read_corpus(text: str) -> List[List[str]]:
    return [line.split() for line in text.splitlines() if line.strip()]


def dump_lexicon(lex: Lexicon) -> str:
    lines = []
    for e in lex:
        lines.append(f"{e.form} : {render_slash(to_curried(e.cat))} = {render_term(e.sem)}")
    return "\n".join(lines) + "\n"


@dataclass
class ValidationReport:
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    head_atoms: Counter = field(default_factory=Counter)
    argument_atoms: Counter = field(default_factory=Counter)

    @property
    def clean(self) -> bool:
        return not self.warnings and not self.errors

    @property
    def unproducible_atoms(self):
        """Atoms required as argument heads that no entry is headed by."""
        return sorted(set(self.argument_atoms) - set(self.head_atoms))


def _count_argument_atoms(cat: Category, counter):
    for arg in cat.left + cat.right:
        counter[arg.head] += 1
        _count_argument_atoms(arg, counter)


def validate_lexicon(lex: Lexicon) -> ValidationReport:
    report = ValidationReport()
    for e in lex:
        warning = _arity_warning(e)
        if warning:
            report.warnings.append(warning)
        loose = free_vars(e.sem)
        if loose:
            report.errors.append(
                f"{e.form}: free variable(s) {', '.join(sorted(loose))} in {render_term(e.sem)}"
            )
        report.head_atoms[e.cat.head] += 1
        _count_argument_atoms(e.cat, report.argument_atoms)
    return report
