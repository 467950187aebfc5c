"""Transition statistics for ranking parser choices.

Counts come from running the exhaustive parser over a corpus: every
transition on an accepting path adds ``1 / (number of accepting paths)``
to its (context, outcome) cell.  A context is the word's category and the
first expected argument; the rest of the expected list is ignored.

Scores are add-k smoothed towards the outcome marginal::

    P(o | c) = (count(c, o) + k * b(o)) / (total(c) + k)
    b(o)     = (backoff(o) + k) / (sum(backoff) + k * |V|)

where ``V`` is the set of outcomes observed in training.  Outcomes never
observed get the floor ``k / (sum(backoff) + k * |V|)`` in place of b(o).
"""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List

from .engine import EXHAUSTIVE, ParseError, ParseOptions, parse
from .lexicon import Lexicon
from .transitions import APPLY, PREDICT, ConditioningContext, TransitionRecord

__all__ = [
    "TransitionOutcome",
    "TransitionModel",
    "EmptyModel",
    "train",
    "score",
    "rank",
]

logger = logging.getLogger(__name__)


class EmptyModel(ValueError):
    pass


@dataclass(frozen=True)
class TransitionOutcome:
    rule: str
    l1_len: int
    r1_len: int

    @property
    def key(self) -> str:
        return f"{self.rule}:{self.l1_len}:{self.r1_len}"

    @classmethod
    def from_key(cls, key: str) -> "TransitionOutcome":
        rule, l1, r1 = key.split(":")
        if rule not in (APPLY, PREDICT):
            raise ValueError(f"unknown rule in outcome key {key!r}")
        return cls(rule, int(l1), int(r1))

    @classmethod
    def of(cls, record: TransitionRecord) -> "TransitionOutcome":
        return cls(record.rule, record.l1_len, record.r1_len)


def _key(x):
    return x if isinstance(x, str) else x.key


@dataclass
class TransitionModel:
    k: float = 1.0
    contexts: Dict[str, Dict[str, float]] = field(default_factory=dict)
    backoff: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("smoothing constant k must be positive")
        self._refresh()

    def _refresh(self):
        self._totals = {c: sum(row.values()) for c, row in self.contexts.items()}
        self._backoff_den = sum(self.backoff.values()) + self.k * len(self.backoff)

    def add(self, context, outcome, weight: float):
        row = self.contexts.setdefault(_key(context), {})
        o = _key(outcome)
        row[o] = row.get(o, 0.0) + weight
        self.backoff[o] = self.backoff.get(o, 0.0) + weight
        self._refresh()

    @property
    def outcomes(self) -> List[str]:
        return sorted(self.backoff)

    def backoff_prob(self, outcome) -> float:
        if self._backoff_den <= 0:
            raise EmptyModel("model has no counts")
        return (self.backoff.get(_key(outcome), 0.0) + self.k) / self._backoff_den

    def prob(self, context, outcome) -> float:
        c, o = _key(context), _key(outcome)
        count = self.contexts.get(c, {}).get(o, 0.0)
        total = self._totals.get(c, 0.0)
        return (count + self.k * self.backoff_prob(o)) / (total + self.k)

    def score(self, context, outcome) -> float:
        return math.log(self.prob(context, outcome))

    def transition_score(self, record: TransitionRecord) -> float:
        return self.score(record.context, TransitionOutcome.of(record))

    def distribution(self, context) -> Dict[str, float]:
        return {o: self.prob(context, o) for o in self.outcomes}

    def scaled(self, factor: float) -> "TransitionModel":
        return TransitionModel(
            self.k,
            {c: {o: v * factor for o, v in row.items()} for c, row in self.contexts.items()},
            {o: v * factor for o, v in self.backoff.items()},
        )

    def to_dict(self) -> dict:
        return {"k": self.k, "contexts": self.contexts, "backoff": self.backoff}

    @classmethod
    def from_dict(cls, d) -> "TransitionModel":
        contexts = {}
        for c, row in d["contexts"].items():
            ConditioningContext.from_key(c)
            for o in row:
                TransitionOutcome.from_key(o)
            contexts[c] = {o: float(v) for o, v in row.items()}
        backoff = {o: float(v) for o, v in d["backoff"].items()}
        return cls(float(d["k"]), contexts, backoff)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "TransitionModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train(corpus: Iterable, lexicon: Lexicon, goal: str = "s", k: float = 1.0,
          warnings: list = None) -> TransitionModel:
    """Count transitions on accepting paths of exhaustive parses."""
    contexts = defaultdict(lambda: defaultdict(float))
    backoff = defaultdict(float)
    opts = ParseOptions(goal=goal, strategy=EXHAUSTIVE)
    parsed = 0
    for tokens in corpus:
        tokens = list(tokens)
        reason = None
        try:
            result = parse(tokens, lexicon, opts, raise_on_dead_end=False) if tokens else None
        except ParseError as exc:
            result, reason = None, str(exc)
        if result is None or not result.accepted:
            msg = f"skipping unparseable sentence {' '.join(tokens)!r}"
            if reason:
                msg += f" ({reason})"
            logger.warning(msg)
            if warnings is not None:
                warnings.append(msg)
            continue
        parsed += 1
        paths = [p for r in result.readings for p in r.paths]
        weight = 1.0 / len(paths)
        for path in paths:
            for record in path:
                o = TransitionOutcome.of(record).key
                contexts[record.context.key][o] += weight
                backoff[o] += weight
    if not parsed:
        raise EmptyModel("no sentence in the corpus could be parsed")
    return TransitionModel(
        k,
        {c: dict(row) for c, row in contexts.items()},
        dict(backoff),
    )


def score(model: TransitionModel, context, outcome) -> float:
    return model.score(context, outcome)


def rank(model, successors, base_score: float = 0.0):
    """Order ``(state, record)`` successors by descending cumulative score.

    Returns ``(state, record, score)`` triples; ties keep the input order.
    """
    scored = []
    for state, record in successors:
        s = base_score if model is None else base_score + model.transition_score(record)
        scored.append((state, record, s))
    return sorted(scored, key=lambda x: -x[2])
