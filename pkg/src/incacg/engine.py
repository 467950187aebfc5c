"""Word-by-word parsing over sets of parser states."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .category import Category, render_category
from .lexicon import Lexicon, LexiconError
from .terms import DEFAULT_FUEL, Abs, Term, Var, alpha_key, free_vars, render_term
from .transitions import ParserState, successors

__all__ = [
    "EXHAUSTIVE",
    "BEAM",
    "SERIAL",
    "ParseOptions",
    "ParseResult",
    "Reading",
    "ParseError",
    "UnknownWord",
    "DeadEnd",
    "initial_state",
    "feed",
    "parse",
    "partial_semantics",
    "trace_records",
    "replay",
]

EXHAUSTIVE = "exhaustive"
BEAM = "beam"
SERIAL = "serial"
STRATEGIES = (EXHAUSTIVE, BEAM, SERIAL)


@dataclass(frozen=True)
class ParseOptions:
    goal: str = "s"
    strategy: str = EXHAUSTIVE
    beam: Optional[int] = None
    max_states: Optional[int] = None
    model: object = None
    dedupe: bool = False
    fuel: int = DEFAULT_FUEL
    all_readings: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == BEAM:
            if self.beam is None or self.beam < 1:
                raise ValueError("beam strategy needs a width >= 1")
        elif self.beam is not None:
            raise ValueError("beam width given without the beam strategy")
        if self.max_states is not None and self.max_states < 1:
            raise ValueError("max_states must be >= 1")
        if self.fuel < 1:
            raise ValueError("fuel must be >= 1")


class ParseError(Exception):
    pass


class UnknownWord(ParseError):
    def __init__(self, word, position):
        super().__init__(f"unknown word {word!r} at position {position}")
        self.word = word
        self.position = position


class DeadEnd(ParseError):
    def __init__(self, position, result=None):
        super().__init__(f"no transitions possible at position {position}")
        self.position = position
        self.result = result


@dataclass
class Reading:
    term: Term
    paths: list = field(default_factory=list)
    scores: list = field(default_factory=list)

    @property
    def count(self):
        return len(self.paths)


@dataclass
class ParseResult:
    tokens: list
    snapshots: list
    readings: list
    failure_point: Optional[int] = None
    expanded: int = 0

    @property
    def accepted(self) -> bool:
        return bool(self.readings)

    @property
    def path_count(self) -> int:
        return sum(r.count for r in self.readings)

    @property
    def live_counts(self) -> List[int]:
        return [len(s) for s in self.snapshots]

    def states(self, k: int) -> List[ParserState]:
        return [s for s, _ in self.snapshots[k]]


def initial_state(goal: str = "s") -> ParserState:
    return ParserState(goal, (Category(goal),), Abs("Q", Var("Q")), ())


def partial_semantics(state: ParserState) -> Term:
    return state.sem


def _entries(lexicon: Lexicon, word: str, position: int):
    entries = lexicon.get(word)
    if not entries:
        raise UnknownWord(word, position)
    for e in entries:
        if free_vars(e.sem):
            raise LexiconError(f"entry {e} has free variables")
    return entries


def _transition_score(model, record) -> float:
    if model is None:
        return 0.0
    return model.transition_score(record)


def _select(scored, opts: ParseOptions):
    # stable sort keeps the generation order among equal scores
    if opts.model is not None:
        scored = sorted(scored, key=lambda p: -p[1])
    if opts.dedupe:
        seen = set()
        kept = []
        for state, score in scored:
            key = (state.expected, alpha_key(state.sem))
            if key not in seen:
                seen.add(key)
                kept.append((state, score))
        scored = kept
    limit = opts.beam if opts.strategy == BEAM else None
    if opts.max_states is not None:
        limit = opts.max_states if limit is None else min(limit, opts.max_states)
    if limit is not None:
        scored = scored[:limit]
    return scored


def feed(states, word: str, lexicon: Lexicon, opts: ParseOptions = ParseOptions(),
         position: int = 1):
    """Advance every live ``(state, score)`` pair by one word.

    Successors are generated in source-state order, then ranked by
    cumulative score and truncated per ``opts``.  ``position`` is the
    1-based index of ``word`` and is only used in error reports.
    """
    entries = _entries(lexicon, word, position)
    scored = []
    for state, score in states:
        for new, record in successors(state, entries, opts.fuel):
            scored.append((new, score + _transition_score(opts.model, record)))
    if not scored:
        raise DeadEnd(position)
    return _select(scored, opts)


def _collect_readings(final) -> List[Reading]:
    readings = {}
    for state, score in final:
        if not state.accepting:
            continue
        key = alpha_key(state.sem)
        r = readings.get(key)
        if r is None:
            r = readings[key] = Reading(state.sem)
        r.paths.append(state.history)
        r.scores.append(score)
    return list(readings.values())


def parse(tokens: Sequence[str], lexicon: Lexicon, opts: ParseOptions = ParseOptions(),
          raise_on_dead_end: bool = True) -> ParseResult:
    tokens = list(tokens)
    if not tokens:
        raise ValueError("nothing to parse")
    if opts.strategy == SERIAL:
        return _parse_serial(tokens, lexicon, opts, raise_on_dead_end)
    live = [(initial_state(opts.goal), 0.0)]
    result = ParseResult(tokens, [live], [])
    for i, word in enumerate(tokens):
        try:
            live = feed(live, word, lexicon, opts, i + 1)
        except DeadEnd as exc:
            result.failure_point = exc.position
            if raise_on_dead_end:
                exc.result = result
                raise
            return result
        result.expanded += len(live)
        result.snapshots.append(live)
    result.readings = _collect_readings(live)
    return result


def _parse_serial(tokens, lexicon, opts, raise_on_dead_end):
    """Depth-first over score-ordered successors, backtracking on dead ends."""
    entries = [_entries(lexicon, w, i + 1) for i, w in enumerate(tokens)]
    n = len(tokens)
    start = (initial_state(opts.goal), 0.0)
    found = []
    path = [start]
    first_path = []
    budget = [opts.max_states]
    deepest = [0]
    expanded = [0]

    def visit(node, k):
        deepest[0] = max(deepest[0], k)
        if k == n:
            if not node[0].accepting:
                return False
            found.append(node)
            if not first_path:
                first_path.extend(path)
            return True
        scored = [
            (new, node[1] + _transition_score(opts.model, rec))
            for new, rec in successors(node[0], entries[k], opts.fuel)
        ]
        scored.sort(key=lambda p: -p[1])
        for child in scored:
            if budget[0] is not None:
                if budget[0] <= 0:
                    return False
                budget[0] -= 1
            expanded[0] += 1
            path.append(child)
            hit = visit(child, k + 1)
            path.pop()
            if hit and not opts.all_readings:
                return True
        return False

    visit(start, 0)
    if found:
        snapshots = [[p] for p in first_path]
        return ParseResult(tokens, snapshots, _collect_readings(found), None, expanded[0])
    failure = deepest[0] + 1 if deepest[0] < n else None
    result = ParseResult(tokens, [[start]], [], failure, expanded[0])
    if failure is not None and raise_on_dead_end:
        raise DeadEnd(failure, result)
    return result


def replay(tokens, lexicon: Lexicon, history, goal: str = "s", fuel: int = DEFAULT_FUEL):
    """Re-run a recorded transition path; returns the visited states."""
    state = initial_state(goal)
    visited = [state]
    for i, (word, rec) in enumerate(zip(tokens, history)):
        entries = _entries(lexicon, word, i + 1)
        for new, r in successors(state, entries, fuel):
            if (r.rule, r.entry_index, r.l1_len, r.r1_len) == (
                rec.rule, rec.entry_index, rec.l1_len, rec.r1_len
            ):
                state = new
                break
        else:
            raise ValueError(f"transition {rec} not available at word {i + 1}")
        visited.append(state)
    return visited


def trace_records(result: ParseResult):
    """One JSON-ready record per (word, surviving state)."""
    for k in range(1, len(result.snapshots)):
        for state, score in result.snapshots[k]:
            rec = state.history[-1]
            yield {
                "step": k,
                "word": result.tokens[k - 1],
                "rule": rec.rule,
                "entry": rec.entry_index,
                "l1": rec.l1_len,
                "r1": rec.r1_len,
                "expected": [render_category(c) for c in state.expected],
                "sem": render_term(state.sem),
                "score": score,
            }


def trace_jsonl(result: ParseResult) -> str:
    return "".join(json.dumps(r) + "\n" for r in trace_records(result))
