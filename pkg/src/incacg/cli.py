"""Command-line interface.

Exit codes: 0 success, 1 no reading (or a failed check), 2 input or
usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .category import render_category
from .engine import (
    STRATEGIES,
    DeadEnd,
    ParseError,
    ParseOptions,
    UnknownWord,
    feed,
    initial_state,
    parse,
    trace_records,
)
from .lexicon import LexiconError, load_lexicon_file, read_corpus, toy_lexicon
from .oracle import cky_parse
from .terms import DEFAULT_FUEL, alpha_key, render_term
from .transitions import successors
from .tuning import EmptyModel, TransitionModel, rank, train

LIVE_STATE_WARNING = 100_000

log = logging.getLogger("incacg")


class UsageError(Exception):
    pass


def _common_flags():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--lexicon", metavar="PATH", help="lexicon file (default: bundled toy English)")
    p.add_argument("--goal", default="s", metavar="ATOM")
    p.add_argument("--strategy", choices=STRATEGIES, default="exhaustive")
    p.add_argument("--beam", type=int, metavar="N")
    p.add_argument("--max-states", type=int, metavar="N")
    p.add_argument("--model", metavar="PATH", help="transition model JSON")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, metavar="N")
    p.add_argument("--dedupe", action="store_true", help="merge alpha-equal states")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    ap = argparse.ArgumentParser(prog="incacg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse a sentence")
    p.add_argument("sentence")

    p = sub.add_parser("steps", parents=[common], help="JSON-lines trace of every live state")
    p.add_argument("sentence")
    p.add_argument("--golden", metavar="PATH", help="compare against a stored trace")

    p = sub.add_parser("repl", parents=[common], help="feed words one at a time")
    p.add_argument("--top", type=int, default=5, metavar="N")

    p = sub.add_parser("oracle-check", parents=[common], help="compare with the chart oracle")
    p.add_argument("corpus")

    p = sub.add_parser("train", parents=[common], help="estimate transition statistics")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--k", type=float, default=1.0)

    p = sub.add_parser("rank", parents=[common], help="show scored successors per word")
    p.add_argument("sentence")
    p.add_argument("--top", type=int, default=10, metavar="N")
    return ap


def _options(args) -> ParseOptions:
    model = TransitionModel.load(args.model) if args.model else None
    try:
        return ParseOptions(
            goal=args.goal,
            strategy=args.strategy,
            beam=args.beam,
            max_states=args.max_states,
            model=model,
            dedupe=args.dedupe,
            fuel=args.fuel,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _lexicon(args):
    return load_lexicon_file(args.lexicon) if args.lexicon else toy_lexicon()


def _tokens(sentence):
    tokens = sentence.split()
    if not tokens:
        raise UsageError("empty sentence")
    return tokens


def _warn_growth(counts, out):
    if max(counts) > LIVE_STATE_WARNING:
        print(
            f"warning: live-state count reached {max(counts)}; consider --strategy beam",
            file=out,
        )


def _error(exc, out=None):
    out = out or sys.stderr
    if isinstance(exc, UnknownWord):
        print(f"error: unknown word at position {exc.position}: {exc.word!r}", file=out)
    elif isinstance(exc, DeadEnd):
        print(f"error: dead end at position {exc.position}", file=out)
    else:
        print(f"error: {exc}", file=out)
    return 2


def cmd_parse(args, out):
    lex, opts = _lexicon(args), _options(args)
    tokens = _tokens(args.sentence)
    try:
        result = parse(tokens, lex, opts)
    except ParseError as exc:
        return _error(exc)
    counts = result.live_counts[1:]
    _warn_growth(counts, sys.stderr)
    if args.json:
        print(json.dumps({
            "tokens": tokens,
            "readings": [
                {"sem": render_term(r.term), "paths": r.count} for r in result.readings
            ],
            "live_counts": counts,
            "accepted": result.accepted,
        }), file=out)
    else:
        for i, r in enumerate(result.readings, 1):
            print(f"reading {i}: {render_term(r.term)}  ({r.count} path{'s' * (r.count != 1)})", file=out)
        if not result.readings:
            print("no complete reading", file=out)
        print("live states: " + " ".join(f"{w}={n}" for w, n in zip(tokens, counts)), file=out)
    return 0 if result.accepted else 1


def cmd_steps(args, out):
    lex, opts = _lexicon(args), _options(args)
    tokens = _tokens(args.sentence)
    try:
        result = parse(tokens, lex, opts)
    except DeadEnd as exc:
        result = exc.result
        _error(exc)
    except ParseError as exc:
        return _error(exc)
    lines = [json.dumps(r) for r in trace_records(result)]
    for line in lines:
        print(line, file=out)
    _warn_growth(result.live_counts, sys.stderr)
    if args.golden:
        with open(args.golden, encoding="utf-8") as fh:
            expected = [json.loads(line) for line in fh if line.strip()]
        actual = [json.loads(line) for line in lines]
        if actual != expected:
            mismatch = next(
                (i for i, (a, b) in enumerate(zip(actual, expected)) if a != b),
                min(len(actual), len(expected)),
            )
            print(f"golden trace mismatch at record {mismatch + 1}", file=sys.stderr)
            return 1
        print("golden trace matches", file=sys.stderr)
    if result.failure_point is not None:
        return 2
    return 0 if result.accepted else 1


def _show_states(live, top, out):
    print(f"{len(live)} live state(s)", file=out)
    for state, score in live[:top]:
        expected = "[" + ", ".join(render_category(c) for c in state.expected) + "]"
        print(f"  {score:8.3f}  {expected}  {render_term(state.sem)}", file=out)
    if len(live) > top:
        print(f"  ... {len(live) - top} more", file=out)


def cmd_repl(args, out, inp=None):
    inp = inp or sys.stdin
    lex, opts = _lexicon(args), _options(args)
    history = [[(initial_state(opts.goal), 0.0)]]
    words = []
    interactive = inp.isatty() if hasattr(inp, "isatty") else False
    while True:
        if interactive:
            print("> ", end="", file=out, flush=True)
        line = inp.readline()
        if not line:
            return 0
        word = line.strip()
        if not word:
            continue
        if word == ":quit":
            return 0
        if word == ":reset":
            history, words = history[:1], []
            _show_states(history[-1], args.top, out)
            continue
        if word == ":undo":
            if len(history) > 1:
                history.pop()
                words.pop()
            _show_states(history[-1], args.top, out)
            continue
        if word.startswith(":"):
            print(f"unknown command {word}", file=out)
            continue
        try:
            live = feed(history[-1], word, lex, opts, len(words) + 1)
        except ParseError as exc:
            _error(exc, out)
            continue
        history.append(live)
        words.append(word)
        print(" ".join(words), file=out)
        _show_states(live, args.top, out)
        readings = {alpha_key(s.sem): s.sem for s, _ in live if s.accepting}
        for sem in readings.values():
            print(f"  complete: {render_term(sem)}", file=out)


def cmd_oracle_check(args, out):
    lex, opts = _lexicon(args), _options(args)
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = read_corpus(fh.read())
    mismatches = 0
    for tokens in corpus:
        report = oracle_report(tokens, lex, opts)
        mismatches += not report["equal"]
        print(json.dumps(report), file=out)
    if not args.json:
        print(f"{len(corpus) - mismatches}/{len(corpus)} sentences agree", file=sys.stderr)
    return 1 if mismatches else 0


def oracle_report(tokens, lex, opts: ParseOptions) -> dict:
    try:
        result = parse(tokens, lex, opts, raise_on_dead_end=False)
        engine = {alpha_key(r.term): r for r in result.readings}
    except UnknownWord:
        engine = {}
    oracle = {alpha_key(r.term): r for r in cky_parse(tokens, lex, opts.goal, fuel=opts.fuel)}
    engine_sorted = sorted(engine.items(), key=lambda kv: render_term(kv[1].term))
    oracle_sorted = sorted(oracle.items(), key=lambda kv: render_term(kv[1].term))
    return {
        "tokens": tokens,
        "oracle_readings": [render_term(r.term) for _, r in oracle_sorted],
        "engine_readings": [render_term(r.term) for _, r in engine_sorted],
        "equal": set(engine) == set(oracle),
        "oracle_derivations": [r.derivations for _, r in oracle_sorted],
        "engine_paths": [r.count for _, r in engine_sorted],
    }


def cmd_train(args, out):
    lex = _lexicon(args)
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = read_corpus(fh.read())
    warnings = []
    try:
        model = train(corpus, lex, args.goal, args.k, warnings)
    except EmptyModel as exc:
        return _error(exc)
    model.save(args.out)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(
        f"trained on {len(corpus) - len(warnings)} sentence(s): "
        f"{len(model.contexts)} contexts, {len(model.backoff)} outcomes -> {args.out}",
        file=out,
    )
    return 0


def cmd_rank(args, out):
    lex, opts = _lexicon(args), _options(args)
    tokens = _tokens(args.sentence)
    live = [(initial_state(opts.goal), 0.0)]
    for k, word in enumerate(tokens, 1):
        entries = lex.get(word)
        if not entries:
            return _error(UnknownWord(word, k))
        candidates = []
        for state, score in live:
            candidates.extend(rank(opts.model, successors(state, entries, opts.fuel), score))
        candidates.sort(key=lambda c: -c[2])
        if not args.json:
            print(f"word {k} {word!r}: {len(candidates)} candidate(s)", file=out)
        for i, (state, record, score) in enumerate(candidates[: args.top], 1):
            expected = [render_category(c) for c in state.expected]
            if args.json:
                print(json.dumps({
                    "step": k, "word": word, "rank": i, "rule": record.rule,
                    "l1": record.l1_len, "r1": record.r1_len, "score": score,
                    "expected": expected, "sem": render_term(state.sem),
                }), file=out)
            else:
                print(
                    f"  {i:3d} {score:9.4f}  {record.rule} l1={record.l1_len} r1={record.r1_len}"
                    f"  [{', '.join(expected)}]  {render_term(state.sem)}",
                    file=out,
                )
        try:
            live = feed(live, word, lex, opts, k)
        except ParseError as exc:
            return _error(exc)
    return 0


COMMANDS = {
    "parse": cmd_parse,
    "steps": cmd_steps,
    "repl": cmd_repl,
    "oracle-check": cmd_oracle_check,
    "train": cmd_train,
    "rank": cmd_rank,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"incacg: error: {exc}", file=sys.stderr)
        return 2
    except (LexiconError, OSError, ValueError) as exc:
        return _error(exc)


if __name__ == "__main__":
    sys.exit(main())
