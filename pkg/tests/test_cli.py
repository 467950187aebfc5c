import io
import json
from pathlib import Path

import pytest

from incacg.cli import main
from incacg.lexicon import toy_corpus
from incacg.terms import alpha_eq, parse_term

GOLDEN = Path(__file__).parent / "golden"
T = parse_term


def run(*argv, stdin=None):
    out = io.StringIO()
    if stdin is None:
        code = main(list(argv), out)
    else:
        from incacg.cli import build_parser, cmd_repl

        code = cmd_repl(build_parser().parse_args(["repl", *argv]), out, io.StringIO(stdin))
    return code, out.getvalue()


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "corpus.txt"
    path.write_text("\n".join(" ".join(s) for s in toy_corpus()) + "\n")
    return path


@pytest.fixture(scope="module")
def model_file(corpus_file, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    code, _ = run("train", str(corpus_file), "--out", str(path))
    assert code == 0
    return path


class TestParse:
    def test_reading(self):
        code, out = run("parse", "john likes sue")
        assert code == 0
        assert "likes'(john',sue')" in out
        assert "john=1 likes=5 sue=8" in out

    def test_prefix(self):
        code, out = run("parse", "john likes")
        assert code == 1 and "no complete reading" in out

    def test_unknown_word(self, capsys):
        code, _ = run("parse", "john xyzzy")
        assert code == 2
        assert "unknown word at position 2" in capsys.readouterr().err

    def test_empty_sentence(self):
        assert run("parse", "   ")[0] == 2

    def test_beam_without_strategy(self):
        assert run("parse", "john likes sue", "--beam", "3")[0] == 2

    def test_bad_strategy(self):
        with pytest.raises(SystemExit) as info:
            run("parse", "john", "--strategy", "greedy")
        assert info.value.code == 2

    def test_missing_lexicon(self):
        assert run("parse", "john", "--lexicon", "/nonexistent.lex")[0] == 2

    def test_custom_lexicon_and_goal(self, tmp_path):
        lex = tmp_path / "tiny.lex"
        lex.write_text("big : n/n = \\m. big'(m)\ndog : n = dog'\n")
        code, out = run("parse", "big dog", "--lexicon", str(lex), "--goal", "n", "--json")
        assert code == 0
        assert json.loads(out)["readings"] == [{"sem": "big'(dog')", "paths": 1}]

    def test_json_matches_pretty(self):
        sentence = "john thinks mary likes sue quickly"
        _, pretty = run("parse", sentence)
        code, raw = run("parse", sentence, "--json")
        data = json.loads(raw)
        assert code == 0 and data["accepted"]
        for r in data["readings"]:
            assert f"{r['sem']}  ({r['paths']} path)" in pretty
        counts = " ".join(f"{w}={n}" for w, n in zip(data["tokens"], data["live_counts"]))
        assert counts in pretty

    def test_beam_with_model(self, model_file):
        code, raw = run("parse", "john likes sue", "--strategy", "beam", "--beam", "1",
                        "--model", str(model_file), "--json")
        assert code == 0 and json.loads(raw)["live_counts"] == [1, 1, 1]

    def test_serial(self):
        code, out = run("parse", "mary gives the boy a car", "--strategy", "serial")
        assert code == 0 and "gives'(mary',the'(boy'),a'(car'))" in out


class TestSteps:
    def test_golden_john_likes_sue(self, capsys):
        code, out = run("steps", "john likes sue", "--golden", str(GOLDEN / "john-likes-sue.jsonl"))
        assert code == 0 and "matches" in capsys.readouterr().err
        records = [json.loads(line) for line in out.splitlines()]
        assert [r["step"] for r in records] == [1] + [2] * 5 + [3] * 8

    def test_golden_content_john_likes_sue(self):
        records = [json.loads(l) for l in (GOLDEN / "john-likes-sue.jsonl").read_text().splitlines()]
        step2 = [r for r in records if r["step"] == 2]
        assert any(
            r["expected"] == ["np", "s{l:[s{l:[np]},np],h:[s{l:[np]},np]}"]
            and alpha_eq(T(r["sem"]), T(r"\Y.\K. (K(\X. likes'(X,Y)))(john')"))
            for r in step2
        )
        final = [r for r in records if r["step"] == 3 and r["expected"] == []]
        assert len(final) == 1 and alpha_eq(T(final[0]["sem"]), T("likes'(john',sue')"))

    def test_golden_mary_thinks_john(self):
        code, _ = run("steps", "mary thinks john", "--golden", str(GOLDEN / "mary-thinks-john.jsonl"))
        assert code == 1  # prefix only: matches the golden trace, but no reading
        records = [json.loads(l) for l in (GOLDEN / "mary-thinks-john.jsonl").read_text().splitlines()]
        last = [T(r["sem"]) for r in records if r["step"] == 3]
        for want in (
            r"\P. thinks'(mary',P(john'))",
            r"\P.\Q. Q(thinks'(mary',P(john')))",
            r"\P.\R. (R(\x. thinks'(x,P(john'))))(mary')",
        ):
            assert any(alpha_eq(t, T(want)) for t in last)

    def test_golden_mismatch(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        lines = (GOLDEN / "john-likes-sue.jsonl").read_text().splitlines()
        bad.write_text("\n".join(lines[:-1]) + "\n")
        code, _ = run("steps", "john likes sue", "--golden", str(bad))
        assert code == 1 and "record 14" in capsys.readouterr().err

    def test_empty(self):
        assert run("steps", "")[0] == 2

    def test_dead_end_trace(self, model_file):
        code, out = run("steps", "john likes sue sue", "--strategy", "beam", "--beam", "1",
                        "--model", str(model_file))
        assert code == 2 and len(out.splitlines()) == 3


class TestRepl:
    def test_words_and_undo(self):
        code, out = run(stdin="john\nlikes\n:undo\nlikes\nsue\n:quit\n")
        assert code == 0
        blocks = out.split("live state(s)")
        assert "1 live state(s)" in out and "5 live state(s)" in out
        assert r"\h. h(john')" in out
        assert out.count("john likes\n") == 2
        assert "complete: likes'(john',sue')" in blocks[-1]

    def test_unknown_word_keeps_state(self):
        code, out = run(stdin="john\nxyzzy\nlikes\n")
        assert code == 0
        assert "unknown word at position 2" in out
        assert "john likes\n5 live state(s)" in out

    def test_reset_and_unknown_command(self):
        code, out = run(stdin="john\n:reset\n:bogus\n")
        assert code == 0 and "unknown command :bogus" in out
        assert "1 live state(s)\n" in out and r"\Q. Q" in out

    def test_top(self):
        _, out = run("--top", "2", stdin="john\nlikes\n")
        assert "... 3 more" in out


class TestOracleTrainRank:
    def test_oracle_check(self, corpus_file):
        code, out = run("oracle-check", str(corpus_file))
        assert code == 0
        reports = [json.loads(line) for line in out.splitlines()]
        assert len(reports) == 20
        assert all(r["equal"] for r in reports)
        assert set(reports[0]) == {
            "tokens", "oracle_readings", "engine_readings", "equal",
            "oracle_derivations", "engine_paths",
        }

    def test_oracle_check_mismatch(self, tmp_path):
        lex = tmp_path / "glue.lex"
        lex.write_text(
            "very : (n/n)/(n/n) = \\f.\\m. very'(f,m)\ncar : n = car'\nbike : n = bike'\n"
            "glue : (n\\n)/n = \\r.\\l. glue'(l,r)\n"
        )
        corpus = tmp_path / "c.txt"
        corpus.write_text("very car glue bike\n")
        code, out = run("oracle-check", str(corpus), "--lexicon", str(lex), "--goal", "n")
        assert code == 1 and not json.loads(out)["equal"]

    def test_train_rank(self, model_file):
        data = json.loads(model_file.read_text())
        assert data["k"] == 1.0
        code, out = run("rank", "john likes sue", "--model", str(model_file), "--json")
        assert code == 0
        rows = [json.loads(line) for line in out.splitlines()]
        top = next(r for r in rows if r["step"] == 2 and r["rank"] == 1)
        assert (top["rule"], top["l1"], top["r1"]) == ("apply", 0, 1)

    def test_rank_pretty(self, model_file):
        code, out = run("rank", "john likes", "--model", str(model_file), "--top", "2")
        assert code == 0 and "word 2 'likes': 5 candidate(s)" in out

    def test_rank_unknown(self):
        assert run("rank", "john xyzzy")[0] == 2

    def test_train_empty(self, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("")
        assert run("train", str(empty), "--out", str(tmp_path / "m.json"))[0] == 2

    def test_train_skips(self, tmp_path, capsys):
        corpus = tmp_path / "c.txt"
        corpus.write_text("john likes sue\njohn likes\n")
        code, out = run("train", str(corpus), "--out", str(tmp_path / "m.json"))
        assert code == 0 and "trained on 1 sentence(s)" in out
        assert "skipping" in capsys.readouterr().err
