import json
import math

import pytest
from hypothesis import given, strategies as st

from incacg.engine import initial_state, parse
from incacg.transitions import ConditioningContext, successors
from incacg.tuning import (
    EmptyModel,
    TransitionModel,
    TransitionOutcome,
    rank,
    score,
    train,
)

LIKES_CTX = "s{l:[np],r:[np]} | s{l:[np],h:[np]}"
APPLY_01 = "apply:0:1"
PREDICTIONS = ["predict:0:0", "predict:0:1", "predict:1:0", "predict:1:1"]


@pytest.fixture(scope="module")
def one(lex):
    return train([["john", "likes", "sue"]], lex)


@pytest.fixture(scope="module")
def model(lex, corpus):
    return train(corpus, lex)


class TestTrain:
    def test_single_sentence_counts(self, one):
        row = one.contexts[LIKES_CTX]
        assert row == {APPLY_01: 1.0}
        assert all(row.get(o, 0.0) == 0.0 for o in PREDICTIONS)

    def test_all_counts(self, one):
        assert one.contexts == {
            "np | s": {"predict:0:0": 1.0},
            LIKES_CTX: {APPLY_01: 1.0},
            "np | np": {"apply:0:0": 1.0},
        }

    def test_mass_equals_tokens(self, lex, corpus):
        for tokens in corpus:
            m = train([tokens], lex)
            assert math.isclose(sum(m.backoff.values()), len(tokens), rel_tol=1e-12)
            assert math.isclose(
                sum(sum(r.values()) for r in m.contexts.values()), len(tokens), rel_tol=1e-12
            )

    def test_fractional_counts(self, lex):
        m = train([["john", "thinks", "mary", "likes", "sue", "quickly"]], lex)
        assert any(0 < v < 1 for row in m.contexts.values() for v in row.values())

    def test_empty_corpus(self, lex):
        with pytest.raises(EmptyModel):
            train([], lex)

    def test_nothing_parses(self, lex):
        with pytest.raises(EmptyModel):
            train([["john", "likes"]], lex)

    def test_skip_unparseable(self, lex, one):
        warnings = []
        m = train([["likes", "xyzzy"], ["john", "likes", "sue"]], lex, warnings=warnings)
        assert len(warnings) == 1 and "xyzzy" in warnings[0]
        assert m.to_dict() == one.to_dict()

    def test_context_drops_rest_of_expected(self, model):
        for key in model.contexts:
            ctx = ConditioningContext.from_key(key)
            assert ctx.key == key and " | " not in ctx.expected


class TestScore:
    def test_normalised(self, model):
        for ctx in list(model.contexts) + ["unseen | context"]:
            assert math.isclose(sum(model.distribution(ctx).values()), 1.0, abs_tol=1e-9)

    def test_formula(self, one):
        # b(apply:0:1) = (1 + 1) / (3 + 3); P = (1 + b) / (1 + 1)
        b = 2 / 6
        assert math.isclose(one.prob(LIKES_CTX, APPLY_01), (1 + b) / 2)
        assert math.isclose(score(one, LIKES_CTX, APPLY_01), math.log((1 + b) / 2))

    def test_unseen_context_is_backoff(self, one):
        for o in one.outcomes:
            assert math.isclose(one.prob("x | y", o), one.backoff_prob(o))

    def test_unseen_outcome_floor(self, one):
        assert math.isclose(one.backoff_prob("predict:3:3"), 1 / 6)

    def test_certainty_limit(self, lex):
        m = train([["john", "likes", "sue"]], lex, k=1e-9)
        assert m.score(LIKES_CTX, APPLY_01) == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("k", [1e-6, 0.01, 0.5, 1.0])
    def test_application_beats_predictions(self, lex, k):
        m = train([["john", "likes", "sue"]], lex, k=k)
        a = m.score(LIKES_CTX, APPLY_01)
        assert all(a > m.score(LIKES_CTX, p) for p in PREDICTIONS)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            TransitionModel(k=0)

    def test_empty_model_scores(self):
        with pytest.raises(EmptyModel):
            TransitionModel().prob("a | b", "apply:0:0")

    @given(st.floats(0.01, 100))
    def test_scaling_counts_with_k_is_exact(self, factor):
        m = TransitionModel(1.0, {"a | b": {"apply:0:0": 2.0, "predict:0:1": 1.0}},
                            {"apply:0:0": 2.0, "predict:0:1": 1.0, "predict:0:0": 0.5})
        scaled = m.scaled(factor)
        scaled = TransitionModel(factor, scaled.contexts, scaled.backoff)
        for o in m.outcomes:
            assert math.isclose(m.prob("a | b", o), scaled.prob("a | b", o), rel_tol=1e-9)


class TestSerialisation:
    def test_round_trip(self, model, tmp_path):
        path = tmp_path / "m.json"
        model.save(path)
        again = TransitionModel.load(path)
        for ctx in model.contexts:
            for o in model.outcomes:
                assert again.score(ctx, o) == model.score(ctx, o)

    def test_schema(self, one, tmp_path):
        path = tmp_path / "m.json"
        one.save(path)
        d = json.loads(path.read_text())
        assert set(d) == {"k", "contexts", "backoff"}
        assert d["backoff"] == {"predict:0:0": 1.0, APPLY_01: 1.0, "apply:0:0": 1.0}

    @pytest.mark.parametrize("key", ["apply:0", "merge:0:0", "apply:x:0"])
    def test_bad_outcome_keys(self, key):
        with pytest.raises(ValueError):
            TransitionOutcome.from_key(key)

    def test_bad_context_key(self):
        with pytest.raises(ValueError):
            TransitionModel.from_dict({"k": 1, "contexts": {"no separator": {}}, "backoff": {}})

    def test_outcome_key(self):
        assert TransitionOutcome.from_key("predict:1:0") == TransitionOutcome("predict", 1, 0)
        assert TransitionOutcome("apply", 0, 2).key == "apply:0:2"


class TestRank:
    def test_uniform_keeps_order(self, lex, after_john):
        succ = successors(after_john, lex["likes"])
        assert [r for _, r, _ in rank(None, succ)] == [r for _, r in succ]

    def test_trained_puts_application_first(self, model, lex, after_john):
        ranked = rank(model, successors(after_john, lex["likes"]))
        assert ranked[0][1].rule == "apply"
        assert [s for *_, s in ranked] == sorted((s for *_, s in ranked), reverse=True)

    def test_ties_keep_generation_order(self, lex, after_john):
        flat = TransitionModel(1.0, {}, {"apply:0:0": 1.0})
        succ = successors(after_john, lex["likes"])
        ranked = rank(flat, succ, base_score=-2.0)
        assert [r for _, r, _ in ranked] == [r for _, r in succ]
        assert all(s < -2.0 for *_, s in ranked)

    def test_scaling_preserves_order_at_moderate_factors(self, model, lex, corpus):
        for tokens in corpus[:10]:
            r = parse(tokens, lex)
            for k in range(len(tokens)):
                for state, _ in r.snapshots[k]:
                    succ = successors(state, lex[tokens[k]])
                    base = [x[1] for x in rank(model, succ)]
                    for f in (0.5, 2.0, 10.0, 100.0):
                        assert [x[1] for x in rank(model.scaled(f), succ)] == base

    def test_initial_state_context(self, model, lex):
        (_, rec), = successors(initial_state("s"), lex["john"])
        assert rec.context.key == "np | s"
        assert model.transition_score(rec) < 0
