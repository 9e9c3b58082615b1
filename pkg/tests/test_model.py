"""PPM model: prediction formula, adaptation, rollback, snapshots."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from zoomwrite.alphabet import build_alphabet, normalize_text
from zoomwrite.errors import ConfigError, DomainError, UsageError
from zoomwrite.model import PpmModel, new_model

from .trie_dump import parse_snapshot

A27 = build_alphabet()
LOG2_27 = math.log2(27)


def text_syms(s):
    return normalize_text(s, A27)


class TestNewModel:
    def test_fresh_model_is_uniform(self):
        m = new_model(5, A27)
        for ctx in ([], text_syms("abc"), text_syms("zzzzzz")):
            p = m.predict(ctx)
            assert len(p) == 27
            assert all(abs(x - 1 / 27) < 1e-15 for x in p)

    def test_order_zero_is_valid(self):
        m = new_model(0, A27)
        t = m.observe([], 0)
        assert m.predict([])[0] > 1 / 27
        m.rollback(t)

    def test_order_out_of_range(self):
        with pytest.raises(ConfigError):
            new_model(9, A27)
        with pytest.raises(ConfigError):
            new_model(-1, A27)


class TestTrain:
    def test_train_empty_changes_nothing(self):
        m = new_model(5, A27)
        before = m.snapshot()
        m.train([])
        assert m.snapshot() == before

    def test_train_ab_counts(self):
        m = new_model(5, A27)
        m.train(text_syms("ab"))
        _, _, nodes = parse_snapshot(m.snapshot())
        a, b = 0, 1
        assert nodes[(a,)] == 1  # order-0 a:1
        assert nodes[(b,)] == 1  # order-0 b:1
        assert nodes[(a, b)] == 1  # context "a" -> b:1
        assert set(nodes) == {(a,), (b,), (a, b)}

    def test_train_equals_composed_observes(self):
        m1 = new_model(5, A27)
        m1.train(text_syms("ab"))
        m2 = new_model(5, A27)
        m2.observe([], 0)
        m2.observe([0], 1)
        assert m1.snapshot() == m2.snapshot()

    def test_train_equals_observes_on_longer_text(self):
        text = text_syms("the quick brown fox jumps over the lazy dog")
        m1 = new_model(3, A27)
        m1.train(text)
        m2 = new_model(3, A27)
        for i, s in enumerate(text):
            m2.observe(text[max(0, i - 3):i], s)
        assert m1.snapshot() == m2.snapshot()

    def test_training_reduces_code_length_on_training_text(self, train_half, trained_model):
        sample = train_half[:20000]
        trained = trained_model.cross_entropy(sample, adapt=False)
        assert trained < LOG2_27


class TestPredictFormula:
    def test_ppmd_mixture_hand_case(self):
        # context 'x' with successor counts {a:2, b:1}
        m = new_model(1, A27)
        x, a, b = 23, 0, 1
        m.observe([x], a)
        m.observe([x], a)
        m.observe([x], b)
        p = m.predict([x])
        assert p[a] == pytest.approx(1 / 2, abs=1e-15)
        assert p[b] == pytest.approx(1 / 6, abs=1e-15)
        # escape mass 1/3 uniform over the remaining 25 symbols
        # (a, b excluded at lower orders; root holds only a and b)
        for s in range(27):
            if s not in (a, b):
                assert p[s] == pytest.approx((1 / 3) / 25, abs=1e-15)

    def test_normalization_and_positivity_after_training(self, trained_model):
        ctxs = [[], text_syms("the"), text_syms("whale"), text_syms("zqj")]
        for ctx in ctxs:
            p = trained_model.predict(ctx)
            assert abs(sum(p) - 1.0) < 1e-12
            assert all(x > 0 for x in p)

    @given(st.lists(st.integers(0, 26), min_size=0, max_size=60), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_normalization_random_models(self, history, seed):
        m = new_model(3, A27)
        m.train(history)
        rng = random.Random(seed)
        ctx = [rng.randrange(27) for _ in range(rng.randrange(8))]
        p = m.predict(ctx)
        assert abs(sum(p) - 1.0) < 1e-12
        assert all(x > 0 for x in p)
        assert len(p) == 27


class TestObserveRollback:
    def test_first_observation(self):
        m = new_model(5, A27)
        m.observe([], 0)
        _, _, nodes = parse_snapshot(m.snapshot())
        assert nodes == {(0,): 1}

    def test_observe_then_rollback_restores_bytes(self):
        m = new_model(5, A27)
        m.train(text_syms("some seed text"))
        before = m.snapshot()
        t = m.observe(text_syms("some"), 5)
        assert m.snapshot() != before
        m.rollback(t)
        assert m.snapshot() == before

    def test_lifo_rollback(self):
        m = new_model(5, A27)
        before = m.snapshot()
        t1 = m.observe([], 7)
        t2 = m.observe([7], 8)
        m.rollback(t2)
        m.rollback(t1)
        assert m.snapshot() == before

    def test_stale_token_is_usage_error(self):
        m = new_model(5, A27)
        t1 = m.observe([], 7)
        m.observe([7], 8)
        with pytest.raises(UsageError):
            m.rollback(t1)

    def test_foreign_token_rejected(self):
        m1 = new_model(5, A27)
        m2 = new_model(5, A27)
        t = m1.observe([], 0)
        with pytest.raises(UsageError):
            m2.rollback(t)

    def test_invalid_symbol_is_domain_error(self):
        m = new_model(5, A27)
        with pytest.raises(DomainError):
            m.observe([], 27)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_random_interleaving_restores_snapshot(self, seed):
        rng = random.Random(seed)
        m = new_model(4, A27)
        m.train([rng.randrange(27) for _ in range(rng.randrange(50))])
        initial = m.snapshot()
        stack = []
        for _ in range(rng.randrange(80)):
            if stack and rng.random() < 0.4:
                m.rollback(stack.pop())
            else:
                ctx = [rng.randrange(27) for _ in range(rng.randrange(6))]
                stack.append(m.observe(ctx, rng.randrange(27)))
        while stack:
            m.rollback(stack.pop())
        assert m.snapshot() == initial


class TestSuffixClosure:
    def test_closure_holds_after_training(self):
        m = new_model(4, A27)
        m.train(text_syms("it is a truth universally acknowledged that a single man"))
        _, _, nodes = parse_snapshot(m.snapshot())
        for path in nodes:
            if len(path) > 1:
                assert path[1:] in nodes, f"suffix of {path} missing"

    def test_closure_holds_after_random_observes(self):
        rng = random.Random(11)
        m = new_model(5, A27)
        for _ in range(300):
            ctx = [rng.randrange(27) for _ in range(rng.randrange(9))]
            m.observe(ctx, rng.randrange(27))
        _, _, nodes = parse_snapshot(m.snapshot())
        for path in nodes:
            if len(path) > 1:
                assert path[1:] in nodes


class TestCrossEntropy:
    def test_uniform_fallback_exact(self):
        m = new_model(5, A27)
        ce = m.cross_entropy(text_syms("any text at all"), adapt=False)
        assert ce == pytest.approx(LOG2_27, abs=1e-9)

    def test_adaptive_on_repeated_symbol_costs_decrease(self):
        m = new_model(5, A27)
        text = [0] * 40
        costs = []
        tokens = []
        for i, s in enumerate(text):
            ctx = text[max(0, i - 5):i]
            costs.append(-math.log2(m.predict(ctx)[s]))
            tokens.append(m.observe(ctx, s))
        for t in reversed(tokens):
            m.rollback(t)
        assert costs[0] == pytest.approx(LOG2_27, abs=1e-9)
        # strictly decreasing once the deep contexts exist
        tail = costs[6:]
        assert all(x > y for x, y in zip(tail, tail[1:]))

    def test_adapt_leaves_model_unchanged(self, trained_model, heldout_half):
        before = trained_model.snapshot()
        trained_model.cross_entropy(heldout_half[:4000], adapt=True)
        assert trained_model.snapshot() == before

    def test_empty_text_is_domain_error(self):
        with pytest.raises(DomainError):
            new_model(5, A27).cross_entropy([], adapt=False)

    def test_trained_adaptive_regression_baseline(self, trained_model, heldout_half):
        # frozen measurement on the bundled corpus: first-half-trained model,
        # adaptive evaluation of the first 8000 held-out symbols
        ce = trained_model.cross_entropy(heldout_half[:8000], adapt=True)
        assert ce == pytest.approx(2.040089, abs=1e-4)

    def test_order5_beats_order0_adaptively(self, train_half, heldout_half):
        sample_train = train_half[:30000]
        sample_test = heldout_half[:8000]
        m5 = PpmModel(5, A27).train(sample_train)
        m0 = PpmModel(0, A27).train(sample_train)
        ce5 = m5.cross_entropy(sample_test, adapt=True)
        ce0 = m0.cross_entropy(sample_test, adapt=True)
        assert ce5 < ce0


class TestSnapshotFormat:
    def test_header_fields(self):
        m = new_model(3, A27)
        snap = m.snapshot()
        assert snap[:4] == b"ZWPM"
        assert snap[4] == 1
        assert snap[5] == 3
        order, size, nodes = parse_snapshot(snap)
        assert (order, size) == (3, 27)
        assert nodes == {}

    def test_roundtrip_through_from_snapshot(self, trained_model):
        snap = trained_model.snapshot()
        again = PpmModel.from_snapshot(snap, A27)
        assert again.snapshot() == snap
        assert again.node_count == trained_model.node_count

    def test_clone_is_independent(self):
        m = new_model(5, A27)
        m.train(text_syms("hello world"))
        c = m.clone()
        assert c.snapshot() == m.snapshot()
        c.observe([], 4)
        assert c.snapshot() != m.snapshot()
