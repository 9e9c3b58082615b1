"""Arithmetic coder: quantization, roundtrips, code-length accounting."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from zoomwrite.alphabet import build_alphabet, normalize_text
from zoomwrite.coder import (
    CODER_TOTAL,
    Bitstream,
    decode,
    encode,
    encode_with_stats,
    quantize,
)
from zoomwrite.errors import DecodeError, QuantizationError
from zoomwrite.model import PpmModel, new_model

A27 = build_alphabet()


class TestQuantize:
    def test_exact_floors(self):
        assert quantize([1 / 2, 1 / 3, 1 / 6], 12) == [6, 4, 2]

    def test_uniform_27_at_27(self):
        assert quantize([1 / 27] * 27, 27) == [1] * 27

    def test_minimum_one_forces_redistribution(self):
        assert quantize([0.99, 0.005, 0.005], 100) == [98, 1, 1]

    def test_total_below_size_is_error(self):
        with pytest.raises(QuantizationError):
            quantize([0.5, 0.5], 1)

    @given(
        st.lists(st.floats(1e-9, 1.0), min_size=2, max_size=40),
        st.integers(40, 1 << 20),
    )
    @settings(max_examples=200, deadline=None)
    def test_sums_exactly_and_positive(self, raw, total):
        s = sum(raw)
        probs = [x / s for x in raw]
        w = quantize(probs, total)
        assert sum(w) == total
        assert all(x >= 1 for x in w)

    def test_largest_remainder_tie_breaks_to_lower_index(self):
        # equal probabilities, total not divisible: earlier symbols get the extras
        w = quantize([1 / 4] * 4, 27)
        assert w == [7, 7, 7, 6]

    def test_agrees_with_model_weights(self, trained_model):
        ctx = normalize_text("the wh", A27)
        probs = trained_model.predict(ctx)
        assert trained_model.weights(ctx, CODER_TOTAL) == quantize(probs, CODER_TOTAL)
        assert trained_model.weights(ctx, 1 << 30) == quantize(probs, 1 << 30)


class TestBitstreamFormat:
    def test_roundtrip_bytes(self):
        s = Bitstream(3, 11, bytes([0b10110010, 0b01100000]))
        data = s.to_bytes()
        assert data[:4] == b"ZWAC"
        assert Bitstream.from_bytes(data) == s

    def test_truncated_payload_detected(self):
        s = Bitstream(3, 20, bytes(3))
        data = s.to_bytes()
        with pytest.raises(DecodeError):
            Bitstream.from_bytes(data[:-1])

    def test_nonzero_padding_detected(self):
        data = Bitstream(1, 3, bytes([0b10110000])).to_bytes()
        with pytest.raises(DecodeError):
            Bitstream.from_bytes(data)

    def test_bad_magic(self):
        with pytest.raises(DecodeError):
            Bitstream.from_bytes(b"NOPE\x01\x00\x00")


class TestRoundtrip:
    def test_empty_text(self):
        m = new_model(5, A27)
        stream = encode(m, [])
        assert stream.symbol_count == 0
        assert stream.payload == b""
        assert decode(m, stream) == []

    def test_hello_under_fresh_model(self):
        m = new_model(5, A27)
        text = normalize_text("hello", A27)
        assert decode(m, encode(m, text)) == text

    def test_random_sequences_fresh_model(self):
        rng = random.Random(7)
        m = new_model(5, A27)
        for _ in range(50):
            text = [rng.randrange(27) for _ in range(rng.randrange(0, 200))]
            assert decode(m, encode(m, text)) == text

    def test_roundtrip_under_trained_model(self, trained_model, heldout_half):
        text = heldout_half[:3000]
        assert decode(trained_model, encode(trained_model, text)) == text

    def test_model_restored_by_encode_and_decode(self, trained_model):
        text = normalize_text("whale of a tale", A27)
        before = trained_model.snapshot()
        stream = encode(trained_model, text)
        assert trained_model.snapshot() == before
        decode(trained_model, stream)
        assert trained_model.snapshot() == before

    def test_decode_under_different_model_is_defined_but_wrong(self, trained_model):
        m = new_model(5, A27)
        text = normalize_text("call me ishmael", A27)
        stream = encode(trained_model, text)
        out = decode(m, stream)  # must not crash
        assert len(out) == len(text)

    def test_truncated_stream_is_decode_error(self, trained_model):
        text = normalize_text("some words to encode", A27)
        data = encode(trained_model, text).to_bytes()
        with pytest.raises(DecodeError):
            Bitstream.from_bytes(data[: len(data) - 2])

    @given(st.lists(st.integers(0, 26), max_size=120), st.integers(0, 10**9))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_property(self, text, seed):
        rng = random.Random(seed)
        m = new_model(3, A27)
        m.train([rng.randrange(27) for _ in range(rng.randrange(200))])
        assert decode(m, encode(m, text)) == text


class TestCodeLength:
    def test_within_two_bits_of_quantized_ideal(self, trained_model, heldout_half):
        text = heldout_half[:4000]
        stream, stats = encode_with_stats(trained_model, text)
        assert stats.payload_bits == stream.bit_length
        assert stats.payload_bits <= stats.quantized_bits + 2

    def test_quantization_overhead_small(self, trained_model, heldout_half):
        text = heldout_half[:4000]
        _, stats = encode_with_stats(trained_model, text)
        overhead = (stats.quantized_bits - stats.model_bits) / len(text)
        assert overhead < 0.05

    def test_compresses_english_below_uniform(self, trained_model, heldout_half):
        text = heldout_half[:4000]
        stream = encode(trained_model, text)
        assert stream.bit_length / len(text) < math.log2(27)
