"""Bit-exact adaptive arithmetic coder driven by the PPM model.

Classic 32-bit register coder with bits-plus-follow underflow handling.
Every per-symbol distribution is the model's prediction quantized to a
total of 2^16 — the identical integer geometry the zoom tree subdivides,
so navigating to a text's interval and decoding its bits agree.

encode/decode adapt the model as they go and roll it back before
returning, so they require exclusive access to it for their duration;
distinct model instances code concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DecodeError, QuantizationError
from .model import PpmModel

CODE_BITS = 32
TOP = (1 << CODE_BITS) - 1
HALF = 1 << (CODE_BITS - 1)
QUARTER = 1 << (CODE_BITS - 2)
THREE_QUARTER = HALF + QUARTER
CODER_TOTAL = 1 << 16

STREAM_MAGIC = b"ZWAC"
STREAM_VERSION = 1


def quantize(probs: Sequence[float], total: int) -> list[int]:
    """Integer weights summing exactly to ``total``, every weight >= 1.

    floor(p*total), zeros raised to 1, then the residual distributed by
    largest fractional remainder (ties to the lower symbol index). This is
    the single rounding rule shared by the coder and the zoom tree.
    """
    n = len(probs)
    if total < n:
        raise QuantizationError(f"total {total} < alphabet size {n}")
    w = [0] * n
    rem = [0.0] * n
    acc = 0
    for i in range(n):
        x = probs[i] * total
        f = int(x)
        w[i] = f
        rem[i] = x - f
        acc += f
    for i in range(n):
        if w[i] == 0:
            w[i] = 1
            acc += 1
    leftover = total - acc
    if leftover > 0:
        order = sorted(range(n), key=lambda i: (-rem[i], i))
        idx = 0
        while leftover > 0:
            w[order[idx % n]] += 1
            leftover -= 1
            idx += 1
    elif leftover < 0:
        order = sorted(range(n), key=lambda i: (rem[i], i))
        while leftover < 0:
            for i in order:
                if w[i] > 1:
                    w[i] -= 1
                    leftover += 1
                    if leftover == 0:
                        break
    return w


@dataclass(frozen=True)
class Bitstream:
    """Encoded text: symbol count header plus an MSB-first bit payload."""

    symbol_count: int
    bit_length: int
    payload: bytes

    def to_bytes(self) -> bytes:
        out = bytearray(STREAM_MAGIC)
        out.append(STREAM_VERSION)
        _put_varint(out, self.symbol_count)
        _put_varint(out, self.bit_length)
        out.extend(self.payload)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Bitstream":
        if data[:4] != STREAM_MAGIC:
            raise DecodeError("bad bitstream magic")
        if len(data) < 5 or data[4] != STREAM_VERSION:
            raise DecodeError("unsupported bitstream version")
        pos = 5
        nsym, pos = _get_varint(data, pos)
        nbits, pos = _get_varint(data, pos)
        payload = data[pos:]
        if len(payload) != (nbits + 7) // 8:
            raise DecodeError(
                f"payload is {len(payload)} bytes, header promises {nbits} bits"
            )
        if nbits % 8 and payload and payload[-1] & ((1 << (8 - nbits % 8)) - 1):
            raise DecodeError("nonzero padding bits")
        return cls(nsym, nbits, payload)


def _put_varint(out: bytearray, value: int) -> None:
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _get_varint(data: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise DecodeError("truncated header")
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


class _BitWriter:
    def __init__(self):
        self.bits: list[int] = []
        self.pending = 0

    def emit(self, bit: int) -> None:
        self.bits.append(bit)
        if self.pending:
            self.bits.extend([bit ^ 1] * self.pending)
            self.pending = 0

    def to_payload(self) -> tuple[int, bytes]:
        out = bytearray()
        cur = 0
        filled = 0
        for b in self.bits:
            cur = (cur << 1) | b
            filled += 1
            if filled == 8:
                out.append(cur)
                cur = 0
                filled = 0
        if filled:
            out.append(cur << (8 - filled))
        return len(self.bits), bytes(out)


class _BitReader:
    """Reads payload bits MSB-first; past the end it yields zeros, matching
    the encoder's zero padding."""

    def __init__(self, stream: Bitstream):
        self.payload = stream.payload
        self.nbits = stream.bit_length
        self.pos = 0

    def read(self) -> int:
        if self.pos >= self.nbits:
            self.pos += 1
            return 0
        byte = self.payload[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit


@dataclass(frozen=True)
class EncodeStats:
    """Per-run accounting used by the code-length bound checks."""

    payload_bits: int
    quantized_bits: float  # sum of -log2(w_i / total)
    model_bits: float  # sum of -log2 p_i under the unquantized prediction


def encode(model: PpmModel, symbols: Sequence[int]) -> Bitstream:
    """Encode symbols adaptively; the model is restored before returning."""
    stream, _ = _encode(model, symbols, collect_stats=False)
    return stream


def encode_with_stats(model: PpmModel, symbols: Sequence[int]) -> tuple[Bitstream, EncodeStats]:
    return _encode(model, symbols, collect_stats=True)


def _encode(model: PpmModel, symbols: Sequence[int], collect_stats: bool):
    kernel = model._kernel
    order = model.order
    low = 0
    high = TOP
    writer = _BitWriter()
    tokens = []
    qbits = 0.0
    mbits = 0.0
    try:
        for i, s in enumerate(symbols):
            start = i - order if i > order else 0
            ctx = symbols[start:i]
            if collect_stats:
                probs = kernel.predict(ctx)
                w = kernel.quantize(probs, CODER_TOTAL)
                mbits -= math.log2(probs[s])
                qbits -= math.log2(w[s] / CODER_TOTAL)
            else:
                w = kernel.weights(ctx, CODER_TOTAL)
            cum_lo = 0
            for t in range(s):
                cum_lo += w[t]
            cum_hi = cum_lo + w[s]
            span = high - low + 1
            high = low + (span * cum_hi) // CODER_TOTAL - 1
            low = low + (span * cum_lo) // CODER_TOTAL
            while True:
                if high < HALF:
                    writer.emit(0)
                elif low >= HALF:
                    writer.emit(1)
                    low -= HALF
                    high -= HALF
                elif low >= QUARTER and high < THREE_QUARTER:
                    writer.pending += 1
                    low -= QUARTER
                    high -= QUARTER
                else:
                    break
                low <<= 1
                high = (high << 1) | 1
            tokens.append(kernel.observe(ctx, s))
        if len(symbols):
            writer.pending += 1
            writer.emit(0 if low < QUARTER else 1)
    finally:
        for t in reversed(tokens):
            kernel.rollback(t)
    nbits, payload = writer.to_payload()
    stream = Bitstream(len(symbols), nbits, payload)
    return stream, EncodeStats(nbits, qbits, mbits)


def decode(model: PpmModel, stream: Bitstream) -> list[int]:
    """Recover the exact symbol sequence from an encode() under the same
    model snapshot; the model is restored before returning."""
    kernel = model._kernel
    order = model.order
    asize = model.alphabet_size
    reader = _BitReader(stream)
    low = 0
    high = TOP
    value = 0
    for _ in range(CODE_BITS):
        value = (value << 1) | reader.read()
    out: list[int] = []
    tokens = []
    try:
        for i in range(stream.symbol_count):
            start = i - order if i > order else 0
            ctx = out[start:i]
            w = kernel.weights(ctx, CODER_TOTAL)
            span = high - low + 1
            target = ((value - low + 1) * CODER_TOTAL - 1) // span
            cum_lo = 0
            s = 0
            while s < asize:
                if cum_lo + w[s] > target:
                    break
                cum_lo += w[s]
                s += 1
            if s == asize:
                raise DecodeError("target outside cumulative range")
            cum_hi = cum_lo + w[s]
            high = low + (span * cum_hi) // CODER_TOTAL - 1
            low = low + (span * cum_lo) // CODER_TOTAL
            while True:
                if high < HALF:
                    pass
                elif low >= HALF:
                    low -= HALF
                    high -= HALF
                    value -= HALF
                elif low >= QUARTER and high < THREE_QUARTER:
                    low -= QUARTER
                    high -= QUARTER
                    value -= QUARTER
                else:
                    break
                low <<= 1
                high = (high << 1) | 1
                value = (value << 1) | reader.read()
            tokens.append(kernel.observe(ctx, s))
            out.append(s)
    finally:
        for t in reversed(tokens):
            kernel.rollback(t)
    return out


def write_stream(path: str, stream: Bitstream) -> None:
    with open(path, "wb") as fh:
        fh.write(stream.to_bytes())


def read_stream(path: str) -> Bitstream:
    with open(path, "rb") as fh:
        return Bitstream.from_bytes(fh.read())
