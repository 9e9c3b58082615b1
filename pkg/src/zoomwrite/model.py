"""Adaptive PPM character model (method D escapes, default order 5)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .alphabet import Alphabet, build_alphabet
from .errors import ConfigError, DecodeError, DomainError, UsageError
from .kernel import PpmKernel

SNAPSHOT_MAGIC = b"ZWPM"
SNAPSHOT_VERSION = 1
DEFAULT_ORDER = 5


@dataclass(frozen=True)
class UndoToken:
    """Handle for reversing one observe; tokens must be consumed LIFO."""

    model_id: int
    token: int


class PpmModel:
    """Context-trie model: predicts the next symbol from up to ``order``
    preceding symbols, learns incrementally, and can unlearn exactly.

    Single-writer: observe/rollback/train need exclusive access. Reads
    (predict, non-adaptive cross_entropy) may run concurrently with each
    other but never with a writer. Instances may move between threads
    between calls; clone() gives independent copies for parallel work.
    """

    def __init__(self, order: int = DEFAULT_ORDER, alphabet: Alphabet | None = None, *, kernel_cls=None):
        self.alphabet = alphabet if alphabet is not None else build_alphabet()
        self.order = order
        self._kernel = (kernel_cls or PpmKernel)(order, self.alphabet.size)

    @property
    def alphabet_size(self) -> int:
        return self.alphabet.size

    @property
    def node_count(self) -> int:
        return self._kernel.node_count

    def _ctx(self, context: Sequence[int]) -> Sequence[int]:
        return context[-self.order:] if len(context) > self.order else context

    def predict(self, context: Sequence[int]) -> list[float]:
        """Probability of each symbol following the last ``order`` context symbols."""
        return self._kernel.predict(self._ctx(context))

    def weights(self, context: Sequence[int], total: int) -> list[int]:
        """Integer subdivision of ``total`` units: quantize(predict(context), total)."""
        return self._kernel.weights(self._ctx(context), total)

    def observe(self, context: Sequence[int], symbol: int) -> UndoToken:
        """Learn one symbol occurrence; returns the token that reverses it."""
        return UndoToken(id(self), self._kernel.observe(self._ctx(context), symbol))

    def rollback(self, token: UndoToken) -> None:
        """Undo the observe that produced ``token`` (tokens form a stack)."""
        if not isinstance(token, UndoToken) or token.model_id != id(self):
            raise UsageError("token does not belong to this model")
        self._kernel.rollback(token.token)

    def train(self, symbols: Sequence[int]) -> "PpmModel":
        """Observe every symbol of a corpus in order; returns self."""
        self._kernel.train(symbols)
        return self

    def cross_entropy(self, symbols: Sequence[int], adapt: bool = False) -> float:
        """Mean -log2 P(symbol | context) in bits per symbol.

        With ``adapt`` the model observes each symbol after predicting it and
        every observation is rolled back before returning.
        """
        if len(symbols) == 0:
            raise DomainError("cross_entropy of empty text")
        kernel = self._kernel
        order = self.order
        total = 0.0
        tokens: list[int] = []
        try:
            for i, s in enumerate(symbols):
                start = i - order if i > order else 0
                ctx = symbols[start:i]
                total += math.log2(kernel.predict(ctx)[s])
                if adapt:
                    tokens.append(kernel.observe(ctx, s))
        finally:
            for t in reversed(tokens):
                kernel.rollback(t)
        return -total / len(symbols)

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> bytes:
        """Versioned binary state: magic, version, order, alphabet size, trie dump."""
        head = bytearray(SNAPSHOT_MAGIC)
        head.append(SNAPSHOT_VERSION)
        head.append(self.order)
        size = self.alphabet.size
        while True:
            b = size & 0x7F
            size >>= 7
            head.append(b | 0x80 if size else b)
            if not size:
                break
        return bytes(head) + self._kernel.trie_bytes()

    @classmethod
    def from_snapshot(cls, data: bytes, alphabet: Alphabet | None = None, *, kernel_cls=None) -> "PpmModel":
        if data[:4] != SNAPSHOT_MAGIC:
            raise DecodeError("bad snapshot magic")
        if data[4] != SNAPSHOT_VERSION:
            raise DecodeError(f"unsupported snapshot version {data[4]}")
        order = data[5]
        pos = 6
        size = 0
        shift = 0
        while True:
            b = data[pos]
            pos += 1
            size |= (b & 0x7F) << shift
            shift += 7
            if not b & 0x80:
                break
        if alphabet is None:
            alphabet = build_alphabet()
        if alphabet.size != size:
            raise ConfigError(f"snapshot alphabet size {size} != alphabet size {alphabet.size}")
        model = cls(order, alphabet, kernel_cls=kernel_cls)
        model._kernel.load_trie(data, pos)
        return model

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(self.snapshot())

    @classmethod
    def load(cls, path: str, alphabet: Alphabet | None = None) -> "PpmModel":
        with open(path, "rb") as fh:
            return cls.from_snapshot(fh.read(), alphabet)

    def clone(self) -> "PpmModel":
        return PpmModel.from_snapshot(self.snapshot(), self.alphabet, kernel_cls=type(self._kernel))


def new_model(order: int = DEFAULT_ORDER, alphabet: Alphabet | None = None) -> PpmModel:
    """Fresh model; predictions start uniform over the alphabet."""
    return PpmModel(order, alphabet)
