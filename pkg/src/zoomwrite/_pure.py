"""Pure-Python PPM context-trie kernel.

This is the reference implementation of the kernel contract; the compiled
kernel in ``_fast.pyx`` mirrors it operation-for-operation, including the
exact order of floating-point operations, so both produce bit-identical
predictions, quantized weights, and trie snapshots.

Trie layout: a node at path ``s1..sk`` records how often symbol ``sk``
followed context ``s1..s(k-1)``. Nodes created merely as context paths
carry count 0 and are not successors. Children are kept in dicts; all
externally visible orderings are by ascending symbol index.
"""

from __future__ import annotations

from .errors import ConfigError, DomainError, QuantizationError, UsageError

KERNEL_NAME = "pure"

_OP_INCR = 0
_OP_CREATE = 1


class _Node:
    __slots__ = ("count", "children")

    def __init__(self):
        self.count = 0
        self.children = {}


def _write_varint(out: bytearray, value: int) -> None:
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise ValueError("truncated varint")
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


class PpmKernel:
    """Adaptive PPM trie with method-D escapes, full/update exclusion,
    journaled mutation for exact rollback, and integer weight quantization."""

    def __init__(self, order: int, alphabet_size: int):
        if not 0 <= order <= 8:
            raise ConfigError(f"order must be in [0, 8], got {order}")
        if alphabet_size < 2:
            raise ConfigError("alphabet size must be >= 2")
        self.order = order
        self.alphabet_size = alphabet_size
        self._root = _Node()
        self._journal: list[list[tuple[int, _Node, int, _Node | None]]] = []
        self.node_count = 1

    # -- mutation ---------------------------------------------------------

    def observe(self, context, symbol: int) -> int:
        """Count one occurrence of symbol after context; returns a rollback token.

        Update exclusion: the count is bumped in the longest matching context
        and in each shorter context down to (and including) the shortest one
        where the symbol was previously unseen.
        """
        if not 0 <= symbol < self.alphabet_size:
            raise DomainError(f"symbol {symbol} outside alphabet")
        ops: list[tuple[int, _Node, int, _Node | None]] = []
        kmax = min(self.order, len(context))
        n = len(context)
        for k in range(kmax, -1, -1):
            node = self._root
            for i in range(n - k, n):
                s = context[i]
                child = node.children.get(s)
                if child is None:
                    child = _Node()
                    node.children[s] = child
                    ops.append((_OP_CREATE, node, s, child))
                    self.node_count += 1
                node = child
            succ = node.children.get(symbol)
            seen = succ is not None and succ.count > 0
            if seen and k < kmax:
                break
            if succ is None:
                succ = _Node()
                node.children[symbol] = succ
                ops.append((_OP_CREATE, node, symbol, succ))
                self.node_count += 1
            succ.count += 1
            ops.append((_OP_INCR, succ, 0, None))
            if seen:
                break
        self._journal.append(ops)
        return len(self._journal) - 1

    def rollback(self, token: int) -> None:
        """Reverse the mutations of the most recent unconsumed observe."""
        if token != len(self._journal) - 1 or token < 0:
            raise UsageError(f"rollback token {token} is not top of stack")
        ops = self._journal.pop()
        for kind, node, sym, child in reversed(ops):
            if kind == _OP_INCR:
                node.count -= 1
            else:
                del node.children[sym]
                self.node_count -= 1

    def pending_tokens(self) -> int:
        return len(self._journal)

    def train(self, symbols) -> None:
        """Observe every symbol with its preceding context, without journaling."""
        if self._journal:
            raise UsageError("train with unconsumed rollback tokens")
        for i, s in enumerate(symbols):
            start = i - self.order if i > self.order else 0
            self.observe(symbols[start:i], s)
            self._journal.pop()

    # -- prediction -------------------------------------------------------

    def predict(self, context) -> list[float]:
        """PPMD mixture over the alphabet for the given context.

        Escape weight d/(2n) cascades to shorter contexts with full symbol
        exclusion; below order 0 the leftover mass is uniform over symbols
        not yet seen. A level whose successors cover every remaining symbol
        absorbs the escape (denominator 2n-d), keeping the total exactly 1.
        """
        asize = self.alphabet_size
        probs = [0.0] * asize
        excluded = bytearray(asize)
        mass = 1.0
        remaining = asize
        n_ctx = len(context)
        for k in range(min(self.order, n_ctx), -1, -1):
            node = self._root
            ok = True
            for i in range(n_ctx - k, n_ctx):
                node = node.children.get(context[i])
                if node is None:
                    ok = False
                    break
            if not ok:
                continue
            total = 0
            distinct = 0
            kids = node.children
            syms = sorted(kids)
            for s in syms:
                if not excluded[s]:
                    c = kids[s].count
                    if c > 0:
                        total += c
                        distinct += 1
            if distinct == 0:
                continue
            if distinct == remaining:
                denom = 2.0 * total - distinct
                for s in syms:
                    if not excluded[s]:
                        c = kids[s].count
                        if c > 0:
                            probs[s] = mass * ((2 * c - 1) / denom)
                            excluded[s] = 1
                remaining = 0
                mass = 0.0
                break
            denom = 2.0 * total
            for s in syms:
                if not excluded[s]:
                    c = kids[s].count
                    if c > 0:
                        probs[s] = mass * ((2 * c - 1) / denom)
                        excluded[s] = 1
            remaining -= distinct
            mass = mass * (distinct / denom)
        if remaining > 0:
            share = mass / remaining
            for s in range(asize):
                if not excluded[s]:
                    probs[s] = share
        return probs

    def weights(self, context, total: int) -> list[int]:
        """quantize(predict(context), total): the shared coder/tree geometry."""
        return self.quantize(self.predict(context), total)

    def quantize(self, probs, total: int) -> list[int]:
        """Deterministic largest-remainder rounding with a minimum weight of 1."""
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

    # -- serialization ----------------------------------------------------

    def trie_bytes(self) -> bytes:
        """Canonical preorder dump: per node (symbol, count, child count)."""
        out = bytearray()

        def emit(node: _Node) -> None:
            kids = node.children
            _write_varint(out, len(kids))
            for s in sorted(kids):
                child = kids[s]
                _write_varint(out, s)
                _write_varint(out, child.count)
                emit(child)

        emit(self._root)
        return bytes(out)

    def load_trie(self, data: bytes, pos: int = 0) -> int:
        """Replace trie contents from a dump produced by trie_bytes."""
        if self._journal:
            raise UsageError("load with unconsumed rollback tokens")
        self._root = _Node()
        self.node_count = 1

        def read(node: _Node, pos: int) -> int:
            nkids, pos = _read_varint(data, pos)
            for _ in range(nkids):
                s, pos = _read_varint(data, pos)
                count, pos = _read_varint(data, pos)
                child = _Node()
                child.count = count
                node.children[s] = child
                self.node_count += 1
                pos = read(child, pos)
            return pos

        return read(self._root, pos)
