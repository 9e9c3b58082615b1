# cython: language_level=3
"""Compiled PPM context-trie kernel.

Mirrors ``_pure.PpmKernel`` operation-for-operation. Floating-point
expressions are written in the same order as the pure kernel (and the
extension builds with -ffp-contract=off), so predictions, quantized
weights, and snapshots are bit-identical between the two backends.

Nodes live in growable parallel C arrays; children form sibling chains
kept sorted by symbol; rollback replays a journaled mutation batch.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

from .errors import ConfigError, DomainError, QuantizationError, UsageError

KERNEL_NAME = "fast"

cdef extern from *:
    """
    typedef struct {
        int count;
        int first_child;
        int next_sibling;
        int sym;
    } zw_node;
    """
    ctypedef struct zw_node:
        int count
        int first_child
        int next_sibling
        int sym

DEF NO_NODE = -1


cdef class PpmKernel:
    cdef public int order
    cdef public int alphabet_size
    cdef zw_node* nodes
    cdef long n_nodes          # high-water slot count
    cdef long cap_nodes
    cdef long free_head        # free-list threaded through first_child
    cdef public long node_count
    # journal: per op, target node; parent id for creations, -1 for increments
    cdef int* op_node
    cdef int* op_parent
    cdef long n_ops
    cdef long cap_ops
    cdef long* batch_start
    cdef long n_batches
    cdef long cap_batches
    # scratch buffers (alphabet_size each)
    cdef double* s_probs
    cdef double* s_rem
    cdef long* s_w
    cdef int* s_order
    cdef unsigned char* s_excl
    cdef int* s_ctx
    cdef long cap_ctx

    def __cinit__(self, int order, int alphabet_size):
        if order < 0 or order > 8:
            raise ConfigError(f"order must be in [0, 8], got {order}")
        if alphabet_size < 2:
            raise ConfigError("alphabet size must be >= 2")
        self.order = order
        self.alphabet_size = alphabet_size
        self.cap_nodes = 1024
        self.nodes = <zw_node*>malloc(self.cap_nodes * sizeof(zw_node))
        if self.nodes == NULL:
            raise MemoryError()
        self.n_nodes = 0
        self.free_head = NO_NODE
        self.node_count = 0
        self.n_ops = 0
        self.cap_ops = 1024
        self.op_node = <int*>malloc(self.cap_ops * sizeof(int))
        self.op_parent = <int*>malloc(self.cap_ops * sizeof(int))
        self.n_batches = 0
        self.cap_batches = 256
        self.batch_start = <long*>malloc(self.cap_batches * sizeof(long))
        self.s_probs = <double*>malloc(alphabet_size * sizeof(double))
        self.s_rem = <double*>malloc(alphabet_size * sizeof(double))
        self.s_w = <long*>malloc(alphabet_size * sizeof(long))
        self.s_order = <int*>malloc(alphabet_size * sizeof(int))
        self.s_excl = <unsigned char*>malloc(alphabet_size)
        self.cap_ctx = 16
        self.s_ctx = <int*>malloc(self.cap_ctx * sizeof(int))
        if (self.op_node == NULL or self.op_parent == NULL or self.batch_start == NULL
                or self.s_probs == NULL or self.s_rem == NULL or self.s_w == NULL
                or self.s_order == NULL or self.s_excl == NULL or self.s_ctx == NULL):
            raise MemoryError()
        self._alloc_node(NO_NODE)  # root at slot 0
        self.node_count = 1

    def __dealloc__(self):
        free(self.nodes)
        free(self.op_node)
        free(self.op_parent)
        free(self.batch_start)
        free(self.s_probs)
        free(self.s_rem)
        free(self.s_w)
        free(self.s_order)
        free(self.s_excl)
        free(self.s_ctx)

    # -- arena ------------------------------------------------------------

    cdef long _alloc_node(self, int sym) except -2:
        cdef long idx
        if self.free_head != NO_NODE:
            idx = self.free_head
            self.free_head = self.nodes[idx].first_child
        else:
            if self.n_nodes == self.cap_nodes:
                self.cap_nodes *= 2
                self.nodes = <zw_node*>realloc(self.nodes, self.cap_nodes * sizeof(zw_node))
                if self.nodes == NULL:
                    raise MemoryError()
            idx = self.n_nodes
            self.n_nodes += 1
        self.nodes[idx].count = 0
        self.nodes[idx].first_child = NO_NODE
        self.nodes[idx].next_sibling = NO_NODE
        self.nodes[idx].sym = sym
        return idx

    cdef void _free_node(self, long idx):
        self.nodes[idx].first_child = self.free_head
        self.free_head = idx

    cdef long _find_child(self, long parent, int sym):
        cdef long c = self.nodes[parent].first_child
        while c != NO_NODE:
            if self.nodes[c].sym == sym:
                return c
            if self.nodes[c].sym > sym:
                return NO_NODE
            c = self.nodes[c].next_sibling
        return NO_NODE

    cdef long _insert_child(self, long parent, int sym) except -2:
        # sorted insert into the sibling chain
        cdef long node = self._alloc_node(sym)
        cdef long c = self.nodes[parent].first_child
        cdef long prev = NO_NODE
        while c != NO_NODE and self.nodes[c].sym < sym:
            prev = c
            c = self.nodes[c].next_sibling
        self.nodes[node].next_sibling = <int>c
        if prev == NO_NODE:
            self.nodes[parent].first_child = <int>node
        else:
            self.nodes[prev].next_sibling = <int>node
        self.node_count += 1
        return node

    cdef void _unlink_child(self, long parent, long node):
        cdef long c = self.nodes[parent].first_child
        cdef long prev = NO_NODE
        while c != node:
            prev = c
            c = self.nodes[c].next_sibling
        if prev == NO_NODE:
            self.nodes[parent].first_child = self.nodes[c].next_sibling
        else:
            self.nodes[prev].next_sibling = self.nodes[c].next_sibling
        self.node_count -= 1
        self._free_node(node)

    # -- journaling ----------------------------------------------------------

    cdef void _push_op(self, long node, long parent) except *:
        if self.n_ops == self.cap_ops:
            self.cap_ops *= 2
            self.op_node = <int*>realloc(self.op_node, self.cap_ops * sizeof(int))
            self.op_parent = <int*>realloc(self.op_parent, self.cap_ops * sizeof(int))
            if self.op_node == NULL or self.op_parent == NULL:
                raise MemoryError()
        self.op_node[self.n_ops] = <int>node
        self.op_parent[self.n_ops] = <int>parent
        self.n_ops += 1

    # -- context handling ------------------------------------------------------

    cdef int _load_ctx(self, object context) except -1:
        cdef long n = len(context)
        cdef long i
        if n > self.cap_ctx:
            while self.cap_ctx < n:
                self.cap_ctx *= 2
            self.s_ctx = <int*>realloc(self.s_ctx, self.cap_ctx * sizeof(int))
            if self.s_ctx == NULL:
                raise MemoryError()
        for i in range(n):
            self.s_ctx[i] = context[i]
        return <int>n

    # -- mutation ----------------------------------------------------------------

    cdef void _observe_impl(self, int* ctx, int nctx, int symbol, bint record) except *:
        cdef int kmax = self.order if self.order < nctx else nctx
        cdef int k, i
        cdef long node, child, succ
        cdef bint seen
        for k in range(kmax, -1, -1):
            node = 0
            for i in range(nctx - k, nctx):
                child = self._find_child(node, ctx[i])
                if child == NO_NODE:
                    child = self._insert_child(node, ctx[i])
                    if record:
                        self._push_op(child, node)
                node = child
            succ = self._find_child(node, symbol)
            seen = succ != NO_NODE and self.nodes[succ].count > 0
            if seen and k < kmax:
                break
            if succ == NO_NODE:
                succ = self._insert_child(node, symbol)
                if record:
                    self._push_op(succ, node)
            self.nodes[succ].count += 1
            if record:
                self._push_op(succ, NO_NODE)
            if seen:
                break

    def observe(self, context, int symbol):
        """Count one occurrence of symbol after context; returns a token."""
        if symbol < 0 or symbol >= self.alphabet_size:
            raise DomainError(f"symbol {symbol} outside alphabet")
        cdef int nctx = self._load_ctx(context)
        if self.n_batches == self.cap_batches:
            self.cap_batches *= 2
            self.batch_start = <long*>realloc(self.batch_start, self.cap_batches * sizeof(long))
            if self.batch_start == NULL:
                raise MemoryError()
        self.batch_start[self.n_batches] = self.n_ops
        self.n_batches += 1
        self._observe_impl(self.s_ctx, nctx, symbol, True)
        return self.n_batches - 1

    def rollback(self, long token):
        """Reverse the most recent unconsumed observe."""
        if token != self.n_batches - 1 or token < 0:
            raise UsageError(f"rollback token {token} is not top of stack")
        cdef long start = self.batch_start[token]
        cdef long j
        cdef long node, parent
        for j in range(self.n_ops - 1, start - 1, -1):
            node = self.op_node[j]
            parent = self.op_parent[j]
            if parent == NO_NODE:
                self.nodes[node].count -= 1
            else:
                self._unlink_child(parent, node)
        self.n_ops = start
        self.n_batches -= 1

    def pending_tokens(self):
        return self.n_batches

    def train(self, symbols):
        """Observe every symbol with its preceding context, without journaling."""
        if self.n_batches:
            raise UsageError("train with unconsumed rollback tokens")
        cdef long n = len(symbols)
        cdef int* buf = <int*>malloc((n if n else 1) * sizeof(int))
        if buf == NULL:
            raise MemoryError()
        cdef long i, start
        cdef long s
        try:
            for i in range(n):
                s = symbols[i]
                if s < 0 or s >= self.alphabet_size:
                    raise DomainError(f"symbol {s} outside alphabet")
                buf[i] = <int>s
            for i in range(n):
                start = i - self.order if i > self.order else 0
                self._observe_impl(buf + start, <int>(i - start), buf[i], False)
        finally:
            free(buf)

    # -- prediction -----------------------------------------------------------------

    cdef void _predict_impl(self, int* ctx, int nctx) except *:
        cdef int asize = self.alphabet_size
        cdef double* probs = self.s_probs
        cdef unsigned char* excl = self.s_excl
        cdef double mass = 1.0
        cdef int remaining = asize
        cdef int kmax = self.order if self.order < nctx else nctx
        cdef int k, i, s
        cdef long node, c
        cdef long total
        cdef int distinct
        cdef long cnt
        cdef double denom, share
        memset(probs, 0, asize * sizeof(double))
        memset(excl, 0, asize)
        for k in range(kmax, -1, -1):
            node = 0
            for i in range(nctx - k, nctx):
                node = self._find_child(node, ctx[i])
                if node == NO_NODE:
                    break
            if node == NO_NODE:
                continue
            total = 0
            distinct = 0
            c = self.nodes[node].first_child
            while c != NO_NODE:
                cnt = self.nodes[c].count
                if cnt > 0 and not excl[self.nodes[c].sym]:
                    total += cnt
                    distinct += 1
                c = self.nodes[c].next_sibling
            if distinct == 0:
                continue
            if distinct == remaining:
                denom = 2.0 * total - distinct
                c = self.nodes[node].first_child
                while c != NO_NODE:
                    cnt = self.nodes[c].count
                    s = self.nodes[c].sym
                    if cnt > 0 and not excl[s]:
                        probs[s] = mass * ((2.0 * cnt - 1.0) / denom)
                        excl[s] = 1
                    c = self.nodes[c].next_sibling
                remaining = 0
                mass = 0.0
                break
            denom = 2.0 * total
            c = self.nodes[node].first_child
            while c != NO_NODE:
                cnt = self.nodes[c].count
                s = self.nodes[c].sym
                if cnt > 0 and not excl[s]:
                    probs[s] = mass * ((2.0 * cnt - 1.0) / denom)
                    excl[s] = 1
                c = self.nodes[c].next_sibling
            remaining -= distinct
            mass = mass * (<double>distinct / denom)
        if remaining > 0:
            share = mass / remaining
            for s in range(asize):
                if not excl[s]:
                    probs[s] = share

    def predict(self, context):
        """PPMD mixture over the alphabet for the given context."""
        cdef int nctx = self._load_ctx(context)
        self._predict_impl(self.s_ctx, nctx)
        cdef int s
        return [self.s_probs[s] for s in range(self.alphabet_size)]

    cdef void _quantize_impl(self, long total) except *:
        # operates on s_probs -> s_w; mirrors the pure kernel's rounding
        cdef int n = self.alphabet_size
        cdef double x
        cdef long f, acc = 0, leftover
        cdef int i, j, idx
        for i in range(n):
            x = self.s_probs[i] * total
            f = <long>x
            self.s_w[i] = f
            self.s_rem[i] = x - f
            acc += f
        for i in range(n):
            if self.s_w[i] == 0:
                self.s_w[i] = 1
                acc += 1
        leftover = total - acc
        if leftover > 0:
            self._argsort_desc()
            idx = 0
            while leftover > 0:
                self.s_w[self.s_order[idx % n]] += 1
                leftover -= 1
                idx += 1
        elif leftover < 0:
            self._argsort_asc()
            while leftover < 0:
                for j in range(n):
                    i = self.s_order[j]
                    if self.s_w[i] > 1:
                        self.s_w[i] -= 1
                        leftover += 1
                        if leftover == 0:
                            break

    cdef void _argsort_desc(self):
        # order by (-rem, index): insertion sort, exact float comparisons
        cdef int n = self.alphabet_size
        cdef int i, j, v
        cdef double* rem = self.s_rem
        for i in range(n):
            self.s_order[i] = i
        for i in range(1, n):
            v = self.s_order[i]
            j = i - 1
            while j >= 0 and (rem[self.s_order[j]] < rem[v]
                              or (rem[self.s_order[j]] == rem[v] and self.s_order[j] > v)):
                self.s_order[j + 1] = self.s_order[j]
                j -= 1
            self.s_order[j + 1] = v

    cdef void _argsort_asc(self):
        # order by (rem, index)
        cdef int n = self.alphabet_size
        cdef int i, j, v
        cdef double* rem = self.s_rem
        for i in range(n):
            self.s_order[i] = i
        for i in range(1, n):
            v = self.s_order[i]
            j = i - 1
            while j >= 0 and (rem[self.s_order[j]] > rem[v]
                              or (rem[self.s_order[j]] == rem[v] and self.s_order[j] > v)):
                self.s_order[j + 1] = self.s_order[j]
                j -= 1
            self.s_order[j + 1] = v

    def quantize(self, probs, long total):
        """Deterministic largest-remainder rounding with a minimum weight of 1."""
        cdef int n = self.alphabet_size
        if len(probs) != n:
            raise QuantizationError("distribution length != alphabet size")
        if total < n:
            raise QuantizationError(f"total {total} < alphabet size {n}")
        cdef int i
        for i in range(n):
            self.s_probs[i] = probs[i]
        self._quantize_impl(total)
        return [self.s_w[i] for i in range(n)]

    def weights(self, context, long total):
        """quantize(predict(context), total): the shared coder/tree geometry."""
        if total < self.alphabet_size:
            raise QuantizationError(
                f"total {total} < alphabet size {self.alphabet_size}")
        cdef int nctx = self._load_ctx(context)
        self._predict_impl(self.s_ctx, nctx)
        self._quantize_impl(total)
        cdef int i
        return [self.s_w[i] for i in range(self.alphabet_size)]

    # -- serialization ---------------------------------------------------------------

    def trie_bytes(self):
        """Canonical preorder dump: per node (symbol, count, child count)."""
        out = bytearray()
        self._emit(0, out)
        return bytes(out)

    cdef void _emit(self, long node, out) except *:
        cdef long c = self.nodes[node].first_child
        cdef long nkids = 0
        while c != NO_NODE:
            nkids += 1
            c = self.nodes[c].next_sibling
        _write_varint(out, nkids)
        c = self.nodes[node].first_child
        while c != NO_NODE:
            _write_varint(out, self.nodes[c].sym)
            _write_varint(out, self.nodes[c].count)
            self._emit(c, out)
            c = self.nodes[c].next_sibling

    def load_trie(self, data, long pos=0):
        """Replace trie contents from a dump produced by trie_bytes."""
        if self.n_batches:
            raise UsageError("load with unconsumed rollback tokens")
        self.n_nodes = 0
        self.free_head = NO_NODE
        self._alloc_node(NO_NODE)
        self.node_count = 1
        return self._read(0, data, pos)

    cdef long _read(self, long node, data, long pos) except -2:
        cdef long nkids, sym, count
        cdef long child, prev = NO_NODE
        cdef long i
        nkids, pos = _read_varint(data, pos)
        for i in range(nkids):
            sym, pos = _read_varint(data, pos)
            count, pos = _read_varint(data, pos)
            child = self._alloc_node(<int>sym)
            self.nodes[child].count = <int>count
            self.node_count += 1
            # children arrive pre-sorted: append at the chain tail
            if prev == NO_NODE:
                self.nodes[node].first_child = <int>child
            else:
                self.nodes[prev].next_sibling = <int>child
            prev = child
            pos = self._read(child, data, pos)
        return pos


def _write_varint(out, long value):
    cdef long b
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _read_varint(data, long pos):
    cdef long result = 0
    cdef int shift = 0
    cdef unsigned char b
    cdef long n = len(data)
    while True:
        if pos >= n:
            raise ValueError("truncated varint")
        b = data[pos]
        pos += 1
        result |= (<long>(b & 0x7F)) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
