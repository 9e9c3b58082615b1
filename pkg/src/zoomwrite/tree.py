"""The zooming interval tree: every text prefix owns a subinterval of the
root span, alphabetically ordered, with integer widths allocated from the
model's predictions by the coder's quantize rule.

All geometry is exact 64-bit integer arithmetic over a root span of 2^30
units. Unbounded zoom depth comes from rebasing: when the view sinks into
one child, that child is rescaled to the full span and its symbol joins
``root_prefix``; zooming back out reconstructs the parent. Rebasing
re-quantizes child widths at the new scale, so the invariant carried
across rebases is the text a point spells, not raw coordinates.

A tree belongs to one session and is mutated by one caller at a time
(expansion memoizes); it may move between threads between calls.
"""

from __future__ import annotations

from typing import Sequence

from .errors import DomainError, MinWidthError
from .model import PpmModel

SPAN_BITS = 30
SPAN = 1 << SPAN_BITS


class ZoomNode:
    """A text prefix's interval in current root coordinates."""

    __slots__ = ("symbol", "prefix", "lo", "hi", "children")

    def __init__(self, symbol: int | None, prefix: tuple[int, ...], lo: int, hi: int):
        self.symbol = symbol
        self.prefix = prefix
        self.lo = lo
        self.hi = hi
        self.children: list[ZoomNode] | None = None

    @property
    def width(self) -> int:
        return self.hi - self.lo

    def contains(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def __repr__(self):
        return f"ZoomNode({self.prefix}, [{self.lo}, {self.hi}))"


class ZoomTree:
    """Lazily expanded prefix tree under a rebasable root."""

    def __init__(self, model: PpmModel, seed: Sequence[int] = ()):
        self.model = model
        self.seed = tuple(seed)
        self.span = SPAN
        self.root_prefix: tuple[int, ...] = ()
        self.root_node = ZoomNode(None, (), 0, SPAN)

    # -- expansion ---------------------------------------------------------

    def expand(self, node: ZoomNode) -> list[ZoomNode]:
        """Materialize the node's children once; idempotent.

        Child widths are quantize(predict(context), node width) laid out in
        alphabet order from node.lo, so they tile the node exactly and every
        continuation keeps a positive width.
        """
        if node.children is not None:
            return node.children
        width = node.hi - node.lo
        asize = self.model.alphabet_size
        if width < asize:
            raise MinWidthError(f"node width {width} < alphabet size {asize}")
        weights = self.model.weights(self.seed + node.prefix, width)
        children = []
        lo = node.lo
        for sym, w in enumerate(weights):
            children.append(ZoomNode(sym, node.prefix + (sym,), lo, lo + w))
            lo += w
        node.children = children
        return children

    def can_expand(self, node: ZoomNode) -> bool:
        return node.hi - node.lo >= self.model.alphabet_size

    # -- queries -----------------------------------------------------------

    def locate(self, point: int, min_width: int) -> list[ZoomNode]:
        """Path from the root to the deepest node containing ``point`` with
        width >= min_width, expanding lazily along the way."""
        if not 0 <= point < self.span:
            raise DomainError(f"point {point} outside [0, {self.span})")
        node = self.root_node
        path = [node]
        while self.can_expand(node):
            child = self._child_at(node, point)
            if child.hi - child.lo < min_width:
                break
            path.append(child)
            node = child
        return path

    def _child_at(self, node: ZoomNode, point: int) -> ZoomNode:
        for child in self.expand(node):
            if child.lo <= point < child.hi:
                return child
        raise AssertionError("children do not tile the parent")

    def containment_path(self, view_lo: int, view_hi: int) -> list[ZoomNode]:
        """Chain of descendants whose intervals fully contain the view."""
        node = self.root_node
        path = []
        while self.can_expand(node):
            found = None
            for child in self.expand(node):
                if child.contains(view_lo, view_hi):
                    found = child
                    break
            if found is None:
                break
            path.append(found)
            node = found
        return path

    def spelled(self, path: Sequence[ZoomNode]) -> tuple[int, ...]:
        """Absolute text prefix spelled by a locate/containment path."""
        if path and path[0].symbol is None:
            path = path[1:]
        return self.root_prefix + tuple(n.symbol for n in path)

    # -- rebasing ----------------------------------------------------------

    def rebase(self, view_lo: int, view_hi: int) -> tuple[int, int]:
        """Re-anchor the root so the view stays well inside [0, span).

        A view escaping the span pops anchors (reconstructing parents by
        re-expansion); a view inside one child at under half the span pushes
        that child to be the root. Returns the view mapped through the same
        affine rescalings. At the global root the view is clamped instead.
        """
        span = self.span
        while view_lo < 0 or view_hi > span:
            if not self.root_prefix:
                width = view_hi - view_lo
                if width >= span:
                    view_lo, view_hi = 0, span
                elif view_lo < 0:
                    view_lo, view_hi = 0, width
                else:
                    view_lo, view_hi = span - width, span
                break
            sym = self.root_prefix[-1]
            self.root_prefix = self.root_prefix[:-1]
            parent = ZoomNode(None, self.root_prefix, 0, span)
            self.root_node = parent
            child = self.expand(parent)[sym]
            w = child.hi - child.lo
            view_lo = child.lo + (view_lo * w) // span
            view_hi = child.lo + (view_hi * w) // span
            if view_hi <= view_lo:
                view_hi = view_lo + 1
        while 2 * (view_hi - view_lo) < span:
            target = None
            for child in self.expand(self.root_node):
                if child.contains(view_lo, view_hi):
                    target = child
                    break
            if target is None:
                break
            cw = target.hi - target.lo
            view_lo = ((view_lo - target.lo) * span) // cw
            view_hi = ((view_hi - target.lo) * span) // cw
            self.root_prefix = self.root_prefix + (target.symbol,)
            self.root_node = ZoomNode(None, self.root_prefix, 0, span)
        return view_lo, view_hi

    # -- rendering ---------------------------------------------------------

    def visible(
        self,
        view_lo: int,
        view_hi: int,
        min_frac: float = 1 / 256,
        recurse_frac: float = 1 / 16,
        max_depth: int = 24,
    ) -> list[tuple[int, int, int, int]]:
        """(symbol, lo, hi, depth) for nodes worth drawing in this view.

        Depth counts from 1 at the root's children. Thresholds bound the
        payload: children thinner than ``min_frac`` of the view are dropped,
        and only children taller than ``recurse_frac`` are opened further.
        """
        width = view_hi - view_lo
        out: list[tuple[int, int, int, int]] = []

        def walk(node: ZoomNode, depth: int) -> None:
            if depth > max_depth or not self.can_expand(node):
                return
            for child in self.expand(node):
                lo = child.lo if child.lo > view_lo else view_lo
                hi = child.hi if child.hi < view_hi else view_hi
                if hi <= lo:
                    continue
                frac = (hi - lo) / width
                if frac < min_frac:
                    continue
                out.append((child.symbol, child.lo, child.hi, depth))
                if frac >= recurse_frac:
                    walk(child, depth + 1)

        walk(self.root_node, 1)
        return out


def root(model: PpmModel, seed: Sequence[int] = ()) -> ZoomTree:
    """Fresh tree over the whole library: empty prefix, full span."""
    return ZoomTree(model, seed)
