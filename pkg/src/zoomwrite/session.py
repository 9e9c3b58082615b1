"""The live writing process: pointer-driven zooming, commit/uncommit,
model adaptation, and per-frame render payloads.

Horizontal pointer position sets a signed zoom rate in bits/second
(right of the crosshair zooms in, left zooms out); vertical position
picks the fixed point of the zoom. Text commits when a node's interval
fully contains the view and uncommits (with exact model unlearning) when
zooming back out breaks containment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError
from .model import PpmModel, UndoToken
from .tree import ZoomTree

DEFAULT_MAX_RATE = 8.0
DEFAULT_CROSSHAIR_X = 0.5
DEFAULT_MIN_VIEW_WIDTH = 1
DEFAULT_FRAME_DT_CAP = 0.1


@dataclass
class DynamicsParams:
    max_rate_bits_per_sec: float = DEFAULT_MAX_RATE
    crosshair_x: float = DEFAULT_CROSSHAIR_X
    min_view_width: int = DEFAULT_MIN_VIEW_WIDTH
    frame_dt_cap: float = DEFAULT_FRAME_DT_CAP

    def __post_init__(self):
        if not self.max_rate_bits_per_sec > 0:
            raise ConfigError("max_rate_bits_per_sec must be positive")
        if not 0 < self.crosshair_x < 1:
            raise ConfigError("crosshair_x must be in (0, 1)")
        if self.min_view_width < 1:
            raise ConfigError("min_view_width must be >= 1")
        if not self.frame_dt_cap > 0:
            raise ConfigError("frame_dt_cap must be positive")


@dataclass(frozen=True)
class Pointer:
    """Screen position in the unit square; (0, 0) is top-left."""

    x: float
    y: float

    def clamped(self) -> "Pointer":
        return Pointer(min(max(self.x, 0.0), 1.0), min(max(self.y, 0.0), 1.0))


@dataclass(frozen=True)
class SessionMetrics:
    elapsed_s: float
    committed_chars: int
    bits_entered: float
    chars_per_sec: float
    bits_per_char_effective: float
    words_per_min: float


@dataclass(frozen=True)
class Box:
    """One renderable rectangle in unit screen coordinates."""

    x0: float
    y0: float
    x1: float
    y1: float
    symbol: int
    glyph: str
    depth: int


@dataclass(frozen=True)
class FrameResult:
    boxes: tuple[Box, ...]
    committed: str
    delta_removed: int
    delta_added: str
    metrics: SessionMetrics
    view: tuple[int, int]


class Session:
    """One writer's state: a view interval over a zoom tree plus the text
    committed so far and the undo tokens that can unlearn it.

    step() calls must be serialized; sessions over distinct model
    instances run concurrently, and a session may move between threads
    between calls.
    """

    def __init__(self, model: PpmModel, params: DynamicsParams | None = None,
                 seed_context: Sequence[int] = ()):
        self.model = model
        self.alphabet = model.alphabet
        self.params = params if params is not None else DynamicsParams()
        self.seed = tuple(seed_context)
        self.tree = ZoomTree(model, self.seed)
        self.view_lo = 0
        self.view_hi = self.tree.span
        self.committed: list[int] = []
        self._tokens: list[UndoToken] = []
        self.elapsed_s = 0.0
        self.bits_entered = 0.0

    # -- frame loop ---------------------------------------------------------

    def step(self, pointer: Pointer, dt: float) -> FrameResult:
        """Advance one frame: zoom, rebase, sync committed text, render."""
        p = pointer.clamped()
        dt = min(dt, self.params.frame_dt_cap)
        if dt < 0:
            dt = 0.0
        cx = self.params.crosshair_x
        tilt = (p.x - cx) / (1.0 - cx)
        tilt = min(max(tilt, -1.0), 1.0)
        rate = self.params.max_rate_bits_per_sec * tilt

        w = self.view_hi - self.view_lo
        fixed = self.view_lo + p.y * w
        new_w = int(round(w * 2.0 ** (-rate * dt)))
        if new_w < self.params.min_view_width:
            new_w = self.params.min_view_width
        lo = int(round(fixed - p.y * new_w))
        self.view_lo, self.view_hi = self.tree.rebase(lo, lo + new_w)

        removed, added = self._sync_committed()
        self.elapsed_s += dt
        self.bits_entered += rate * dt
        return FrameResult(
            boxes=self._boxes(),
            committed=self.committed_text(),
            delta_removed=removed,
            delta_added=self.alphabet.render(added),
            metrics=self.metrics(),
            view=(self.view_lo, self.view_hi),
        )

    def _sync_committed(self) -> tuple[int, list[int]]:
        """Match committed text to the deepest chain containing the view,
        observing new symbols and rolling back abandoned ones."""
        path = self.tree.containment_path(self.view_lo, self.view_hi)
        new = list(self.tree.root_prefix) + [n.symbol for n in path]
        old = self.committed
        common = 0
        while common < len(new) and common < len(old) and new[common] == old[common]:
            common += 1
        removed = len(old) - common
        for _ in range(removed):
            self.model.rollback(self._tokens.pop())
            old.pop()
        added = new[common:]
        for s in added:
            ctx = self.seed + tuple(old)
            self._tokens.append(self.model.observe(ctx, s))
            old.append(s)
        return removed, added

    def _boxes(self) -> tuple[Box, ...]:
        w = self.view_hi - self.view_lo
        out = []
        for symbol, lo, hi, depth in self.tree.visible(self.view_lo, self.view_hi):
            y0 = (lo - self.view_lo) / w
            y1 = (hi - self.view_lo) / w
            height = y1 - y0
            out.append(
                Box(
                    x0=max(0.0, 1.0 - height),
                    y0=max(0.0, y0),
                    x1=1.0,
                    y1=min(1.0, y1),
                    symbol=symbol,
                    glyph=self.alphabet.glyph(symbol),
                    depth=depth,
                )
            )
        return tuple(out)

    # -- queries ------------------------------------------------------------

    def committed_text(self) -> str:
        return self.alphabet.render(self.committed)

    def metrics(self) -> SessionMetrics:
        chars = len(self.committed)
        elapsed = self.elapsed_s
        cps = chars / elapsed if elapsed > 0 else 0.0
        bpc = self.bits_entered / chars if chars else 0.0
        return SessionMetrics(
            elapsed_s=elapsed,
            committed_chars=chars,
            bits_entered=self.bits_entered,
            chars_per_sec=cps,
            bits_per_char_effective=bpc,
            words_per_min=cps * 60.0 / 5.0,
        )


def new_session(model: PpmModel, params: DynamicsParams | None = None,
                seed_context: Sequence[int] = ()) -> Session:
    """Start a writing session: full-span view, nothing committed; the seed
    context conditions predictions without appearing in the output."""
    return Session(model, params, seed_context)
