"""Automated steering: an ideal (optionally noisy, laggy) "user" that
writes a target text through a session, measuring throughput.

The planner aims the pointer at the midpoint of the target text's interval
under the session's current tree geometry, zooming in while that point is
on screen and out to recover otherwise. With zero noise every valid target
is written exactly, at a rate governed by max_rate / model entropy.

Each simulate() call owns a private model clone and session, so
independent simulations parallelize freely.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .alphabet import Alphabet, normalize_text
from .errors import ConfigError, DomainError
from .model import PpmModel
from .session import DynamicsParams, Pointer, Session, new_session

DEFAULT_LOOKAHEAD = 5
DEFAULT_FRAME_DT = 1.0 / 30.0
BUDGET_FACTOR = 4.0


@dataclass(frozen=True)
class NoiseModel:
    """Isotropic pointer jitter plus reaction latency, reproducible by seed."""

    jitter_std: float = 0.0
    latency_s: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.jitter_std < 0 or self.latency_s < 0:
            raise ConfigError("noise parameters must be non-negative")


@dataclass(frozen=True)
class SimulationReport:
    target: str
    written: str
    elapsed_s: float
    chars_per_sec: float
    words_per_min: float
    model_bits_per_char: float
    wrong_words_pct: float
    completed: bool
    frames: int

    def as_line(self) -> str:
        """One machine-readable key=value record."""
        return (
            f"elapsed_s={self.elapsed_s:.3f} chars_per_sec={self.chars_per_sec:.4f} "
            f"words_per_min={self.words_per_min:.2f} model_bits_per_char={self.model_bits_per_char:.4f} "
            f"wrong_words_pct={self.wrong_words_pct:.2f} completed={int(self.completed)} "
            f"frames={self.frames} chars={len(self.written)}"
        )


def plan_target(session: Session, remaining, lookahead: int = DEFAULT_LOOKAHEAD,
                anchor_len: int | None = None) -> Pointer:
    """Pointer that steers toward the next symbols of the target.

    The target interval is the next ``min(lookahead, len(remaining))``
    symbols' interval in the session's tree geometry; its midpoint becomes
    pointer.y (clamped into the view). x is full zoom-in when the aim point
    is on screen, full zoom-out to recover otherwise. ``anchor_len`` marks
    how much of the committed text is correct (default: all of it).

    Endgame exception: once the whole remaining text fits the window, the
    aim snaps to the target node's child boundary nearest its midpoint.
    A view shrinking around a boundary can never be captured by a child,
    so nothing beyond the target ever commits and dictation terminates.
    """
    if not len(remaining):
        raise DomainError("remaining text is empty")
    asize = session.model.alphabet_size
    for s in remaining:
        if not 0 <= s < asize:
            raise DomainError(f"symbol {s} outside alphabet")
    if anchor_len is None:
        anchor_len = len(session.committed)
    desired = tuple(session.committed[:anchor_len]) + tuple(remaining)
    tree = session.tree
    rp = tree.root_prefix
    vl, vh = session.view_lo, session.view_hi
    w = vh - vl
    if tuple(desired[: len(rp)]) != rp:
        # a wrong symbol is baked into the rebase anchor: zoom out symmetrically
        return Pointer(0.0, 0.5)
    depth_budget = (anchor_len - len(rp)) + min(lookahead, len(remaining))
    node = tree.root_node
    lo, hi = node.lo, node.hi
    reached_all = True
    for s in desired[len(rp): len(rp) + depth_budget]:
        if not tree.can_expand(node):
            reached_all = False
            break
        node = tree.expand(node)[s]
        lo, hi = node.lo, node.hi
    mid = (lo + hi) / 2.0
    aim = mid
    endgame = reached_all and len(remaining) <= lookahead
    if endgame and tree.can_expand(node):
        kids = tree.expand(node)
        aim = float(min((k.lo for k in kids[1:]), key=lambda b: abs(b - mid)))
    if vl <= aim < vh:
        y = (aim - vl) / w
        return Pointer(1.0, min(max(y, 0.0), 1.0))
    # recovery: zoom out around the edge away from the aim, so the view
    # expands toward it (the zoom's fixed point is the pointed-at edge)
    return Pointer(0.0, 1.0 if aim < vl else 0.0)


def simulate(model: PpmModel, target: str, params: DynamicsParams | None = None,
             noise: NoiseModel = NoiseModel(), frame_dt: float = DEFAULT_FRAME_DT,
             lookahead: int = DEFAULT_LOOKAHEAD) -> SimulationReport:
    """Run a full dictation of ``target`` and report throughput.

    Deterministic given the noise seed. The time budget is
    4 * len * H / max_rate with H the adaptive cross-entropy of the target;
    running out of budget is reported (completed=False), not an error.
    """
    if frame_dt <= 0:
        raise ConfigError("frame_dt must be positive")
    if params is None:
        params = DynamicsParams()
    target_syms = normalize_text(target, model.alphabet)
    if not target_syms:
        raise DomainError("target normalizes to an empty symbol sequence")

    work = model.clone()
    bits_per_char = work.cross_entropy(target_syms, adapt=True)
    session = new_session(work, params, ())
    budget = BUDGET_FACTOR * len(target_syms) * bits_per_char / params.max_rate_bits_per_sec
    rng = random.Random(noise.seed)
    pending: deque[tuple[float, Pointer]] = deque()
    effective = Pointer(params.crosshair_x, 0.5)
    frames = 0
    target_tuple = list(target_syms)

    while session.committed != target_tuple and session.elapsed_s < budget:
        common = 0
        committed = session.committed
        while (common < len(committed) and common < len(target_tuple)
               and committed[common] == target_tuple[common]):
            common += 1
        remaining = target_tuple[common:]
        if remaining:
            planned = plan_target(session, remaining, lookahead, anchor_len=common)
        else:
            planned = Pointer(0.0, 0.5)  # overshot past the whole target: back out
        now = session.elapsed_s
        pending.append((now + noise.latency_s, planned))
        while pending and pending[0][0] <= now:
            effective = pending.popleft()[1]
        ptr = effective
        if noise.jitter_std > 0:
            ptr = Pointer(
                ptr.x + rng.gauss(0.0, noise.jitter_std),
                ptr.y + rng.gauss(0.0, noise.jitter_std),
            )
        session.step(ptr, frame_dt)
        frames += 1

    m = session.metrics()
    written = session.committed_text()
    rendered_target = model.alphabet.render(target_syms)
    return SimulationReport(
        target=rendered_target,
        written=written,
        elapsed_s=m.elapsed_s,
        chars_per_sec=m.chars_per_sec,
        words_per_min=m.words_per_min,
        model_bits_per_char=bits_per_char,
        wrong_words_pct=_wrong_words_pct(rendered_target, written, model.alphabet),
        completed=written == rendered_target,
        frames=frames,
    )


def _wrong_words_pct(target: str, written: str, alphabet: Alphabet) -> float:
    sep = alphabet.glyph(alphabet.space_index)
    tw = [w for w in target.split(sep) if w]
    ww = [w for w in written.split(sep) if w]
    n = max(len(tw), len(ww))
    if n == 0:
        return 0.0
    wrong = 0
    for i in range(n):
        if i >= len(tw) or i >= len(ww) or tw[i] != ww[i]:
            wrong += 1
    return 100.0 * wrong / n
