"""Independent integer-cascade oracle for interval geometry.

Computes the interval a text owns by cascading quantize(predict, width)
level by level in plain arithmetic, with no ZoomTree bookkeeping. Tree
tests compare node geometry and locate() paths against this.
"""

from __future__ import annotations

from zoomwrite.coder import quantize


def interval_of(model, seed, text, span):
    """[lo, hi) of ``text`` in root units; cascades until width < alphabet size."""
    lo = 0
    width = span
    ctx = list(seed)
    for s in text:
        if width < model.alphabet_size:
            raise ValueError("cascade bottomed out before end of text")
        w = quantize(model.predict(ctx), width)
        lo += sum(w[:s])
        width = w[s]
        ctx.append(s)
    return lo, lo + width
