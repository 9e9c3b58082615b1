#!/usr/bin/env python3
"""Benchmark: pure-Python kernel vs compiled extension.

Times the operations that dominate the engine's inner loop on a slice of
the bundled corpus: training, full-distribution prediction, integer
weight allocation, and a complete encode/decode roundtrip.

Usage: python bench/bench_kernels.py [--chars 200000]
"""

from __future__ import annotations

import argparse
import pathlib
import random
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from zoomwrite import _pure, coder
from zoomwrite.alphabet import build_alphabet, normalize_text
from zoomwrite.model import PpmModel

try:
    from zoomwrite import _fast
except ImportError:
    _fast = None

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "moby_dick.txt"


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return time.perf_counter() - t0, out


def bench_backend(kernel_cls, symbols, contexts, coder_text):
    alphabet = build_alphabet()
    model = PpmModel(5, alphabet, kernel_cls=kernel_cls)
    results = {}
    results["train"], _ = timed(lambda: model.train(symbols))

    def predict_all():
        k = model._kernel
        for ctx in contexts:
            k.predict(ctx)

    results["predict"], _ = timed(predict_all)

    def weights_all():
        k = model._kernel
        for ctx in contexts:
            k.weights(ctx, 1 << 16)

    results["weights"], _ = timed(weights_all)

    results["encode"], stream = timed(lambda: coder.encode(model, coder_text))
    results["decode"], _ = timed(lambda: coder.decode(model, stream))
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chars", type=int, default=200_000,
                        help="corpus symbols to train on")
    parser.add_argument("--predicts", type=int, default=20_000,
                        help="prediction calls to time")
    parser.add_argument("--coder-chars", type=int, default=20_000,
                        help="symbols for the encode/decode roundtrip")
    args = parser.parse_args()

    alphabet = build_alphabet()
    symbols = normalize_text(DATA.read_text(encoding="utf-8"), alphabet)[: args.chars]
    rng = random.Random(1)
    contexts = []
    for _ in range(args.predicts):
        i = rng.randrange(len(symbols) - 6)
        contexts.append(symbols[i : i + rng.randrange(7)])
    coder_text = symbols[: args.coder_chars]

    backends = [("pure", _pure.PpmKernel)]
    if _fast is not None:
        backends.append(("compiled", _fast.PpmKernel))
    else:
        print("compiled kernel not built; benchmarking pure only", file=sys.stderr)

    all_results = {}
    for name, cls in backends:
        print(f"benchmarking {name} kernel ...", file=sys.stderr)
        all_results[name] = bench_backend(cls, symbols, contexts, coder_text)

    ops = ["train", "predict", "weights", "encode", "decode"]
    scale = {
        "train": (len(symbols), "sym/s"),
        "predict": (args.predicts, "call/s"),
        "weights": (args.predicts, "call/s"),
        "encode": (args.coder_chars, "sym/s"),
        "decode": (args.coder_chars, "sym/s"),
    }
    header = f"{'op':<10}" + "".join(f"{n:>16}" for n in all_results) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for op in ops:
        row = f"{op:<10}"
        for name in all_results:
            n, unit = scale[op]
            rate = n / all_results[name][op]
            row += f"{rate:>9.0f} {unit:<6}"
        if len(all_results) == 2:
            row += f"{all_results['pure'][op] / all_results['compiled'][op]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
