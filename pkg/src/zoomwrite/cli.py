"""Command-line harness: training, compression, entropy, simulation, serving.

Model snapshots are the only currency between commands, so every
experiment is reproducible from files. Results go to stdout, diagnostics
to stderr; exit codes are 0 (ok), 1 (runtime/I-O failure), 2 (usage).
"""

from __future__ import annotations

import argparse
import sys

from . import coder
from .alphabet import build_alphabet, load_alphabet, load_corpus
from .errors import ZoomwriteError
from .kernel import KERNEL_BACKEND
from .model import DEFAULT_ORDER, PpmModel
from .oracle import DEFAULT_FRAME_DT, DEFAULT_LOOKAHEAD, NoiseModel, simulate
from .session import DynamicsParams


def _alphabet_from(args):
    return load_alphabet(args.alphabet) if getattr(args, "alphabet", None) else build_alphabet()


def _load_model(args):
    return PpmModel.load(args.snapshot, _alphabet_from(args))


def cmd_train(args) -> int:
    alphabet = _alphabet_from(args)
    corpus = load_corpus(args.corpus, alphabet)
    model = PpmModel(args.order, alphabet)
    model.train(corpus.symbols)
    model.save(args.output)
    print(
        f"trained order-{args.order} model on {corpus.normalized_chars} symbols "
        f"({corpus.raw_chars} raw chars), {model.node_count} trie nodes -> {args.output}"
    )
    return 0


def cmd_entropy(args) -> int:
    model = _load_model(args)
    text = load_corpus(args.text, model.alphabet)
    bits = model.cross_entropy(text.symbols, adapt=args.adapt)
    print(f"{bits:.4f}")
    return 0


def cmd_compress(args) -> int:
    model = _load_model(args)
    text = load_corpus(args.input, model.alphabet)
    stream = coder.encode(model, text.symbols)
    coder.write_stream(args.output, stream)
    nbytes = len(stream.to_bytes())
    bpc = stream.bit_length / len(text.symbols) if text.symbols else 0.0
    print(f"{len(text.symbols)} symbols -> {nbytes} bytes ({bpc:.3f} bits/char)")
    return 0


def cmd_decompress(args) -> int:
    model = _load_model(args)
    stream = coder.read_stream(args.input)
    symbols = coder.decode(model, stream)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(model.alphabet.render(symbols))
    print(f"{stream.symbol_count} symbols -> {args.output}")
    return 0


def cmd_simulate(args) -> int:
    model = _load_model(args)
    with open(args.target, encoding="utf-8") as fh:
        target = fh.read()
    params = DynamicsParams(max_rate_bits_per_sec=args.rate)
    reports = []
    for run in range(args.runs):
        noise = NoiseModel(jitter_std=args.jitter, latency_s=args.latency,
                           seed=args.seed + run)
        rep = simulate(model, target, params, noise,
                       frame_dt=args.frame_dt, lookahead=args.lookahead)
        reports.append(rep)
        print(f"run={run} seed={args.seed + run} {rep.as_line()}")
    mean_wpm = sum(r.words_per_min for r in reports) / len(reports)
    completed = sum(r.completed for r in reports)
    print(
        f"# {completed}/{args.runs} completed, mean {mean_wpm:.1f} words/min "
        f"at rate {args.rate} bits/s (model {reports[0].model_bits_per_char:.2f} bits/char)",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    from . import protocol

    model = _load_model(args)
    params = DynamicsParams(max_rate_bits_per_sec=args.rate)
    if args.stdio:
        protocol.serve_streams(model, params, sys.stdin, sys.stdout)
        return 0
    print(f"serving frame protocol on 127.0.0.1:{args.port}", file=sys.stderr)
    protocol.serve_tcp(model, params, args.port, once=args.once)
    return 0


def cmd_info(args) -> int:
    model = _load_model(args)
    print(f"order: {model.order}")
    print(f"alphabet_size: {model.alphabet_size}")
    print(f"trie_nodes: {model.node_count}")
    print(f"kernel: {KERNEL_BACKEND}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zoomwrite",
        description="Zooming text entry engine and its compression twin.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_alphabet(p):
        p.add_argument("--alphabet", help="alphabet spec file (default: a-z + space)")

    p = sub.add_parser("train", help="train a model snapshot from a corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    add_alphabet(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("entropy", help="bits/char of a text under a snapshot")
    p.add_argument("snapshot")
    p.add_argument("text")
    p.add_argument("--adapt", action="store_true", help="adapt while evaluating")
    add_alphabet(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("compress", help="arithmetic-code a text file")
    p.add_argument("snapshot")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    add_alphabet(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a bitstream file")
    p.add_argument("snapshot")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    add_alphabet(p)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("simulate", help="automated dictation throughput runs")
    p.add_argument("snapshot")
    p.add_argument("--target", required=True, help="file with the dictation text")
    p.add_argument("--rate", type=float, default=8.0, help="max zoom rate, bits/s")
    p.add_argument("--jitter", type=float, default=0.0, help="pointer noise std dev")
    p.add_argument("--latency", type=float, default=0.0, help="pointer latency, s")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--lookahead", type=int, default=DEFAULT_LOOKAHEAD)
    p.add_argument("--frame-dt", type=float, default=DEFAULT_FRAME_DT)
    add_alphabet(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="frame-protocol server for a frontend")
    p.add_argument("snapshot")
    p.add_argument("--port", type=int, default=8772)
    p.add_argument("--stdio", action="store_true", help="serve over stdin/stdout")
    p.add_argument("--once", action="store_true", help="exit after one client")
    p.add_argument("--rate", type=float, default=8.0)
    add_alphabet(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("info", help="describe a model snapshot")
    p.add_argument("snapshot")
    add_alphabet(p)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ZoomwriteError as exc:
        print(f"zoomwrite: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"zoomwrite: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
