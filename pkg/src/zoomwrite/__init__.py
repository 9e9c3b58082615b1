"""Zooming text entry engine.

Text is written by steering a continuously zooming view over an
alphabetically ordered tree of nested intervals whose widths follow an
adaptive PPM character model — the decoding geometry of an arithmetic
coder turned into a navigation task. The package also ships the matching
coder itself, a steering simulator for throughput measurement, and a CLI
with a frame-protocol server for interactive frontends.
"""

from .alphabet import Alphabet, build_alphabet, load_alphabet, load_corpus, normalize_text
from .coder import Bitstream, decode, encode, quantize
from .kernel import KERNEL_BACKEND
from .model import PpmModel, new_model

__all__ = [
    "Alphabet",
    "Bitstream",
    "KERNEL_BACKEND",
    "PpmModel",
    "build_alphabet",
    "decode",
    "encode",
    "load_alphabet",
    "load_corpus",
    "new_model",
    "normalize_text",
    "quantize",
]

__version__ = "0.1.0"
