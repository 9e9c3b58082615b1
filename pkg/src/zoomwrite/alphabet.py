"""Symbol alphabets and deterministic text normalization.

The default alphabet is the 27-symbol one used throughout: ``a``..``z``
followed by the word separator (space). Custom alphabets come from a spec
file with one glyph per line and a ``sep <glyph>`` line for the separator.

Everything here is a pure function over immutable inputs; all of it is
safe to call concurrently from any number of threads.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CorpusDecodeError, InvalidAlphabetError

_ASCII_LOWER = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of single-character glyphs with one designated separator."""

    symbols: tuple[str, ...]
    space_index: int
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise InvalidAlphabetError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidAlphabetError("alphabet glyphs must be unique")
        if not 0 <= self.space_index < len(self.symbols):
            raise InvalidAlphabetError("separator index out of range")
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.symbols)})

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, glyph: str) -> int:
        return self._index[glyph]

    def glyph(self, symbol: int) -> str:
        return self.symbols[symbol]

    def render(self, symbols: Iterable[int]) -> str:
        """Glyph string for a symbol sequence (separator renders as its glyph)."""
        return "".join(self.symbols[s] for s in symbols)


def build_alphabet(glyphs: Sequence[str] | None = None, separator: str | None = None) -> Alphabet:
    """Construct an alphabet; with no arguments, the default a–z + space."""
    if glyphs is None:
        return Alphabet(tuple(_ASCII_LOWER) + (" ",), 26)
    glyphs = tuple(glyphs)
    if separator is None:
        raise InvalidAlphabetError("custom alphabet must designate a separator")
    if separator not in glyphs:
        raise InvalidAlphabetError(f"separator {separator!r} not among glyphs")
    return Alphabet(glyphs, glyphs.index(separator))


def load_alphabet(path: str) -> Alphabet:
    """Parse an alphabet spec file: one glyph per line, ``sep <glyph>``, ``#`` comments."""
    glyphs: list[str] = []
    separator = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if line.startswith("sep "):
                sep = line[4:]
                if sep == "":
                    sep = " "
                if separator is not None:
                    raise InvalidAlphabetError(f"line {lineno}: second separator")
                separator = sep
                glyphs.append(sep)
            else:
                glyphs.append(line)
    if separator is None:
        raise InvalidAlphabetError("alphabet file designates no separator")
    return build_alphabet(glyphs, separator)


def normalize_text(raw: str, alphabet: Alphabet | None = None) -> list[int]:
    """Map text to symbol indices: case-fold, collapse non-alphabet runs to one
    separator, and strip leading/trailing separators. Pure and idempotent."""
    if alphabet is None:
        alphabet = build_alphabet()
    index = alphabet._index
    sep = alphabet.space_index
    out: list[int] = []
    pending_sep = False
    for ch in raw:
        s = index.get(ch.lower(), sep)
        if s == sep:
            pending_sep = True
            continue
        if pending_sep and out:
            out.append(sep)
        pending_sep = False
        out.append(s)
    return out


@dataclass(frozen=True)
class LoadedCorpus:
    """normalize_text output plus before/after size accounting."""

    symbols: list[int]
    raw_chars: int
    normalized_chars: int


def load_corpus(source, alphabet: Alphabet | None = None) -> LoadedCorpus:
    """Read a byte stream or path, decode as UTF-8, and normalize."""
    if isinstance(source, (str, bytes)) and not isinstance(source, bytes):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusDecodeError(f"undecodable byte at offset {exc.start}", exc.start) from exc
    symbols = normalize_text(text, alphabet)
    return LoadedCorpus(symbols, len(text), len(symbols))
