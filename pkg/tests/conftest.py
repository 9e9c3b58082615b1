"""Shared fixtures: the bundled novel corpus and models trained on it.

Training is expensive, so trained models are built once per session and
handed to tests as snapshot bytes; tests that need a mutable model clone
from the snapshot.
"""

from __future__ import annotations

import os
import pathlib

import pytest

from zoomwrite.alphabet import build_alphabet, normalize_text
from zoomwrite.model import PpmModel

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"
CORPUS_PATH = DATA_DIR / "moby_dick.txt"


@pytest.fixture(scope="session")
def alphabet():
    return build_alphabet()


@pytest.fixture(scope="session")
def corpus_symbols(alphabet):
    raw = CORPUS_PATH.read_text(encoding="utf-8")
    return normalize_text(raw, alphabet)


@pytest.fixture(scope="session")
def train_half(corpus_symbols):
    return corpus_symbols[: len(corpus_symbols) // 2]


@pytest.fixture(scope="session")
def heldout_half(corpus_symbols):
    return corpus_symbols[len(corpus_symbols) // 2 :]


@pytest.fixture(scope="session")
def trained_snapshot(train_half, alphabet):
    model = PpmModel(5, alphabet)
    model.train(train_half)
    return model.snapshot()


@pytest.fixture(scope="session")
def trained_model_factory(trained_snapshot, alphabet):
    def make() -> PpmModel:
        return PpmModel.from_snapshot(trained_snapshot, alphabet)

    return make


@pytest.fixture()
def trained_model(trained_model_factory):
    return trained_model_factory()
