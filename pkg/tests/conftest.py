from pathlib import Path

import pytest

from termlab.cli import corpus_dir
from termlab.program import parse
from termlab.transinv import parse_invariant
from termlab.tropical import parse_matrix

CORPUS = corpus_dir()
PROGRAMS = ["prog2", "prog3", "prog4", "prog5", "prog6", "not_transitive"]


def load(name: str):
    return parse((CORPUS / f"{name}.tl").read_text())


def matrix(name: str):
    return parse_matrix((CORPUS / "matrices" / f"{name}.txt").read_text())


def invariant(name: str):
    return parse_invariant((CORPUS / "invariants" / f"{name}.inv").read_text())


@pytest.fixture(scope="session")
def corpus():
    return {name: load(name) for name in PROGRAMS}
