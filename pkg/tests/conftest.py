import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

CORPUS = TESTS / "corpus"
GOLDEN = TESTS / "golden"
SCRIPTS = TESTS / "scripts"


def corpus_files():
    return sorted(CORPUS.glob("*.lil"))


def corpus_text(name: str) -> str:
    return (CORPUS / f"{name}.lil").read_text()


def golden_text(name: str) -> str:
    return (GOLDEN / f"{name}.svg").read_text()


def script_steps(name: str):
    from snsk.session import load_script

    return load_script((SCRIPTS / f"{name}.jsonl").read_text())


@pytest.fixture
def logo_grouped():
    from snsk.parser import parse

    return parse(corpus_text("logo_grouped"))


@pytest.fixture
def logo_fig3():
    from snsk.parser import parse

    return parse(corpus_text("logo_fig3"))


@pytest.fixture
def rhombus_skeleton():
    from snsk.parser import parse

    return parse(corpus_text("rhombus_skeleton"))
