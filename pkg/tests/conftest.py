from pathlib import Path

import pytest

from absdist.analyzer import analyze
from absdist.parser import parse_program

ROOT = Path(__file__).resolve().parent.parent
QUICKSORT = ROOT / "corpus" / "quicksort"
MICRO = ROOT / "corpus" / "micro"


def load(path):
    return parse_program(Path(path).read_text())


@pytest.fixture(scope="session")
def trusted_program():
    return load(QUICKSORT / "quicksort_trust.pl")


@pytest.fixture(scope="session")
def untrusted_program():
    return load(QUICKSORT / "quicksort_noimport.pl")


@pytest.fixture(scope="session")
def trusted(trusted_program):
    return analyze(trusted_program, domain="gr")


@pytest.fixture(scope="session")
def untrusted(untrusted_program):
    return analyze(untrusted_program, domain="gr")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
