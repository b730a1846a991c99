import random
import sys
from pathlib import Path

import pytest

from bubbly.lang import graph_of, parse_program
from bubbly.randgen import seed_from_env

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))


def load(name):
    return parse_program((CORPUS / f"{name}.fl").read_text())


@pytest.fixture
def rng():
    return random.Random(seed_from_env())


@pytest.fixture(scope="session")
def bmi():
    return load("bmi")


BMI_EXPR = "weight x / (height x) ^ 2 > 25 where x = Alice ? parent Bob"


@pytest.fixture
def bmi_graph(bmi):
    return graph_of(BMI_EXPR, bmi)


# (program, expression) pairs for strategy differential runs
CORPUS_CASES = [
    ("coin", "coin"),
    ("coin", "coin + coin"),
    ("perm", "perm [1,2,3]"),
    ("isin", "isin 5 (Branch (4 ? 5) Leaf (Branch 5 Leaf Leaf ? Leaf))"),
    ("isin", "isin 3 (Branch 1 (Leaf ? Branch 3 Leaf Leaf) Leaf)"),
    ("sharing", "double coin"),
    ("sharing", "pair coin"),
    ("sharing", "x + x where x = 1 ? 2"),
    ("member", "member [1,2,3]"),
    ("member", "last [1,2,3]"),
    ("psort", "psort [3,1,2]"),
    ("subsets", "sum (subset [1,2,4])"),
    ("peano", "toInt (add (upto (S (S Z))) (upto (S Z)))"),
    ("colors", "solve color color color"),
    ("bools", "xor bool bool"),
    ("bmi", BMI_EXPR),
    ("bmi", "bmi (Alice ? parent Bob) > 25"),
    ("bmi", "bmi (Alice ? Bob ? Carl ? Dana) > 25"),
]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
