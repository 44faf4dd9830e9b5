import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from recourse.workspace import load_workspace


@pytest.fixture(scope="session")
def adult():
    return load_workspace("adult")


@pytest.fixture(scope="session")
def adult3():
    return load_workspace("adult3")


@pytest.fixture(scope="session")
def fungi():
    return load_workspace("fungi")


@pytest.fixture(scope="session")
def census_instance(adult):
    from recourse.schema import Instance

    return Instance.of(
        {
            "marital_status": "never_married",
            "capital_gain": 6000,
            "education_num": 4,
            "relationship": "unmarried",
            "sex": "male",
            "age": 28,
        }
    )


BIRDS_TEXT = """
bird(tweety).
bird(pingu).
penguin(pingu).
fly(X) :- bird(X), not ab1(X).
ab1(X) :- penguin(X).
"""

TEACHES_TEXT = """
teaches_db(mary) :- not teaches_db(john).
teaches_db(john) :- not teaches_db(mary).
"""


@pytest.fixture()
def birds_program():
    from recourse.rulelang import parse_program

    return parse_program(BIRDS_TEXT)


@pytest.fixture()
def teaches_program():
    from recourse.rulelang import parse_program

    return parse_program(TEACHES_TEXT)
