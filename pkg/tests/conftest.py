import json

import pytest

import intentlang as il
from intentlang.skills import parse_skills


@pytest.fixture(scope="session")
def move_take_doc():
    with open(il.data_path("move_take.world"), "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def farm_doc():
    with open(il.data_path("farm.world"), "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def g0(move_take_doc):
    """Initial move/take state: player in lab, flask in lab, book in library."""
    return il.load_world(move_take_doc)


@pytest.fixture
def farm0(farm_doc):
    """Initial farm state: player in the field, tools in hand."""
    return il.load_world(farm_doc)


@pytest.fixture(scope="session")
def library_defs():
    with open(il.data_path("farm_library.skills"), "r", encoding="utf-8") as fh:
        return parse_skills(fh.read())


@pytest.fixture(scope="session")
def oneliner_defs():
    with open(il.data_path("oneliners.skills"), "r", encoding="utf-8") as fh:
        return parse_skills(fh.read())
