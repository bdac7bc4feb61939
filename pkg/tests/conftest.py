import pathlib

import pytest

from hquc import UCInstance, parse_generators

DATA_DIR = pathlib.Path(__file__).parent / "data"
TEN_UNIT_CSV = DATA_DIR / "ten_unit.csv"


@pytest.fixture(scope="session")
def ten_unit_generators():
    with open(TEN_UNIT_CSV) as fh:
        return parse_generators(fh)


@pytest.fixture(scope="session")
def ten_unit(ten_unit_generators):
    """Factory: ten-unit instance at a given load."""

    def make(load: float) -> UCInstance:
        return UCInstance(ten_unit_generators, load)

    return make


@pytest.fixture(scope="session")
def four_unit(ten_unit_generators):
    """Factory: instance over the first four units at a given load."""

    def make(load: float) -> UCInstance:
        return UCInstance(ten_unit_generators[:4], load)

    return make
