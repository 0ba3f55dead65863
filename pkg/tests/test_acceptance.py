"""The acceptance criteria, one pytest per criterion.

The heavy ensemble criterion (rise and fall) runs too; expect the whole
file to take a few minutes. `qdc verify fast|full` runs the same checks
from the command line.
"""
import pytest

from qdconsensus.acceptance import CRITERIA

_BY_NAME = {name: fn for name, fn, _tier in CRITERIA}


@pytest.mark.parametrize("name", list(_BY_NAME), ids=list(_BY_NAME))
def test_criterion(name):
    ok, detail = _BY_NAME[name]()
    assert ok, detail
