import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rcpsp_hybrid.model import Activity, ProjectInstance


@pytest.fixture
def tiny1():
    """Two parallel activities competing for one resource of capacity 4."""
    return ProjectInstance(
        [
            Activity(0, 0, (0,)),
            Activity(1, 2, (2,)),
            Activity(2, 3, (3,)),
            Activity(3, 0, (0,)),
        ],
        {(0, 1), (0, 2), (1, 3), (2, 3)},
        (4,),
        name="tiny1",
    )


@pytest.fixture
def tiny2():
    """Chain of three activities with zero demands; makespan 9 forced."""
    return ProjectInstance(
        [
            Activity(0, 0, (0,)),
            Activity(1, 2, (0,)),
            Activity(2, 3, (0,)),
            Activity(3, 4, (0,)),
            Activity(4, 0, (0,)),
        ],
        {(0, 1), (1, 2), (2, 3), (3, 4)},
        (1,),
        name="tiny2",
    )


FIXTURE_A = """\
************************************************************************
file with basedata            : fixture-a.bas
initial value random generator: 1
************************************************************************
projects                      :  1
jobs (incl. supersource/sink ):  4
horizon                       :  5
RESOURCES
  - renewable                 :  1   R
  - nonrenewable              :  0   N
  - doubly constrained        :  0   D
************************************************************************
PRECEDENCE RELATIONS:
jobnr.    #modes  #successors   successors
   1        1          2           2   3
   2        1          1           4
   3        1          1           4
   4        1          0
************************************************************************
REQUESTS/DURATIONS:
jobnr. mode duration  R 1
------------------------------------------------------------------------
  1      1     0       0
  2      1     2       2
  3      1     3       3
  4      1     0       0
************************************************************************
RESOURCEAVAILABILITIES:
  R 1
   4
************************************************************************
"""


@pytest.fixture
def fixture_a_text():
    return FIXTURE_A
