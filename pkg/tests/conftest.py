from __future__ import annotations

import pytest

from decorlogic.exceptions import build_exceptions_theory
from decorlogic.models import FiniteExceptionModel, FiniteStateModel
from decorlogic.states import build_states_theory


@pytest.fixture(scope="session")
def states2():
    """Two locations, the default bench for state laws."""
    return build_states_theory("S", ["x", "y"])


@pytest.fixture(scope="session")
def states3():
    """Three locations; pr1..pr4 observe a third one."""
    return build_states_theory("S3", ["x", "y", "z"])


@pytest.fixture(scope="session")
def exc2():
    return build_exceptions_theory("E", ["i", "j"])


@pytest.fixture(scope="session")
def model32(states2):
    return FiniteStateModel(states2, {"x": 3, "y": 2})


@pytest.fixture(scope="session")
def model22(states2):
    return FiniteStateModel(states2, {"x": 2, "y": 2})


@pytest.fixture(scope="session")
def exc_model22(exc2):
    return FiniteExceptionModel(exc2, {"i": 2, "j": 2})
