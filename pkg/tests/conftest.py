import math

import numpy as np
import pytest

from expurgate.channel import validate_channel, validate_input
from expurgate.exponents import ExponentInputs

EX1_TRANSITION = [[0.5, 0.5], [1e-10, 1 - 1e-10]]
EX1_Q = [0.9, 0.1]


def random_channel(rng, nx, ny):
    return validate_channel(rng.dirichlet(np.ones(ny), size=nx))


def random_inputs(rng, nx, ny):
    ch = random_channel(rng, nx, ny)
    return ExponentInputs(ch, validate_input(rng.dirichlet(np.ones(nx))))


def make_inputs(transition, q):
    ch = validate_channel(transition)
    return ExponentInputs(ch, validate_input(q, ch))


@pytest.fixture
def ex1():
    return make_inputs(EX1_TRANSITION, EX1_Q)


@pytest.fixture
def bsc_uniform():
    return make_inputs([[0.9, 0.1], [0.1, 0.9]], [0.5, 0.5])


@pytest.fixture
def equal_rows():
    return make_inputs([[0.3, 0.7], [0.3, 0.7], [0.3, 0.7]], [0.2, 0.3, 0.5])


@pytest.fixture
def identity2():
    return make_inputs([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5])


LN2 = math.log(2.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
