"""Shared desk-scale games used throughout the suite."""

import numpy as np
import pytest

from evorank import new_metagame

RPS_MATRIX = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]

# rock is strongly beaten by paper, paper weakly beaten by scissors
BIASED_RPS_MATRIX = [[0, -0.5, 1], [0.5, 0, -0.1], [-1, 0.1, 0]]

BOS_ROW = [[3, 0], [0, 2]]
BOS_COL = [[2, 0], [0, 3]]

COORD = [[1, -1], [-1, 1]]

PENNIES_ROW = [[1, -1], [-1, 1]]
PENNIES_COL = [[-1, 1], [1, -1]]


@pytest.fixture
def rps():
    return new_metagame(2, ["R", "P", "S"], [RPS_MATRIX], symmetric_flag=True)


@pytest.fixture
def biased_rps():
    return new_metagame(2, ["R", "P", "S"], [BIASED_RPS_MATRIX], symmetric_flag=True)


@pytest.fixture
def bos():
    return new_metagame(
        2, [["O", "M"], ["O", "M"]], [BOS_ROW, BOS_COL], symmetric_flag=False
    )


@pytest.fixture
def coordination():
    # numerically symmetric payoffs, analyzed as two explicit populations
    return new_metagame(
        2, [["A", "B"], ["A", "B"]], [COORD, COORD], symmetric_flag=False
    )


@pytest.fixture
def matching_pennies():
    return new_metagame(
        2, [["H", "T"], ["H", "T"]], [PENNIES_ROW, PENNIES_COL], symmetric_flag=False
    )


def random_game(rng: np.random.Generator, max_players: int = 3, max_strategies: int = 4):
    """Random asymmetric game with payoffs uniform on [-1, 1]."""
    k = int(rng.integers(1, max_players + 1))
    shape = tuple(int(rng.integers(2, max_strategies + 1)) for _ in range(k))
    labels = [[f"p{p}s{s}" for s in range(n)] for p, n in enumerate(shape)]
    tensors = [rng.uniform(-1.0, 1.0, size=shape) for _ in range(k)]
    return new_metagame(k, labels, tensors, symmetric_flag=False)
