"""Shared fixtures: the standard worked seeds used across the suite."""

import pytest

from clusterforge.seeds import ExchangeMatrix, general_seed, initial_seed


# Extended exchange matrix of the open double Bruhat cell of SL3 for the
# word (1, 2, 1, -1, -2, -1): rows ordered cluster-first as
# x1, x2, x3, x4, x-2, x-1, x5, x6.
SL3_LABELS = ("x1", "x2", "x3", "x4", "x-2", "x-1", "x5", "x6")
SL3_ROWS = (
    (0, -1, 1, 0),
    (1, 0, -1, 1),
    (-1, 1, 0, -1),
    (0, -1, 1, 0),
    (-1, 1, 0, 0),
    (1, 0, 0, 0),
    (0, 1, 0, -1),
    (0, 0, 0, 1),
)

# Principal part alone (the 4x4 block above).
SL3_PRINCIPAL = tuple(row for row in SL3_ROWS[:4])

# The rank-3 cyclic matrix with all exchange exponents equal to 2
# (the Markov quiver).
MARKOV = ((0, 2, -2), (-2, 0, 2), (2, -2, 0))


@pytest.fixture
def sl3_seed():
    return initial_seed(ExchangeMatrix.make(SL3_ROWS, SL3_LABELS))


@pytest.fixture
def sl3_matrix():
    return ExchangeMatrix.make(SL3_ROWS, SL3_LABELS)


@pytest.fixture
def markov_seed():
    return general_seed(MARKOV)
