import warnings

import pytest

# The TBB probe on some hosts warns once at import; it carries no signal for
# these tests (numba falls back to another threading layer).
warnings.filterwarnings("ignore", message=".*TBB.*")

from othello_league import league, netfmt  # noqa: E402
from othello_league.game import Board  # noqa: E402
from othello_league.rng import RandomStream  # noqa: E402


@pytest.fixture(scope="session")
def champion():
    return netfmt.load_champion()


@pytest.fixture(scope="session")
def swh():
    return league.swh_player()


def random_board(rng: RandomStream, fill=0.6) -> Board:
    """Arbitrary (not necessarily reachable) position, for evaluator tests."""
    black = white = 0
    for loc in range(64):
        u = rng.uniform()
        if u < fill / 2:
            black |= 1 << loc
        elif u < fill:
            white |= 1 << loc
    return Board(black, white)


@pytest.fixture
def make_random_board():
    return random_board
