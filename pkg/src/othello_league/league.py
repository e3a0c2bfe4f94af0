"""League-style strength measurement.

Strength is the mean score against the standard WPC heuristic opponent over
many double games at epsilon 0.1.  A double game is the same pairing played
twice with colors swapped, which cancels the first-move advantage; each game
is worth 1 for a win and 0.5 for a draw, so a double game awards 0..2 points.

Every double game draws from its own counter-derived substream of the match
seed, so results are identical no matter how games are spread over workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from othello_league import engine
from othello_league.evaluation import (
    OutputNegation,
    Player,
    WpcWeights,
    select_move,
)
from othello_league.game import Board, Color, GameOutcome, play_game
from othello_league.rng import RandomStream, substream_seed

__all__ = [
    "MatchConfig",
    "PerformanceEstimate",
    "SWH_GRID",
    "performance",
    "performance_pure",
    "play_double_game",
    "selector_for",
    "swh_player",
]

# The standard WPC heuristic: a fixed hand-tuned weight grid, symmetric under
# all board symmetries (corners 1.0, X-squares -0.25, edges mildly positive).
SWH_GRID = (
    (1.00, -0.25, 0.10, 0.05, 0.05, 0.10, -0.25, 1.00),
    (-0.25, -0.25, 0.01, 0.01, 0.01, 0.01, -0.25, -0.25),
    (0.10, 0.01, 0.05, 0.02, 0.02, 0.05, 0.01, 0.10),
    (0.05, 0.01, 0.02, 0.01, 0.01, 0.02, 0.01, 0.05),
    (0.05, 0.01, 0.02, 0.01, 0.01, 0.02, 0.01, 0.05),
    (0.10, 0.01, 0.05, 0.02, 0.02, 0.05, 0.01, 0.10),
    (-0.25, -0.25, 0.01, 0.01, 0.01, 0.01, -0.25, -0.25),
    (1.00, -0.25, 0.10, 0.05, 0.05, 0.10, -0.25, 1.00),
)


def swh_player() -> Player:
    """The standard heuristic: SWH weights with output negation for white."""
    return Player(WpcWeights.from_rows(SWH_GRID), OutputNegation())


def selector_for(player: Player):
    """Adapt a player to the move-selector callable used by playouts."""

    def choose(board: Board, color: Color, rng: RandomStream) -> int:
        return select_move(player, board, color, rng)

    return choose


def play_double_game(
    first: Player,
    second: Player,
    epsilon: float,
    rng: RandomStream,
) -> tuple[float, tuple[GameOutcome, GameOutcome]]:
    """Two games with colors swapped, on one stream; returns the points won
    by ``first`` (0..2) and both outcomes (black count first in each)."""
    game_one = play_game(selector_for(first), selector_for(second), epsilon, rng)
    game_two = play_game(selector_for(second), selector_for(first), epsilon, rng)
    points = game_one.score_for(Color.BLACK) + game_two.score_for(Color.WHITE)
    return points, (game_one, game_two)


@dataclass(frozen=True)
class MatchConfig:
    n_double_games: int
    epsilon: float = 0.1
    master_seed: int = 0

    def __post_init__(self):
        if self.n_double_games < 1:
            raise ValueError("need at least one double game")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")


@dataclass(frozen=True)
class PerformanceEstimate:
    """Mean score per game with a normal-approximation 95% interval."""

    wins: int
    draws: int
    losses: int
    n_double_games: int
    mean_score: float
    ci95_halfwidth: float

    @classmethod
    def from_outcome_codes(cls, codes: np.ndarray, n_double_games: int) -> "PerformanceEstimate":
        codes = np.asarray(codes)
        wins = int(np.count_nonzero(codes == 2))
        draws = int(np.count_nonzero(codes == 1))
        losses = int(np.count_nonzero(codes == 0))
        n_games = wins + draws + losses
        mean = (wins + 0.5 * draws) / n_games
        if n_games > 1:
            deviations = (
                wins * (1.0 - mean) ** 2
                + draws * (0.5 - mean) ** 2
                + losses * (0.0 - mean) ** 2
            )
            std_err = (deviations / (n_games - 1)) ** 0.5 / n_games**0.5
        else:
            std_err = 0.0
        return cls(wins, draws, losses, n_double_games, mean, 1.96 * std_err)

    @property
    def n_games(self) -> int:
        return self.wins + self.draws + self.losses


def performance(
    player: Player,
    opponent: Player,
    config: MatchConfig,
    workers: int | None = None,
) -> PerformanceEstimate:
    """Mean score of ``player`` against ``opponent`` under the match config.

    Double game ``i`` runs on the stream seeded ``substream_seed(master, i)``,
    so the estimate is a pure function of the config regardless of
    ``workers``.
    """
    codes = engine.run_match(
        engine.pack_player(player),
        engine.pack_player(opponent),
        config.epsilon,
        config.n_double_games,
        config.master_seed,
        workers=workers,
    )
    return PerformanceEstimate.from_outcome_codes(codes, config.n_double_games)


def performance_pure(player: Player, opponent: Player, config: MatchConfig) -> PerformanceEstimate:
    """Reference implementation of :func:`performance` without the compiled
    engine; identical results, orders of magnitude slower."""
    codes = np.zeros(2 * config.n_double_games, dtype=np.int8)
    for i in range(config.n_double_games):
        rng = RandomStream(substream_seed(config.master_seed, i))
        game_one = play_game(
            selector_for(player), selector_for(opponent), config.epsilon, rng
        )
        game_two = play_game(
            selector_for(opponent), selector_for(player), config.epsilon, rng
        )
        codes[2 * i] = int(2 * game_one.score_for(Color.BLACK))
        codes[2 * i + 1] = int(2 * game_two.score_for(Color.WHITE))
    return PerformanceEstimate.from_outcome_codes(codes, config.n_double_games)
