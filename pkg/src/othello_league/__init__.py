"""Othello position evaluators, evolution-strategy training, and
league-style strength measurement.

The usual entry points: :func:`othello_league.netfmt.load_champion` for the
bundled reference network, :func:`othello_league.league.performance` for
measurements, and :func:`othello_league.evolve.run` for training.
"""

__version__ = "0.1.0"

from othello_league.evaluation import (
    BoardInversion,
    Doubled,
    NTuple,
    NTupleNetwork,
    OutputNegation,
    Player,
    WpcWeights,
)
from othello_league.game import (
    Board,
    CellState,
    Color,
    GameOutcome,
    Symmetry,
    apply_move,
    initial_board,
    legal_moves,
    play_game,
)

__all__ = [
    "Board",
    "BoardInversion",
    "CellState",
    "Color",
    "Doubled",
    "GameOutcome",
    "NTuple",
    "NTupleNetwork",
    "OutputNegation",
    "Player",
    "Symmetry",
    "WpcWeights",
    "__version__",
    "apply_move",
    "initial_board",
    "legal_moves",
    "play_game",
]
