"""Position evaluators and the 1-ply move selector.

Two evaluator families share one interface: a weighted piece counter (WPC),
which is a linear function of cell contents, and n-tuple networks, which sum
lookup-table entries indexed by the ternary contents of small location
patterns.  Every tuple is sampled symmetrically: its lookup table is shared by
all distinct board images of the pattern under the eight square symmetries.

Both evaluators score positions from black's point of view by convention.
How a white mover turns that into a decision is the *perspective*: negate the
output, evaluate the color-inverted board, or use a separate second function.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from othello_league.game import (
    BOARD_CELLS,
    Board,
    Color,
    Symmetry,
    apply_move,
    invert,
    legal_moves,
    transform_loc,
)
from othello_league.rng import RandomStream

__all__ = [
    "BoardInversion",
    "Doubled",
    "Evaluator",
    "NTuple",
    "NTupleNetwork",
    "NoLegalMoveError",
    "OutputNegation",
    "Perspective",
    "Player",
    "WpcWeights",
    "evaluate",
    "expand_symmetries",
    "network_value",
    "select_move",
    "tuple_index",
    "wpc_value",
]


class NoLegalMoveError(RuntimeError):
    """Raised when a move is requested from a position with none."""


# ---------------------------------------------------------------------------
# Weighted piece counter


@dataclass(frozen=True, eq=False)
class WpcWeights:
    """One weight per cell; the value is sum(weight * sign), where a black
    disc contributes +1, a white disc -1, and an empty cell 0."""

    weights: np.ndarray

    def __post_init__(self):
        arr = np.array(self.weights, dtype=np.float64)
        if arr.shape != (BOARD_CELLS,):
            raise ValueError("expected 64 weights")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weights must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "WpcWeights":
        flat = [w for row in rows for w in row]
        return cls(np.asarray(flat, dtype=np.float64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WpcWeights):
            return NotImplemented
        return bool(np.array_equal(self.weights, other.weights))


def wpc_value(weights: WpcWeights, board: Board) -> float:
    codes = board.cell_codes()
    w = weights.weights
    total = 0.0
    for loc in range(BOARD_CELLS):
        total += w[loc] * (codes[loc] - 1)
    return float(total)


# ---------------------------------------------------------------------------
# n-tuple networks


def tuple_index(pattern: Sequence[int], base: int = 3) -> int:
    """Mixed-radix index of a cell-state sequence.

    The first element is the least significant digit:
    index = sum(pattern[j] * base**j).
    """
    index = 0
    place = 1
    for digit in pattern:
        if not 0 <= digit < base:
            raise ValueError(f"digit {digit} outside base {base}")
        index += digit * place
        place *= base
    return index


def expand_symmetries(main: Sequence[int]) -> list[tuple[int, ...]]:
    """Images of a location sequence under all eight board symmetries.

    Duplicate *sequences* are merged (a pattern on a mirror axis maps to
    itself under some symmetries), so the result has 8, 4, 2, or 1 entries;
    the identity image comes first.  Two images reading the same cells in
    opposite order are both kept: dropping one would make the summed value
    depend on board orientation, because a symmetry can carry a kept image
    onto a dropped one.
    """
    main = tuple(main)
    if len(set(main)) != len(main):
        raise ValueError("pattern locations must be distinct")
    images: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for symmetry in Symmetry:
        image = tuple(transform_loc(loc, symmetry) for loc in main)
        if image not in seen:
            seen.add(image)
            images.append(image)
    return images


@dataclass(frozen=True, eq=False)
class NTuple:
    """One location pattern, its symmetric images, and their shared table.

    ``lut`` has 3**len(locations) entries; ``expansions[0]`` is always the
    main pattern itself.  Each expansion indexes the table independently with
    its own cell contents, so one table serves the whole symmetry orbit.
    """

    locations: tuple[int, ...]
    expansions: tuple[tuple[int, ...], ...]
    lut: np.ndarray

    def __post_init__(self):
        locations = tuple(int(loc) for loc in self.locations)
        expansions = tuple(tuple(int(loc) for loc in exp) for exp in self.expansions)
        if not locations:
            raise ValueError("a tuple needs at least one location")
        if not expansions or expansions[0] != locations:
            raise ValueError("expansions must start with the main pattern")
        if not 1 <= len(expansions) <= 8:
            raise ValueError("a pattern has between 1 and 8 symmetric images")
        seen = set()
        for exp in expansions:
            if len(exp) != len(locations):
                raise ValueError("expansions must match the pattern length")
            if any(not 0 <= loc < BOARD_CELLS for loc in exp):
                raise ValueError("locations must lie in 0..63")
            if len(set(exp)) != len(exp):
                raise ValueError("expansion locations must be distinct")
            # Same cells in a different order is a distinct image and legal;
            # only an exact repeat is rejected.
            if exp in seen:
                raise ValueError("duplicate expansion")
            seen.add(exp)
        lut = np.array(self.lut, dtype=np.float64)
        if lut.shape != (3 ** len(locations),):
            raise ValueError(
                f"lookup table needs {3 ** len(locations)} entries, got {lut.size}"
            )
        if not np.all(np.isfinite(lut)):
            raise ValueError("lookup table entries must be finite")
        lut.flags.writeable = False
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "expansions", expansions)
        object.__setattr__(self, "lut", lut)

    @property
    def size(self) -> int:
        return len(self.locations)

    @classmethod
    def from_main(cls, locations: Sequence[int], lut=None) -> "NTuple":
        """Build a tuple from its main pattern, deriving the symmetric
        images; a missing table defaults to zeros."""
        locations = tuple(locations)
        expansions = tuple(expand_symmetries(locations))
        if lut is None:
            lut = np.zeros(3 ** len(locations), dtype=np.float64)
        return cls(locations, expansions, lut)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NTuple):
            return NotImplemented
        return (
            self.locations == other.locations
            and self.expansions == other.expansions
            and bool(np.array_equal(self.lut, other.lut))
        )


@dataclass(frozen=True, eq=False)
class NTupleNetwork:
    tuples: tuple[NTuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "tuples", tuple(self.tuples))

    @property
    def weight_count(self) -> int:
        return sum(t.lut.size for t in self.tuples)

    def weights_flat(self) -> np.ndarray:
        """All lookup tables concatenated in network order (a copy)."""
        if not self.tuples:
            return np.zeros(0, dtype=np.float64)
        return np.concatenate([t.lut for t in self.tuples])

    def with_weights(self, flat: np.ndarray) -> "NTupleNetwork":
        """Same topology with lookup tables taken from a flat vector."""
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.weight_count,):
            raise ValueError(f"expected {self.weight_count} weights, got {flat.shape}")
        out = []
        offset = 0
        for t in self.tuples:
            size = t.lut.size
            out.append(NTuple(t.locations, t.expansions, flat[offset : offset + size]))
            offset += size
        return NTupleNetwork(tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NTupleNetwork):
            return NotImplemented
        return len(self.tuples) == len(other.tuples) and all(
            a == b for a, b in zip(self.tuples, other.tuples)
        )


def network_value(network: NTupleNetwork, board: Board) -> float:
    """Sum of table entries over every tuple and every symmetric image."""
    codes = board.cell_codes()
    total = 0.0
    for t in network.tuples:
        lut = t.lut
        for expansion in t.expansions:
            index = 0
            place = 1
            for loc in expansion:
                index += codes[loc] * place
                place *= 3
            total += lut[index]
    return float(total)


# ---------------------------------------------------------------------------
# Perspectives and players

Evaluator = Union[WpcWeights, NTupleNetwork]


@dataclass(frozen=True)
class OutputNegation:
    """White prefers the move minimizing the (black-oriented) value."""


@dataclass(frozen=True)
class BoardInversion:
    """White evaluates the color-swapped board and maximizes like black."""


@dataclass(frozen=True, eq=False)
class Doubled:
    """White maximizes a second, separately trained function."""

    second: Evaluator

    def __eq__(self, other) -> bool:
        if not isinstance(other, Doubled):
            return NotImplemented
        return self.second == other.second


Perspective = Union[OutputNegation, BoardInversion, Doubled]


@dataclass(frozen=True, eq=False)
class Player:
    evaluator: Evaluator
    perspective: Perspective

    def __eq__(self, other) -> bool:
        if not isinstance(other, Player):
            return NotImplemented
        return self.evaluator == other.evaluator and self.perspective == other.perspective


def evaluate(evaluator: Evaluator, board: Board) -> float:
    if isinstance(evaluator, WpcWeights):
        return wpc_value(evaluator, board)
    return network_value(evaluator, board)


def _after_state_value(player: Player, after: Board, mover: Color) -> float:
    if mover is Color.BLACK:
        return evaluate(player.evaluator, after)
    perspective = player.perspective
    if isinstance(perspective, OutputNegation):
        return -evaluate(player.evaluator, after)
    if isinstance(perspective, BoardInversion):
        return evaluate(player.evaluator, invert(after))
    return evaluate(perspective.second, after)


def select_move(player: Player, board: Board, color: Color, rng: RandomStream) -> int:
    """Greedy 1-ply choice: value every after-state from the mover's side.

    Candidates are scanned in ascending location order and exact value ties
    are broken uniformly.  Exactly one draw is consumed even when the best
    move is unique, so every placement turn costs the same amount of
    randomness no matter the position.
    """
    moves = sorted(legal_moves(board, color))
    if not moves:
        raise NoLegalMoveError(f"{color.value} has no legal move")
    best = None
    ties: list[int] = []
    for loc in moves:
        value = _after_state_value(player, apply_move(board, color, loc), color)
        if best is None or value > best:
            best = value
            ties = [loc]
        elif value == best:
            ties.append(loc)
    return ties[rng.randbelow(len(ties))]
