"""Othello rules: boards, move generation, playouts, and board symmetries.

Locations are numbered 0..63 row by row: a1 = 0, h1 = 7, a8 = 56, h8 = 63.
A board is an immutable pair of 64-bit occupancy masks, one per color, so all
rule operations are pure functions over small integers.

Game flow follows standard rules: a move must flip at least one opposing disc,
a player with no legal move passes, and the game ends after two consecutive
passes (which covers the full board as a special case).  The winner is decided
by disc count alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Callable, Iterator

from othello_league.rng import RandomStream

__all__ = [
    "BOARD_CELLS",
    "Board",
    "CellState",
    "Color",
    "GameOutcome",
    "IllegalMoveError",
    "MoveSelector",
    "Symmetry",
    "apply_move",
    "compose",
    "disc_count",
    "initial_board",
    "invert",
    "legal_moves",
    "play_game",
    "random_selector",
    "transform",
    "transform_loc",
]

BOARD_CELLS = 64

_FULL = (1 << 64) - 1
_NOT_A = 0xFEFEFEFEFEFEFEFE  # clears column a, guards westward wrap
_NOT_H = 0x7F7F7F7F7F7F7F7F  # clears column h, guards eastward wrap


class CellState(IntEnum):
    """Contents of one cell; the numeric values are the ternary digits used
    by tuple indexing, so they are part of the public contract."""

    WHITE = 0
    EMPTY = 1
    BLACK = 2


class Color(Enum):
    BLACK = "black"
    WHITE = "white"

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK

    @property
    def cell(self) -> CellState:
        return CellState.BLACK if self is Color.BLACK else CellState.WHITE


class IllegalMoveError(ValueError):
    """Raised when a move is out of range, occupied, or flips nothing."""


@dataclass(frozen=True)
class Board:
    """Immutable position: one occupancy mask per color."""

    black: int
    white: int

    def __post_init__(self):
        if not (0 <= self.black <= _FULL and 0 <= self.white <= _FULL):
            raise ValueError("occupancy masks must fit in 64 bits")
        if self.black & self.white:
            raise ValueError("a cell cannot hold discs of both colors")

    def cell(self, loc: int) -> CellState:
        bit = 1 << loc
        if self.black & bit:
            return CellState.BLACK
        if self.white & bit:
            return CellState.WHITE
        return CellState.EMPTY

    def cells(self) -> tuple[CellState, ...]:
        return tuple(self.cell(loc) for loc in range(BOARD_CELLS))

    def cell_codes(self) -> list[int]:
        """Per-cell ternary digits (white 0, empty 1, black 2), loc order."""
        black, white = self.black, self.white
        return [1 + ((black >> i) & 1) - ((white >> i) & 1) for i in range(BOARD_CELLS)]

    def occupancy(self, color: Color) -> int:
        return self.black if color is Color.BLACK else self.white

    @classmethod
    def from_cells(cls, cells) -> "Board":
        cells = list(cells)
        if len(cells) != BOARD_CELLS:
            raise ValueError("expected 64 cells")
        black = white = 0
        for loc, state in enumerate(cells):
            state = CellState(state)
            if state is CellState.BLACK:
                black |= 1 << loc
            elif state is CellState.WHITE:
                white |= 1 << loc
        return cls(black, white)

    def __str__(self) -> str:
        glyph = {CellState.EMPTY: ".", CellState.BLACK: "x", CellState.WHITE: "o"}
        rows = []
        for r in range(8):
            rows.append(" ".join(glyph[self.cell(8 * r + c)] for c in range(8)))
        return "\n".join(rows)


def initial_board() -> Board:
    """Standard start: white on d4/e5 (27, 36), black on e4/d5 (28, 35)."""
    return Board(black=(1 << 28) | (1 << 35), white=(1 << 27) | (1 << 36))


def disc_count(board: Board) -> tuple[int, int]:
    """(black discs, white discs)."""
    return board.black.bit_count(), board.white.bit_count()


# Directions: E, W, S, N, SE, SW, NE, NW.  South is +8 because location
# numbers grow down the board.
def _shift(mask: int, d: int) -> int:
    if d == 0:
        return (mask & _NOT_H) << 1
    if d == 1:
        return (mask & _NOT_A) >> 1
    if d == 2:
        return (mask << 8) & _FULL
    if d == 3:
        return mask >> 8
    if d == 4:
        return ((mask & _NOT_H) << 9) & _FULL
    if d == 5:
        return ((mask & _NOT_A) << 7) & _FULL
    if d == 6:
        return (mask & _NOT_H) >> 7
    return (mask & _NOT_A) >> 9


def _legal_mask(me: int, opp: int) -> int:
    empty = ~(me | opp) & _FULL
    legal = 0
    for d in range(8):
        run = _shift(me, d) & opp
        # five more steps saturate any run of opposing discs on an 8x8 board
        for _ in range(5):
            run |= _shift(run, d) & opp
        legal |= _shift(run, d) & empty
    return legal


def _flip_mask(me: int, opp: int, loc: int) -> int:
    flips = 0
    start = 1 << loc
    for d in range(8):
        run = 0
        cursor = _shift(start, d)
        while cursor & opp:
            run |= cursor
            cursor = _shift(cursor, d)
        if cursor & me:
            flips |= run
    return flips


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def legal_moves(board: Board, color: Color) -> frozenset[int]:
    """Locations where ``color`` may place a disc (empty set means pass)."""
    if color is Color.BLACK:
        mask = _legal_mask(board.black, board.white)
    else:
        mask = _legal_mask(board.white, board.black)
    return frozenset(_bits(mask))


def apply_move(board: Board, color: Color, loc: int) -> Board:
    """Place a disc and flip every bracketed run; raises on illegal moves."""
    if not 0 <= loc < BOARD_CELLS:
        raise IllegalMoveError(f"location {loc} out of range")
    bit = 1 << loc
    if (board.black | board.white) & bit:
        raise IllegalMoveError(f"location {loc} is occupied")
    if color is Color.BLACK:
        flips = _flip_mask(board.black, board.white, loc)
        if not flips:
            raise IllegalMoveError(f"move {loc} flips no discs")
        return Board(board.black | bit | flips, board.white & ~flips)
    flips = _flip_mask(board.white, board.black, loc)
    if not flips:
        raise IllegalMoveError(f"move {loc} flips no discs")
    return Board(board.black & ~flips, board.white | bit | flips)


@dataclass(frozen=True)
class GameOutcome:
    black_discs: int
    white_discs: int

    @property
    def winner(self) -> Color | None:
        """Winner by disc count; ``None`` on equal counts."""
        if self.black_discs > self.white_discs:
            return Color.BLACK
        if self.white_discs > self.black_discs:
            return Color.WHITE
        return None

    def score_for(self, color: Color) -> float:
        """League points for ``color``: win 1, draw 0.5, loss 0."""
        winner = self.winner
        if winner is None:
            return 0.5
        return 1.0 if winner is color else 0.0


MoveSelector = Callable[[Board, Color, RandomStream], int]
"""Chooses one of the mover's legal moves; called only when moves exist."""


def random_selector(board: Board, color: Color, rng: RandomStream) -> int:
    moves = sorted(legal_moves(board, color))
    return moves[rng.randbelow(len(moves))]


def play_game(
    black_selector: MoveSelector,
    white_selector: MoveSelector,
    epsilon: float,
    rng: RandomStream,
) -> GameOutcome:
    """Play one game from the standard start, black moving first.

    Randomization contract, per placement turn (passes consume nothing):
    draw one uniform coin; with probability ``epsilon`` draw once more to pick
    a legal move uniformly, otherwise defer to the mover's selector.  Keeping
    the draw schedule fixed makes playouts reproducible across
    implementations.
    """
    board = initial_board()
    mover = Color.BLACK
    passes = 0
    while passes < 2:
        moves = legal_moves(board, mover)
        if not moves:
            passes += 1
            mover = mover.opponent
            continue
        passes = 0
        if rng.uniform() < epsilon:
            ordered = sorted(moves)
            loc = ordered[rng.randbelow(len(ordered))]
        else:
            selector = black_selector if mover is Color.BLACK else white_selector
            loc = selector(board, mover, rng)
        board = apply_move(board, mover, loc)
        mover = mover.opponent
    black, white = disc_count(board)
    return GameOutcome(black, white)


class Symmetry(IntEnum):
    """The eight symmetries of the square, acting on board locations."""

    IDENTITY = 0
    ROT90 = 1
    ROT180 = 2
    ROT270 = 3
    FLIP_H = 4
    FLIP_V = 5
    TRANSPOSE = 6
    ANTI_TRANSPOSE = 7

    @property
    def inverse(self) -> "Symmetry":
        return _INVERSE[self]


def _build_perms() -> tuple[tuple[int, ...], ...]:
    coord_maps = (
        lambda r, c: (r, c),
        lambda r, c: (c, 7 - r),
        lambda r, c: (7 - r, 7 - c),
        lambda r, c: (7 - c, r),
        lambda r, c: (r, 7 - c),
        lambda r, c: (7 - r, c),
        lambda r, c: (c, r),
        lambda r, c: (7 - c, 7 - r),
    )
    perms = []
    for coord_map in coord_maps:
        perm = [0] * BOARD_CELLS
        for loc in range(BOARD_CELLS):
            r, c = divmod(loc, 8)
            nr, nc = coord_map(r, c)
            perm[loc] = 8 * nr + nc
        perms.append(tuple(perm))
    return tuple(perms)


_PERMS = _build_perms()


def _build_compose() -> tuple[tuple[Symmetry, ...], ...]:
    by_perm = {perm: Symmetry(i) for i, perm in enumerate(_PERMS)}
    table = []
    for first in Symmetry:
        row = []
        for second in Symmetry:
            combined = tuple(_PERMS[second][_PERMS[first][loc]] for loc in range(BOARD_CELLS))
            row.append(by_perm[combined])
        table.append(tuple(row))
    return tuple(table)


_COMPOSE = _build_compose()
_INVERSE = tuple(
    next(t for t in Symmetry if _COMPOSE[s][t] is Symmetry.IDENTITY) for s in Symmetry
)


def transform_loc(loc: int, symmetry: Symmetry) -> int:
    """Image of a location under a symmetry."""
    return _PERMS[symmetry][loc]


def compose(first: Symmetry, second: Symmetry) -> Symmetry:
    """The symmetry equal to applying ``first`` and then ``second``."""
    return _COMPOSE[first][second]


def transform(board: Board, symmetry: Symmetry) -> Board:
    """Board with every disc moved to the image of its location."""
    perm = _PERMS[symmetry]
    black = white = 0
    for loc in _bits(board.black):
        black |= 1 << perm[loc]
    for loc in _bits(board.white):
        white |= 1 << perm[loc]
    return Board(black, white)


def invert(board: Board) -> Board:
    """Swap disc colors in place; empty cells stay empty."""
    return Board(black=board.white, white=board.black)
