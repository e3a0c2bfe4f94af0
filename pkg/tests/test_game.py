import pytest

import rules_oracle as oracle
from othello_league.game import (
    Board,
    CellState,
    Color,
    GameOutcome,
    IllegalMoveError,
    Symmetry,
    apply_move,
    compose,
    disc_count,
    initial_board,
    invert,
    legal_moves,
    play_game,
    random_selector,
    transform,
    transform_loc,
)
from othello_league.rng import RandomStream


def test_initial_board_layout():
    board = initial_board()
    assert board.cell(27) is CellState.WHITE
    assert board.cell(36) is CellState.WHITE
    assert board.cell(28) is CellState.BLACK
    assert board.cell(35) is CellState.BLACK
    assert disc_count(board) == (2, 2)
    assert sum(1 for s in board.cells() if s is not CellState.EMPTY) == 4


def test_initial_legal_moves_match_oracle():
    board = initial_board()
    cells = oracle.initial_cells()
    for color in Color:
        assert set(legal_moves(board, color)) == oracle.legal_moves_oracle(cells, color)
    assert set(legal_moves(board, Color.BLACK)) == {19, 26, 37, 44}


def test_first_move_flips_exactly_one_disc():
    board = initial_board()
    for loc in legal_moves(board, Color.BLACK):
        after = apply_move(board, Color.BLACK, loc)
        assert disc_count(after) == (4, 1)


def test_apply_move_rejects_bad_moves():
    board = initial_board()
    with pytest.raises(IllegalMoveError):
        apply_move(board, Color.BLACK, 27)  # occupied
    with pytest.raises(IllegalMoveError):
        apply_move(board, Color.BLACK, 0)  # flips nothing
    with pytest.raises(IllegalMoveError):
        apply_move(board, Color.BLACK, 64)  # out of range


def test_board_validation():
    with pytest.raises(ValueError):
        Board(black=1, white=1)
    with pytest.raises(ValueError):
        Board(black=1 << 64, white=0)


def test_cell_codes_encoding():
    board = initial_board()
    codes = board.cell_codes()
    assert codes[27] == 0 and codes[36] == 0  # white
    assert codes[28] == 2 and codes[35] == 2  # black
    assert codes[0] == 1  # empty
    assert board.cells() == tuple(CellState(c) for c in codes)


def test_from_cells_round_trip():
    for cells, _ in oracle.random_playout_positions(5, 2):
        board = Board.from_cells(cells)
        assert list(board.cells()) == list(cells)
    assert initial_board() == Board.from_cells(oracle.initial_cells())


def test_rules_agree_with_oracle_on_random_play():
    positions = 0
    for cells, mover in oracle.random_playout_positions(seed=2024, n_games=30):
        board = Board.from_cells(cells)
        for color in Color:
            want = oracle.legal_moves_oracle(cells, color)
            got = set(legal_moves(board, color))
            assert got == want, f"legal moves diverge at position {positions}"
        for loc in sorted(oracle.legal_moves_oracle(cells, mover)):
            after = apply_move(board, mover, loc)
            assert list(after.cells()) == oracle.apply_move_oracle(cells, mover, loc)
        positions += 1
    assert positions > 1000


def test_disc_conservation():
    board = initial_board()
    mover = Color.BLACK
    rng = RandomStream(9)
    for _ in range(40):
        moves = sorted(legal_moves(board, mover))
        if not moves:
            mover = mover.opponent
            moves = sorted(legal_moves(board, mover))
            if not moves:
                break
        before = sum(disc_count(board))
        board = apply_move(board, mover, moves[rng.randbelow(len(moves))])
        assert sum(disc_count(board)) == before + 1
        mover = mover.opponent


def test_color_duality():
    # swapping colors swaps move sets
    for cells, _ in oracle.random_playout_positions(seed=77, n_games=3):
        board = Board.from_cells(cells)
        assert legal_moves(board, Color.BLACK) == legal_moves(invert(board), Color.WHITE)
        assert legal_moves(board, Color.WHITE) == legal_moves(invert(board), Color.BLACK)


def test_symmetry_equivariance_of_rules():
    # moves of a transformed board are the transformed moves
    count = 0
    for cells, mover in oracle.random_playout_positions(seed=400, n_games=2):
        board = Board.from_cells(cells)
        for symmetry in Symmetry:
            image = transform(board, symmetry)
            want = {transform_loc(loc, symmetry) for loc in legal_moves(board, mover)}
            assert set(legal_moves(image, mover)) == want
            count += 1
    assert count > 0


def test_transform_examples_and_group_structure():
    assert transform_loc(0, Symmetry.ROT180) == 63
    assert transform_loc(7, Symmetry.TRANSPOSE) == 56
    assert transform_loc(0, Symmetry.IDENTITY) == 0
    # closure: composing any two symmetries lands back in the set of eight
    for s in Symmetry:
        for t in Symmetry:
            u = compose(s, t)
            assert isinstance(u, Symmetry)
            for loc in range(64):
                assert transform_loc(transform_loc(loc, s), t) == transform_loc(loc, u)
    # inverses undo
    for s in Symmetry:
        for loc in range(64):
            assert transform_loc(transform_loc(loc, s), s.inverse) == loc


def test_transform_board_round_trip():
    for cells, _ in oracle.random_playout_positions(seed=31, n_games=1):
        board = Board.from_cells(cells)
        for s in Symmetry:
            assert transform(transform(board, s), s.inverse) == board
        assert transform(board, Symmetry.IDENTITY) == board


def test_invert_is_involution():
    board = initial_board()
    assert invert(invert(board)) == board
    assert invert(board).cell(27) is CellState.BLACK
    # the start position maps to itself under a plain half turn, and under a
    # quarter turn combined with a color swap
    assert transform(board, Symmetry.ROT180) == board
    assert invert(transform(board, Symmetry.ROT90)) == board


def test_outcome_scoring():
    assert GameOutcome(33, 31).winner is Color.BLACK
    assert GameOutcome(31, 33).winner is Color.WHITE
    assert GameOutcome(32, 32).winner is None
    assert GameOutcome(33, 31).score_for(Color.BLACK) == 1.0
    assert GameOutcome(33, 31).score_for(Color.WHITE) == 0.0
    assert GameOutcome(32, 32).score_for(Color.WHITE) == 0.5
    # a wipeout can end early; counts need not reach 64
    assert GameOutcome(13, 0).winner is Color.BLACK


def test_play_game_is_deterministic_per_seed():
    out1 = play_game(random_selector, random_selector, 0.0, RandomStream(5))
    out2 = play_game(random_selector, random_selector, 0.0, RandomStream(5))
    assert out1 == out2
    assert out1.black_discs + out1.white_discs <= 64


def test_play_game_reaches_full_or_blocked_boards():
    rng = RandomStream(1)
    totals = []
    for _ in range(40):
        outcome = play_game(random_selector, random_selector, 1.0, rng)
        totals.append(outcome.black_discs + outcome.white_discs)
    assert max(totals) == 64  # most random games fill the board
    assert all(4 < t <= 64 for t in totals)


def test_play_game_epsilon_one_matches_pure_random():
    # with epsilon 1 the selectors are never consulted
    def exploding_selector(board, color, rng):
        raise AssertionError("selector must not be called at epsilon 1")

    outcome = play_game(exploding_selector, exploding_selector, 1.0, RandomStream(8))
    assert outcome.black_discs + outcome.white_discs <= 64
