"""Compiled match engine.

This module replays the exact semantics of :mod:`othello_league.game` and
:mod:`othello_league.evaluation` on bitboards under numba, including the
randomness schedule, candidate scan order, and floating-point summation
order, so a game played here is bit-for-bit the game the pure functions
would play.  The pure modules stay the readable source of truth; the tests
pin the two implementations together.

Evaluators are packed to flat arrays: every tuple expansion (and every WPC
cell, as 64 single-cell tuples) becomes one table-lookup entry.  A match
kernel then plays double games in parallel, one counter-derived splitmix64
substream per double game, so outcomes are independent of the worker count.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from typing import NamedTuple

# Compiled thread workers are capped by this env var at first numba import.
# Raise the default so multi-worker runs stay available on small machines;
# an explicit user setting always wins.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(16, os.cpu_count() or 1)))

import numba
import numpy as np
from numba import njit, prange

from othello_league.evaluation import (
    BoardInversion,
    Doubled,
    Evaluator,
    NTupleNetwork,
    OutputNegation,
    Player,
    WpcWeights,
)

__all__ = [
    "PackedEvaluator",
    "PackedPlayer",
    "max_workers",
    "pack_evaluator",
    "pack_player",
    "play_packed_game",
    "run_match",
    "warm_up",
]

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_FULL = _U64(0xFFFFFFFFFFFFFFFF)
_NOT_A = _U64(0xFEFEFEFEFEFEFEFE)
_NOT_H = _U64(0x7F7F7F7F7F7F7F7F)
_ONE = _U64(1)
_INV53 = 1.0 / float(1 << 53)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


@njit(cache=True)
def _next_u64(state):
    state = state + _GOLDEN
    return _mix64(state), state


@njit(cache=True)
def _shift(mask, d):
    if d == 0:
        return (mask & _NOT_H) << _U64(1)
    if d == 1:
        return (mask & _NOT_A) >> _U64(1)
    if d == 2:
        return mask << _U64(8)
    if d == 3:
        return mask >> _U64(8)
    if d == 4:
        return (mask & _NOT_H) << _U64(9)
    if d == 5:
        return (mask & _NOT_A) << _U64(7)
    if d == 6:
        return (mask & _NOT_H) >> _U64(7)
    return (mask & _NOT_A) >> _U64(9)


@njit(cache=True)
def _legal_mask(me, opp):
    empty = ~(me | opp)
    legal = _U64(0)
    for d in range(8):
        run = _shift(me, d) & opp
        for _ in range(5):
            run |= _shift(run, d) & opp
        legal |= _shift(run, d) & empty
    return legal


@njit(cache=True)
def _flip_mask(me, opp, loc):
    total = _U64(0)
    for d in range(8):
        run = _U64(0)
        cursor = _shift(_ONE << _U64(loc), d)
        while cursor & opp:
            run |= cursor
            cursor = _shift(cursor, d)
        if cursor & me:
            total |= run
    return total


@njit(cache=True)
def _eval_entries(black, white, entry_sizes, entry_locs, entry_offsets, lut):
    """Value of a position: codes are the ternary cell digits, each entry
    adds one table element.  Summation order is entry order, matching the
    pure evaluator exactly."""
    codes = np.empty(64, dtype=np.int64)
    for i in range(64):
        codes[i] = (
            1
            + np.int64((black >> _U64(i)) & _ONE)
            - np.int64((white >> _U64(i)) & _ONE)
        )
    total = 0.0
    for e in range(entry_sizes.shape[0]):
        index = np.int64(0)
        place = np.int64(1)
        for j in range(entry_sizes[e]):
            index += codes[entry_locs[e, j]] * place
            place *= 3
        total += lut[entry_offsets[e] + index]
    return total


@njit(cache=True)
def _play_game(
    bs_sizes, bs_locs, bs_offsets, bs_lut,
    ws_sizes, ws_locs, ws_offsets, ws_lut,
    ws_sign, ws_invert,
    epsilon, state,
):
    """One game; black seat uses the first entry set, white seat the second
    with its sign/inversion flags.  Returns (black discs, white discs, rng
    state).  Each placement turn consumes exactly two stream values."""
    black = (_ONE << _U64(28)) | (_ONE << _U64(35))
    white = (_ONE << _U64(27)) | (_ONE << _U64(36))
    mover_black = True
    passes = 0
    ties = np.empty(64, dtype=np.int64)
    while passes < 2:
        me, opp = (black, white) if mover_black else (white, black)
        legal = _legal_mask(me, opp)
        if legal == _U64(0):
            passes += 1
            mover_black = not mover_black
            continue
        passes = 0
        coin, state = _next_u64(state)
        draw, state = _next_u64(state)
        if float(coin >> _U64(11)) * _INV53 < epsilon:
            count = np.int64(0)
            for loc in range(64):
                if (legal >> _U64(loc)) & _ONE:
                    ties[count] = loc
                    count += 1
            choice = ties[draw % _U64(count)]
        else:
            best = 0.0
            n_ties = np.int64(0)
            for loc in range(64):
                if not (legal >> _U64(loc)) & _ONE:
                    continue
                flips = _flip_mask(me, opp, loc)
                piece = _ONE << _U64(loc)
                new_me = me | piece | flips
                new_opp = opp & ~(piece | flips)
                if mover_black:
                    value = _eval_entries(
                        new_me, new_opp, bs_sizes, bs_locs, bs_offsets, bs_lut
                    )
                else:
                    if ws_invert:
                        value = _eval_entries(
                            new_me, new_opp, ws_sizes, ws_locs, ws_offsets, ws_lut
                        )
                    else:
                        value = _eval_entries(
                            new_opp, new_me, ws_sizes, ws_locs, ws_offsets, ws_lut
                        )
                    value *= ws_sign
                if n_ties == 0 or value > best:
                    best = value
                    ties[0] = loc
                    n_ties = 1
                elif value == best:
                    ties[n_ties] = loc
                    n_ties += 1
            choice = ties[draw % _U64(n_ties)]
        flips = _flip_mask(me, opp, choice)
        piece = _ONE << _U64(choice)
        me |= piece | flips
        opp &= ~(piece | flips)
        if mover_black:
            black, white = me, opp
        else:
            black, white = opp, me
        mover_black = not mover_black
    n_black = 0
    n_white = 0
    for loc in range(64):
        n_black += np.int64((black >> _U64(loc)) & _ONE)
        n_white += np.int64((white >> _U64(loc)) & _ONE)
    return n_black, n_white, state


@njit(cache=True, parallel=True)
def _match_kernel(
    a_b_sizes, a_b_locs, a_b_offsets, a_b_lut,
    a_w_sizes, a_w_locs, a_w_offsets, a_w_lut,
    a_w_sign, a_w_invert,
    b_b_sizes, b_b_locs, b_b_offsets, b_b_lut,
    b_w_sizes, b_w_locs, b_w_offsets, b_w_lut,
    b_w_sign, b_w_invert,
    epsilon, master_seed, out,
):
    """Outcome codes for player A (0 loss, 1 draw, 2 win), two per double
    game: A as black first, then colors swapped, on one substream."""
    n_doubles = out.shape[0] // 2
    for i in prange(n_doubles):
        state = _mix64(master_seed + _GOLDEN * (_U64(i) + _ONE))
        n_black, n_white, state = _play_game(
            a_b_sizes, a_b_locs, a_b_offsets, a_b_lut,
            b_w_sizes, b_w_locs, b_w_offsets, b_w_lut,
            b_w_sign, b_w_invert,
            epsilon, state,
        )
        if n_black > n_white:
            out[2 * i] = 2
        elif n_black == n_white:
            out[2 * i] = 1
        else:
            out[2 * i] = 0
        n_black, n_white, state = _play_game(
            b_b_sizes, b_b_locs, b_b_offsets, b_b_lut,
            a_w_sizes, a_w_locs, a_w_offsets, a_w_lut,
            a_w_sign, a_w_invert,
            epsilon, state,
        )
        if n_white > n_black:
            out[2 * i + 1] = 2
        elif n_white == n_black:
            out[2 * i + 1] = 1
        else:
            out[2 * i + 1] = 0


class PackedEvaluator(NamedTuple):
    """Flat table-lookup form of an evaluator: entry e reads
    lut[offsets[e] + ternary index of its cells]."""

    sizes: np.ndarray
    locs: np.ndarray
    offsets: np.ndarray
    lut: np.ndarray


class PackedPlayer(NamedTuple):
    """A player's black-seat and white-seat evaluation, flattened."""

    black_eval: PackedEvaluator
    white_eval: PackedEvaluator
    white_sign: float
    white_inverts: bool


def _pack_network(network: NTupleNetwork) -> PackedEvaluator:
    n_entries = sum(len(t.expansions) for t in network.tuples)
    sizes = np.zeros(n_entries, dtype=np.int64)
    locs = np.zeros((n_entries, 8), dtype=np.int64)
    offsets = np.zeros(n_entries, dtype=np.int64)
    lut = network.weights_flat()
    e = 0
    offset = 0
    for t in network.tuples:
        for expansion in t.expansions:
            sizes[e] = len(expansion)
            for j, loc in enumerate(expansion):
                locs[e, j] = loc
            offsets[e] = offset
            e += 1
        offset += t.lut.size
    return PackedEvaluator(sizes, locs, offsets, lut)


def _pack_wpc(weights: WpcWeights) -> PackedEvaluator:
    """WPC as 64 single-cell entries: entry tables (-w, 0, +w) reproduce
    w * sign(cell) exactly, and location order keeps the summation order of
    the pure implementation."""
    sizes = np.ones(64, dtype=np.int64)
    locs = np.zeros((64, 8), dtype=np.int64)
    offsets = np.arange(0, 192, 3, dtype=np.int64)
    lut = np.zeros(192, dtype=np.float64)
    for loc in range(64):
        locs[loc, 0] = loc
        w = float(weights.weights[loc])
        lut[3 * loc] = -w
        lut[3 * loc + 2] = w
    return PackedEvaluator(sizes, locs, offsets, lut)


def pack_evaluator(evaluator: Evaluator) -> PackedEvaluator:
    if isinstance(evaluator, WpcWeights):
        return _pack_wpc(evaluator)
    return _pack_network(evaluator)


def pack_player(player: Player) -> PackedPlayer:
    black_eval = pack_evaluator(player.evaluator)
    perspective = player.perspective
    if isinstance(perspective, OutputNegation):
        return PackedPlayer(black_eval, black_eval, -1.0, False)
    if isinstance(perspective, BoardInversion):
        return PackedPlayer(black_eval, black_eval, 1.0, True)
    if isinstance(perspective, Doubled):
        return PackedPlayer(black_eval, pack_evaluator(perspective.second), 1.0, False)
    raise TypeError(f"unknown perspective {perspective!r}")


def max_workers() -> int:
    """Upper bound on ``workers`` accepted by :func:`run_match`."""
    return numba.config.NUMBA_NUM_THREADS


@contextmanager
def _worker_count(workers: int | None):
    if workers is None:
        yield
        return
    if workers < 1:
        raise ValueError("workers must be positive")
    limit = max_workers()
    previous = numba.get_num_threads()
    numba.set_num_threads(min(workers, limit))
    try:
        yield
    finally:
        numba.set_num_threads(previous)


def run_match(
    player_a: PackedPlayer,
    player_b: PackedPlayer,
    epsilon: float,
    n_double_games: int,
    master_seed: int,
    workers: int | None = None,
) -> np.ndarray:
    """Play double games and return player A's outcome codes, int8 with two
    entries per double game (0 loss, 1 draw, 2 win).  The result depends
    only on the arguments, never on ``workers``."""
    out = np.zeros(2 * n_double_games, dtype=np.int8)
    with _worker_count(workers):
        _match_kernel(
            *player_a.black_eval, *player_a.white_eval,
            player_a.white_sign, player_a.white_inverts,
            *player_b.black_eval, *player_b.white_eval,
            player_b.white_sign, player_b.white_inverts,
            float(epsilon), _U64(master_seed), out,
        )
    return out


def play_packed_game(
    black_seat: PackedPlayer,
    white_seat: PackedPlayer,
    epsilon: float,
    seed: int,
) -> tuple[int, int]:
    """One game on the stream seeded ``seed``; returns disc counts.  Used to
    pin the kernel against the pure implementation."""
    n_black, n_white, _ = _play_game(
        *black_seat.black_eval, *white_seat.white_eval,
        white_seat.white_sign, white_seat.white_inverts,
        float(epsilon), _U64(seed),
    )
    return int(n_black), int(n_white)


def warm_up():
    """Force kernel compilation with a tiny match."""
    evaluator = pack_evaluator(WpcWeights(np.zeros(64)))
    packed = PackedPlayer(evaluator, evaluator, -1.0, False)
    run_match(packed, packed, 1.0, 1, 0, workers=1)
