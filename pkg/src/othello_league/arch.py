"""Network architecture generators.

Two families are provided.  ``all_straight(n)`` is systematic: one tuple per
symmetry orbit of straight n-cell runs (horizontal, vertical, diagonal), so
together the expansions cover every straight run; a run that some symmetry
maps onto itself end-to-end is read in both directions.  ``rand_snake`` is
random: each tuple is a king-move walk that collects n distinct cells.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from othello_league.evaluation import NTuple, NTupleNetwork
from othello_league.game import Symmetry, transform_loc
from othello_league.rng import RandomStream

__all__ = [
    "AllStraight",
    "ArchitectureSpec",
    "RandomSnake",
    "all_straight",
    "build_architecture",
    "format_architecture",
    "parse_architecture",
    "rand_snake",
    "straight_runs",
    "weight_count",
]


def straight_runs(n: int) -> list[tuple[int, ...]]:
    """Every straight n-cell run on the board, each orientation once."""
    if not 1 <= n <= 8:
        raise ValueError("run length must be 1..8")
    if n == 1:
        return [(loc,) for loc in range(64)]
    runs = []
    for r in range(8):
        for c in range(8 - n + 1):
            runs.append(tuple(8 * r + c + j for j in range(n)))
    for c in range(8):
        for r in range(8 - n + 1):
            runs.append(tuple(8 * (r + j) + c for j in range(n)))
    for r in range(8 - n + 1):
        for c in range(8 - n + 1):
            runs.append(tuple(8 * (r + j) + (c + j) for j in range(n)))
    for r in range(8 - n + 1):
        for c in range(n - 1, 8):
            runs.append(tuple(8 * (r + j) + (c - j) for j in range(n)))
    return runs


def _orbit_main(run: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical representative of a run's symmetry orbit.

    Both traversal directions of the run are considered, so any member of
    the orbit canonicalizes to the same sequence.
    """
    candidates = []
    for seq in (run, run[::-1]):
        for symmetry in Symmetry:
            candidates.append(tuple(transform_loc(loc, symmetry) for loc in seq))
    return min(candidates)


def all_straight(n: int) -> NTupleNetwork:
    """One zero-initialized tuple per symmetry orbit of straight n-runs."""
    mains = sorted({_orbit_main(run) for run in straight_runs(n)})
    return NTupleNetwork(tuple(NTuple.from_main(main) for main in mains))


_KING_STEPS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def rand_snake(m: int, n: int, rng: RandomStream) -> NTupleNetwork:
    """m random walk tuples of n distinct cells each, zero-initialized.

    A walk starts on a uniform cell and repeatedly takes uniform king steps,
    redrawing steps that leave the board; cells already collected are walked
    through without being collected again.  Walks never restart, and the m
    walks are independent, so duplicate tuples can occur.
    """
    if m < 1:
        raise ValueError("need at least one tuple")
    if not 2 <= n <= 8:
        raise ValueError("walk length must be 2..8")
    tuples = []
    for _ in range(m):
        loc = rng.randbelow(64)
        r, c = divmod(loc, 8)
        collected = [loc]
        while len(collected) < n:
            dr, dc = _KING_STEPS[rng.randbelow(8)]
            nr, nc = r + dr, c + dc
            if not (0 <= nr < 8 and 0 <= nc < 8):
                continue
            r, c = nr, nc
            loc = 8 * r + c
            if loc not in collected:
                collected.append(loc)
        tuples.append(NTuple.from_main(tuple(collected)))
    return NTupleNetwork(tuple(tuples))


def weight_count(network: NTupleNetwork) -> int:
    """Trainable weights: sum of 3**n over the tuples."""
    return sum(3 ** t.size for t in network.tuples)


@dataclass(frozen=True)
class AllStraight:
    n: int


@dataclass(frozen=True)
class RandomSnake:
    m: int
    n: int
    seed: int = 0


ArchitectureSpec = Union[AllStraight, RandomSnake]

_ALL_RE = re.compile(r"^all-([1-8])$")
_RAND_RE = re.compile(r"^rand-(\d+)x([1-8])$")


def parse_architecture(text: str, seed: int = 0) -> ArchitectureSpec:
    """Parse ``all-N`` or ``rand-MxN``; the seed applies to random specs."""
    text = text.strip().lower()
    match = _ALL_RE.match(text)
    if match:
        return AllStraight(int(match.group(1)))
    match = _RAND_RE.match(text)
    if match:
        return RandomSnake(int(match.group(1)), int(match.group(2)), seed)
    raise ValueError(f"unrecognized architecture {text!r} (want all-N or rand-MxN)")


def format_architecture(spec: ArchitectureSpec) -> str:
    if isinstance(spec, AllStraight):
        return f"all-{spec.n}"
    return f"rand-{spec.m}x{spec.n}"


def build_architecture(spec: ArchitectureSpec) -> NTupleNetwork:
    if isinstance(spec, AllStraight):
        return all_straight(spec.n)
    return rand_snake(spec.m, spec.n, RandomStream(spec.seed))
