"""Text format for n-tuple networks and WPC weight grids.

A network file is a brace tree of whitespace-separated numbers::

    { <tuple-count>
      { <n> <k>  { loc*n } x k  { weight*3^n } }
      ...
    }

Each block lists a tuple's size ``n``, its expansion count ``k``, the ``k``
location lists (the first is the main pattern), and the shared lookup table.
Expansions are taken exactly as listed, never re-derived.  A WPC file is
plainer still: 64 whitespace-separated weights in location order.

Parse errors are split by kind: :class:`NetworkSyntaxError` for malformed
text (unbalanced braces, non-numeric tokens) and :class:`NetworkSchemaError`
for well-formed text with impossible numbers (wrong counts, out-of-range
locations, non-finite weights).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from othello_league.evaluation import (
    BoardInversion,
    NTuple,
    NTupleNetwork,
    Perspective,
    Player,
    WpcWeights,
)

__all__ = [
    "CHAMPION_ASSET",
    "NetworkFormatError",
    "NetworkSchemaError",
    "NetworkSyntaxError",
    "SWH_ASSET",
    "champion_network",
    "load_champion",
    "load_network_file",
    "load_wpc_file",
    "parse",
    "parse_wpc",
    "read_asset",
    "serialize",
    "serialize_wpc",
]

CHAMPION_ASSET = "all2-champion.ntn"
SWH_ASSET = "swh.wpc"


class NetworkFormatError(ValueError):
    """Base class for all parse failures."""


class NetworkSyntaxError(NetworkFormatError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NetworkSchemaError(NetworkFormatError):
    pass


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"[{}]|[^\s{}]+")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        for match in _TOKEN_RE.finditer(line):
            tokens.append(_Token(match.group(), line_no, match.start() + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> _Token | None:
        if self._pos < len(self._tokens):
            return self._tokens[self._pos]
        return None

    def _fail(self, message: str):
        token = self.peek()
        if token is None:
            if self._tokens:
                last = self._tokens[-1]
                raise NetworkSyntaxError(
                    f"{message}, found end of input", last.line, last.column + len(last.text)
                )
            raise NetworkSyntaxError(f"{message}, found end of input", 1, 1)
        raise NetworkSyntaxError(f"{message}, found {token.text!r}", token.line, token.column)

    def next(self, expectation: str) -> _Token:
        token = self.peek()
        if token is None:
            self._fail(f"expected {expectation}")
        self._pos += 1
        return token

    def expect(self, brace: str):
        token = self.next(f"{brace!r}")
        if token.text != brace:
            self._pos -= 1
            self._fail(f"expected {brace!r}")

    def at(self, brace: str) -> bool:
        token = self.peek()
        return token is not None and token.text == brace

    def read_int(self, what: str) -> int:
        token = self.next(f"integer {what}")
        try:
            return int(token.text)
        except ValueError:
            self._pos -= 1
            self._fail(f"expected integer {what}")

    def read_float(self, what: str) -> float:
        token = self.next(f"number {what}")
        try:
            return float(token.text)
        except ValueError:
            self._pos -= 1
            self._fail(f"expected number {what}")

    def expect_end(self):
        token = self.peek()
        if token is not None:
            raise NetworkSyntaxError(
                f"expected end of input, found {token.text!r}", token.line, token.column
            )


def _read_int_list(cursor: _Cursor, what: str) -> list[int]:
    cursor.expect("{")
    values = []
    while not cursor.at("}"):
        values.append(cursor.read_int(what))
    cursor.expect("}")
    return values


def _read_float_list(cursor: _Cursor, what: str) -> list[float]:
    cursor.expect("{")
    values = []
    while not cursor.at("}"):
        values.append(cursor.read_float(what))
    cursor.expect("}")
    return values


def _parse_block(cursor: _Cursor, block_index: int) -> NTuple:
    where = f"tuple {block_index}"
    cursor.expect("{")
    size = cursor.read_int("tuple size")
    expansion_count = cursor.read_int("expansion count")
    if not 1 <= size <= 8:
        raise NetworkSchemaError(f"{where}: tuple size {size} outside 1..8")
    if not 1 <= expansion_count <= 8:
        raise NetworkSchemaError(
            f"{where}: expansion count {expansion_count} outside 1..8"
        )
    expansions = []
    seen: set[tuple[int, ...]] = set()
    for list_index in range(expansion_count):
        locs = _read_int_list(cursor, "location")
        if len(locs) != size:
            raise NetworkSchemaError(
                f"{where}, expansion {list_index}: "
                f"expected {size} locations, got {len(locs)}"
            )
        for loc in locs:
            if not 0 <= loc < 64:
                raise NetworkSchemaError(
                    f"{where}, expansion {list_index}: location {loc} outside 0..63"
                )
        if len(set(locs)) != size:
            raise NetworkSchemaError(
                f"{where}, expansion {list_index}: repeated location"
            )
        key = tuple(locs)
        if key in seen:
            raise NetworkSchemaError(
                f"{where}, expansion {list_index}: duplicate of an earlier expansion"
            )
        seen.add(key)
        expansions.append(key)
    weights = _read_float_list(cursor, "weight")
    if len(weights) != 3**size:
        raise NetworkSchemaError(
            f"{where}: expected {3 ** size} weights, got {len(weights)}"
        )
    lut = np.asarray(weights, dtype=np.float64)
    if not np.all(np.isfinite(lut)):
        raise NetworkSchemaError(f"{where}: weights must be finite")
    cursor.expect("}")
    return NTuple(expansions[0], tuple(expansions), lut)


def parse(text: str) -> NTupleNetwork:
    """Parse a network file; raises :class:`NetworkFormatError` subtypes."""
    cursor = _Cursor(_tokenize(text))
    cursor.expect("{")
    declared = cursor.read_int("tuple count")
    if declared < 0:
        raise NetworkSchemaError(f"negative tuple count {declared}")
    blocks = []
    while cursor.at("{"):
        blocks.append(_parse_block(cursor, len(blocks)))
    cursor.expect("}")
    cursor.expect_end()
    if len(blocks) != declared:
        raise NetworkSchemaError(f"declared {declared} tuples, found {len(blocks)}")
    return NTupleNetwork(tuple(blocks))


def _format_weight(value: float) -> str:
    return repr(float(value))


def serialize(network: NTupleNetwork) -> str:
    """Canonical rendering; ``parse(serialize(net))`` equals ``net``."""
    lines = [f"{{ {len(network.tuples)}"]
    for t in network.tuples:
        lines.append(f"  {{ {t.size} {len(t.expansions)}")
        lines.append(
            "    "
            + " ".join(
                "{ " + " ".join(str(loc) for loc in exp) + " }" for exp in t.expansions
            )
        )
        weights = [_format_weight(w) for w in t.lut]
        for start in range(0, len(weights), 16):
            chunk = " ".join(weights[start : start + 16])
            opener = "    { " if start == 0 else "      "
            lines.append(opener + chunk)
        lines[-1] += " }"
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_wpc(text: str) -> WpcWeights:
    """Parse 64 whitespace-separated weights in location order."""
    tokens = _tokenize(text)
    weights = []
    for token in tokens:
        try:
            weights.append(float(token.text))
        except ValueError:
            raise NetworkSyntaxError(
                f"expected number, found {token.text!r}", token.line, token.column
            ) from None
    if len(weights) != 64:
        raise NetworkSchemaError(f"expected 64 weights, got {len(weights)}")
    arr = np.asarray(weights, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise NetworkSchemaError("weights must be finite")
    return WpcWeights(arr)


def serialize_wpc(weights: WpcWeights) -> str:
    rows = []
    for r in range(8):
        rows.append(" ".join(_format_weight(w) for w in weights.weights[8 * r : 8 * r + 8]))
    return "\n".join(rows) + "\n"


def read_asset(name: str) -> str:
    return resources.files(__package__).joinpath("assets").joinpath(name).read_text()


def champion_network() -> NTupleNetwork:
    """The bundled all-straight-2 champion network."""
    return parse(read_asset(CHAMPION_ASSET))


def load_champion() -> Player:
    """Champion player: the bundled network with board-inversion play."""
    return Player(champion_network(), BoardInversion())


def load_network_file(path) -> NTupleNetwork:
    return parse(Path(path).read_text())


def load_wpc_file(path) -> WpcWeights:
    return parse_wpc(Path(path).read_text())


def load_player_file(path, perspective: Perspective | None = None) -> Player:
    """Read a player from disk; ``.wpc`` means a weight grid, anything else
    a network file.  Defaults to board-inversion play."""
    path = Path(path)
    if perspective is None:
        perspective = BoardInversion()
    if path.suffix == ".wpc":
        return Player(load_wpc_file(path), perspective)
    return Player(load_network_file(path), perspective)
