"""Markov-chain analysis of board games.

Squares are numbered from 1. Probabilities may be given as ints, strings
("18/38") or fractions.Fraction; exact results come back as Fraction.
"""

from __future__ import annotations

import json
from fractions import Fraction
from os import PathLike
from typing import Any, Mapping, Union

from . import _core
from ._core import Board, MarkovError, ParseError

__all__ = [
    "Board",
    "MarkovError",
    "ParseError",
    "analyze",
    "dice",
    "exact_matrix",
    "format_board",
    "gamblers_ruin_board",
    "heatmap_ppm",
    "heatmap_svg",
    "linear_board",
    "load_board",
    "loop_board",
    "monopoly_board",
    "parse_board",
    "report",
    "simulate_absorbing",
    "simulate_ergodic",
]

Probability = Union[int, str, Fraction]


def _q(p: Probability) -> str:
    if isinstance(p, float):
        raise TypeError("pass probabilities as Fraction, int or 'a/b' strings, not float")
    return str(Fraction(p))


def _moves(moves: Mapping[int, Probability]) -> dict[int, str]:
    return {int(d): _q(p) for d, p in moves.items()}


def _backend(backend: str) -> bool:
    if backend not in ("exact", "float"):
        raise ValueError(f"backend must be 'exact' or 'float', got {backend!r}")
    return backend == "exact"


def parse_board(text: str, source: str = "<string>") -> Board:
    """Compile board-description text. Raises ParseError with .diagnostics."""
    return _core.parse_board(text, source)


def load_board(path: Union[str, PathLike]) -> Board:
    with open(path, encoding="utf-8") as f:
        return _core.parse_board(f.read(), str(path))


def format_board(text: str) -> str:
    """Canonical rendering of board-description text."""
    return _core.format_board(text)


def dice(count: int = 2, sides: int = 6) -> dict[int, Fraction]:
    return {d: Fraction(p) for d, p in _core.dice(count, sides).items()}


def linear_board(squares: int, moves: Mapping[int, Probability], overshoot: str = "collapse") -> Board:
    return _core.linear_board(squares, _moves(moves), overshoot)


def gamblers_ruin_board(squares: int, p_win: Probability) -> Board:
    return _core.gamblers_ruin_board(squares, _q(p_win))


def loop_board(squares: int, moves: Mapping[int, Probability]) -> Board:
    return _core.loop_board(squares, _moves(moves))


def monopoly_board(
    go_to_jail: bool = True,
    chance: bool = True,
    community_chest: bool = True,
    single_railroad: bool = False,
) -> Board:
    return _core.monopoly_board(go_to_jail, chance, community_chest, single_railroad)


def exact_matrix(board: Board) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in board.matrix_exact()]


def analyze(board: Board, backend: str = "exact") -> dict[str, Any]:
    """Analysis report as a dict (same schema as `markov-board analyze --format json`)."""
    return json.loads(_core.analyze_json(board, _backend(backend)))


def report(board: Board, fmt: str = "text", backend: str = "exact") -> str:
    exact = _backend(backend)
    if fmt == "text":
        return _core.analyze_text(board, exact)
    if fmt == "csv":
        return _core.analyze_csv(board, exact)
    if fmt == "json":
        return _core.analyze_json(board, exact)
    raise ValueError(f"fmt must be text, csv or json, got {fmt!r}")


def simulate_absorbing(board: Board, start: int, trials: int, seed: int) -> dict[str, Any]:
    return _core.simulate_absorbing(board, start, trials, seed)


def simulate_ergodic(board: Board, start: int, steps: int, seed: int, trials: int = 1) -> dict[str, Any]:
    return _core.simulate_ergodic(board, start, steps, trials, seed)


def heatmap_svg(values, labels=None, layout: str = "strip", title: str = "", cell: int = 64) -> str:
    values = [float(v) for v in values]
    labels = list(labels) if labels is not None else [""] * len(values)
    return _core.heatmap_svg(values, labels, layout, title, cell)


def heatmap_ppm(values, layout: str = "strip", cell: int = 32) -> bytes:
    return _core.heatmap_ppm([float(v) for v in values], layout, cell)
