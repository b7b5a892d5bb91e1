"""Published worst-number-of-writes values used as golden data.

Each table is a list of cells; every cell records its source table so a
mismatch can be traced back.  ``None`` marks a blank ("--") published entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Cell:
    n: int
    q: int
    M: int
    d: Optional[int]
    published: Optional[int]
    source: str
    bound: Optional[int] = None  # published upper bound, when the table lists one


@dataclass(frozen=True)
class TableDef:
    key: str
    title: str
    rows: tuple  # row labels, in order
    cols: tuple  # column labels, in order
    cells: tuple  # Cell per (row, col), row-major

    def cell(self, r, c) -> Cell:
        return self.cells[self.rows.index(r) * len(self.cols) + self.cols.index(c)]


def _grid(key, title, source, n, Ms, qs, values, d=None):
    cells = []
    for M, row in zip(Ms, values):
        for q, v in zip(qs, row):
            cells.append(Cell(n, q, M, d, v, source))
    return TableDef(key, title, tuple(f"M={M}" for M in Ms), tuple(f"q={q}" for q in qs), tuple(cells))


def _bound_row(key, title, source, n, M, qs, bounds, values, d=None):
    cells = tuple(Cell(n, q, M, d, v, source, b) for q, b, v in zip(qs, bounds, values))
    return TableDef(key, title, (f"M={M}",), tuple(f"q={q}" for q in qs), cells)


def _ici(key, title, source, n, Ms, by_dq):
    cols = tuple(by_dq)
    cells = []
    for i, M in enumerate(Ms):
        for d, q in cols:
            cells.append(Cell(n, q, M, d, by_dq[(d, q)][i], source))
    return TableDef(key, title, tuple(f"M={M}" for M in Ms), tuple(f"d={d},q={q}" for d, q in cols), tuple(cells))


_QS = (4, 5, 6, 7, 8)
_BIG_QS = (4, 5, 6, 7, 8, 16, 32, 48)

TABLES = {
    "1": _grid(
        "1", "n = 2 cells, k = M", "two-cell grid table", 2, (4, 5, 6, 7, 8), _QS,
        [[3, 4, 5, 6, 7], [2, 3, 4, 5, 6], [2, 3, 3, 4, 5], [1, 2, 3, 3, 4], [1, 2, 3, 3, 4]],
    ),
    "2": _bound_row(
        "2", "n = 2 cells, M = 8, against the upper bound", "two-cell bound table", 2, 8, _BIG_QS,
        [1, 2, 3, 3, 4, 9, 20, 31], [1, 2, 3, 3, 4, 9, 20, 31],
    ),
    "3": _grid(
        "3", "n = 3 cells, k = M", "three-cell grid table", 3, (4, 5, 6, 7, 8), _QS,
        [[6, 8, 10, 12, 14], [4, 5, 7, 8, 10], [4, 5, 7, 8, 10], [3, 5, 6, 8, 9], [3, 4, 6, 7, 8]],
    ),
    "4": _grid(
        "4", "n = 4 cells, k = M", "four-cell grid table", 4, (5, 6, 7, 8), _QS,
        [[7, 9, 12, 14, 17], [5, 7, 9, 11, 13], [5, 7, 9, 11, 13], [5, 7, 9, 11, 13]],
    ),
    "ici-ub": _bound_row(
        "ici-ub", "n = 2 cells, M = 8, imbalance d = 3, against the upper bound",
        "imbalance bound table", 2, 8, _BIG_QS,
        [1, 2, 3, 3, 4, 9, 18, 28], [1, 2, 3, 3, 4, 9, 18, 28], d=3,
    ),
    "ici-n3": _ici(
        "ici-n3", "n = 3 cells under the imbalance constraint", "three-cell imbalance table", 3, (5, 6, 7, 8),
        {(2, 4): [4, 4, 3, 3], (2, 8): [10, 9, 9, None], (3, 4): [4, 4, 3, 3], (3, 8): [10, 10, 9, 8]},
    ),
    "ici-n4": _ici(
        "ici-n4", "n = 4 cells under the imbalance constraint", "four-cell imbalance table", 4, (5, 6, 7, 8),
        {(2, 4): [7, 5, 5, 5], (2, 8): [None, 13, 13, 13], (3, 4): [7, 5, 5, 5], (3, 8): [17, 13, 13, 13]},
    ),
}
