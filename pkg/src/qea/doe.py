"""Orthogonal arrays and main-effects analysis for designed experiment batches.

Ships the two mixed-level arrays used by the tuner as embedded data: the 27-run
array with thirteen 3-level columns (GF(3) linear construction) and the 50-run
array with one 2-level and eleven 5-level columns (Addelman-Kempthorne
construction).  Both are strength 2: every pair of columns contains every level
pair equally often, which is what makes per-column main effects unbiased.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# 27 runs x 13 columns, 3 levels each.  Rows are GF(3)^3 points in
# lexicographic order; columns are the 13 projective directions, so the first
# row is all zeros and any two columns hit each level pair exactly 3 times.
_L27_TEXT = """\
0000000000000
0010012121212
0020021212121
0101200111122
0111212202001
0121221020210
0202100222211
0212112010120
0222121101002
1001111001111
1011120122020
1021102210202
1102011112200
1112020200112
1122002021021
1200211220022
1210220011201
1220202102110
2002222002222
2012201120101
2022210211010
2100122110011
2110101201220
2120110022102
2201022221100
2211001012012
2221010100221
"""

# 50 runs: column 0 has 2 levels (the half indicator), columns 1..11 have 5
# levels.  Addelman-Kempthorne over GF(5) with quadratic twist x^2 -> 2*x^2 and
# level offsets mu^2 / 3*mu^2 in the second half; every (2,5) column pair hits
# each level pair 5 times and every (5,5) pair twice.
_L50_TEXT = """\
000000000000
001111111111
002222222222
003333333333
004444444444
010123412340
011234023401
012340134012
013401240123
014012301234
020241341302
021302402413
022413013024
023024124130
024130230241
030314242031
031420303142
032031414203
033142020314
034203131420
040432110432
041043221043
042104332104
043210443210
044321004321
100144103223
101200214334
102311320440
103422431001
104033042112
110330421124
111441032230
112002143341
113113204402
114224310013
120021233414
121132344020
122243400131
123304011242
124410122303
130212034143
131323140204
132434201310
133040312421
134101423032
140403324211
141014430322
142120041433
143231102044
144342213100
"""


@dataclass
class OrthogonalArray:
    """Design matrix of 0-based level indices plus per-column level counts."""

    matrix: np.ndarray
    levels: tuple
    strength: int = 2

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.intp)
        self.levels = tuple(int(v) for v in self.levels)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if self.matrix.shape[1] != len(self.levels):
            raise ValueError("levels must give one level count per column")
        for j, lv in enumerate(self.levels):
            col = self.matrix[:, j]
            if lv < 1 or col.min() < 0 or col.max() >= lv:
                raise ValueError(f"column {j} entries out of range [0, {lv})")

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def columns(self) -> int:
        return self.matrix.shape[1]

    def columns_with_levels(self, level_count: int) -> list:
        return [j for j, lv in enumerate(self.levels) if lv == level_count]


def _parse_digits(text: str, levels: Sequence[int]) -> OrthogonalArray:
    rows = [[int(ch) for ch in line] for line in text.strip().splitlines()]
    return OrthogonalArray(np.array(rows, dtype=np.intp), tuple(levels))


def builtin_l27() -> OrthogonalArray:
    """The embedded 27-run, 13-column, 3-level strength-2 array."""
    return _parse_digits(_L27_TEXT, [3] * 13)


def builtin_l50() -> OrthogonalArray:
    """The embedded 50-run array: one 2-level column, eleven 5-level columns."""
    return _parse_digits(_L50_TEXT, [2] + [5] * 11)


@dataclass
class PairBalanceViolation:
    column_a: int
    column_b: int
    level_a: int
    level_b: int
    count: int
    expected: float


@dataclass
class ValidationReport:
    rows: int
    columns: int
    pairs_checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return (f"strength-2 OK: {self.rows} runs, {self.columns} columns, "
                    f"{self.pairs_checked} column pairs balanced")
        lines = [f"strength-2 FAILED: {len(self.violations)} violating level pairs"]
        for v in self.violations[:20]:
            lines.append(f"  columns ({v.column_a},{v.column_b}) levels "
                         f"({v.level_a},{v.level_b}): count {v.count}, expected {v.expected:g}")
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)


def validate_strength2(oa: OrthogonalArray) -> ValidationReport:
    """Exhaustive pair-count check over every column pair."""
    violations = []
    pairs = 0
    for j, k in itertools.combinations(range(oa.columns), 2):
        pairs += 1
        lj, lk = oa.levels[j], oa.levels[k]
        expected = oa.rows / (lj * lk)
        counts = np.bincount(oa.matrix[:, j] * lk + oa.matrix[:, k], minlength=lj * lk)
        counts = counts.reshape(lj, lk)
        if expected != int(expected) or np.any(counts != int(expected)):
            for a in range(lj):
                for b in range(lk):
                    if counts[a, b] != expected:
                        violations.append(PairBalanceViolation(j, k, a, b, int(counts[a, b]), expected))
    return ValidationReport(oa.rows, oa.columns, pairs, violations)


@dataclass
class ExperimentResponse:
    """Outcome of one design row: the response plus the per-run objectives."""

    row: int
    response: float
    objectives: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class MainEffects:
    """Per-column, per-level mean responses and the winning level per column."""

    level_means: list        # one array of length levels[j] per column
    best_levels: list        # argbest mean per column, ties -> lowest level
    grand_mean: float
    maximize: bool


def _responses_array(responses, rows: int) -> np.ndarray:
    vals = [r.response if isinstance(r, ExperimentResponse) else float(r) for r in responses]
    if len(vals) != rows:
        raise ValueError(f"need one response per row: got {len(vals)}, expected {rows}")
    return np.asarray(vals, dtype=np.float64)


def main_effects(oa: OrthogonalArray, responses, maximize: bool = True) -> MainEffects:
    """Mean response per (column, level); best level = argbest of the means."""
    resp = _responses_array(responses, oa.rows)
    means = []
    best = []
    for j in range(oa.columns):
        col = oa.matrix[:, j]
        m = np.array([resp[col == lv].mean() for lv in range(oa.levels[j])])
        means.append(m)
        best.append(int(np.argmax(m) if maximize else np.argmin(m)))
    return MainEffects(means, best, float(resp.mean()), maximize)


def assemble_best(effects: MainEffects, level_values) -> list:
    """Pick each column's best-level concrete value; None entries mark unused
    (dummy) columns and are skipped."""
    if len(level_values) != len(effects.best_levels):
        raise ValueError("level_values must supply one entry per column")
    out = []
    for j, values in enumerate(level_values):
        if values is None:
            continue
        if len(values) != len(effects.level_means[j]):
            raise ValueError(f"column {j}: {len(values)} values for "
                             f"{len(effects.level_means[j])} levels")
        out.append(values[effects.best_levels[j]])
    return out


def save_oa(oa: OrthogonalArray, path) -> None:
    """Plain-text export: `rows cols strength`, level counts, then the matrix."""
    with open(path, "w") as f:
        f.write(f"{oa.rows} {oa.columns} {oa.strength}\n")
        f.write(" ".join(str(v) for v in oa.levels) + "\n")
        for row in oa.matrix:
            f.write(" ".join(str(v) for v in row) + "\n")


def load_oa(path) -> OrthogonalArray:
    with open(path) as f:
        rows, cols, strength = (int(v) for v in f.readline().split())
        levels = tuple(int(v) for v in f.readline().split())
        if len(levels) != cols:
            raise ValueError("level-count line does not match column count")
        matrix = np.array([[int(v) for v in f.readline().split()] for _ in range(rows)],
                          dtype=np.intp)
    if matrix.shape != (rows, cols):
        raise ValueError("matrix shape does not match header")
    return OrthogonalArray(matrix, levels, strength)
