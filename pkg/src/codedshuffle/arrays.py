"""Star/integer coded arrays: parsing, statistics, and validators.

An array is an F x K grid whose entries are either a star (wildcard access
marker) or a non-negative integer symbol.  Rows model file batches, columns
model reducer nodes; a star at (f, k) means reducer k can read batch f, an
integer marks a batch the reducer must recover during the shuffle.  The
validators check the two classical condition sets:

* placement delivery array (PDA): uniform per-column star count, every
  symbol present, and the pairwise crossing condition;
* map-reduce array (MRA): every symbol occurring at least twice plus the
  same crossing condition (column star counts may differ).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .kernels import STAR, first_pair_violation

__all__ = [
    "STAR",
    "ArrayFormatError",
    "TruncationError",
    "CodedArray",
    "ArrayStats",
    "Violation",
    "ValidationReport",
    "parse_array",
    "compute_stats",
    "validate_mra",
    "validate_pda",
    "validate_l_cyclic",
    "truncate_columns",
]


class ArrayFormatError(ValueError):
    """Raised when array text does not follow the exchange format."""


class TruncationError(ValueError):
    """Raised when a column restriction orphans a symbol."""

    def __init__(self, symbol: int):
        super().__init__(
            f"symbol {symbol} would occur only once after truncation"
        )
        self.symbol = symbol


@dataclass(frozen=True, eq=False)
class CodedArray:
    """Immutable F x K grid of stars (-1) and non-negative integer symbols."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ArrayFormatError("grid must be a non-empty 2-D array")
        if (g < STAR).any():
            raise ArrayFormatError("entries must be * or non-negative integers")
        g = np.ascontiguousarray(g.copy())
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]

    @cached_property
    def star_mask(self) -> np.ndarray:
        mask = self.grid == STAR
        mask.setflags(write=False)
        return mask

    @cached_property
    def symbols(self) -> tuple[int, ...]:
        """Distinct integer symbols, ascending."""
        vals = np.unique(self.grid[self.grid != STAR])
        return tuple(int(v) for v in vals)

    @property
    def symbol_count(self) -> int:
        return len(self.symbols)

    @property
    def is_normalized(self) -> bool:
        return self.symbols == tuple(range(self.symbol_count))

    def normalize(self) -> "CodedArray":
        """Relabel symbols onto the dense range [0, S) preserving value order.

        Star positions and the symbol-equality classes are untouched, so
        every validation outcome is preserved; applying it twice is a no-op.
        """
        if self.is_normalized:
            return self
        grid = self.grid.copy()
        nonstar = grid != STAR
        lookup = {s: i for i, s in enumerate(self.symbols)}
        grid[nonstar] = np.vectorize(lookup.__getitem__)(grid[nonstar])
        return CodedArray(grid)

    def entry(self, f: int, k: int) -> int:
        return int(self.grid[f, k])

    def column_star_counts(self) -> list[int]:
        return [int(c) for c in self.star_mask.sum(axis=0)]

    def serialize(self) -> str:
        """Canonical text form; re-parsing yields an equal array."""
        lines = [f"{self.rows} {self.cols}"]
        for f in range(self.rows):
            toks = [
                "*" if v == STAR else str(int(v)) for v in self.grid[f]
            ]
            lines.append(" ".join(toks))
        return "\n".join(lines) + "\n"

    def equal_up_to_relabeling(self, other: "CodedArray") -> bool:
        """True when a symbol bijection maps this grid onto ``other``."""
        if self.grid.shape != other.grid.shape:
            return False
        if not np.array_equal(self.star_mask, other.star_mask):
            return False
        fwd: dict[int, int] = {}
        seen: set[int] = set()
        a = self.grid[~self.star_mask]
        b = other.grid[~other.star_mask]
        for x, y in zip(a.tolist(), b.tolist()):
            if x in fwd:
                if fwd[x] != y:
                    return False
            else:
                if y in seen:
                    return False
                fwd[x] = y
                seen.add(y)
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, CodedArray):
            return NotImplemented
        return np.array_equal(self.grid, other.grid)

    def __hash__(self) -> int:
        return hash((self.grid.shape, self.grid.tobytes()))

    def __repr__(self) -> str:
        return f"CodedArray({self.rows}x{self.cols}, S={self.symbol_count})"


def parse_array(text: str) -> CodedArray:
    """Parse the text exchange format.

    Format: a header line ``F K``, then F lines of K whitespace-separated
    tokens (``*`` or a decimal non-negative integer).  ``#`` lines are
    comments.  A trailing newline is required.
    """
    if not text:
        raise ArrayFormatError("empty input")
    if not text.endswith("\n"):
        raise ArrayFormatError("trailing newline required")
    lines = [
        ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ArrayFormatError("empty grid")
    header = lines[0].split()
    if len(header) != 2:
        raise ArrayFormatError("header must be 'F K'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ArrayFormatError(f"bad header: {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise ArrayFormatError("empty grid")
    if len(lines) - 1 != rows:
        raise ArrayFormatError(
            f"expected {rows} data rows, found {len(lines) - 1}"
        )
    grid = np.empty((rows, cols), dtype=np.int64)
    for f, line in enumerate(lines[1:]):
        toks = line.split()
        if len(toks) != cols:
            raise ArrayFormatError(
                f"row {f} has {len(toks)} entries, expected {cols}"
            )
        for k, tok in enumerate(toks):
            if tok == "*":
                grid[f, k] = STAR
            elif tok.isdigit():
                grid[f, k] = int(tok)
            else:
                raise ArrayFormatError(
                    f"token {tok!r} at ({f}, {k}) is neither '*' nor a "
                    "non-negative integer"
                )
    return CodedArray(grid)


@dataclass(frozen=True)
class ArrayStats:
    """Symbol multiplicities and per-column star layout of an array."""

    multiplicity: Mapping[int, int]
    histogram: Mapping[int, int]
    column_stars: tuple[int, ...]
    common_g: int | None
    cyclic_shift: int | None

    @property
    def nonstar_cells(self) -> int:
        return sum(g * n for g, n in self.histogram.items())


def _star_run_start(col_mask: np.ndarray) -> int | None:
    """Start row of the single cyclic star run of a column, if one exists.

    Returns None when the stars do not form one cyclically-consecutive
    block.  A fully-starred column counts as consecutive with start 0.
    """
    F = col_mask.shape[0]
    z = int(col_mask.sum())
    if z == 0:
        return None
    if z == F:
        return 0
    starts = [
        f for f in range(F) if col_mask[f] and not col_mask[(f - 1) % F]
    ]
    if len(starts) != 1:
        return None
    return starts[0]


def _detect_cyclic_shift(arr: CodedArray) -> int | None:
    counts = arr.column_star_counts()
    z = counts[0]
    if any(c != z for c in counts) or z == 0 or z == arr.rows:
        return None
    starts = []
    for k in range(arr.cols):
        s = _star_run_start(arr.star_mask[:, k])
        if s is None:
            return None
        starts.append(s)
    if arr.cols == 1:
        return None
    F = arr.rows
    shift = (starts[1] - starts[0]) % F
    for k in range(1, arr.cols):
        if (starts[k] - starts[k - 1]) % F != shift:
            return None
    return shift


def compute_stats(arr: CodedArray) -> ArrayStats:
    """Exact symbol multiplicities, histogram, and star layout."""
    nonstar = arr.grid[arr.grid != STAR]
    vals, counts = np.unique(nonstar, return_counts=True)
    multiplicity = {int(v): int(c) for v, c in zip(vals, counts)}
    histogram: dict[int, int] = {}
    for c in counts.tolist():
        histogram[c] = histogram.get(c, 0) + 1
    common_g = None
    if multiplicity and len(set(multiplicity.values())) == 1:
        common_g = next(iter(multiplicity.values()))
    return ArrayStats(
        multiplicity=multiplicity,
        histogram=histogram,
        column_stars=tuple(arr.column_star_counts()),
        common_g=common_g,
        cyclic_shift=_detect_cyclic_shift(arr),
    )


@dataclass(frozen=True)
class Violation:
    """Concrete witness for a failed validation condition."""

    condition: str
    cells: tuple[tuple[int, int], ...] = ()
    column: int | None = None
    symbol: int | None = None

    def describe(self) -> str:
        parts = [self.condition]
        if self.symbol is not None:
            parts.append(f"symbol={self.symbol}")
        if self.column is not None:
            parts.append(f"column={self.column}")
        if self.cells:
            parts.append("cells=" + ",".join(f"({f},{k})" for f, k in self.cells))
        return " ".join(parts)


@dataclass(frozen=True)
class ValidationReport:
    checks: Mapping[str, bool]
    violation: Violation | None = None
    details: Mapping[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


_PAIR_TAGS = {1: "C2-1", 2: "C2-2"}


def _pair_checks(arr: CodedArray):
    """Shared crossing-condition scan; returns (c21_ok, c22_ok, violation)."""
    hit = first_pair_violation(arr.grid)
    if hit is None:
        return True, True, None
    code, c1, c2 = hit
    tag = _PAIR_TAGS[code]
    sym = arr.entry(*c1)
    viol = Violation(tag, cells=(c1, c2), symbol=sym)
    return code != 1, code != 2, viol


def _first_orphan(arr: CodedArray, multiplicity: Mapping[int, int]):
    """Row-major scan for the first cell whose symbol occurs exactly once."""
    for f in range(arr.rows):
        for k in range(arr.cols):
            v = arr.entry(f, k)
            if v != STAR and multiplicity[v] == 1:
                return Violation("C1", cells=((f, k),), symbol=v)
    return None


def validate_mra(arr: CodedArray) -> ValidationReport:
    """Check C1 (every symbol more than once) and the crossing condition."""
    stats = compute_stats(arr)
    c1_ok = bool(stats.multiplicity) and min(stats.multiplicity.values()) >= 2
    c21_ok, c22_ok, pair_viol = _pair_checks(arr)
    violation = None
    if not c1_ok:
        violation = _first_orphan(arr, stats.multiplicity) or Violation("C1")
    elif pair_viol is not None:
        violation = pair_viol
    return ValidationReport(
        checks={"C1": c1_ok, "C2-1": c21_ok, "C2-2": c22_ok},
        violation=violation,
    )


def validate_pda(arr: CodedArray) -> ValidationReport:
    """Check A1 (uniform column stars), A2 (dense symbols), and crossings."""
    counts = arr.column_star_counts()
    z = counts[0]
    a1_ok = all(c == z for c in counts)
    a1_viol = None
    if not a1_ok:
        bad = next(k for k, c in enumerate(counts) if c != z)
        a1_viol = Violation("A1", column=bad)
    # A2 on the raw labels: every integer of the declared range [0, S) must
    # occur, so gappy or empty labelings fail even though normalize() would
    # silently repair them.
    syms = arr.symbols
    a2_ok = len(syms) > 0 and syms == tuple(range(len(syms)))
    a2_viol = None
    if not a2_ok:
        missing = None
        if syms:
            expect = set(range(max(syms) + 1))
            missing = min(expect - set(syms)) if expect - set(syms) else None
        a2_viol = Violation("A2", symbol=missing)
    c21_ok, c22_ok, pair_viol = _pair_checks(arr)
    violation = a1_viol or a2_viol or pair_viol
    return ValidationReport(
        checks={"A1": a1_ok, "A2": a2_ok, "C2-1": c21_ok, "C2-2": c22_ok},
        violation=violation,
        details={"Z": z if a1_ok else None, "column_stars": counts},
    )


def validate_l_cyclic(arr: CodedArray, shift: int) -> ValidationReport:
    """Check g-regularity plus the consecutive/shifted star layout.

    Passes when every symbol occurs the same number of times, the stars of
    each column form one cyclically-consecutive block, and each column's
    block is the previous column's shifted down by ``shift`` rows (mod F).
    """
    stats = compute_stats(arr)
    regular_ok = stats.common_g is not None
    reg_viol = None
    if not regular_ok:
        reg_viol = Violation("C1'")
    starts: list[int | None] = [
        _star_run_start(arr.star_mask[:, k]) for k in range(arr.cols)
    ]
    consec_ok = all(s is not None for s in starts) and all(
        c > 0 for c in arr.column_star_counts()
    )
    consec_viol = None
    if not consec_ok:
        bad = next(
            k
            for k in range(arr.cols)
            if starts[k] is None or arr.column_star_counts()[k] == 0
        )
        consec_viol = Violation("l-cyclic", column=bad)
    shift_ok = consec_ok
    shift_viol = None
    if consec_ok:
        F = arr.rows
        counts = arr.column_star_counts()
        for k in range(1, arr.cols):
            if counts[k] != counts[k - 1] or (
                counts[k] < F and (starts[k] - starts[k - 1]) % F != shift % F
            ):
                shift_ok = False
                shift_viol = Violation("l-cyclic", column=k)
                break
    return ValidationReport(
        checks={
            "C1'": regular_ok,
            "stars-consecutive": consec_ok,
            "cyclic-shift": shift_ok,
        },
        violation=reg_viol or consec_viol or shift_viol,
        details={"g": stats.common_g, "l": shift},
    )


def truncate_columns(arr: CodedArray, keep: Iterable[int]) -> CodedArray:
    """Restrict to a column subset; valid only while C1 survives.

    Column removal never breaks the crossing condition, so the result is an
    MRA exactly when every surviving symbol still occurs at least twice;
    otherwise :class:`TruncationError` names the first orphaned symbol.
    """
    cols = sorted(set(int(k) for k in keep))
    if not cols:
        raise ValueError("keep must name at least one column")
    if cols[0] < 0 or cols[-1] >= arr.cols:
        raise ValueError(f"column index out of range: {cols}")
    sub = arr.grid[:, cols]
    nonstar = sub[sub != STAR]
    if nonstar.size:
        vals, counts = np.unique(nonstar, return_counts=True)
        orphans = vals[counts == 1]
        if orphans.size:
            raise TruncationError(int(orphans.min()))
    return CodedArray(sub).normalize()
