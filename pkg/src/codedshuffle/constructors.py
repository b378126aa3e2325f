"""Deterministic builders for the coded-array families.

Three families are produced:

* ``algorithm1``: the combinatorial-topology array indexed by r-subsets
  (rows) and alpha-subsets (columns) of the mapper set, starred where the
  subsets intersect and otherwise carrying the lexicographic rank of their
  union;
* ``algorithm2``: horizontal concatenation of symbol-offset copies of
  ``algorithm1`` blocks, one group per connectivity degree alpha;
* ``nnc_pda``: the r-cyclic g-regular family for the wrap-around topology
  where mapper m stores r consecutive batches and reducer m reads alpha
  consecutive mappers.

All builders are pure and deterministic: identical parameters give
byte-identical serialized arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .arrays import STAR, CodedArray

__all__ = [
    "ConstructionError",
    "GcParameters",
    "lex_rank",
    "lex_unrank",
    "algorithm1",
    "shift_symbols",
    "algorithm2",
    "nnc_pda",
]


class ConstructionError(ValueError):
    """Raised when constructor parameters violate a precondition."""


def lex_rank(subset, universe: int) -> int:
    """0-based position of a subset in lexicographic order of its size class.

    ``subset`` must be a collection of distinct integers in [0, universe).
    """
    t = sorted(int(x) for x in subset)
    m = len(t)
    if m == 0:
        raise ValueError("subset must be non-empty")
    if len(set(t)) != m:
        raise ValueError("subset contains duplicate elements")
    if t[0] < 0 or t[-1] >= universe:
        raise ValueError(f"element out of range [0, {universe})")
    rank = 0
    prev = -1
    for j, tj in enumerate(t):
        for v in range(prev + 1, tj):
            rank += comb(universe - 1 - v, m - 1 - j)
        prev = tj
    return rank


def lex_unrank(rank: int, size: int, universe: int) -> tuple[int, ...]:
    """Inverse of :func:`lex_rank` for subsets of the given size."""
    if size < 1 or size > universe:
        raise ValueError("size must be in [1, universe]")
    if rank < 0 or rank >= comb(universe, size):
        raise ValueError(f"rank out of range [0, C({universe},{size}))")
    out = []
    v = 0
    remaining = size
    while remaining > 0:
        block = comb(universe - 1 - v, remaining - 1)
        if rank < block:
            out.append(v)
            remaining -= 1
        else:
            rank -= block
        v += 1
    return tuple(out)


def algorithm1(mappers: int, r: int, alpha: int) -> CodedArray:
    """Combinatorial-topology array: C(mappers, r) x C(mappers, alpha).

    Rows are the r-subsets T and columns the alpha-subsets U of the mapper
    set, both in lexicographic order.  The entry is a star when T and U
    intersect, otherwise the lexicographic rank of T | U among the
    (alpha+r)-subsets, making the result C(r+alpha, r)-regular with
    C(mappers, alpha+r) symbols.
    """
    lam = mappers
    if not 1 <= alpha <= lam - 1:
        raise ConstructionError(f"alpha must be in [1, {lam - 1}], got {alpha}")
    if not 1 <= r <= lam - alpha:
        raise ConstructionError(f"r must be in [1, {lam - alpha}], got {r}")
    row_sets = list(combinations(range(lam), r))
    col_sets = list(combinations(range(lam), alpha))
    grid = np.full((len(row_sets), len(col_sets)), STAR, dtype=np.int64)
    for i, t in enumerate(row_sets):
        tset = set(t)
        for j, u in enumerate(col_sets):
            if tset.isdisjoint(u):
                grid[i, j] = lex_rank(t + u, lam)
    return CodedArray(grid)


def shift_symbols(arr: CodedArray, offset: int) -> CodedArray:
    """Add a constant to every integer entry; stars are unchanged."""
    if offset < 0:
        raise ValueError("offset must be non-negative")
    grid = arr.grid.copy()
    grid[grid != STAR] += offset
    return CodedArray(grid)


@dataclass(frozen=True)
class GcParameters:
    """Topology with multiplicities: K_alpha reducers per alpha-subset.

    ``multiplicities[a - 1]`` is the reducer count attached to every
    alpha-subset of mappers of size ``a``, for a in [1, mappers - computation].
    """

    mappers: int
    computation: int
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        lam, r = self.mappers, self.computation
        if lam < 2:
            raise ConstructionError("at least two mappers required")
        if not 1 <= r <= lam - 1:
            raise ConstructionError(f"computation load must be in [1, {lam - 1}]")
        ks = tuple(int(k) for k in self.multiplicities)
        object.__setattr__(self, "multiplicities", ks)
        if len(ks) != lam - r:
            raise ConstructionError(
                f"expected {lam - r} multiplicities, got {len(ks)}"
            )
        if any(k < 0 for k in ks):
            raise ConstructionError("multiplicities must be non-negative")
        if not any(ks):
            raise ConstructionError("at least one multiplicity must be positive")

    @property
    def reducer_count(self) -> int:
        lam = self.mappers
        return sum(
            k * comb(lam, a) for a, k in enumerate(self.multiplicities, start=1)
        )

    @property
    def symbol_total(self) -> int:
        lam, r = self.mappers, self.computation
        return sum(
            k * comb(lam, a + r)
            for a, k in enumerate(self.multiplicities, start=1)
        )


def algorithm2(params: GcParameters) -> CodedArray:
    """Concatenate symbol-offset copies of the per-alpha blocks.

    Blocks are ordered by ascending alpha and, within an alpha, by copy
    index; copy m of a block is offset by (m-1) times the block's symbol
    count, and each alpha group is offset past all preceding groups.
    """
    lam, r = params.mappers, params.computation
    blocks: list[np.ndarray] = []
    group_offset = 0
    for a, count in enumerate(params.multiplicities, start=1):
        if count == 0:
            continue
        base = algorithm1(lam, r, a)
        s1 = comb(lam, a + r)
        for m in range(count):
            blocks.append(shift_symbols(base, group_offset + m * s1).grid)
        group_offset += count * s1
    return CodedArray(np.hstack(blocks))


# --- r-cyclic g-regular family -------------------------------------------
#
# Column k carries stars on rows [r*k, r*k + alpha*r); a non-star cell is
# addressed (k, i) with row (r*k + alpha*r + i) mod columns.  Two cells may
# share a symbol only when each one's row is starred in the other's column,
# which reduces to a window condition on R = r*(k1 - k2) mod columns.  A
# g-regular fill is a partition of the cells into size-g cliques of that
# compatibility graph.
#
# The full array repeats with period n = columns / r (column k and column
# k + n carry identical star blocks, rows group into bands of r), so the
# search runs first on the reduced n x n one-step-shift grid and the result
# is blown back up r-fold in both directions; that path reproduces the
# published arrays cell-for-cell.  Some parameter sets admit a fill only
# without the band alignment (or not at all), so a full-size search backs
# the reduced one up.


def _cell_compatible(
    cols: int, r: int, alpha: int, k1: int, i1: int, k2: int, i2: int
) -> bool:
    z = alpha * r
    m = cols - z
    big_r = (r * (k1 - k2)) % cols
    if big_r == 0:
        return False
    return max(m - i1, i2 + 1) <= big_r <= min(cols - 1 - i1, z + i2)


def _clique_partition(cols: int, r: int, alpha: int, g: int):
    """Deterministic exact search for a size-g clique partition.

    Cells are explored in lexicographic order: the smallest unassigned cell
    opens a new clique, extensions are tried smallest-first over the current
    candidate pool, and branches die when the pool cannot reach size g.
    Returns the cliques in discovery order, or None when none exists.
    """
    m = cols - alpha * r
    cells = [(k, i) for k in range(cols) for i in range(m)]
    total = len(cells)
    adj: list[set[int]] = [set() for _ in range(total)]
    for x in range(total):
        k1, i1 = cells[x]
        for y in range(x + 1, total):
            k2, i2 = cells[y]
            if _cell_compatible(cols, r, alpha, k1, i1, k2, i2):
                adj[x].add(y)
                adj[y].add(x)
    assigned = [False] * total
    groups: list[list[int]] = []

    def grow(group: list[int], pool: list[int]) -> bool:
        if len(group) == g:
            return solve()
        need = g - len(group)
        for pos, cand in enumerate(pool):
            if assigned[cand]:
                continue
            rest = [x for x in pool[pos + 1 :] if x in adj[cand] and not assigned[x]]
            if len(rest) < need - 1:
                continue
            assigned[cand] = True
            group.append(cand)
            if grow(group, rest):
                return True
            group.pop()
            assigned[cand] = False
        return False

    def solve() -> bool:
        try:
            head = assigned.index(False)
        except ValueError:
            return True
        assigned[head] = True
        group = [head]
        groups.append(group)
        pool = sorted(x for x in adj[head] if not assigned[x])
        if grow(group, pool):
            return True
        groups.pop()
        assigned[head] = False
        return False

    if not solve():
        return None
    return [[cells[x] for x in grp] for grp in groups]


def nnc_pda(mappers: int, r: int, alpha: int) -> CodedArray:
    """r-cyclic g-regular array for the wrap-around topology.

    Column k carries stars on rows [r*k, r*k + alpha*r) mod mappers; the
    integer fill realizes coding gain g = 2*mappers / (mappers - (alpha-1)*r)
    with (mappers - alpha*r) * (mappers - (alpha-1)*r) / 2 symbols.
    """
    lam = mappers
    if lam < 2 or r < 1 or alpha < 1:
        raise ConstructionError("need mappers >= 2, r >= 1, alpha >= 1")
    if lam % r != 0:
        raise ConstructionError(f"r must divide the mapper count ({r} | {lam} fails)")
    n = lam // r
    if alpha >= n:
        raise ConstructionError(
            f"alpha must be smaller than mappers/r = {n}, got {alpha}"
        )
    d = lam - (alpha - 1) * r
    if (2 * lam) % d != 0:
        raise ConstructionError(
            f"coding gain 2*{lam}/{d} is not an integer"
        )
    if ((lam - alpha * r) * d) % 2 != 0:
        raise ConstructionError("symbol count is not an integer")
    g = 2 * lam // d
    expected_s = (lam - alpha * r) * d // 2
    grid = np.full((lam, lam), STAR, dtype=np.int64)
    groups = _clique_partition(n, 1, alpha, g)
    if groups is not None:
        # Blow the reduced partition up r-fold: each reduced cell becomes an
        # r x r block of cells (row offset a, column copy t), and the
        # diagonal labeling (same a, same t across a clique) preserves the
        # crossing condition because star blocks align to r-row bands.
        s_reduced = len(groups)
        for t in range(r):
            for a in range(r):
                for idx, group in enumerate(groups):
                    sym = t * (r * s_reduced) + a * s_reduced + idx
                    for c, i in group:
                        f = r * ((c + alpha + i) % n) + a
                        k = c + t * n
                        grid[f, k] = sym
        produced = r * r * s_reduced
    else:
        full = _clique_partition(lam, r, alpha, g) if r > 1 else None
        if full is None:
            raise ConstructionError(
                f"no {g}-regular fill exists for mappers={lam}, r={r}, "
                f"alpha={alpha} (exhaustive search)"
            )
        z = alpha * r
        for idx, group in enumerate(full):
            for k, i in group:
                grid[(r * k + z + i) % lam, k] = idx
        produced = len(full)
    if produced != expected_s:
        raise ConstructionError(
            f"fill produced {produced} symbols, expected {expected_s}"
        )
    return CodedArray(grid)
