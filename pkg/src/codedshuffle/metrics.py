"""Exact-rational communication loads and lower bounds.

Every function returns :class:`fractions.Fraction`; decimals appear only in
the reporting layer.  The achievable loads come in two independent routes:
from an array's symbol statistics (:func:`load_from_array`) and from the
closed forms per topology family, and the test suite pins their equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .arrays import CodedArray, compute_stats, validate_mra
from .constructors import ConstructionError, GcParameters

__all__ = [
    "LoadCurve",
    "format_rational",
    "load_from_array",
    "be_corners",
    "be_load",
    "be_lower_bound_corners",
    "be_lower_bound",
    "nnc_load",
    "ct_load",
    "gc_load",
    "gc_lower_bound",
    "gc_lower_envelope",
    "lower_convex_envelope",
]


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class LoadCurve:
    """Piecewise-linear curve through (r, L) corner points."""

    corners: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pts = tuple(
            (Fraction(r), Fraction(v)) for r, v in self.corners
        )
        for (r1, _), (r2, _) in zip(pts, pts[1:]):
            if r2 <= r1:
                raise ValueError("corner r values must be strictly increasing")
        object.__setattr__(self, "corners", pts)

    def value_at(self, r) -> Fraction:
        r = Fraction(r)
        pts = self.corners
        if r < pts[0][0] or r > pts[-1][0]:
            raise ValueError(
                f"r={r} outside curve range [{pts[0][0]}, {pts[-1][0]}]"
            )
        for (r1, v1), (r2, v2) in zip(pts, pts[1:]):
            if r1 <= r <= r2:
                return v1 + (v2 - v1) * (r - r1) / (r2 - r1)
        return pts[-1][1]


def load_from_array(arr: CodedArray) -> Fraction:
    """Shuffle load of the coded scheme an array encodes.

    Each symbol of multiplicity g contributes g carriers split into g - 1
    packets, giving S/(K*F) + sum_g S_g / (K*F*(g-1)).
    """
    report = validate_mra(arr)
    if not report.ok:
        detail = report.violation.describe() if report.violation else "invalid"
        raise ValueError(f"not a valid map-reduce array: {detail}")
    stats = compute_stats(arr)
    kf = arr.cols * arr.rows
    total = Fraction(arr.symbol_count, kf)
    for g, count in stats.histogram.items():
        total += Fraction(count, kf * (g - 1))
    return total


def _check_be_params(mappers: int, alpha: int) -> None:
    if not 1 <= alpha <= mappers - 1:
        raise ConstructionError(f"alpha must be in [1, {mappers - 1}]")


def be_corners(mappers: int, alpha: int) -> LoadCurve:
    """Achievable corner points for the subset topology, r in [1, L-a+1]."""
    _check_be_params(mappers, alpha)
    lam = mappers
    pts = []
    for r in range(1, lam - alpha + 2):
        val = Fraction(
            comb(lam - alpha, r), comb(lam, r) * (comb(r + alpha, r) - 1)
        )
        pts.append((Fraction(r), val))
    return LoadCurve(tuple(pts))


def be_load(mappers: int, alpha: int, r) -> Fraction:
    """Achievable load at (possibly fractional) r via memory sharing."""
    return be_corners(mappers, alpha).value_at(r)


def be_lower_bound_corners(mappers: int, alpha: int) -> LoadCurve:
    _check_be_params(mappers, alpha)
    lam = mappers
    pts = []
    for r in range(1, lam - alpha + 2):
        val = Fraction(comb(lam, r + alpha), comb(lam, r) * comb(lam, alpha))
        pts.append((Fraction(r), val))
    return LoadCurve(tuple(pts))


def be_lower_bound(mappers: int, alpha: int, r) -> Fraction:
    """Cut-set style lower bound for the subset topology."""
    return be_lower_bound_corners(mappers, alpha).value_at(r)


def nnc_load(mappers: int, r: int, alpha: int) -> Fraction:
    """Achievable load of the wrap-around family."""
    lam = mappers
    if lam < 2 or r < 1 or alpha < 1:
        raise ConstructionError("need mappers >= 2, r >= 1, alpha >= 1")
    if lam % r != 0:
        raise ConstructionError(f"r must divide the mapper count ({r} | {lam} fails)")
    if alpha >= lam // r:
        raise ConstructionError(
            f"alpha must be smaller than mappers/r = {lam // r}"
        )
    return Fraction(
        (lam - alpha * r) * (lam - (alpha - 1) * r),
        lam * (lam + (alpha - 1) * r),
    )


def ct_load(mappers: int, r: int, alpha: int) -> Fraction:
    """Achievable load of the subset topology at an integer corner."""
    lam = mappers
    if not 1 <= alpha <= lam - 1:
        raise ConstructionError(f"alpha must be in [1, {lam - 1}]")
    if not 1 <= r <= lam - alpha:
        raise ConstructionError(f"r must be in [1, {lam - alpha}]")
    return Fraction(
        comb(lam - alpha, r), comb(lam, r) * (comb(r + alpha, r) - 1)
    )


def gc_load(params: GcParameters) -> Fraction:
    """Achievable load with K_alpha reducers per alpha-subset."""
    lam, r = params.mappers, params.computation
    total = Fraction(0)
    for a, k in enumerate(params.multiplicities, start=1):
        if k:
            total += Fraction(k * comb(lam - r, a), comb(r + a, r) - 1)
    return total / params.reducer_count


def gc_lower_bound(params: GcParameters) -> Fraction:
    """Homogeneous-network lower bound at the parameters' computation load."""
    lam, r = params.mappers, params.computation
    num = sum(
        k * comb(lam - r, a) for a, k in enumerate(params.multiplicities, start=1)
    )
    reach = sum(
        k * (comb(lam, a) - comb(lam - r, a))
        for a, k in enumerate(params.multiplicities, start=1)
    )
    return Fraction(num, params.reducer_count * reach)


def gc_lower_envelope(mappers: int, multiplicities) -> LoadCurve:
    """Lower convex envelope of the bound over integer computation loads.

    ``multiplicities`` gives K_alpha for alpha in [1, mappers - 1]; at each
    r the vector is truncated to alpha <= mappers - r (higher-degree
    reducers already read everything), and r values whose truncation is all
    zero contribute no point.
    """
    lam = mappers
    ks = tuple(int(k) for k in multiplicities)
    if len(ks) != lam - 1:
        raise ValueError(f"expected {lam - 1} multiplicities, got {len(ks)}")
    points = []
    for r in range(1, lam):
        trunc = ks[: lam - r]
        if not any(trunc):
            continue
        params = GcParameters(lam, r, trunc)
        points.append((Fraction(r), gc_lower_bound(params)))
    if not points:
        raise ValueError("no computation load has a positive reducer count")
    return lower_convex_envelope(points)


def lower_convex_envelope(points) -> LoadCurve:
    """Greatest convex piecewise-linear minorant of a point set."""
    pts = sorted((Fraction(r), Fraction(v)) for r, v in points)
    if not pts:
        raise ValueError("at least one point required")
    for (r1, _), (r2, _) in zip(pts, pts[1:]):
        if r1 == r2:
            raise ValueError(f"duplicate r value: {r1}")
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop the middle point when it lies strictly above the chord
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) < 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return LoadCurve(tuple(hull))
