"""Rectangular-multiplication exponent tables and blocking-factor selection.

This is the one inexact module: double precision with explicit
tolerances, feeding only integer blocking choices back into the exact
code.  The bundled table holds exactly the anchor values the exponent
literature pins down -- omega(1), omega(0.5), the dual exponent region
where omega(k) = 2, and the crossing point with 3 - k -- interpolated
linearly.  A finer table is a drop-in text file with `k omega` lines.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field as dataclass_field

from .errors import FormatError

OMEGA_SQUARE = 2.37286
DUAL_EXPONENT = 0.31389

BUNDLED_ANCHORS = (
    (0.0, 2.0),
    (DUAL_EXPONENT, 2.0),
    (0.5, 2.0442),
    (0.7869, 2.2131),
    (1.0, OMEGA_SQUARE),
)


@dataclass(frozen=True)
class OmegaTable:
    """Sorted (k, omega(k)) samples on [0, 1], interpolated linearly."""

    points: tuple

    def __post_init__(self):
        pts = tuple((float(k), float(w)) for k, w in self.points)
        if len(pts) < 2:
            raise FormatError("omega table needs at least two points")
        ks = [k for k, _ in pts]
        if ks != sorted(ks) or len(set(ks)) != len(ks):
            raise FormatError("omega table abscissae must be strictly ascending")
        if ks[0] != 0.0 or ks[-1] != 1.0:
            raise FormatError("omega table must span [0, 1]")
        last = None
        for k, w in pts:
            if w < 2.0 - 1e-12 or w < 1.0 + k - 1e-12:
                raise FormatError(f"omega({k}) = {w} violates the trivial lower bounds")
            if last is not None and w < last - 1e-12:
                raise FormatError("omega(k) must be nondecreasing")
            last = w
        object.__setattr__(self, "points", pts)

    def omega(self, k: float) -> float:
        if not 0.0 <= k <= 1.0:
            raise ValueError(f"k = {k} outside [0, 1]")
        ks = [p[0] for p in self.points]
        i = bisect.bisect_right(ks, k) - 1
        if i == len(self.points) - 1:
            return self.points[-1][1]
        k0, w0 = self.points[i]
        k1, w1 = self.points[i + 1]
        if k1 == k0:
            return w0
        t = (k - k0) / (k1 - k0)
        return w0 + t * (w1 - w0)


def bundled_table() -> OmegaTable:
    return OmegaTable(BUNDLED_ANCHORS)


def load_table(path) -> OmegaTable:
    """Parse `k omega` lines, ascending k spanning [0, 1]."""
    points = []
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            parts = ln.split()
            if len(parts) != 2:
                raise FormatError(f"{path}: bad omega-table line {ln!r}")
            try:
                points.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise FormatError(f"{path}: non-numeric entry in {ln!r}") from exc
    return OmegaTable(tuple(points))


def omega_of_k(table: OmegaTable, k: float) -> float:
    return table.omega(k)


@dataclass(frozen=True)
class ExponentReport:
    """Crossing point of omega(k) with 3 - k, plus the exponent curves.

    grid rows are (k, omega(k), 3 - k, 1 + (omega - 1) k, 2 + (omega - 2) k):
    the exponents of the rectangular product, the m n^2 recovery work, and
    the two all-square bracketing strategies.
    """

    k_star: float
    omega_star: float
    grid: tuple

    def blocking_exponent(self, n: int) -> int:
        """round(n^{k_star}), the target block size before divisor snapping."""
        return max(int(round(n**self.k_star)), 1)


def solve_crossing(table: OmegaTable, grid_points: int = 101, tol: float = 1e-9) -> ExponentReport:
    """Unique k* with omega(k*) = 3 - k*, by bisection on the monotone gap."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if table.omega(mid) - (3.0 - mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    k_star = 0.5 * (lo + hi)
    omega_star = table.omega(k_star)
    omega1 = table.omega(1.0)
    grid = []
    for i in range(grid_points):
        k = i / (grid_points - 1)
        grid.append(
            (k, table.omega(k), 3.0 - k, 1.0 + (omega1 - 1.0) * k, 2.0 + (omega1 - 2.0) * k)
        )
    return ExponentReport(k_star=k_star, omega_star=omega_star, grid=tuple(grid))


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def choose_blocking(n: int, table: OmegaTable | None = None):
    """(s, m) with s the divisor of n nearest n^{k*}, ties toward larger s.

    Prime n falls back to s = 1 with a warning; callers may pad instead.
    """
    if n < 4:
        raise ValueError(f"blocking needs n >= 4, got {n}")
    if table is None:
        table = bundled_table()
    divisors = _divisors(n)
    if divisors == [1, n]:  # prime n: only degenerate blockings exist
        warnings.warn(
            f"n = {n} is prime; falling back to s = 1 (consider padding)",
            stacklevel=2,
        )
        return 1, n
    target = n ** solve_crossing(table).k_star
    best = min(divisors, key=lambda d: (abs(d - target), -d))
    return best, n // best
