"""Independent brute-force checks for the quadrature construction.

Everything here deliberately avoids the recursion it is used to audit:
reference integrals come from composite Gauss-Legendre with hard-coded
nodes, random splines from a counter-based generator with documented
constants, and the cubic-factor check from direct sign analysis on
monotone pieces.  All functions are pure; audits over many grid sizes can
run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid_basis import SplineCoefficients, UniformKnotGrid, basis_eval, basis_integral
from .quadrature import QuadratureRule, ResidueState

__all__ = [
    "ExactnessReport",
    "reference_integral",
    "gauss_legendre_between",
    "random_spline",
    "exactness_report",
    "node_cell_counts",
    "limit_rule_deviation",
    "middle_system_residual",
    "cubic_coefficients",
    "cubic_rootfree_check",
]

# Gauss-Legendre abscissae/weights on [-1, 1].  Fixed constants rather
# than anything computed at run time, so the reference integrator shares
# no code path with the library under test.
_GL_POINTS = {
    3: (
        (-0.77459666924148338, 0.0, 0.77459666924148338),
        (0.55555555555555556, 0.88888888888888889, 0.55555555555555556),
    ),
    4: (
        (-0.86113631159405258, -0.33998104358485626,
         0.33998104358485626, 0.86113631159405258),
        (0.34785484513745386, 0.65214515486254614,
         0.65214515486254614, 0.34785484513745386),
    ),
    5: (
        (-0.90617984593866399, -0.53846931010568309, 0.0,
         0.53846931010568309, 0.90617984593866399),
        (0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
         0.47862867049936647, 0.23692688505618909),
    ),
}

# SplitMix64: additive constant and finalizer multipliers.
_SM64_GAMMA = 0x9E3779B97F4A7C15
_SM64_M1 = 0xBF58476D1CE4E5B9
_SM64_M2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExactnessReport:
    """Result of auditing one rule against its whole basis."""

    n: int
    max_basis_residual: float
    worst_index: int
    per_interval_node_counts: tuple[int, ...]


def gauss_legendre_between(f, breakpoints, points: int = 4) -> float:
    """Composite Gauss-Legendre over consecutive pairs of breakpoints.

    Exact (to rounding) for piecewise polynomials of degree 2*points - 1
    whose pieces break only at the given points.
    """
    if points not in _GL_POINTS:
        raise ValueError(f"supported point counts: {sorted(_GL_POINTS)}")
    xs, ws = _GL_POINTS[points]
    terms = []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        mid = 0.5 * (lo + hi)
        rad = 0.5 * (hi - lo)
        for x, w in zip(xs, ws):
            terms.append(rad * w * f(mid + rad * x))
    return math.fsum(terms)


def reference_integral(f, grid: UniformKnotGrid, points_per_cell: int = 4) -> float:
    """Integral of f over [a, b] by composite Gauss-Legendre on the cells.

    With the default 4 points per cell the result is exact through degree
    7 on each cell, strictly dominating the quintic pieces of any spline
    in the space.
    """
    if points_per_cell < 3:
        raise ValueError("need at least three points per cell")
    return gauss_legendre_between(f, grid.knots().tolist(), points_per_cell)


def _splitmix64(seed: int, index: int) -> int:
    """index-th output of the SplitMix64 stream seeded with seed."""
    x = (seed + (index + 1) * _SM64_GAMMA) & _U64
    x = ((x ^ (x >> 30)) * _SM64_M1) & _U64
    x = ((x ^ (x >> 27)) * _SM64_M2) & _U64
    return x ^ (x >> 31)


def random_spline(grid: UniformKnotGrid, seed: int) -> SplineCoefficients:
    """Deterministic pseudo-random coefficients in [-1, 1].

    Coefficient i is 2*u - 1 where u is the top 53 bits of the i-th
    SplitMix64 output divided by 2^53; pure integer arithmetic, so every
    platform reproduces the same vector bit for bit.
    """
    c = np.array(
        [
            2.0 * ((_splitmix64(seed, i) >> 11) * 2.0**-53) - 1.0
            for i in range(grid.dimension)
        ]
    )
    return SplineCoefficients(grid=grid, c=c)


def node_cell_counts(rule: QuadratureRule) -> tuple[int, ...]:
    """Nodes per cell under the half-open convention [x_{j-1}, x_j).

    A node sitting on an interior knot counts toward the cell on its
    right; a node within a couple of ulps below a knot (mirror arithmetic
    can shave one bit) is attributed the same way.  The last cell is
    closed on the right.
    """
    grid = rule.grid
    n = grid.n
    knots = grid.knots()
    idx = np.searchsorted(knots, rule.nodes, side="right") - 1
    scale = abs(grid.a) + abs(grid.b) + (grid.b - grid.a)
    nxt = np.minimum(idx + 1, n)
    snap = (idx + 1 <= n - 1) & (knots[nxt] - rule.nodes <= 4e-16 * scale)
    idx = np.where(snap, idx + 1, idx)
    idx = np.clip(idx, 0, n - 1)
    return tuple(int(v) for v in np.bincount(idx, minlength=n))


def exactness_report(rule: QuadratureRule) -> ExactnessReport:
    """Worst basis-integration residual of a rule, plus its node layout.

    Only the nodes inside each basis function's support window are
    evaluated, so the audit costs O(1) per basis index.
    """
    grid = rule.grid
    nodes = rule.nodes
    weights = rule.weights
    worst = -1.0
    worst_i = 1
    for i in range(1, grid.dimension + 1):
        k = (i + 3) // 4
        r = i - 4 * (k - 1)
        lo_knot = max(k - 2 if r <= 2 else k - 1, 0)
        hi_knot = min(k, grid.n)
        lo = np.searchsorted(nodes, grid.a + lo_knot * grid.h - grid.h * 1e-9)
        hi = np.searchsorted(nodes, grid.a + hi_knot * grid.h + grid.h * 1e-9)
        q = math.fsum(
            weights[j] * basis_eval(grid, i, float(nodes[j])) for j in range(lo, hi)
        )
        resid = abs(q - basis_integral(grid, i))
        if resid > worst:
            worst, worst_i = resid, i
    return ExactnessReport(
        n=grid.n,
        max_basis_residual=worst,
        worst_index=worst_i,
        per_interval_node_counts=node_cell_counts(rule),
    )


def limit_rule_deviation(rule: QuadratureRule) -> np.ndarray:
    """Per-node distance from the two-third limit pattern.

    Returns an array of shape (2n+1, 2): column 0 is the distance from the
    node to the nearest knot or cell midpoint (whichever is closer),
    column 1 the distance from its weight to the matching limit weight
    (7h/15 at knots, 8h/15 at midpoints).
    """
    grid = rule.grid
    h = grid.h
    pos = (rule.nodes - grid.a) / h
    near_knot = np.abs(pos - np.round(pos)) * h
    near_mid = np.abs(pos - 0.5 - np.round(pos - 0.5)) * h
    is_knot = near_knot <= near_mid
    node_dev = np.where(is_knot, near_knot, near_mid)
    target = np.where(is_knot, 7.0 * h / 15.0, 8.0 * h / 15.0)
    weight_dev = np.abs(rule.weights - target)
    return np.column_stack([node_dev, weight_dev])


def middle_system_residual(
    A: float, B: float, h: float, alpha: float, w_out: float, w_mid: float
) -> tuple[float, float, float]:
    """Residuals of the three exactness equations of an odd middle cell.

    The candidate solution places outer nodes at offsets alpha and
    h - alpha with weight w_out each and the midpoint node with w_mid;
    the equations demand that those nodes collect A, B and 1/6 of the
    three basis functions alive there.
    """
    if h <= 0.0:
        raise ValueError("cell width must be positive")
    g = h - alpha
    r1 = (g**5 + alpha**5) / (4.0 * h**6) * w_out + w_mid / (128.0 * h) - A
    r2 = (
        (g**4 * (9.0 * alpha + h) + alpha**4 * (10.0 * h - 9.0 * alpha))
        / (4.0 * h**6) * w_out
        + 11.0 * w_mid / (128.0 * h)
        - B
    )
    r3 = (
        10.0 * alpha**2 * g * g / h**5 * w_out
        + 5.0 * w_mid / (16.0 * h)
        - 1.0 / 6.0
    )
    return r1, r2, r3


def cubic_coefficients(state: ResidueState, h: float) -> tuple[float, float, float, float]:
    """Monomial coefficients (c0, c1, c2, c3) of the cubic factor paired
    with each cell's node quadratic."""
    A, B = state.A, state.B
    return (
        -(h**3),
        4.0 * h * h,
        h * (24.0 * B - 24.0 * A - 5.0),
        -216.0 * A - 24.0 * B + 2.0,
    )


def cubic_rootfree_check(state: ResidueState, h: float) -> bool:
    """True iff the cubic factor has no root in [0, h].

    The cubic is split at the real critical points of its derivative (a
    quadratic, solved in closed form); on each resulting monotone piece a
    root exists iff the endpoint values change sign or hit zero, so the
    check is exact up to endpoint evaluation.  Valid states always yield
    True; the factor never contributes nodes.
    """
    c0, c1, c2, c3 = cubic_coefficients(state, h)

    def p(t: float) -> float:
        return ((c3 * t + c2) * t + c1) * t + c0

    cuts = [0.0, h]
    qa, qb, qc = 3.0 * c3, 2.0 * c2, c1
    disc = qb * qb - 4.0 * qa * qc
    if qa != 0.0 and disc >= 0.0:
        t = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
        for r in (t / qa, qc / t if t != 0.0 else None):
            if r is not None and 0.0 < r < h:
                cuts.append(r)
    cuts.sort()
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        f_lo, f_hi = p(lo), p(hi)
        if f_lo == 0.0 or f_hi == 0.0 or (f_lo < 0.0) != (f_hi < 0.0):
            return False
    return True
