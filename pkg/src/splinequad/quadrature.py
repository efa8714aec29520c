"""Construction of the optimal quadrature rule for C1 quintic splines.

The rule has 2n + 1 nodes for n cells: generically two nodes strictly
inside every cell plus one node at the domain midpoint. Nodes and weights
come from a left-to-right recursion over the cells: a residue pair (A, B)
records how much of the integral of the two cell-spanning basis functions
is still uncollected, each cell contributes the two roots of a quadratic
whose coefficients are polynomial in (A, B), and the right half of the
rule is the mirror image of the left half.

The recursion converges quadratically toward the fixed residues
(29/240, 13/80), where the rule degenerates into the two-third pattern:
nodes at the knots with weight 7h/15 and at the cell midpoints with
weight 8h/15. Within a handful of cells the node offsets fall below what
double precision can represent relative to the knot coordinates, so once
the residues reach the representable plateau the builder emits exact
two-third cells; this is both the most accurate double-precision answer
and what makes construction O(1) per cell after the plateau.

Rules are immutable once built; ``apply_rule`` is pure. The recursion
itself is inherently sequential, but distinct builds never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid_basis import UniformKnotGrid

__all__ = [
    "ConstructionError",
    "ResidueState",
    "QuadraticCoeffs",
    "QuadratureRule",
    "RecursionTrace",
    "CONVERGENCE_TOL",
    "LIMIT_KNOT_WEIGHT",
    "LIMIT_MIDPOINT_WEIGHT",
    "initial_residues",
    "interior_quadratic",
    "middle_quadratic",
    "solve_interval",
    "update_residues",
    "middle_even",
    "middle_even_single_sided",
    "middle_odd",
    "build_rule",
    "build_rule_with_trace",
    "apply_rule",
]

# Cancellation floor for 1 - 24B + 24A (and its middle-cell variant
# 24A - 24B + 1).  The true quantity decays quadratically along the
# recursion: ~4e-8 at cell 4, ~6e-17 at cell 5, so anything below this
# threshold is rounding noise and the residues have reached their double
# precision plateau.
CONVERGENCE_TOL = 1e-13

# Per-unit-h weights of the two-third limit rule.
LIMIT_KNOT_WEIGHT = 7.0 / 15.0
LIMIT_MIDPOINT_WEIGHT = 8.0 / 15.0

# Slack for the residue inequality 2(4A - B) + 1/12 >= 1/6, which holds
# with equality at the first cell.
_RESIDUE_SLACK = 1e-14


class ConstructionError(ArithmeticError):
    """The node/weight recursion produced an invalid intermediate result.

    Carries the 1-based cell index at which construction failed, when known.
    """

    def __init__(self, message: str, interval: Optional[int] = None):
        if interval is not None:
            message = f"interval {interval}: {message}"
        super().__init__(message)
        self.interval = interval


@dataclass(frozen=True)
class ResidueState:
    """Residue pair (A, B) entering cell k.

    A and B are the portions of the integrals of the two basis functions
    spanning cells k-1 and k that the nodes of cell k-1 did not collect.
    """

    k: int
    A: float
    B: float

    def validate(self) -> None:
        """Check the inequalities every reachable state satisfies."""
        A, B = self.A, self.B
        if not 0.0 < A < B < 1.0 / 6.0:
            raise ConstructionError(
                f"residues out of range: A={A!r} B={B!r}", self.k
            )
        if not 16.0 * A > 5.0 * B:
            raise ConstructionError(
                f"residue inequality 16A > 5B violated: A={A!r} B={B!r}", self.k
            )
        if not 2.0 * (4.0 * A - B) + 1.0 / 12.0 >= 1.0 / 6.0 - _RESIDUE_SLACK:
            raise ConstructionError(
                f"residue lower bound violated: A={A!r} B={B!r}", self.k
            )

    @property
    def converged(self) -> bool:
        """True once 1 - 24B + 24A is below the double-precision floor."""
        return abs(1.0 - 24.0 * self.B + 24.0 * self.A) <= CONVERGENCE_TOL


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Monomial coefficients q0 + q1*x + q2*x^2 of a node-producing factor."""

    q0: float
    q1: float
    q2: float
    kind: str  # "interior" or "middle-odd"

    def discriminant(self) -> float:
        return self.q1 * self.q1 - 4.0 * self.q2 * self.q0

    def roots(self) -> tuple[float, float]:
        """Both real roots, ascending.

        The larger-magnitude root is computed with the sign-safe formula
        and the other from the product of roots, so neither suffers
        cancellation however q2 moves along the recursion.  Middle-cell
        quadratics have roots placed symmetrically about -q1/(2 q2); that
        symmetry is used directly for them, which keeps the pair exactly
        symmetric in floating point.
        """
        disc = self.discriminant()
        if disc < 0.0:
            raise ConstructionError(
                f"negative discriminant {disc!r} in {self.kind} quadratic"
            )
        if self.kind == "middle-odd":
            center = -0.5 * self.q1 / self.q2
            delta = math.sqrt(disc) / (2.0 * abs(self.q2))
            return center - delta, center + delta
        t = -0.5 * (self.q1 + math.copysign(math.sqrt(disc), self.q1))
        r_a = t / self.q2
        r_b = self.q0 / t if t != 0.0 else 0.0
        return (r_a, r_b) if r_a <= r_b else (r_b, r_a)


@dataclass(frozen=True)
class RecursionTrace:
    """Diagnostics from a build: every distinct residue state visited and
    the cell index (if any) from which the two-third plateau was emitted."""

    states: tuple[ResidueState, ...]
    limit_start: Optional[int]


@dataclass(frozen=True)
class QuadratureRule:
    """An immutable (2n+1)-node rule over a grid.

    Nodes are strictly increasing; weights are positive and sum to b - a;
    node i and node 2n+2-i mirror each other around the domain midpoint.
    """

    grid: UniformKnotGrid
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        m = 2 * self.grid.n + 1
        if nodes.shape != (m,) or weights.shape != (m,):
            raise ValueError(f"rule over n={self.grid.n} cells needs {m} entries")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.shape[0]


def initial_residues() -> ResidueState:
    """State entering the first cell: the full boundary integrals 1/24, 1/8."""
    return ResidueState(k=1, A=1.0 / 24.0, B=1.0 / 8.0)


def interior_quadratic(state: ResidueState, h: float) -> QuadraticCoeffs:
    """Quadratic whose roots are the two node offsets inside a generic cell."""
    A, B = state.A, state.B
    return QuadraticCoeffs(
        q0=h * h * (1.0 - 24.0 * B + 24.0 * A),
        q1=2.0 * h * (12.0 * B + 108.0 * A - 1.0),
        q2=1.0 - 480.0 * A + 576.0 * A * A + 576.0 * B * B - 1152.0 * A * B,
        kind="interior",
    )


def middle_quadratic(state: ResidueState, h: float) -> QuadraticCoeffs:
    """Quadratic for the two outer nodes of the middle cell when n is odd.

    Obtained by eliminating the outer weight from the two closed forms the
    3x3 middle system reduces to; its roots sum to h, i.e. they sit
    symmetrically about the cell midpoint.
    """
    A, B = state.A, state.B
    p = 108.0 * A + 12.0 * B - 1.0
    return QuadraticCoeffs(
        q0=h * h * (24.0 * A - 24.0 * B + 1.0),
        q1=2.0 * h * p,
        q2=-2.0 * p,
        kind="middle-odd",
    )


def _solve_cell(state: ResidueState, h: float, k: int) -> tuple[float, float, float, float]:
    """Offsets-from-left-knot and weights ``(r1, r2, w_lo, w_hi)`` of one cell.

    The whole recursion is translation invariant, so it works in offsets;
    absolute node coordinates appear only when a rule is assembled.
    """
    if state.converged:
        return 0.0, 0.5 * h, LIMIT_KNOT_WEIGHT * h, LIMIT_MIDPOINT_WEIGHT * h
    try:
        r1, r2 = interior_quadratic(state, h).roots()
    except ConstructionError as exc:
        raise ConstructionError(str(exc), k) from None
    if not 0.0 < r1 < r2 < h:
        raise ConstructionError(
            f"roots ({r1!r}, {r2!r}) outside the open cell (0, {h})", k
        )
    beta = h - r2
    w_hi = h**5 * (h - 2.0 * r1) / (
        60.0 * beta * beta * (h - beta) ** 2 * (r2 - r1)
    )
    w_lo = (4.0 * h**6 * state.A - w_hi * beta**5) / (h - r1) ** 5
    if not (w_lo > 0.0 and w_hi > 0.0):
        raise ConstructionError(f"nonpositive weight ({w_lo!r}, {w_hi!r})", k)
    return r1, r2, w_lo, w_hi


def _update_cell(
    state: ResidueState, h: float, r1: float, r2: float, w_lo: float, w_hi: float
) -> ResidueState:
    """Residue update from one cell's offsets and weights."""
    d5_lo = r1**4 * (10.0 * h - 9.0 * r1) / (4.0 * h**6)
    d5_hi = r2**4 * (10.0 * h - 9.0 * r2) / (4.0 * h**6)
    d6_lo = r1**5 / (4.0 * h**6)
    d6_hi = r2**5 / (4.0 * h**6)
    new = ResidueState(
        k=state.k + 1,
        A=1.0 / 6.0 - w_lo * d5_lo - w_hi * d5_hi,
        B=1.0 / 6.0 - w_lo * d6_lo - w_hi * d6_hi,
    )
    new.validate()
    return new


def solve_interval(
    state: ResidueState, grid: UniformKnotGrid, k: int
) -> tuple[float, float, float, float]:
    """Nodes and weights of cell k given the residues entering it.

    Returns ``(tau_lo, tau_hi, w_lo, w_hi)``.  Both quadratic roots are
    offsets from the left knot x_{k-1}; the lower weight is recovered from
    the exactness equation for the left-spanning basis function,

        w_lo * (h - r1)^5 + w_hi * (h - r2)^5 = 4 h^6 A,

    rather than from its closed form.  The two are algebraically identical,
    but the closed form divides the difference of two converging quantities
    by r1^2 and loses all precision once the node offsets shrink below
    ~1e-8; the exactness form stays accurate to the last bit for every
    cell.  Once the residues reach the double-precision plateau the true
    offsets (< 1e-17 * h) are unrepresentable in the node coordinates and
    the exact two-third cell is returned instead.

    Raises
    ------
    ConstructionError
        If the discriminant is negative, a root leaves [0, h), or a weight
        is not positive; all indicate corrupted residues.
    """
    n = grid.n
    if not 1 <= k <= n // 2:
        raise ValueError(f"cell index {k} outside [1, {n // 2}]")
    r1, r2, w_lo, w_hi = _solve_cell(state, grid.h, k)
    x = grid.a + (k - 1) * grid.h
    return x + r1, x + r2, w_lo, w_hi


def update_residues(
    state: ResidueState,
    grid: UniformKnotGrid,
    k: int,
    tau_lo: float,
    tau_hi: float,
    w_lo: float,
    w_hi: float,
) -> ResidueState:
    """Residues entering cell k+1, given cell k's nodes and weights.

    Subtracts from 1/6 what cell k's nodes collect of the two basis
    functions spanning cells k and k+1; the new state is validated and a
    violation raises ``ConstructionError``.  Node positions are reduced to
    offsets from the cell's left knot; on grids sitting very far from the
    origin that subtraction costs ulp(|a|), which is the price of the
    absolute-coordinate interface (the builder itself never round-trips
    through absolute coordinates).
    """
    h = grid.h
    x = grid.a + (k - 1) * h
    return _update_cell(state, h, tau_lo - x, tau_hi - x, w_lo, w_hi)


def middle_even(state: ResidueState, h: float) -> float:
    """Weight of the single node at the middle knot (n even).

    The basis function centered on the middle knot spans the cells on both
    sides.  The left cell leaves A uncollected; the mirrored right cell
    collects 1/6 - B of it (reflection swaps the two spanning shapes), so
    the knot node, where the function's value is 1/(4h), must supply
    A - (1/6 - B).  Hence w = 4h(A + B - 1/6).
    """
    w = 4.0 * h * (state.A + state.B - 1.0 / 6.0)
    if not w > 0.0:
        raise ConstructionError(f"nonpositive middle weight {w!r}", state.k)
    return w


def middle_even_single_sided(state: ResidueState, h: float) -> float:
    """Single-sided variant 4h(1/6 - A) of the even-middle weight.

    Omits the mirrored cell's contribution and therefore understates the
    weight (11/60 h instead of ~7/15 h near the plateau).  Kept only so
    that the check suite can report the size of that defect; never used
    in construction.
    """
    return 4.0 * h * (1.0 / 6.0 - state.A)


def middle_odd(
    state: ResidueState, grid: UniformKnotGrid, m: int
) -> tuple[float, float, float, float, float, float]:
    """Nodes and weights of the three-node middle cell (n odd, cell m).

    Returns ``(tau_lo, tau_mid, tau_hi, w_lo, w_mid, w_hi)`` with
    ``tau_mid = (a+b)/2``, the outer nodes symmetric about it and
    ``w_hi = w_lo``.  The outer-node offset comes from
    :func:`middle_quadratic`; the weights come from the closed forms

        w_out = h p^2 / (30 d),    p = 108A + 12B - 1,  d = 156A - 36B + 1,
        w_mid = 4h (1152AB + 264A - 576A^2 - 576B^2 - 24B + 1) / (15 d),

    which stay well-conditioned for every reachable state.  The returned
    six-tuple is checked against the 3x3 exactness system for the middle
    cell; a residual above 1e-10 raises ``ConstructionError``.

    Near the residue plateau the outer offset underflows below what the
    node coordinates can represent and the outer nodes coincide with the
    cell's knots (matching the two-third limit); they stay strictly
    inside the cell whenever the offset is representable.
    """
    n = grid.n
    if n % 2 != 1 or m != (n + 1) // 2:
        raise ValueError(f"middle cell of an odd grid is {(n + 1) // 2}, got {m}")
    h = grid.h
    A, B = state.A, state.B
    if abs(24.0 * A - 24.0 * B + 1.0) <= CONVERGENCE_TOL:
        r1 = 0.0
    else:
        try:
            r1, _ = middle_quadratic(state, h).roots()
        except ConstructionError as exc:
            raise ConstructionError(str(exc), m) from None
        if not 0.0 < r1 < 0.5 * h:
            raise ConstructionError(
                f"middle offset {r1!r} outside (0, h/2)", m
            )
    p = 108.0 * A + 12.0 * B - 1.0
    d = 156.0 * A - 36.0 * B + 1.0
    w_out = h * p * p / (30.0 * d)
    w_mid = (
        4.0 * h
        * (1152.0 * A * B + 264.0 * A - 576.0 * A * A - 576.0 * B * B - 24.0 * B + 1.0)
        / (15.0 * d)
    )
    if not (w_out > 0.0 and w_mid > 0.0):
        raise ConstructionError(f"nonpositive weight ({w_out!r}, {w_mid!r})", m)
    res = _middle_system_residuals(A, B, h, r1, w_out, w_mid)
    if max(abs(r) for r in res) > 1e-10:
        raise ConstructionError(
            f"middle system residuals {res} exceed 1e-10", m
        )
    x = grid.a + (m - 1) * h
    tau_mid = 0.5 * (grid.a + grid.b)
    return x + r1, tau_mid, grid.a + m * h - r1, w_out, w_mid, w_out


def _middle_system_residuals(
    A: float, B: float, h: float, alpha: float, w_out: float, w_mid: float
) -> tuple[float, float, float]:
    """Residuals of the three middle-cell exactness equations."""
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


def build_rule(grid: UniformKnotGrid) -> QuadratureRule:
    """Construct the full 2n+1-node rule for a grid."""
    rule, _ = build_rule_with_trace(grid)
    return rule


def build_rule_with_trace(
    grid: UniformKnotGrid,
) -> tuple[QuadratureRule, RecursionTrace]:
    """Construct the rule and return the recursion diagnostics with it.

    Walks cells left to right, updating residues after each cell; once the
    residues hit the double-precision plateau every remaining left-half
    cell is an exact two-third cell and is filled without further
    recursion (identical values, constant extra work per cell).  The
    middle is handled by parity and the right half mirrors the left:
    tau -> a + b - tau with equal weights.
    """
    a, b, n, h = grid.a, grid.b, grid.n, grid.h
    half = n // 2
    nodes = np.empty(2 * n + 1)
    weights = np.empty(2 * n + 1)
    state = initial_residues()
    state.validate()
    states = [state]
    limit_start: Optional[int] = None
    k = 1
    while k <= half:
        if state.converged:
            limit_start = k
            break
        r1, r2, w_lo, w_hi = _solve_cell(state, h, k)
        x = a + (k - 1) * h
        nodes[2 * k - 2] = x + r1
        nodes[2 * k - 1] = x + r2
        weights[2 * k - 2] = w_lo
        weights[2 * k - 1] = w_hi
        state = _update_cell(state, h, r1, r2, w_lo, w_hi)
        states.append(state)
        k += 1
    if limit_start is not None:
        # same expressions as the converged branch of _solve_cell,
        # vectorized over the plateau
        ks = np.arange(limit_start, half + 1, dtype=float)
        base = a + (ks - 1.0) * h
        nodes[2 * limit_start - 2 : 2 * half : 2] = base
        nodes[2 * limit_start - 1 : 2 * half + 1 : 2] = base + 0.5 * h
        weights[2 * limit_start - 2 : 2 * half : 2] = LIMIT_KNOT_WEIGHT * h
        weights[2 * limit_start - 1 : 2 * half + 1 : 2] = LIMIT_MIDPOINT_WEIGHT * h
    if n % 2 == 0:
        nodes[n] = a + half * h
        weights[n] = middle_even(state, h)
    else:
        m = (n + 1) // 2
        tau_lo, tau_mid, _, w_out, w_mid, _ = middle_odd(state, grid, m)
        nodes[n - 1] = tau_lo
        nodes[n] = tau_mid
        weights[n - 1] = w_out
        weights[n] = w_mid
    mirrored = (a + b) - nodes[:n][::-1]
    nodes[n + 1 :] = mirrored
    weights[n + 1 :] = weights[:n][::-1]
    _validate_rule(grid, nodes, weights)
    return (
        QuadratureRule(grid=grid, nodes=nodes, weights=weights),
        RecursionTrace(states=tuple(states), limit_start=limit_start),
    )


def _validate_rule(grid: UniformKnotGrid, nodes: np.ndarray, weights: np.ndarray) -> None:
    if not np.all(np.diff(nodes) > 0.0):
        raise ConstructionError("nodes are not strictly increasing")
    if not np.all(weights > 0.0):
        raise ConstructionError("weights are not all positive")
    span = grid.b - grid.a
    total = float(np.sum(weights))
    if abs(total - span) > 1e-12 * span:
        raise ConstructionError(
            f"weights sum to {total!r}, expected {span!r}"
        )
    if nodes[0] <= grid.a or nodes[-1] >= grid.b:
        raise ConstructionError("extreme nodes must lie strictly inside (a, b)")


def apply_rule(rule: QuadratureRule, f: Callable[[float], float]) -> float:
    """Apply the rule to a function: sum of w_i * f(tau_i).

    Exact (to rounding) for any C1 quintic spline on the rule's grid, and
    for any quintic polynomial.  The summation is compensated so that
    exactness checks are not polluted by accumulation error.
    """
    nodes = rule.nodes
    weights = rule.weights
    return math.fsum(w * f(t) for t, w in zip(nodes.tolist(), weights.tolist()))
