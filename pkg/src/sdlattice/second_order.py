"""Increasing convex / increasing concave / convex orders.

A distribution is identified with its integrated survival function (convex)
for ``<=_icx`` and with its negative integrated distribution function
(concave) for ``<=_icv``.  In each lattice one operation is a plain pointwise
extremum of the transforms and the other needs an envelope:

=========  ==========================================================
join_icx   pointwise max of integrated survival functions
meet_icx   greatest convex minorant of their pointwise min
meet_icv   pointwise min of negative integrated distribution functions
join_icv   least concave majorant of their pointwise max
=========  ==========================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import ndtr

from .core import (
    ATOL,
    ContractError,
    DiscreteDistribution,
    DominanceError,
    PiecewiseLinearFunction,
    from_icv_transform,
    from_icx_transform,
    icv_transform,
    icx_transform,
    mean,
    union_points,
)
from .first_order import OrderWitness, inf_st, leq_st, sup_st

# breakpoints closer than this (relative to max(1, |x|)) are merged
SNAP = 1e-12
# differences at or below this are treated as ties when locating crossings
CROSS_EPS = 1e-12
# minimal slope change for a hull vertex to be kept
SLOPE_EPS = 1e-12

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class EnvelopeResult:
    """Convex minorant or concave majorant of a piecewise-linear function."""

    envelope: PiecewiseLinearFunction
    contact_points: np.ndarray


def _piece_slopes(f: PiecewiseLinearFunction, s: np.ndarray) -> np.ndarray:
    return f.slopes[np.searchsorted(f.breakpoints, s, side="right")]


def _ray_crossing(anchor: float, diff: float, dslope: float, left: bool) -> float | None:
    if abs(diff) <= CROSS_EPS or abs(dslope) <= 1e-15:
        return None
    c = anchor - diff / dslope
    if (left and c < anchor) or (not left and c > anchor):
        return c
    return None


def pointwise_extremum(
    f: PiecewiseLinearFunction,
    g: PiecewiseLinearFunction,
    kind: Literal["max", "min"],
) -> PiecewiseLinearFunction:
    """Exact pointwise max or min of two piecewise-linear functions.

    Crossing points are inserted into the union of the breakpoints (at most
    one per piece pair).  Each resulting piece keeps the slope of whichever
    input is active there.
    """
    pts = np.union1d(f.breakpoints, g.breakpoints)
    d = f(pts) - g(pts)

    lo, hi = d[:-1], d[1:]
    flip = ((lo > CROSS_EPS) & (hi < -CROSS_EPS)) | ((lo < -CROSS_EPS) & (hi > CROSS_EPS))
    k = np.flatnonzero(flip)
    crossings = list(pts[k] + (pts[k + 1] - pts[k]) * lo[k] / (lo[k] - hi[k]))
    for anchor, diff, dslope, left in (
        (pts[0], d[0], f.left_slope - g.left_slope, True),
        (pts[-1], d[-1], f.right_slope - g.right_slope, False),
    ):
        c = _ray_crossing(anchor, diff, dslope, left)
        if c is not None:
            crossings.append(c)

    if crossings:
        c = np.asarray(crossings)
        idx = np.clip(np.searchsorted(pts, c), 1, pts.size - 1)
        nearest = np.minimum(np.abs(c - pts[idx - 1]), np.abs(c - pts[idx]))
        c = c[nearest > SNAP * np.maximum(1.0, np.abs(c))]
        pts = np.union1d(pts, c)

    fv, gv = f(pts), g(pts)
    pick = np.maximum if kind == "max" else np.minimum
    values = pick(fv, gv)

    # Right slope at each breakpoint is the one-sided derivative of the exact
    # extremum there: the leader's slope, or the extreme slope at a tie.  The
    # left ray mirrors this with left slopes.  Deciding at the left end rather
    # than at a midpoint keeps slivers narrower than rounding noise consistent.
    sign = 1.0 if kind == "max" else -1.0
    lead = sign * (fv - gv)
    right_f, right_g = _piece_slopes(f, pts), _piece_slopes(g, pts)
    tie_right = pick(right_f, right_g)
    right = np.where(lead > CROSS_EPS, right_f, np.where(lead < -CROSS_EPS, right_g, tie_right))
    left_pick = np.minimum if kind == "max" else np.maximum
    left_ray = (
        f.left_slope
        if lead[0] > CROSS_EPS
        else g.left_slope if lead[0] < -CROSS_EPS else left_pick(f.left_slope, g.left_slope)
    )
    return PiecewiseLinearFunction._trusted(pts, values, float(left_ray), float(right[-1]), right[:-1])


def _hull(f: PiecewiseLinearFunction, sign: float) -> EnvelopeResult:
    x, v = f.breakpoints, sign * f.values
    keep: list[int] = []
    for i in range(x.size):
        while len(keep) >= 2:
            a, b = keep[-2], keep[-1]
            s_ab = (v[b] - v[a]) / (x[b] - x[a])
            s_bi = (v[i] - v[b]) / (x[i] - x[b])
            if s_ab >= s_bi - SLOPE_EPS:
                keep.pop()
            else:
                break
        keep.append(i)
    idx = np.asarray(keep)
    inner = np.empty(idx.size - 1)
    for j, (a, b) in enumerate(zip(idx[:-1], idx[1:])):
        # adjacent vertices: keep the input slope rather than re-deriving it
        inner[j] = f.inner_slopes[a] if b == a + 1 else (f.values[b] - f.values[a]) / (x[b] - x[a])
    env = PiecewiseLinearFunction._trusted(x[idx], f.values[idx], f.left_slope, f.right_slope, inner)
    s = sign * env.slopes
    if np.any(np.diff(s) < -ATOL):
        raise DominanceError("boundary rays are incompatible with a finite envelope")
    return EnvelopeResult(env, np.array(x[idx]))


def lower_convex_envelope(f: PiecewiseLinearFunction) -> EnvelopeResult:
    """Greatest convex minorant, keeping the boundary rays of ``f``.

    Valid when the left-ray slope is at most, and the right-ray slope at
    least, every interior slope (true for minima of integrated survival
    functions).
    """
    return _hull(f, 1.0)


def upper_concave_envelope(f: PiecewiseLinearFunction) -> EnvelopeResult:
    """Least concave majorant, keeping the boundary rays of ``f``."""
    return _hull(f, -1.0)


# -- order checks ----------------------------------------------------------

Order = Literal["st", "icv", "icx", "cx"]


def _leq_transform(
    mu: DiscreteDistribution,
    nu: DiscreteDistribution,
    transform,
    ray_point: float,
    tol: float,
) -> OrderWitness:
    if mean(mu) > mean(nu) + tol:
        return OrderWitness(False, ray_point)
    pts = union_points([mu, nu])
    d = transform(mu)(pts) - transform(nu)(pts)
    bad = np.flatnonzero(d > tol)
    if bad.size:
        return OrderWitness(False, float(pts[bad[0]]))
    return OrderWitness(True)


def leq_icx(mu: DiscreteDistribution, nu: DiscreteDistribution, tol: float = ATOL) -> OrderWitness:
    """``mu <=_icx nu``: integrated survival functions ordered pointwise.

    Far to the left both transforms are ``mean - s``, so the left rays compare
    the means; a mean violation is witnessed one unit left of the supports.
    """
    pts = union_points([mu, nu])
    return _leq_transform(mu, nu, icx_transform, float(pts[0] - 1.0), tol)


def leq_icv(mu: DiscreteDistribution, nu: DiscreteDistribution, tol: float = ATOL) -> OrderWitness:
    """``mu <=_icv nu`` (second order stochastic dominance of ``nu`` over ``mu``)."""
    pts = union_points([mu, nu])
    return _leq_transform(mu, nu, icv_transform, float(pts[-1] + 1.0), tol)


def leq_cx(mu: DiscreteDistribution, nu: DiscreteDistribution, tol: float = ATOL) -> OrderWitness:
    """``mu <=_cx nu`` iff ``nu <=_icv mu`` and ``mu <=_icx nu``."""
    first = leq_icv(nu, mu, tol)
    if not first:
        return first
    return leq_icx(mu, nu, tol)


def leq_order(mu: DiscreteDistribution, nu: DiscreteDistribution, order: Order, tol: float = ATOL) -> OrderWitness:
    checks = {"st": leq_st, "icv": leq_icv, "icx": leq_icx, "cx": leq_cx}
    try:
        check = checks[order]
    except KeyError:
        raise ContractError(f"unknown order {order!r}") from None
    return check(mu, nu, tol)


# -- pairwise lattice operations ---------------------------------------------


def join_icx(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    return from_icx_transform(pointwise_extremum(icx_transform(mu), icx_transform(nu), "max"))


def meet_icv(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    return from_icv_transform(pointwise_extremum(icv_transform(mu), icv_transform(nu), "min"))


def meet_icx(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    low = pointwise_extremum(icx_transform(mu), icx_transform(nu), "min")
    return from_icx_transform(lower_convex_envelope(low).envelope)


def join_icv(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    high = pointwise_extremum(icv_transform(mu), icv_transform(nu), "max")
    return from_icv_transform(upper_concave_envelope(high).envelope)


def extremum_family(
    family: Sequence[DiscreteDistribution],
    order: Literal["st", "icv", "icx"],
    direction: Literal["sup", "inf"],
) -> DiscreteDistribution:
    """Supremum or infimum of a finite family.

    ``sup`` for icx and ``inf`` for icv are single pointwise extrema of the
    transforms; the other two fold the pairwise envelope operation.
    """
    if not family:
        raise ContractError("empty family")
    if direction not in ("sup", "inf"):
        raise ContractError(f"unknown direction {direction!r}")
    if order == "st":
        return sup_st(family) if direction == "sup" else inf_st(family)
    if order not in ("icv", "icx"):
        raise ContractError(f"no lattice extremum for order {order!r}")
    if len(family) == 1:
        return family[0]

    convex = order == "icx"
    transform = icx_transform if convex else icv_transform
    inverse = from_icx_transform if convex else from_icv_transform
    # pointwise max of convex / min of concave functions needs no envelope
    plain = (convex and direction == "sup") or (not convex and direction == "inf")
    kind = "max" if direction == "sup" else "min"

    acc = transform(family[0])
    for member in family[1:]:
        acc = pointwise_extremum(acc, transform(member), kind)
        if not plain:
            acc = (lower_convex_envelope if convex else upper_concave_envelope)(acc).envelope
    return inverse(acc)


# -- strictly increasing functionals -----------------------------------------


def normal_partial_moment_plus(x):
    """``E[(x - Z)^+] = x N(x) + n(x)``: strictly convex, nondecreasing, 1-Lipschitz."""
    x = np.asarray(x, dtype=np.float64)
    return x * ndtr(x) + np.exp(-0.5 * x * x) / _SQRT_2PI


def normal_partial_moment_minus(x):
    """``-E[(Z - x)^+] = x N(-x) - n(x)``: strictly concave, nondecreasing, 1-Lipschitz."""
    x = np.asarray(x, dtype=np.float64)
    return x * ndtr(-x) - np.exp(-0.5 * x * x) / _SQRT_2PI


def icx_functional(mu: DiscreteDistribution) -> float:
    return float(np.dot(mu.weights, normal_partial_moment_plus(mu.support)))


def icv_functional(mu: DiscreteDistribution) -> float:
    return float(np.dot(mu.weights, normal_partial_moment_minus(mu.support)))
