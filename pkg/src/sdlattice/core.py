"""Distribution and function representations shared by every other module.

A finitely-supported distribution is identified with three functions:

* the survival function ``s -> mu((s, inf))``, a right-continuous step function;
* the integrated survival function ``s -> E[(X - s)^+]``, convex and
  piecewise linear with kinks at the support points;
* the negative integrated distribution function ``s -> -E[(s - X)^+]``,
  concave and piecewise linear.

All three determine the distribution, and finitely-supported distributions are
closed under every lattice operation built on them, so everything downstream
is exact up to floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# absolute tolerance for order comparisons and contract checks
ATOL = 1e-9
# point masses (slope increments) at or below this are treated as rounding noise
MASS_EPS = 1e-12
NORM_TOL = 1e-13


class DominanceError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(DominanceError, ValueError):
    """An input violates the documented preconditions of an operation."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finitely-supported probability measure on the real line.

    ``support`` is strictly increasing and finite, ``weights`` are strictly
    positive and sum to one.  Use :func:`make_discrete` to build one from raw
    (point, weight) pairs; the constructor only validates and renormalizes.
    """

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.support, dtype=np.float64).ravel()
        p = np.asarray(self.weights, dtype=np.float64).ravel()
        if x.size == 0 or x.shape != p.shape:
            raise ContractError("support and weights must be nonempty and of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ContractError("support and weights must be finite")
        if np.any(np.diff(x) <= 0):
            raise ContractError("support must be strictly increasing")
        if np.any(p <= 0):
            raise ContractError("weights must be strictly positive")
        object.__setattr__(self, "support", _frozen(x))
        total = p.sum()
        # already-normalized input is kept bit for bit, so canonical forms round-trip
        if abs(total - 1.0) > NORM_TOL:
            p = p / total
        object.__setattr__(self, "weights", _frozen(p))

    @classmethod
    def _trusted(cls, support: np.ndarray, weights: np.ndarray) -> "DiscreteDistribution":
        # sorted finite support and positive finite weights, as produced internally
        total = weights.sum()
        if abs(total - 1.0) > NORM_TOL:
            weights = weights / total
        obj = object.__new__(cls)
        object.__setattr__(obj, "support", _frozen(support))
        object.__setattr__(obj, "weights", _frozen(weights))
        return obj

    def __len__(self) -> int:
        return self.support.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return bool(
            len(self) == len(other)
            and np.array_equal(self.support, other.support)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self) -> int:
        return hash((self.support.tobytes(), self.weights.tobytes()))

    def __repr__(self) -> str:
        atoms = ", ".join(f"{p:.6g}@{x:.6g}" for x, p in zip(self.support, self.weights))
        return f"DiscreteDistribution({atoms})"

    def isclose(self, other: "DiscreteDistribution", atol: float = ATOL) -> bool:
        """Componentwise comparison, ignoring atoms of mass at most ``atol``."""
        a_keep = self.weights > atol
        b_keep = other.weights > atol
        xa, pa = self.support[a_keep], self.weights[a_keep]
        xb, pb = other.support[b_keep], other.weights[b_keep]
        if xa.size != xb.size:
            return False
        return bool(np.all(np.abs(xa - xb) <= atol) and np.all(np.abs(pa - pb) <= atol))

    def cdf_values(self) -> np.ndarray:
        """F at each support point (right-continuous)."""
        c = np.cumsum(self.weights)
        c[-1] = 1.0
        return c

    def survival_values(self) -> np.ndarray:
        """Survival function on each plateau ``[x_k, x_{k+1})``; the last is 0."""
        # suffix sums are more accurate than 1 - cumsum for small tails
        tail = np.cumsum(self.weights[::-1])[::-1]
        return np.append(tail[1:], 0.0)


def make_discrete(pairs: Iterable[tuple[float, float]]) -> DiscreteDistribution:
    """Build a canonical distribution from (point, weight) pairs.

    Duplicate points are merged, zero weights dropped, points sorted and the
    weights normalized to one.

    >>> make_discrete([(2, 1), (0, 1)]).weights.tolist()
    [0.5, 0.5]
    """
    pairs = list(pairs)
    if not pairs:
        raise ContractError("empty input")
    xs = np.array([float(x) for x, _ in pairs])
    ws = np.array([float(w) for _, w in pairs])
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ws))):
        raise ContractError("points and weights must be finite")
    if np.any(ws < 0):
        raise ContractError("negative weight")
    if ws.sum() <= 0:
        raise ContractError("total weight must be positive")
    keep = ws > 0
    xs, ws = xs[keep], ws[keep]
    points, inverse = np.unique(xs, return_inverse=True)
    merged = np.bincount(inverse, weights=ws, minlength=points.size)
    return DiscreteDistribution(points, merged)


def dirac(a: float) -> DiscreteDistribution:
    return DiscreteDistribution([a], [1.0])


def _from_masses(points: np.ndarray, masses: np.ndarray) -> DiscreteDistribution:
    """Distribution from candidate points and (possibly noisy) masses."""
    keep = masses > MASS_EPS
    if not keep.any():
        raise DominanceError("reconstruction produced no positive mass")
    return DiscreteDistribution._trusted(points[keep], masses[keep])


def from_survival(points: np.ndarray, surv: np.ndarray) -> DiscreteDistribution:
    """Distribution whose survival function equals ``surv[k]`` on ``[points[k], points[k+1])``.

    Left of ``points[0]`` the survival is taken to be 1, right of the last
    point it must be 0.
    """
    points = np.asarray(points, dtype=np.float64)
    surv = np.asarray(surv, dtype=np.float64)
    masses = -np.diff(np.concatenate(([1.0], surv)))
    return _from_masses(points, masses)


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function with finitely many jumps.

    ``plateaus`` has one more entry than ``jumps``: the value on the left ray,
    on each interval between consecutive jumps, and on the right ray.  The
    value at a jump point is the right-hand plateau when ``right_continuous``
    (the convention for survival functions and CDFs), the left-hand plateau
    otherwise.
    """

    jumps: np.ndarray
    plateaus: np.ndarray
    right_continuous: bool = True

    def __post_init__(self):
        j = np.asarray(self.jumps, dtype=np.float64).ravel()
        v = np.asarray(self.plateaus, dtype=np.float64).ravel()
        if v.size != j.size + 1:
            raise ContractError("need exactly one plateau per interval (len(jumps) + 1)")
        if np.any(np.diff(j) <= 0):
            raise ContractError("jump points must be strictly increasing")
        object.__setattr__(self, "jumps", _frozen(j))
        object.__setattr__(self, "plateaus", _frozen(v))

    def __call__(self, s):
        side = "right" if self.right_continuous else "left"
        out = self.plateaus[np.searchsorted(self.jumps, s, side=side)]
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class PiecewiseLinearFunction:
    """Continuous piecewise-linear function with two boundary rays.

    Defined by its values at strictly increasing breakpoints plus the slopes
    of the left and right rays.  Interior segment slopes are derived from the
    values unless supplied explicitly; lattice operations supply them so that
    slopes taken from an input survive unchanged instead of being recomputed
    from rounded values.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    left_slope: float
    right_slope: float
    inner_slopes: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=np.float64).ravel()
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if b.size == 0 or b.shape != v.shape:
            raise ContractError("need at least one breakpoint and one value per breakpoint")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(v))):
            raise ContractError("breakpoints and values must be finite")
        if np.any(np.diff(b) <= 0):
            raise ContractError("breakpoints must be strictly increasing")
        if self.inner_slopes is None:
            inner = np.diff(v) / np.diff(b)
        else:
            inner = np.asarray(self.inner_slopes, dtype=np.float64).ravel()
            if inner.size != b.size - 1:
                raise ContractError("inner_slopes must have len(breakpoints) - 1 entries")
        object.__setattr__(self, "breakpoints", _frozen(b))
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "left_slope", float(self.left_slope))
        object.__setattr__(self, "right_slope", float(self.right_slope))
        object.__setattr__(self, "inner_slopes", _frozen(inner))

    @property
    def slopes(self) -> np.ndarray:
        """Slopes of all pieces, left ray first and right ray last."""
        return np.concatenate(([self.left_slope], self.inner_slopes, [self.right_slope]))

    @classmethod
    def _trusted(cls, breakpoints, values, left_slope, right_slope, inner_slopes) -> "PiecewiseLinearFunction":
        # internal constructor for arrays already known to satisfy the invariants
        obj = object.__new__(cls)
        for name, val in (
            ("breakpoints", breakpoints),
            ("values", values),
            ("left_slope", float(left_slope)),
            ("right_slope", float(right_slope)),
            ("inner_slopes", inner_slopes),
        ):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(obj, name, val)
        return obj

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=np.float64)
        b, v = self.breakpoints, self.values
        out = np.interp(s_arr, b, v)
        out += self.left_slope * np.minimum(s_arr - b[0], 0.0) + self.right_slope * np.maximum(s_arr - b[-1], 0.0)
        return float(out) if out.ndim == 0 else out

    def slope_at(self, s: float) -> float:
        """Right derivative at ``s``."""
        return float(self.slopes[np.searchsorted(self.breakpoints, s, side="right")])

    def is_convex(self, tol: float = ATOL) -> bool:
        return bool(np.all(np.diff(self.slopes) >= -tol))

    def is_concave(self, tol: float = ATOL) -> bool:
        return bool(np.all(np.diff(self.slopes) <= tol))


def survival(mu: DiscreteDistribution, s):
    """``mu((s, inf))``: total weight strictly above ``s``."""
    return survival_function(mu)(s)


def survival_function(mu: DiscreteDistribution) -> StepFunction:
    return StepFunction(mu.support, np.concatenate(([1.0], mu.survival_values())))


def cdf_function(mu: DiscreteDistribution) -> StepFunction:
    return StepFunction(mu.support, np.concatenate(([0.0], mu.cdf_values())))


def mean(mu: DiscreteDistribution) -> float:
    return float(np.dot(mu.support, mu.weights))


def icx_transform(mu: DiscreteDistribution) -> PiecewiseLinearFunction:
    """Integrated survival function ``s -> sum_i p_i (x_i - s)^+``.

    Convex, nonincreasing, equal to ``mean(mu) - s`` left of the support and
    to 0 right of it.  Built right to left from the survival plateaus so
    every value is a sum of nonnegative terms.
    """
    x = mu.support
    surv = mu.survival_values()[:-1]
    gaps = np.diff(x) * surv
    values = np.append(np.cumsum(gaps[::-1])[::-1], 0.0)
    return PiecewiseLinearFunction._trusted(x, values, -1.0, 0.0, -surv)


def icv_transform(mu: DiscreteDistribution) -> PiecewiseLinearFunction:
    """Negative integrated distribution function ``s -> -sum_i p_i (s - x_i)^+``.

    Concave, nonincreasing, 0 left of the support and ``mean(mu) - s`` right
    of it.  Equals ``mean(mu) - s - icx_transform(mu)(s)`` everywhere.
    """
    x = mu.support
    cdf = mu.cdf_values()[:-1]
    values = np.concatenate(([0.0], -np.cumsum(np.diff(x) * cdf)))
    return PiecewiseLinearFunction._trusted(x, values, 0.0, -1.0, -cdf)


def _check_ray(name: str, got: float, want: float, tol: float) -> None:
    if abs(got - want) > tol:
        raise ContractError(f"{name} is {got!r}, expected {want!r}")


def from_icx_transform(phi: PiecewiseLinearFunction, tol: float = ATOL) -> DiscreteDistribution:
    """Invert :func:`icx_transform`: the survival function is minus the slope."""
    if not phi.is_convex(tol):
        raise ContractError("function is not convex")
    _check_ray("left-ray slope", phi.left_slope, -1.0, tol)
    _check_ray("right-ray slope", phi.right_slope, 0.0, tol)
    _check_ray("right-ray value", float(phi.values[-1]), 0.0, tol * max(1.0, float(np.max(np.abs(phi.values)))))
    slopes = phi.slopes
    slopes[0], slopes[-1] = -1.0, 0.0
    return _from_masses(np.array(phi.breakpoints), np.diff(slopes))


def from_icv_transform(phi: PiecewiseLinearFunction, tol: float = ATOL) -> DiscreteDistribution:
    """Invert :func:`icv_transform`: the CDF is minus the slope."""
    if not phi.is_concave(tol):
        raise ContractError("function is not concave")
    _check_ray("left-ray slope", phi.left_slope, 0.0, tol)
    _check_ray("right-ray slope", phi.right_slope, -1.0, tol)
    _check_ray("left-ray value", float(phi.values[0]), 0.0, tol * max(1.0, float(np.max(np.abs(phi.values)))))
    slopes = phi.slopes
    slopes[0], slopes[-1] = 0.0, -1.0
    return _from_masses(np.array(phi.breakpoints), -np.diff(slopes))


def reflect(mu: DiscreteDistribution) -> DiscreteDistribution:
    """Law of ``-X`` when ``X ~ mu``."""
    return DiscreteDistribution(-mu.support[::-1], mu.weights[::-1])


def as_pairs(mu: DiscreteDistribution) -> list[tuple[float, float]]:
    return [(float(x), float(p)) for x, p in zip(mu.support, mu.weights)]


def union_points(dists: Sequence[DiscreteDistribution]) -> np.ndarray:
    return np.unique(np.concatenate([d.support for d in dists]))

