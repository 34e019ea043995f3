"""First order stochastic dominance.

``mu <=_st nu`` iff the survival function of ``mu`` lies below that of ``nu``
everywhere.  Joins and meets are pointwise max/min of survival functions; for
finitely many step functions the pointwise minimum is already right-continuous,
so no regularization is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .core import (
    ATOL,
    ContractError,
    DiscreteDistribution,
    from_survival,
    survival_function,
    union_points,
)


@dataclass(frozen=True)
class OrderWitness:
    """Verdict of an order check.

    When ``holds`` is false, ``witness`` is a point at which the defining
    inequality fails.  Truthiness follows the verdict.
    """

    holds: bool
    witness: float | None = None

    def __bool__(self) -> bool:
        return self.holds


StOrderWitness = OrderWitness


def _survivals_on(points: np.ndarray, dists: Sequence[DiscreteDistribution]) -> np.ndarray:
    return np.vstack([survival_function(d)(points) for d in dists])


def leq_st(mu: DiscreteDistribution, nu: DiscreteDistribution, tol: float = ATOL) -> OrderWitness:
    """Check ``mu <=_st nu``.

    Both survival functions are constant between the union of the two
    supports, so comparing there is exact.  The witness is the smallest
    violating point.
    """
    pts = union_points([mu, nu])
    s_mu, s_nu = _survivals_on(pts, [mu, nu])
    bad = np.flatnonzero(s_mu > s_nu + tol)
    if bad.size:
        return OrderWitness(False, float(pts[bad[0]]))
    return OrderWitness(True)


def sup_st(family: Sequence[DiscreteDistribution]) -> DiscreteDistribution:
    """Least upper bound: pointwise maximum of the survival functions."""
    if not family:
        raise ContractError("empty family")
    if len(family) == 1:
        return family[0]
    pts = union_points(family)
    return from_survival(pts, _survivals_on(pts, family).max(axis=0))


def inf_st(family: Sequence[DiscreteDistribution]) -> DiscreteDistribution:
    """Greatest lower bound: pointwise minimum of the survival functions."""
    if not family:
        raise ContractError("empty family")
    if len(family) == 1:
        return family[0]
    pts = union_points(family)
    return from_survival(pts, _survivals_on(pts, family).min(axis=0))


def join_st(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    return sup_st([mu, nu])


def meet_st(mu: DiscreteDistribution, nu: DiscreteDistribution) -> DiscreteDistribution:
    return inf_st([mu, nu])


def fold_st(family: Sequence[DiscreteDistribution], direction: str = "sup") -> DiscreteDistribution:
    """Left fold of the pairwise join (``sup``) or meet (``inf``)."""
    if not family:
        raise ContractError("empty family")
    op = join_st if direction == "sup" else meet_st
    return reduce(op, family)


def st_functional(mu: DiscreteDistribution) -> float:
    """``sum_i p_i N(x_i)`` with ``N`` the standard normal CDF.

    Strictly increasing for ``<=_st``.  Floating point only resolves the
    increase where ``N`` is not saturated (roughly ``|x| < 8``).
    """
    return float(np.dot(mu.weights, ndtr(mu.support)))
