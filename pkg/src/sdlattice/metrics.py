"""Distances between distributions and monotone approximation of extrema.

Wasserstein-1 metrizes the topology in which monotone bounded sequences for
the second order lattices converge; the Levy metric metrizes weak convergence,
which is what monotone bounded sequences for ``<=_st`` achieve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Generic, Iterable, Iterator, Literal, TypeVar

import numpy as np

from .core import ContractError, DiscreteDistribution, DominanceError, cdf_function, union_points
from .lattice import binary_op, leq

T = TypeVar("T")

LEVY_TOL = 1e-10


class NotDirectedError(DominanceError):
    """The dominator could not produce a member above (below) both arguments."""


def _cdfs_on_union(mu: DiscreteDistribution, nu: DiscreteDistribution):
    pts = union_points([mu, nu])
    return pts, cdf_function(mu)(pts), cdf_function(nu)(pts)


def wasserstein1(mu: DiscreteDistribution, nu: DiscreteDistribution) -> float:
    """``int |F_mu - F_nu|``, integrated exactly over the union breakpoints."""
    pts, f, g = _cdfs_on_union(mu, nu)
    return float(np.sum(np.abs(f[:-1] - g[:-1]) * np.diff(pts)))


def kolmogorov(mu: DiscreteDistribution, nu: DiscreteDistribution) -> float:
    """``sup |F_mu - F_nu|``; both CDFs are constant between union breakpoints."""
    _, f, g = _cdfs_on_union(mu, nu)
    return float(np.max(np.abs(f - g)))


def _levy_feasible(F, G, a: np.ndarray, b: np.ndarray, eps: float) -> bool:
    slack = 1e-14
    # G(x) <= F(x + eps) + eps; the left side jumps at b, the right at a - eps
    if np.any(G(b) > F(b + eps) + eps + slack) or np.any(G(a - eps) > F(a) + eps + slack):
        return False
    # F(x - eps) - eps <= G(x); jumps at a + eps and b
    if np.any(F(b - eps) - eps > G(b) + slack) or np.any(F(a) - eps > G(a + eps) + slack):
        return False
    return True


def levy(mu: DiscreteDistribution, nu: DiscreteDistribution, tol: float = LEVY_TOL) -> float:
    """Levy distance, by bisection on the tube width.

    Feasibility of a width only has to be checked where one of the two shifted
    step functions jumps, i.e. at the support points shifted by +-eps.
    """
    F, G = cdf_function(mu), cdf_function(nu)
    a, b = mu.support, nu.support
    if _levy_feasible(F, G, a, b, 0.0):
        return 0.0
    lo, hi = 0.0, max(1.0, float(max(a[-1], b[-1]) - min(a[0], b[0])))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_feasible(F, G, a, b, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class DirectedFamily(Generic[T]):
    """A possibly unbounded family that is directed in some order.

    ``enumerator`` yields members (an iterable, or a zero-argument callable
    returning one, so the family can be re-enumerated).  ``dominator(x, y)``
    returns a member above both arguments (below both, for infima), or
    ``None`` if there is none; when omitted, the lattice operation itself is
    used, which is right whenever the family is a sublattice.
    """

    enumerator: Iterable[T] | Callable[[], Iterable[T]]
    dominator: Callable[[T, T], T | None] | None = None

    def members(self) -> Iterator[T]:
        source = self.enumerator() if callable(self.enumerator) else self.enumerator
        return iter(source)


@dataclass(frozen=True)
class ApproxResult:
    sequence: tuple[DiscreteDistribution, ...]
    limit: DiscreteDistribution
    trace: tuple[float, ...]
    converged: bool

    @property
    def steps(self) -> int:
        return len(self.sequence)


def dominate(
    x: T,
    y: T,
    dominator: Callable[[T, T], T | None],
    is_leq: Callable[[T, T], bool],
    direction: str,
) -> T:
    """Apply ``dominator`` and verify that its answer bounds both arguments."""
    z = dominator(x, y)
    if z is None:
        raise NotDirectedError("dominator found no common bound")
    ok = (is_leq(x, z) and is_leq(y, z)) if direction == "sup" else (is_leq(z, x) and is_leq(z, y))
    if not ok:
        raise NotDirectedError("dominator output does not bound both arguments")
    return z


def monotone_sup_approx(
    family: DirectedFamily[DiscreteDistribution],
    order: Literal["st", "icv", "icx"],
    tolerance: float = 1e-8,
    max_steps: int = 10_000,
    direction: Literal["sup", "inf"] = "sup",
    reference: DiscreteDistribution | None = None,
) -> ApproxResult:
    """Monotone member sequence approaching the supremum (infimum) of a directed family.

    ``x1 = y1`` and ``x(n+1) = dominator(x(n), y(n+1))``.  The enumeration is
    consumed until it is exhausted, ``max_steps`` members were taken, or,
    when a ``reference`` (the known extremum) is supplied, until the sequence
    is within ``tolerance`` of it.  The limit is the fold of every element
    seen; the trace holds distances of each ``x(n)`` to the reference if given,
    otherwise to that limit.  Distances are Levy for ``st`` and Wasserstein-1
    for the second order lattices.
    """
    if tolerance <= 0 or max_steps < 1:
        raise ContractError("tolerance and max_steps must be positive")
    if direction not in ("sup", "inf"):
        raise ContractError(f"unknown direction {direction!r}")
    op = binary_op(order, direction)
    metric = levy if order == "st" else wasserstein1
    dominator = family.dominator or op

    def is_leq(a, b):
        return leq(a, b, order)

    members = family.members()
    try:
        x = next(members)
    except StopIteration:
        raise ContractError("empty family") from None
    sequence = [x]
    fold = x
    done = reference is not None and metric(x, reference) < tolerance
    while not done and len(sequence) < max_steps:
        try:
            y = next(members)
        except StopIteration:
            break
        x = dominate(x, y, dominator, is_leq, direction)
        fold = op(op(fold, y), x)
        sequence.append(x)
        done = reference is not None and metric(x, reference) < tolerance

    target = reference if reference is not None else fold
    trace = tuple(metric(s, target) for s in sequence)
    return ApproxResult(tuple(sequence), fold, trace, trace[-1] < tolerance)
