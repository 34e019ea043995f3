"""Flows of distributions over a finite weighted index set.

A flow assigns a distribution to every atom of an :class:`AtomicMeasureSpace`.
Flows are compared atom by atom, ignoring atoms of weight zero, and their
extrema are taken atom by atom.  For countable directed families the
running join is driven upward and monitored through a strictly increasing
real functional.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Literal, Mapping, Sequence

import numpy as np

from .core import ATOL, ContractError, DiscreteDistribution, DominanceError, _frozen
from .lattice import binary_op, functional
from .metrics import DirectedFamily, NotDirectedError
from .second_order import leq_order


class UnboundedError(DominanceError):
    """The running extremum left the supplied bound."""


@dataclass(frozen=True, eq=False)
class AtomicMeasureSpace:
    atoms: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        atoms = tuple(str(a) for a in self.atoms)
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if len(set(atoms)) != len(atoms):
            raise ContractError("atom labels must be distinct")
        if w.size != len(atoms):
            raise ContractError("need one weight per atom")
        if not np.all(np.isfinite(w)) or np.any(w < 0) or not np.any(w > 0):
            raise ContractError("weights must be finite, nonnegative, and not all zero")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", _frozen(w))

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasureSpace):
            return NotImplemented
        return self.atoms == other.atoms and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.atoms, self.weights.tobytes()))

    def __len__(self):
        return len(self.atoms)

    def scaled(self, factor: float) -> "AtomicMeasureSpace":
        if not factor > 0:
            raise ContractError("scale factor must be positive")
        return AtomicMeasureSpace(self.atoms, self.weights * factor)


@dataclass(frozen=True, eq=False)
class Flow:
    """Distributions indexed by the atoms of ``space``, stored in atom order."""

    space: AtomicMeasureSpace
    assignment: tuple[DiscreteDistribution, ...]

    def __post_init__(self):
        assignment = self.assignment
        if isinstance(assignment, Mapping):
            missing = [a for a in self.space.atoms if a not in assignment]
            extra = set(assignment) - set(self.space.atoms)
            if missing or extra:
                raise ContractError(f"assignment must cover exactly the atoms (missing {missing}, extra {sorted(extra)})")
            assignment = tuple(assignment[a] for a in self.space.atoms)
        assignment = tuple(assignment)
        if len(assignment) != len(self.space):
            raise ContractError("need one distribution per atom")
        if not all(isinstance(d, DiscreteDistribution) for d in assignment):
            raise ContractError("assignment values must be DiscreteDistribution")
        object.__setattr__(self, "assignment", assignment)

    def __getitem__(self, label: str) -> DiscreteDistribution:
        return self.assignment[self.space.atoms.index(label)]

    def __eq__(self, other):
        if not isinstance(other, Flow):
            return NotImplemented
        return self.space == other.space and self.assignment == other.assignment

    def __hash__(self):
        return hash((self.space, self.assignment))

    def as_dict(self) -> dict[str, DiscreteDistribution]:
        return dict(zip(self.space.atoms, self.assignment))

    def with_space(self, space: AtomicMeasureSpace) -> "Flow":
        return Flow(space, self.assignment)

    def agrees_with(self, other: "Flow", atol: float = ATOL) -> bool:
        """Equal up to ``atol`` at every atom of positive weight."""
        _check_space(self, other)
        return all(
            a.isclose(b, atol) for a, b, w in zip(self.assignment, other.assignment, self.space.weights) if w > 0
        )


def _check_space(*flows: Flow) -> AtomicMeasureSpace:
    space = flows[0].space
    if any(f.space != space for f in flows[1:]):
        raise ContractError("flows live on different spaces")
    return space


@dataclass(frozen=True)
class FlowWitness:
    """Verdict of an atomwise comparison; ``atom`` and ``point`` locate a violation."""

    holds: bool
    atom: str | None = None
    point: float | None = None

    def __bool__(self) -> bool:
        return self.holds


def leq_flow(mu: Flow, nu: Flow, order: str, tol: float = ATOL) -> FlowWitness:
    """Atomwise order check; atoms of weight zero are ignored."""
    space = _check_space(mu, nu)
    for label, w, a, b in zip(space.atoms, space.weights, mu.assignment, nu.assignment):
        if w <= 0:
            continue
        verdict = leq_order(a, b, order, tol)
        if not verdict:
            return FlowWitness(False, label, verdict.witness)
    return FlowWitness(True)


def flow_functional(mu: Flow, order: str) -> float:
    """Weighted sum over atoms of the order's strictly increasing functional."""
    f = functional(order)
    w = mu.space.weights
    return float(sum(wi * f(d) for wi, d in zip(w, mu.assignment) if wi > 0))


def atomwise(order: str, direction: str):
    """The pairwise flow join (``sup``) or meet (``inf``)."""
    op = binary_op(order, direction)

    def combine(x: Flow, y: Flow) -> Flow:
        space = _check_space(x, y)
        return Flow(space, tuple(op(a, b) for a, b in zip(x.assignment, y.assignment)))

    return combine


def ess_extremum_flow(
    family: Sequence[Flow],
    order: Literal["st", "icv", "icx"],
    direction: Literal["sup", "inf"],
) -> Flow:
    """Essential supremum or infimum of finitely many flows (left fold of the atomwise operation)."""
    if not family:
        raise ContractError("empty family")
    if direction not in ("sup", "inf"):
        raise ContractError(f"unknown direction {direction!r}")
    _check_space(*family)
    return reduce(atomwise(order, direction), family)


@dataclass(frozen=True)
class CountableResult:
    """Running extremum with its functional certificate.

    ``trace[k]`` is the functional at the k-th running extremum and
    ``increments`` its successive changes (signed so that they are
    nonnegative in the chosen direction).
    """

    flow: Flow
    functional: float
    consumed: int
    trace: tuple[float, ...]
    increments: tuple[float, ...]
    converged: bool


def ess_sup_countable(
    family: DirectedFamily[Flow],
    order: Literal["st", "icv", "icx"],
    tolerance: float = 0.0,
    max_steps: int = 10_000,
    direction: Literal["sup", "inf"] = "sup",
    bound: Flow | None = None,
) -> CountableResult:
    """Essential extremum of a directed family of flows in one monotone pass.

    Each new member is combined with the running extremum through the
    family's dominator (the atomwise lattice operation by default).  The
    functional of the running extremum moves monotonically; the pass stops
    once a step changes it by less than ``tolerance`` (never, for the
    default 0), when the enumeration ends, or after ``max_steps`` members.
    With ``tolerance = 0`` a finite enumeration gives exactly
    :func:`ess_extremum_flow`.  When ``bound`` is given, the running
    extremum must stay below it (above it for infima).
    """
    if tolerance < 0 or max_steps < 1:
        raise ContractError("tolerance must be nonnegative and max_steps positive")
    if direction not in ("sup", "inf"):
        raise ContractError(f"unknown direction {direction!r}")
    dominator = family.dominator or atomwise(order, direction)
    F = functional(order)
    sign = 1.0 if direction == "sup" else -1.0

    def value(x: Flow) -> float:
        w = x.space.weights
        return float(sum(wi * F(d) for wi, d in zip(w, x.assignment) if wi > 0))

    def below(a: Flow, b: Flow) -> bool:
        return bool(leq_flow(a, b, order)) if direction == "sup" else bool(leq_flow(b, a, order))

    def check_bound(x: Flow) -> None:
        if bound is not None and not below(x, bound):
            raise UnboundedError("running extremum escaped the supplied bound")

    members = family.members()
    try:
        x = next(members)
    except StopIteration:
        raise ContractError("empty family") from None
    check_bound(x)
    trace = [value(x)]
    increments: list[float] = []
    consumed = 1
    converged = False
    while consumed < max_steps:
        try:
            y = next(members)
        except StopIteration:
            converged = True
            break
        z = dominator(x, y)
        if z is None or not (below(x, z) and below(y, z)):
            raise NotDirectedError("dominator output does not bound both arguments")
        x = z
        consumed += 1
        check_bound(x)
        trace.append(value(x))
        increments.append(sign * (trace[-1] - trace[-2]))
        if tolerance > 0 and increments[-1] < tolerance:
            converged = True
            break
    return CountableResult(x, trace[-1], consumed, tuple(trace), tuple(increments), converged)
