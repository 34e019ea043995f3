"""Order-generic dispatch over the three distribution lattices."""

from __future__ import annotations

from typing import Callable, Literal, Sequence

from .core import ContractError, DiscreteDistribution
from .first_order import join_st, meet_st, st_functional
from .second_order import (
    extremum_family,
    icv_functional,
    icx_functional,
    join_icv,
    join_icx,
    leq_order,
    meet_icv,
    meet_icx,
)

LatticeOrder = Literal["st", "icv", "icx"]
LATTICE_ORDERS = ("st", "icv", "icx")

_JOIN = {"st": join_st, "icv": join_icv, "icx": join_icx}
_MEET = {"st": meet_st, "icv": meet_icv, "icx": meet_icx}
_FUNCTIONAL = {"st": st_functional, "icv": icv_functional, "icx": icx_functional}


def _lookup(table: dict, order: str):
    try:
        return table[order]
    except KeyError:
        raise ContractError(f"order must be one of {LATTICE_ORDERS}, got {order!r}") from None


def join(mu: DiscreteDistribution, nu: DiscreteDistribution, order: LatticeOrder) -> DiscreteDistribution:
    return _lookup(_JOIN, order)(mu, nu)


def meet(mu: DiscreteDistribution, nu: DiscreteDistribution, order: LatticeOrder) -> DiscreteDistribution:
    return _lookup(_MEET, order)(mu, nu)


def binary_op(order: LatticeOrder, direction: str) -> Callable:
    return _lookup(_JOIN if direction == "sup" else _MEET, order)


def functional(order: LatticeOrder) -> Callable[[DiscreteDistribution], float]:
    """The strictly increasing real functional attached to ``order``."""
    return _lookup(_FUNCTIONAL, order)


def leq(mu: DiscreteDistribution, nu: DiscreteDistribution, order: str) -> bool:
    return leq_order(mu, nu, order).holds


def extremum(family: Sequence[DiscreteDistribution], order: LatticeOrder, direction: str) -> DiscreteDistribution:
    _lookup(_JOIN, order)
    return extremum_family(family, order, direction)
