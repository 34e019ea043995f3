"""Random generators and hypothesis strategies shared by the test modules."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from sdlattice import AtomicMeasureSpace, DiscreteDistribution, Flow, make_discrete

LO, HI = -10.0, 10.0


def random_distribution(rng: np.random.Generator, max_support: int = 8, lo: float = LO, hi: float = HI, grid=None):
    """Random distribution; ``grid`` snaps points to multiples of it (forces ties across draws)."""
    k = int(rng.integers(1, max_support + 1))
    x = rng.uniform(lo, hi, k)
    if grid:
        x = np.round(x / grid) * grid
    w = rng.uniform(0.05, 1.0, k)
    return make_discrete(zip(x, w))


def random_triple(rng, i: int):
    # every other triple lives on a coarse grid so equal points and kinks coincide
    grid = 0.5 if i % 2 else None
    return tuple(random_distribution(rng, grid=grid) for _ in range(3))


def shift_up(rng, mu: DiscreteDistribution, scale: float = 1.0) -> DiscreteDistribution:
    """Law of X + D with D >= 0: first order above ``mu``."""
    return make_discrete(zip(mu.support + rng.uniform(0, scale, len(mu)), mu.weights))


def spread(rng, mu: DiscreteDistribution, scale: float = 1.0) -> DiscreteDistribution:
    """Mean-preserving spread: each atom is split symmetrically."""
    pairs = []
    for x, p in zip(mu.support, mu.weights):
        h = rng.uniform(0, scale)
        pairs += [(x - h, p / 2), (x + h, p / 2)]
    return make_discrete(pairs)


def independent_max(mu: DiscreteDistribution, nu: DiscreteDistribution, op=np.maximum) -> DiscreteDistribution:
    """Law of op(X, Y) for independent X ~ mu and Y ~ nu."""
    xs = op.outer(mu.support, nu.support).ravel()
    ws = np.outer(mu.weights, nu.weights).ravel()
    return make_discrete(zip(xs, ws))


def centered(mu: DiscreteDistribution) -> DiscreteDistribution:
    m = float(np.dot(mu.support, mu.weights))
    return make_discrete(zip(mu.support - m, mu.weights))


def random_space(rng, n_atoms: int, zero_prob: float = 0.2) -> AtomicMeasureSpace:
    w = rng.uniform(0.1, 2.0, n_atoms)
    w[rng.uniform(size=n_atoms) < zero_prob] = 0.0
    if not np.any(w > 0):
        w[0] = 1.0
    return AtomicMeasureSpace(tuple(f"t{i}" for i in range(n_atoms)), w)


def random_flow(rng, space: AtomicMeasureSpace, max_support: int = 4, lo: float = -5.0, hi: float = 5.0) -> Flow:
    return Flow(space, tuple(random_distribution(rng, max_support, lo, hi) for _ in space.atoms))


# -- hypothesis ---------------------------------------------------------------

coords = st.floats(min_value=LO, max_value=HI, allow_nan=False, allow_infinity=False).map(lambda v: round(v, 3))
masses = st.floats(min_value=0.05, max_value=1.0)


@st.composite
def distributions(draw, max_support: int = 6, bound: float | None = None):
    xs = coords if bound is None else st.floats(-bound, bound).map(lambda v: round(v, 3))
    pts = draw(st.lists(st.tuples(xs, masses), min_size=1, max_size=max_support))
    return make_discrete(pts)
