import itertools

import numpy as np
import pytest
from scipy.special import ndtr

from helpers import random_flow, random_space
from sdlattice import (
    AtomicMeasureSpace,
    ContractError,
    DirectedFamily,
    Flow,
    UnboundedError,
    dirac,
    ess_extremum_flow,
    ess_sup_countable,
    flow_functional,
    leq_flow,
    levy,
    make_discrete,
)
from sdlattice.metrics import NotDirectedError

ORDERS = ("st", "icv", "icx")


def pair_space(pi=(1.0, 0.0)):
    return AtomicMeasureSpace(("a", "b"), pi)


def test_zero_weight_atoms_are_ignored():
    mu = Flow(pair_space(), (dirac(0), dirac(5)))
    nu = Flow(pair_space(), (dirac(1), dirac(0)))
    assert leq_flow(mu, nu, "st")
    mu2, nu2 = mu.with_space(pair_space((1, 1))), nu.with_space(pair_space((1, 1)))
    w = leq_flow(mu2, nu2, "st")
    assert not w and w.atom == "b"


def test_reflexive():
    rng = np.random.default_rng(0)
    f = random_flow(rng, random_space(rng, 4))
    for order in ORDERS + ("cx",):
        assert leq_flow(f, f, order)


def test_mismatched_spaces():
    f = Flow(pair_space(), (dirac(0), dirac(1)))
    g = Flow(AtomicMeasureSpace(("a", "c"), (1.0, 0.0)), (dirac(0), dirac(1)))
    with pytest.raises(ContractError):
        leq_flow(f, g, "st")
    with pytest.raises(ContractError):
        ess_extremum_flow([f, g], "st", "sup")


def test_space_and_flow_contracts():
    with pytest.raises(ContractError):
        AtomicMeasureSpace(("a", "a"), (1, 1))
    with pytest.raises(ContractError):
        AtomicMeasureSpace(("a",), (0.0,))
    with pytest.raises(ContractError):
        AtomicMeasureSpace(("a",), (-1.0,))
    with pytest.raises(ContractError):
        Flow(pair_space(), (dirac(0),))
    with pytest.raises(ContractError):
        Flow(pair_space(), {"a": dirac(0)})
    f = Flow(pair_space(), {"b": dirac(1), "a": dirac(0)})
    assert f["a"] == dirac(0) and f.as_dict()["b"] == dirac(1)


def test_functional_examples():
    single = AtomicMeasureSpace(("t",), (1.0,))
    assert flow_functional(Flow(single, (dirac(0),)), "st") == 0.5
    f = Flow(pair_space((1, 2)), (dirac(0.3), dirac(-1)))
    g = f.with_space(pair_space((2, 4)))
    for order in ORDERS:
        assert flow_functional(g, order) == pytest.approx(2 * flow_functional(f, order))


def test_extremum_examples():
    space = pair_space((1, 1))
    x = Flow(space, (dirac(0), dirac(3)))
    y = Flow(space, (dirac(2), dirac(1)))
    top = ess_extremum_flow([x, y], "st", "sup")
    bottom = ess_extremum_flow([x, y], "st", "inf")
    assert top.assignment == (dirac(2), dirac(3)) and bottom.assignment == (dirac(0), dirac(1))
    assert ess_extremum_flow([x], "icx", "sup") == x
    half = make_discrete([(0, 0.5), (2, 0.5)])
    p = Flow(space, (half, dirac(0)))
    q = Flow(space, (dirac(1.5), dirac(0)))
    j = ess_extremum_flow([p, q], "icx", "sup")
    assert j["a"].isclose(make_discrete([(1, 0.5), (2, 0.5)]))
    with pytest.raises(ContractError):
        ess_extremum_flow([], "st", "sup")


def test_countable_dirac_sequence():
    single = AtomicMeasureSpace(("t",), (1.0,))
    bound = Flow(single, (dirac(1.0),))
    family = DirectedFamily(lambda: (Flow(single, (dirac(1 - 1 / n),)) for n in itertools.count(1)))
    res = ess_sup_countable(family, "st", max_steps=50, bound=bound)
    assert res.consumed == 50 and not res.converged
    assert levy(res.flow["t"], dirac(1.0)) == pytest.approx(1 / 50, abs=1e-9)
    assert np.all(np.diff(res.trace) >= 0)
    assert res.functional == pytest.approx(float(ndtr(1 - 1 / 50)))
    assert res.functional < float(ndtr(1.0))


def test_countable_stops_on_small_increment():
    single = AtomicMeasureSpace(("t",), (1.0,))
    family = DirectedFamily([Flow(single, (dirac(v),)) for v in (0.0, 0.1, 0.2, 0.3)])
    res = ess_sup_countable(family, "st", tolerance=1.0)
    assert res.consumed == 2 and res.converged
    assert len(res.increments) == 1 and res.increments[0] < 1.0


def test_countable_unbounded():
    single = AtomicMeasureSpace(("t",), (1.0,))
    family = DirectedFamily(lambda: (Flow(single, (dirac(float(n)),)) for n in itertools.count()))
    with pytest.raises(UnboundedError):
        ess_sup_countable(family, "st", bound=Flow(single, (dirac(5.0),)))


def test_countable_bad_dominator():
    single = AtomicMeasureSpace(("t",), (1.0,))
    members = [Flow(single, (dirac(0.0),)), Flow(single, (dirac(1.0),))]
    family = DirectedFamily(members, dominator=lambda x, y: x)
    with pytest.raises(NotDirectedError):
        ess_sup_countable(family, "st")


@pytest.mark.parametrize("order", ORDERS)
def test_extremum_is_least_bound(order):
    rng = np.random.default_rng(7)
    for _ in range(20):
        space = random_space(rng, 3)
        flows = [random_flow(rng, space) for _ in range(3)]
        top = ess_extremum_flow(flows, order, "sup")
        assert all(leq_flow(f, top, order) for f in flows)
        # any flow above all members is above the extremum
        cand = ess_extremum_flow(flows + [random_flow(rng, space)], order, "sup")
        assert leq_flow(top, cand, order)


@pytest.mark.parametrize("order", ORDERS)
def test_partial_order_modulo_null_atoms(order):
    rng = np.random.default_rng(8)
    for _ in range(30):
        space = random_space(rng, 3, zero_prob=0.4)
        x, y, z = (random_flow(rng, space) for _ in range(3))
        lo = ess_extremum_flow([x, y], order, "inf")
        hi = ess_extremum_flow([x, y, z], order, "sup")
        assert leq_flow(lo, x, order) and leq_flow(x, hi, order) and leq_flow(lo, hi, order)
        if leq_flow(x, y, order) and leq_flow(y, x, order):
            assert x.agrees_with(y, 1e-7)
