import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given

from helpers import distributions, random_distribution
from sdlattice import (
    build_psi_tight,
    dirac,
    icx_transform,
    join,
    kolmogorov,
    leq_order,
    levy,
    make_discrete,
    meet,
    survival_function,
    wasserstein1,
)
from sdlattice.cli import distribution_from_json, distribution_to_json, export_function, run
from sdlattice.integrability import TailOracle

HALF = make_discrete([(0, 0.5), (2, 0.5)])


def write(path, mu):
    path.write_text(json.dumps(distribution_to_json(mu)))
    return str(path)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, (json.loads(out.getvalue()) if out.getvalue() else None), err.getvalue()


@pytest.fixture
def pair(tmp_path):
    return write(tmp_path / "a.json", HALF), write(tmp_path / "b.json", dirac(1.5))


def test_check(pair):
    code, out, _ = call("check", "--order", "st", *pair)
    assert code == 0 and out == {"holds": False, "witness": 1.5}


def test_join(pair):
    code, out, _ = call("join", "--order", "icx", *pair)
    assert code == 0 and out == {"points": [{"x": 1.0, "p": 0.5}, {"x": 2.0, "p": 0.5}]}


def test_w1(tmp_path):
    a, b = write(tmp_path / "a.json", dirac(0)), write(tmp_path / "b.json", dirac(3))
    assert call("w1", a, b)[:2] == (0, {"w1": 3.0})


def test_exit_codes(tmp_path, pair):
    assert call("bogus")[0] == 2
    assert call("join", "--order", "cx", *pair)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"points": [{"x": 0, "p": -1}]}')
    assert call("check", str(bad), pair[0])[0] == 2
    bad.write_text("{not json")
    assert call("check", str(bad), pair[0])[0] == 2
    assert call("check", str(tmp_path / "missing.json"), pair[0])[0] == 2
    tail = tmp_path / "flat.csv"
    tail.write_text("s,T\n0,1\n5,1\n")
    assert call("psi", "--tail", str(tail), "--levels", "2")[0] == 1


def test_golden_suite(tmp_path):
    """Every CLI verdict and output equals the library call on the same inputs."""
    rng = np.random.default_rng(11)
    for i in range(25):
        mu, nu = random_distribution(rng, grid=0.5 if i % 2 else None), random_distribution(rng)
        a, b = write(tmp_path / "a.json", mu), write(tmp_path / "b.json", nu)
        for order in ("st", "icv", "icx", "cx"):
            verdict = leq_order(mu, nu, order)
            assert call("check", "--order", order, a, b)[1] == {"holds": verdict.holds, "witness": verdict.witness}
        for order in ("st", "icv", "icx"):
            assert distribution_from_json(call("join", "--order", order, a, b)[1]) == join(mu, nu, order)
            assert distribution_from_json(call("meet", "--order", order, a, b)[1]) == meet(mu, nu, order)
        assert call("w1", a, b)[1] == {"w1": wasserstein1(mu, nu)}
        assert call("levy", a, b)[1] == {"levy": levy(mu, nu)}
        assert call("kolmogorov", a, b)[1] == {"kolmogorov": kolmogorov(mu, nu)}


@given(distributions())
def test_json_round_trip(mu):
    assert distribution_from_json(json.loads(json.dumps(distribution_to_json(mu)))) == mu


def test_sup_inf(tmp_path):
    files = [write(tmp_path / f"{i}.json", d) for i, d in enumerate([HALF, dirac(1.5), dirac(0)])]
    code, out, _ = call("sup", "--order", "st", *files)
    assert code == 0 and distribution_from_json(out) == make_discrete([(1.5, 0.5), (2, 0.5)])
    code, out, _ = call("inf", "--order", "icv", *files)
    assert code == 0


def read_rows(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "value"]
    return [(float(s), float(v)) for s, v in rows[1:]]


def test_export_survival(tmp_path):
    rows = read_rows(export_function(survival_function(dirac(1)), tmp_path / "s.csv"))
    assert (1.0, 1.0) in rows and (1.0, 0.0) in rows
    assert rows.index((1.0, 1.0)) < rows.index((1.0, 0.0))
    assert sum(1 for s, _ in rows if s < 1) == 3 and sum(1 for s, _ in rows if s > 1) == 3


def test_export_icx(tmp_path):
    rows = read_rows(export_function(icx_transform(HALF), tmp_path / "t.csv"))
    assert (0.0, 1.0) in rows and (2.0, 0.0) in rows


def test_export_psi(tmp_path):
    oracle = TailOracle(lambda s: math.exp(-s))
    psi = build_psi_tight(oracle, 3).psi
    rows = read_rows(export_function(psi, tmp_path / "p.csv", lower=0.0))
    expected = [(0.0, 0.0), (math.log(2), 0.0), (2 * math.log(2), 1.0), (3 * math.log(2), 2.0)]
    for (s, v), (es, ev) in zip(rows[:4], expected):
        assert s == pytest.approx(es, rel=1e-12) and v == pytest.approx(ev, abs=1e-12)


def test_export_full_precision(tmp_path):
    mu = make_discrete([(0.1, 1), (1 / 3, 2)])
    rows = read_rows(export_function(icx_transform(mu), tmp_path / "x.csv"))
    f = icx_transform(mu)
    assert all(v == f(s) for s, v in rows)


def test_out_table(tmp_path, pair):
    out = tmp_path / "join.csv"
    code, _, _ = call("join", "--order", "icx", "--out", str(out), "--table", "icx", *pair)
    assert code == 0 and (1.0, 0.5) in read_rows(out)


def test_psi_commands(tmp_path):
    tail = tmp_path / "tail.csv"
    lines = ["s,T,U"] + [f"{s},{math.exp(-s)!r},{(s + 1) * math.exp(-s)!r}" for s in (0, 0.5, 1, 2, 4, 8, 16, 32, 64)]
    tail.write_text("\n".join(lines) + "\n")
    code, out, _ = call("psi", "--tail", str(tail), "--levels", "3")
    assert code == 0 and out["thresholds"] == [1.0, 2.0, 4.0]
    code, out, _ = call("psi", "--tail", str(tail), "--mode", "dlvp", "--alpha", "0.5", "--out", str(tmp_path / "d.csv"))
    assert code == 0 and out["alpha"] == 0.5
    code, out, _ = call("psi", "--tail", str(tail), "--mode", "strict", "--M", "2")
    assert code == 0 and len(out["coefficients"]) == 11
    fam = write(tmp_path / "m.json", make_discrete([(0.5, 1), (3, 1)]))
    code, out, _ = call("psi", fam, "--levels", "2")
    assert code == 0 and out["exact"]
    assert call("psi", "--mode", "dlvp", fam)[0] == 2  # alpha missing
    neg = write(tmp_path / "n.json", dirac(-1))
    assert call("psi", neg)[0] == 2


def test_flows(tmp_path):
    def flow_file(name, dists, pi=(1.0, 0.0)):
        doc = {"atoms": [{"label": lab, "pi": p, **distribution_to_json(d)} for lab, p, d in zip("ab", pi, dists)]}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    x = flow_file("x.json", [dirac(0), dirac(5)])
    y = flow_file("y.json", [dirac(1), dirac(0)])
    assert call("flow-check", "--order", "st", x, y)[1] == {"holds": True, "atom": None, "witness": None}
    x2 = flow_file("x2.json", [dirac(0), dirac(5)], (1, 1))
    y2 = flow_file("y2.json", [dirac(1), dirac(0)], (1, 1))
    code, out, _ = call("flow-check", "--order", "st", x2, y2)
    assert code == 0 and out["holds"] is False and out["atom"] == "b"
    code, out, _ = call("flow-sup", "--order", "st", x2, y2)
    assert [a["points"][0]["x"] for a in out["atoms"]] == [1.0, 5.0]
    code, out, _ = call("flow-sup", "--order", "st", "--direction", "inf", x2, y2)
    assert [a["points"][0]["x"] for a in out["atoms"]] == [0.0, 0.0]
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": [{"label": "a"}]}')
    assert call("flow-check", str(bad), x)[0] == 2
