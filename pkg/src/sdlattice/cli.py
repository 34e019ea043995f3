"""Command-line front end.

Distributions are read from JSON documents ``{"points": [{"x": .., "p": ..}]}``
and flows from ``{"atoms": [{"label": .., "pi": .., "points": [..]}]}``.
Results go to standard output as JSON.  Exit codes: 0 on success (a failed
order check is a result, not an error), 1 on domain errors, 2 on malformed
input or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    ContractError,
    DiscreteDistribution,
    DominanceError,
    PiecewiseLinearFunction,
    StepFunction,
    cdf_function,
    icv_transform,
    icx_transform,
    make_discrete,
    survival_function,
)
from .flows import AtomicMeasureSpace, Flow, ess_extremum_flow, flow_functional, leq_flow
from .integrability import (
    DlvpPsi,
    ExplicitFamily,
    NonnegMeasure,
    TailOracle,
    build_psi_dlvp,
    build_psi_strict,
    build_psi_tight,
)
from .lattice import extremum, join, meet
from .metrics import kolmogorov, levy, wasserstein1
from .second_order import leq_order

ORDERS = ("st", "icv", "icx", "cx")
TABLES = {"survival": survival_function, "cdf": cdf_function, "icx": icx_transform, "icv": icv_transform}


class CliInputError(ContractError):
    """Malformed input file."""


# -- serialization --------------------------------------------------------------


def distribution_to_json(mu: DiscreteDistribution) -> dict:
    return {"points": [{"x": float(x), "p": float(p)} for x, p in zip(mu.support, mu.weights)]}


def _points(doc) -> DiscreteDistribution:
    try:
        pairs = [(row["x"], row["p"]) for row in doc]
    except (KeyError, TypeError):
        raise CliInputError('each point needs numeric "x" and "p"') from None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for pair in pairs for v in pair):
        raise CliInputError('"x" and "p" must be numbers')
    return make_discrete(pairs)


def distribution_from_json(doc) -> DiscreteDistribution:
    if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
        raise CliInputError('distribution documents need a "points" list')
    return _points(doc["points"])


def flow_to_json(flow: Flow) -> dict:
    return {
        "atoms": [
            {"label": label, "pi": float(w), **distribution_to_json(d)}
            for label, w, d in zip(flow.space.atoms, flow.space.weights, flow.assignment)
        ]
    }


def flow_from_json(doc) -> Flow:
    if not isinstance(doc, dict) or not isinstance(doc.get("atoms"), list):
        raise CliInputError('flow documents need an "atoms" list')
    try:
        labels = [str(a["label"]) for a in doc["atoms"]]
        weights = [float(a["pi"]) for a in doc["atoms"]]
        dists = [_points(a["points"]) for a in doc["atoms"]]
    except (KeyError, TypeError, ValueError):
        raise CliInputError('each atom needs "label", "pi" and "points"') from None
    return Flow(AtomicMeasureSpace(labels, weights), tuple(dists))


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{path}: invalid JSON ({exc.msg})") from None


def load_distribution(path: str) -> DiscreteDistribution:
    return distribution_from_json(_load_json(path))


def load_flow(path: str) -> Flow:
    return flow_from_json(_load_json(path))


# -- tables ---------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def function_rows(
    f: StepFunction | PiecewiseLinearFunction | DlvpPsi,
    padding: int = 3,
    lower: float | None = None,
) -> list[tuple[float, float]]:
    """Rows ``(s, value)`` describing ``f`` for plotting.

    Every breakpoint is included, plus ``padding`` evenly spaced points on
    each ray.  Step functions get both one-sided values at each jump, so the
    discontinuity is drawn vertically.  ``lower`` truncates the left ray
    (functions living on ``[lower, inf)``).
    """
    if isinstance(f, DlvpPsi):
        knots = f.eta.breakpoints
        pts = np.union1d(knots, 0.5 * (knots[:-1] + knots[1:]))
    else:
        pts = f.jumps if isinstance(f, StepFunction) else f.breakpoints
    pts = np.asarray(pts, dtype=np.float64)
    span = float(pts[-1] - pts[0]) if pts.size > 1 else 1.0
    step = max(span, 1.0) / max(padding, 1)
    left = [pts[0] - step * k for k in range(padding, 0, -1)] if pts.size else []
    if lower is not None:
        left = [s for s in left if s >= lower]
    right = [pts[-1] + step * k for k in range(1, padding + 1)] if pts.size else []

    rows: list[tuple[float, float]] = []
    if isinstance(f, StepFunction):
        if pts.size == 0:
            return [(0.0, float(f.plateaus[0]))]
        for s in left:
            rows.append((s, f(s)))
        for k, s in enumerate(pts):
            rows.append((float(s), float(f.plateaus[k])))
            rows.append((float(s), float(f.plateaus[k + 1])))
        for s in right:
            rows.append((s, f(s)))
        return rows
    grid = np.concatenate((left, pts, right))
    return [(float(s), float(f(s))) for s in grid]


def export_function(f, target: str | Path, padding: int = 3, lower: float | None = None) -> Path:
    """Write ``f`` as a ``s,value`` CSV table (17 significant digits)."""
    target = Path(target)
    rows = function_rows(f, padding, lower)
    with open(target, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "value"])
        writer.writerows((_fmt(s), _fmt(v)) for s, v in rows)
    return target


# -- commands -----------------------------------------------------------------


def _lattice_order(order: str) -> str:
    if order == "cx":
        raise ContractError("the convex order is not a lattice; use st, icv or icx")
    return order


def _emit_distribution(mu: DiscreteDistribution, args) -> dict:
    if args.out:
        export_function(TABLES[args.table](mu), args.out)
    return distribution_to_json(mu)


def cmd_check(args):
    verdict = leq_order(load_distribution(args.a), load_distribution(args.b), args.order, args.tol)
    return {"holds": verdict.holds, "witness": verdict.witness}


def cmd_join(args):
    mu = join(load_distribution(args.a), load_distribution(args.b), _lattice_order(args.order))
    return _emit_distribution(mu, args)


def cmd_meet(args):
    mu = meet(load_distribution(args.a), load_distribution(args.b), _lattice_order(args.order))
    return _emit_distribution(mu, args)


def _cmd_extremum(direction):
    def run(args):
        family = [load_distribution(p) for p in args.files]
        return _emit_distribution(extremum(family, _lattice_order(args.order), direction), args)

    return run


def _cmd_metric(name, fn):
    def run(args):
        return {name: fn(load_distribution(args.a), load_distribution(args.b))}

    return run


def _psi_family(args):
    if args.tail and args.files:
        raise ContractError("give either --tail or distribution files, not both")
    if args.tail:
        try:
            return TailOracle.from_csv(args.tail)
        except OSError as exc:
            raise CliInputError(f"cannot read {args.tail}: {exc.strerror}") from None
    if not args.files:
        raise ContractError("psi needs --tail or at least one distribution file")
    members = []
    for path in args.files:
        mu = load_distribution(path)
        if mu.support[0] < 0:
            raise ContractError(f"{path}: psi families live on [0, inf)")
        members.append(NonnegMeasure.from_distribution(mu))
    return ExplicitFamily(tuple(members))


def _plf_json(f: PiecewiseLinearFunction) -> dict:
    return {"breakpoints": f.breakpoints.tolist(), "values": f.values.tolist(), "right_slope": f.right_slope}


def cmd_psi(args):
    family = _psi_family(args)
    if args.mode == "tight":
        res = build_psi_tight(family, args.levels, continuous=not args.step)
        psi = res.psi
        out = {"mode": "tight", "thresholds": list(res.thresholds), "certificate": res.certificate, "exact": res.exact}
        if isinstance(psi, PiecewiseLinearFunction):
            out["psi"] = _plf_json(psi)
    elif args.mode == "strict":
        res = build_psi_strict(family, args.M, args.levels)
        psi = res.psi
        out = {
            "mode": "strict",
            "thresholds": list(res.tight.thresholds),
            "coefficients": list(res.coefficients),
            "certificate": res.certificate,
            "exact": res.exact,
            "psi": _plf_json(psi),
        }
    else:
        if args.alpha is None:
            raise ContractError("--mode dlvp needs --alpha")
        psi = build_psi_dlvp(family, args.alpha, args.levels, strict=args.strict, M=args.M)
        out = {
            "mode": "dlvp",
            "alpha": psi.alpha,
            "thresholds": list(psi.thresholds),
            "certificate": psi.certificate,
            "psi_certificate": psi.psi_certificate,
            "eta": _plf_json(psi.eta),
        }
    if args.out:
        export_function(psi, args.out, lower=0.0)
    return out


def cmd_flow_check(args):
    verdict = leq_flow(load_flow(args.a), load_flow(args.b), args.order, args.tol)
    return {"holds": verdict.holds, "atom": verdict.atom, "witness": verdict.point}


def cmd_flow_sup(args):
    flows = [load_flow(p) for p in args.files]
    order = _lattice_order(args.order)
    result = ess_extremum_flow(flows, order, args.direction)
    return {**flow_to_json(result), "functional": flow_functional(result, order)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", choices=ORDERS, default="st")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--out", help="write a plot table (s,value CSV) here")
    common.add_argument("--table", choices=sorted(TABLES), default="survival", help="function tabulated by --out")

    parser = argparse.ArgumentParser(prog="sdlattice", description="Stochastic-dominance lattices on finite distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("a")
        p.add_argument("b")
        p.set_defaults(func=fn)

    def many(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("files", nargs="+")
        p.set_defaults(func=fn)
        return p

    pair("check", cmd_check, "is a <= b in --order")
    pair("join", cmd_join, "least upper bound of two distributions")
    pair("meet", cmd_meet, "greatest lower bound of two distributions")
    many("sup", _cmd_extremum("sup"), "supremum of a family")
    many("inf", _cmd_extremum("inf"), "infimum of a family")
    pair("w1", _cmd_metric("w1", wasserstein1), "Wasserstein-1 distance")
    pair("levy", _cmd_metric("levy", levy), "Levy distance")
    pair("kolmogorov", _cmd_metric("kolmogorov", kolmogorov), "Kolmogorov distance")

    psi = sub.add_parser("psi", parents=[common], help="build a psi function for a family on [0, inf)")
    psi.add_argument("files", nargs="*", help="distribution files forming an explicit family")
    psi.add_argument("--mode", choices=("tight", "strict", "dlvp"), default="tight")
    psi.add_argument("--alpha", type=float)
    psi.add_argument("--levels", type=int, default=10)
    psi.add_argument("--tail", help="CSV table with columns s,T[,U]")
    psi.add_argument("--M", type=float, default=1.0, help="strictness horizon")
    psi.add_argument("--step", action="store_true", help="step-function variant (tight mode)")
    psi.add_argument("--strict", action="store_true", help="strictly convex variant (dlvp mode)")
    psi.set_defaults(func=cmd_psi)

    pair("flow-check", cmd_flow_check, "atomwise order check of two flows")
    fs = many("flow-sup", cmd_flow_sup, "essential supremum (or infimum) of flows")
    fs.add_argument("--direction", choices=("sup", "inf"), default="sup")
    return parser


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except ContractError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (DominanceError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    print(json.dumps(result, default=_json_default, allow_nan=True), file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
