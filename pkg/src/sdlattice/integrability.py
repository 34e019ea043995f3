"""Tightness and uniform integrability of families of measures on [0, inf).

A family is either an explicit finite list of finitely-supported measures
(total mass need not be one) or a :class:`TailOracle` that can only be asked
for its tail envelope ``T(s) = sup_nu nu((s, inf))`` and, optionally, its
first-moment tail ``U(s) = sup_nu int_(s, inf) u dnu(u)``.  Non-finite
measures are only ever represented by an oracle.

The ``build_psi_*`` functions construct the nondecreasing functions psi of
De La Vallee Poussin type with ``sup_nu int psi dnu`` bounded, together with
a certified value for that bound.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .core import (
    ContractError,
    DiscreteDistribution,
    DominanceError,
    PiecewiseLinearFunction,
    StepFunction,
    _frozen,
)

# doubling search gives up past this horizon
HORIZON_CAP = 2.0**64
BISECT_RTOL = 1e-13


class NotTightError(DominanceError):
    """No threshold with small enough tail mass exists within the search horizon."""


class NotUniformlyIntegrableError(NotTightError):
    """The moment-weighted family is not tight within the search horizon."""


class OracleMonotonicityError(DominanceError):
    """A tail oracle returned values that increase in s."""


@dataclass(frozen=True, eq=False)
class NonnegMeasure:
    """Finitely-supported finite measure on [0, inf); empty means the zero measure."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.support, dtype=np.float64).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if x.shape != w.shape:
            raise ContractError("support and weights must have equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise ContractError("support and weights must be finite")
        if np.any(x < 0):
            raise ContractError("support must lie in [0, inf)")
        if np.any(np.diff(x) <= 0):
            raise ContractError("support must be strictly increasing")
        if np.any(w <= 0):
            raise ContractError("weights must be strictly positive")
        object.__setattr__(self, "support", _frozen(x))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_pairs(cls, pairs) -> "NonnegMeasure":
        pairs = [(float(x), float(w)) for x, w in pairs if float(w) != 0.0]
        if not pairs:
            return cls([], [])
        xs, ws = np.array(pairs).T
        points, inverse = np.unique(xs, return_inverse=True)
        return cls(points, np.bincount(inverse, weights=ws, minlength=points.size))

    @classmethod
    def from_distribution(cls, mu: DiscreteDistribution) -> "NonnegMeasure":
        return cls(mu.support, mu.weights)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def mass_above(self, s: float) -> float:
        return float(self.weights[self.support > s].sum())

    def mass_in(self, a: float, b: float) -> float:
        """Mass of the half-open interval ``(a, b]``."""
        sel = (self.support > a) & (self.support <= b)
        return float(self.weights[sel].sum())

    def moment_above(self, s: float) -> float:
        sel = self.support > s
        return float(np.dot(self.support[sel], self.weights[sel]))

    def integrate(self, f: Callable) -> float:
        if self.support.size == 0:
            return 0.0
        return float(np.dot(np.asarray(f(self.support), dtype=np.float64), self.weights))

    def moment_weighted(self) -> "NonnegMeasure":
        """``B -> int_B u dnu(u)``; the atom at 0 (if any) gets no mass."""
        keep = self.support > 0
        return NonnegMeasure(self.support[keep], self.support[keep] * self.weights[keep])

    def pushforward(self, f: Callable) -> "NonnegMeasure":
        if self.support.size == 0:
            return self
        image = np.asarray(f(self.support), dtype=np.float64)
        return NonnegMeasure.from_pairs(zip(image, self.weights))


@dataclass(frozen=True, eq=False)
class ExplicitFamily:
    members: tuple[NonnegMeasure, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ContractError("explicit families must be nonempty")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *members: NonnegMeasure | DiscreteDistribution) -> "ExplicitFamily":
        return cls(tuple(m if isinstance(m, NonnegMeasure) else NonnegMeasure.from_distribution(m) for m in members))

    def knots(self) -> np.ndarray:
        pts = [m.support for m in self.members if m.support.size]
        return np.unique(np.concatenate(pts)) if pts else np.empty(0)


class TailOracle:
    """Queryable tail envelope of a (possibly non-explicit) family.

    ``tail(s)`` must be nonincreasing, as must ``moment_tail`` if given.
    Every answer is checked against the answers already observed, and a
    violation raises :class:`OracleMonotonicityError`.  ``knots``, when known
    (e.g. for tabulated oracles), are the only points where the envelopes can
    change value; threshold searches then become exact.  Not safe for
    concurrent use.
    """

    def __init__(
        self,
        tail: Callable[[float], float],
        moment_tail: Callable[[float], float] | None = None,
        knots: Sequence[float] | None = None,
    ):
        self._tail = tail
        self._moment_tail = moment_tail
        self.knots = None if knots is None else np.asarray(knots, dtype=np.float64)
        self._seen: dict[str, tuple[list[float], list[float]]] = {"T": ([], []), "U": ([], [])}

    @property
    def has_moment_tail(self) -> bool:
        return self._moment_tail is not None

    def _observe(self, key: str, fn: Callable[[float], float], s: float) -> float:
        value = float(fn(s))
        if math.isnan(value) or value < 0:
            raise OracleMonotonicityError(f"{key}({s!r}) = {value!r} is not a nonnegative number")
        xs, vs = self._seen[key]
        i = bisect.bisect_left(xs, s)
        if i < len(xs) and xs[i] == s:
            return vs[i]
        if (i > 0 and vs[i - 1] < value) or (i < len(xs) and vs[i] > value):
            raise OracleMonotonicityError(f"{key} increases near s={s!r}")
        xs.insert(i, s)
        vs.insert(i, value)
        return value

    def tail(self, s: float) -> float:
        return self._observe("T", self._tail, s)

    def moment_tail(self, s: float) -> float:
        if self._moment_tail is None:
            raise ContractError("this oracle has no moment-tail query")
        return self._observe("U", self._moment_tail, s)

    @classmethod
    def from_table(cls, s, T, U=None) -> "TailOracle":
        """Step-function oracle from tabulated values.

        Between rows the value of the row to the left is used, which is an
        upper bound for a nonincreasing envelope; left of the first row the
        envelope is unknown and reported as infinite.
        """
        s = np.asarray(s, dtype=np.float64)
        T = np.asarray(T, dtype=np.float64)
        if s.size == 0 or s.shape != T.shape:
            raise ContractError("table columns must be nonempty and of equal length")
        if np.any(np.diff(s) <= 0):
            raise ContractError("s column must be strictly increasing")
        cols = [T] if U is None else [T, np.asarray(U, dtype=np.float64)]
        for col in cols:
            if col.shape != s.shape or np.any(np.diff(col) > 0) or np.any(col < 0):
                raise ContractError("tail columns must be nonnegative and nonincreasing")

        def lookup(col):
            def f(x):
                i = np.searchsorted(s, x, side="right") - 1
                return math.inf if i < 0 else float(col[i])

            return f

        return cls(lookup(T), None if U is None else lookup(cols[1]), knots=s)

    @classmethod
    def from_csv(cls, path: str | Path) -> "TailOracle":
        """Read an ``s,T[,U]`` table with a header row."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = [f.strip() for f in (reader.fieldnames or [])]
            if fields[:2] != ["s", "T"] or len(fields) > 3 or (len(fields) == 3 and fields[2] != "U"):
                raise ContractError("tail table header must be s,T or s,T,U")
            rows = [{k.strip(): v for k, v in row.items()} for row in reader]
        try:
            s = [float(r["s"]) for r in rows]
            T = [float(r["T"]) for r in rows]
            U = [float(r["U"]) for r in rows] if len(fields) == 3 else None
        except (TypeError, ValueError) as exc:
            raise ContractError(f"malformed tail table: {exc}") from None
        return cls.from_table(s, T, U)


MeasureFamily = Union[ExplicitFamily, TailOracle]


def tail_sup(family: MeasureFamily, s: float) -> float:
    """``sup_nu nu((s, inf))``."""
    if s < 0:
        raise ContractError("s must be nonnegative")
    if isinstance(family, TailOracle):
        return family.tail(s)
    return max(m.mass_above(s) for m in family.members)


def ui_tail(family: MeasureFamily, M: float) -> float:
    """``sup_nu int_(M, inf) u dnu(u)``, the uniform-integrability tail of the identity."""
    if M < 0:
        raise ContractError("M must be nonnegative")
    if isinstance(family, TailOracle):
        return family.moment_tail(M)
    return max(m.moment_above(M) for m in family.members)


def moment_family(family: MeasureFamily) -> MeasureFamily:
    """The moment-weighted family ``{B -> int_B u dnu}``.

    Its tail envelope is the uniform-integrability tail of ``family``, which
    is how uniform integrability reduces to tightness.
    """
    if isinstance(family, TailOracle):
        if not family.has_moment_tail:
            raise ContractError("oracle has no moment-tail query")
        return TailOracle(family.moment_tail, knots=family.knots)
    return ExplicitFamily(tuple(m.moment_weighted() for m in family.members))


def pushforward(family: ExplicitFamily, f: Callable) -> ExplicitFamily:
    return ExplicitFamily(tuple(m.pushforward(f) for m in family.members))


def sup_integral(family: ExplicitFamily, f: Callable) -> float:
    return max(m.integrate(f) for m in family.members)


def find_threshold(family: MeasureFamily, level: float, start: float = 0.0) -> float:
    """Smallest ``s >= start`` with ``tail_sup(family, s) <= level``.

    Exact for explicit families and tabulated oracles (the tail only changes
    at known knots).  Otherwise doubling then bisection on the oracle, with
    the feasible end of the bracket returned.
    """
    if tail_sup(family, start) <= level:
        return start
    knots = family.knots() if isinstance(family, ExplicitFamily) else family.knots
    if knots is not None:
        for k in knots[knots > start]:
            if tail_sup(family, float(k)) <= level:
                return float(k)
        raise NotTightError(f"tail never drops to {level!r} on the known knots")
    step = 1.0
    lo, hi = start, start + step
    while tail_sup(family, hi) > level:
        lo = hi
        step *= 2.0
        if step > HORIZON_CAP:
            raise NotTightError(f"tail still above {level!r} at s={hi!r}")
        hi = start + step
    while hi - lo > BISECT_RTOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if tail_sup(family, mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class TightPsi:
    """Result of :func:`build_psi_tight`.

    ``certificate`` bounds ``sup_nu int psi dnu``: the exact value for
    explicit families, ``sum_n 2^-n`` for oracles.
    """

    psi: PiecewiseLinearFunction | StepFunction
    thresholds: tuple[float, ...]
    certificate: float
    exact: bool


def build_psi_tight(family: MeasureFamily, levels: int, continuous: bool = True) -> TightPsi:
    """Nondecreasing psi with psi(0) = 0 and a bounded integral over the family.

    Thresholds ``M^n`` are the smallest points with ``sup_nu nu((M^n, inf)) <=
    2^-n`` (bumped by one when that would not be strictly above the previous
    threshold).  The continuous psi interpolates ``(0, 0)`` and
    ``(M^n, n - 1)`` and stays flat past the last threshold; the step variant
    counts the thresholds strictly below s.  Both are dominated by
    ``sum_n 1_(M^n, inf)``, whose integral is at most ``sum_n 2^-n``.
    """
    if levels < 1:
        raise ContractError("levels must be a positive integer")
    thresholds: list[float] = []
    for n in range(1, levels + 1):
        start = thresholds[-1] if thresholds else 0.0
        m = find_threshold(family, 2.0**-n, start)
        if thresholds and m <= thresholds[-1]:
            m = thresholds[-1] + 1.0
        thresholds.append(m)

    M = np.asarray(thresholds)
    if continuous:
        heights = np.arange(levels, dtype=np.float64)
        if M[0] > 0:
            M, heights = np.concatenate(([0.0], M)), np.concatenate(([0.0], heights))
        psi = PiecewiseLinearFunction(M, heights, 0.0, 0.0)
    else:
        psi = StepFunction(M, np.arange(levels + 1, dtype=np.float64), right_continuous=False)

    if isinstance(family, ExplicitFamily):
        return TightPsi(psi, tuple(thresholds), sup_integral(family, psi), True)
    return TightPsi(psi, tuple(thresholds), 1.0 - 2.0**-levels, False)


def plf_add(f: PiecewiseLinearFunction, g: PiecewiseLinearFunction) -> PiecewiseLinearFunction:
    pts = np.union1d(f.breakpoints, g.breakpoints)
    return PiecewiseLinearFunction(pts, f(pts) + g(pts), f.left_slope + g.left_slope, f.right_slope + g.right_slope)


@dataclass(frozen=True, eq=False)
class StrictPsi:
    """Result of :func:`build_psi_strict`.

    ``psi = local + tight.psi`` where ``local`` is strictly increasing on
    ``[0, M]`` and constant beyond.
    """

    psi: PiecewiseLinearFunction
    local: PiecewiseLinearFunction
    tight: TightPsi
    coefficients: tuple[float, ...]
    interval_masses: tuple[float, ...]
    certificate: float
    exact: bool


def _interval_sups(family: MeasureFamily, M: float, levels: int) -> list[float]:
    """Bounds on sup_nu nu((M, inf)), sup_nu nu((M/(n+1), M/n]) and sup_nu nu((0, M/(L+1))]."""
    if isinstance(family, TailOracle):
        # a sup over an interval is bounded by the sup over the whole tail
        alphas = [tail_sup(family, M)] + [tail_sup(family, M / (n + 1)) for n in range(1, levels + 1)]
        return alphas + [tail_sup(family, 0.0)]
    members = family.members
    alphas = [max(m.mass_above(M) for m in members)]
    alphas += [max(m.mass_in(M / (n + 1), M / n) for m in members) for n in range(1, levels + 1)]
    return alphas + [max(m.mass_in(0.0, M / (levels + 1)) for m in members)]


def build_psi_strict(family: MeasureFamily, M: float, levels: int) -> StrictPsi:
    """psi strictly increasing on [0, M] with a bounded integral over the family.

    The local part interpolates ``(0, 0)`` and ``(M/(n+1), c^n)`` for
    ``n = 0..levels`` and is flat at ``c^0`` past ``M``.  On ``(M/(n+1), M/n]``
    it is at most ``c^(n-1)``, so the coefficients are chosen strictly
    decreasing with ``c^(n-1) * alpha^n <= 2^-(n+1)``, which keeps the
    integral of the local part below 3/4.  Requires
    ``sup_nu nu((s, inf)) < inf`` for every ``s > 0``.
    """
    if not M > 0:
        raise ContractError("M must be positive")
    if levels < 1:
        raise ContractError("levels must be a positive integer")
    masses = _interval_sups(family, M, levels)
    if any(math.isinf(a) for a in masses[:-1]):
        raise ContractError("tail envelope is infinite at some s > 0")
    alpha = masses[: levels + 1]
    beta = masses[-1]
    nxt = alpha[1:] + [0.0 if math.isinf(beta) else beta]

    c = [0.25 / (1.0 + alpha[0] + nxt[0])]
    for n in range(1, levels + 1):
        c.append(min(c[-1] / 2.0, 2.0 ** -(n + 2) / (1.0 + nxt[n])))
    knots = np.array([0.0] + [M / (n + 1) for n in range(levels, -1, -1)])
    heights = np.array([0.0] + c[::-1])
    local = PiecewiseLinearFunction(knots, heights, 0.0, 0.0)

    tight = build_psi_tight(family, levels)
    psi = plf_add(local, tight.psi)
    if isinstance(family, ExplicitFamily):
        certificate, exact = sup_integral(family, psi), True
    else:
        bound = c[0] * alpha[0] + sum(c[n - 1] * alpha[n] for n in range(1, levels + 1))
        bound += c[-1] * beta if not math.isinf(beta) else math.inf
        certificate, exact = bound + tight.certificate, False
    return StrictPsi(psi, local, tight, tuple(c), tuple(masses), certificate, exact)


def _power_integral(v0: float, slope: float, length, alpha: float):
    """``int_0^length (v0 + slope*u)^alpha du`` for an affine, nonnegative integrand."""
    length = np.asarray(length, dtype=np.float64)
    if v0 <= 0.0:
        if slope <= 0.0:
            return np.zeros_like(length)
        return (slope * length) ** (alpha + 1.0) / ((alpha + 1.0) * slope)
    r = slope * length / v0
    small = np.abs(r) < 1e-12
    r_safe = np.where(small, 1.0, r)
    g = np.expm1((alpha + 1.0) * np.log1p(r_safe)) / ((alpha + 1.0) * r_safe)
    g = np.where(small, 1.0 + 0.5 * alpha * r, g)
    return v0**alpha * length * g


@dataclass(frozen=True, eq=False)
class DlvpPsi:
    """``psi_alpha(s) = int_0^s eta(u)^alpha du`` for a piecewise-linear eta.

    ``eta`` is nondecreasing with ``eta(0) = 0`` and ``sup int eta dnu_1``
    bounded over the moment-weighted family, so ``psi(s) = eta(s) * s`` has a
    bounded integral (``psi_certificate``).  psi_alpha is C^1 and convex; it
    is evaluated in closed form segment by segment.
    """

    alpha: float
    eta: PiecewiseLinearFunction
    psi_certificate: float
    certificate: float
    thresholds: tuple[float, ...]
    _cumulative: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        b, v, k = self.eta.breakpoints, self.eta.values, self.eta.inner_slopes
        segs = [_power_integral(v[i], k[i], b[i + 1] - b[i], self.alpha) for i in range(k.size)]
        object.__setattr__(self, "_cumulative", np.concatenate(([0.0], np.cumsum(segs))))

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=np.float64)
        if np.any(s_arr < 0):
            raise ContractError("psi_alpha is defined on [0, inf)")
        b, v = self.eta.breakpoints, self.eta.values
        idx = np.clip(np.searchsorted(b, s_arr, side="right") - 1, 0, b.size - 1)
        out = np.empty_like(s_arr, dtype=np.float64)
        flat_idx, flat_s = idx.ravel(), s_arr.ravel()
        res = out.ravel()
        slopes = self.eta.slopes
        for j, (i, x) in enumerate(zip(flat_idx, flat_s)):
            res[j] = self._cumulative[i] + _power_integral(v[i], slopes[i + 1], x - b[i], self.alpha)
        out = res.reshape(s_arr.shape)
        return float(out) if out.ndim == 0 else out

    def derivative(self, s):
        return np.asarray(self.eta(s), dtype=np.float64) ** self.alpha

    def ratio(self, s):
        """``psi_alpha(s) / s`` with 0/0 := 0."""
        s_arr = np.asarray(s, dtype=np.float64)
        val = np.asarray(self(s_arr), dtype=np.float64)
        return np.where(s_arr > 0, val / np.where(s_arr > 0, s_arr, 1.0), 0.0)

    def ui_bound(self, s):
        """``eta(s)^(alpha-1) * psi_certificate``, bounding ``sup_nu int_(s, inf) psi_alpha dnu``."""
        e = np.asarray(self.eta(s), dtype=np.float64)
        with np.errstate(divide="ignore"):
            return np.where(e > 0, np.power(np.where(e > 0, e, 1.0), self.alpha - 1.0) * self.psi_certificate, np.inf)

    def to_plf(self, grid: Sequence[float]) -> PiecewiseLinearFunction:
        """Piecewise-linear interpolant on ``grid`` (for export and plotting)."""
        g = np.unique(np.asarray(grid, dtype=np.float64))
        vals = np.asarray(self(g))
        right = float(self.derivative(g[-1]))
        return PiecewiseLinearFunction(g, vals, 0.0, right)


def build_psi_dlvp(
    family: MeasureFamily,
    alpha: float,
    levels: int = 20,
    strict: bool = False,
    M: float = 1.0,
) -> DlvpPsi:
    """Convex C^1 psi_alpha with ``psi_alpha(s)/s`` nondecreasing and a bounded integral.

    eta comes from the tightness construction applied to the moment-weighted
    family (:func:`build_psi_strict` when ``strict``, making psi_alpha
    strictly convex on [0, M]).  For ``alpha < 1`` the tail integrals obey
    ``sup_nu int_(s, inf) psi_alpha dnu <= eta(s)^(alpha-1) * C``.
    """
    if not 0.0 < alpha < 1.0:
        raise ContractError("alpha must lie in (0, 1)")
    weighted = moment_family(family)
    try:
        if strict:
            built = build_psi_strict(weighted, M, levels)
            eta, eta_cert, thresholds = built.psi, built.certificate, built.tight.thresholds
        else:
            built = build_psi_tight(weighted, levels)
            eta, eta_cert, thresholds = built.psi, built.certificate, built.thresholds
    except NotUniformlyIntegrableError:
        raise
    except NotTightError as exc:
        raise NotUniformlyIntegrableError(str(exc)) from None

    if isinstance(family, ExplicitFamily):
        psi_cert = sup_integral(family, lambda x: eta(x) * x)
        result = DlvpPsi(alpha, eta, psi_cert, 0.0, tuple(thresholds))
        object.__setattr__(result, "certificate", sup_integral(family, result))
        return result
    return DlvpPsi(alpha, eta, eta_cert, eta_cert, tuple(thresholds))


@dataclass(frozen=True)
class ConvexCriterion:
    """Whether a convex psi exists: ``sup_nu int_(M, inf) s dnu(s)`` is finite.

    ``bound`` is that supremum (an upper bound for ``sup_nu int (s - M)^+ dnu``).
    """

    holds: bool
    bound: float

    def __bool__(self) -> bool:
        return self.holds


def check_convex_criterion(family: MeasureFamily, M: float) -> ConvexCriterion:
    if M < 0:
        raise ContractError("M must be nonnegative")
    if isinstance(family, TailOracle):
        if not family.has_moment_tail:
            return ConvexCriterion(False, math.inf)
        bound = family.moment_tail(M)
        return ConvexCriterion(math.isfinite(bound), bound)
    return ConvexCriterion(True, ui_tail(family, M))
