"""Contraction classes measured through an auxiliary map T.

A pair of self-maps (T, S) of the carrier is tested against cone-order
inequalities of the form d(TSx, TSy) <= RHS(x, y).  Supported classes:

* TB(a)        RHS = a d(Tx, Ty),                       a in [0, 1)
* TK(b)        RHS = b [d(Tx, TSx) + d(Ty, TSy)],       b in [0, 1/2)
* TC(c)        RHS = c [d(Tx, TSy) + d(Ty, TSx)],       c in [0, 1/2)
* TZ(a, b, c)  at least one of the three above per pair
* TW(delta, L)       RHS = delta d(Tx, Ty) + L d(Ty, TSx)
* TW_DUAL(delta, L)  RHS = delta d(Tx, Ty) + L d(Tx, TSy)
* TWU(theta, L1)     RHS = theta d(Tx, Ty) + L1 d(Tx, TSx)

Every TZ mapping satisfies the reduced inequality
d(TSx, TSy) <= delta d(Tx, Ty) + 2 delta d(Tx, TSx) with
delta = max{a, b/(1-b), c/(1-c)}, and likewise the dual form with
d(Tx, TSy); both are checked here in a cleared-denominator form so that
dyadic tables verify exactly, with no division in the comparison path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cone_space import ConeMetricSpace, ConfigError, DomainError

TB = "TB"
TK = "TK"
TC = "TC"
TZ = "TZ"
TW = "TW"
TW_DUAL = "TW_DUAL"
TWU = "TWU"

CLASS_KINDS = (TB, TK, TC, TZ, TW, TW_DUAL, TWU)


# ---------------------------------------------------------------------------
# Map families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityMap:
    def __call__(self, x):
        return x


@dataclass(frozen=True)
class AffineMap:
    alpha: float
    beta: float = 0.0

    def __call__(self, x):
        return self.alpha * x + self.beta


@dataclass(frozen=True)
class PowerMap:
    exponent: float

    def __call__(self, x):
        y = float(x) ** self.exponent
        if not math.isfinite(y):
            raise DomainError(f"power map produced a non-finite value at {x!r}")
        return y


class TabulatedMap:
    """Explicit point-to-point map on a finite carrier."""

    def __init__(self, points: Sequence, images: Sequence):
        if len(points) != len(images):
            raise ConfigError("tabulated map needs one image per point")
        self.mapping = dict(zip(points, images))
        if len(self.mapping) != len(points):
            raise ConfigError("tabulated map points must be distinct")

    def __call__(self, x):
        try:
            return self.mapping[x]
        except (KeyError, TypeError):
            raise DomainError(f"point {x!r} is not in the tabulated map") from None

    def __repr__(self):
        return f"TabulatedMap({len(self.mapping)} points)"


@dataclass
class DeclaredProperties:
    t_continuous: bool = True
    t_injective: bool = True
    t_sequentially_convergent: bool = True
    t_subsequentially_convergent: bool = True
    s_continuous: bool = True


@dataclass
class MapPair:
    T: Callable
    S: Callable
    declared: DeclaredProperties = field(default_factory=DeclaredProperties)


def maps_into_carrier(space: ConeMetricSpace, maps: MapPair, samples: Iterable) -> list:
    """Points whose T- or S-image escapes the carrier (empty list = all good)."""
    bad = []
    for x in samples:
        if not space.carrier.contains(maps.T(x)) or not space.carrier.contains(maps.S(x)):
            bad.append(x)
    return bad


# ---------------------------------------------------------------------------
# Class specifications
# ---------------------------------------------------------------------------

def _require_range(name: str, value: float, lo: float, hi: float, hi_open: bool = True):
    ok = lo <= value < hi if hi_open else lo <= value <= hi
    if not (math.isfinite(value) and ok):
        bracket = f"[{lo:g}, {hi:g})" if hi_open else f"[{lo:g}, {hi:g}]"
        raise ConfigError(f"{name} must be in {bracket}, got {value:g}")


@dataclass(frozen=True)
class ClassSpec:
    kind: str
    a: float | None = None
    b: float | None = None
    c: float | None = None
    delta: float | None = None
    L: float | None = None
    theta: float | None = None
    L1: float | None = None

    def __post_init__(self):
        if self.kind not in CLASS_KINDS:
            raise ConfigError(f"unknown contraction class {self.kind!r}")
        if self.kind == TB:
            _require_range("a", self._need("a"), 0.0, 1.0)
        elif self.kind == TK:
            _require_range("b", self._need("b"), 0.0, 0.5)
        elif self.kind == TC:
            _require_range("c", self._need("c"), 0.0, 0.5)
        elif self.kind == TZ:
            _require_range("a", self._need("a"), 0.0, 1.0)
            _require_range("b", self._need("b"), 0.0, 0.5)
            _require_range("c", self._need("c"), 0.0, 0.5)
        elif self.kind in (TW, TW_DUAL):
            # delta = 0 is admitted (it arises from promoting TB(0)).
            _require_range("delta", self._need("delta"), 0.0, 1.0)
            if self._need("L") < 0:
                raise ConfigError(f"L must be >= 0, got {self.L}")
        else:
            _require_range("theta", self._need("theta"), 0.0, 1.0)
            if self._need("L1") < 0:
                raise ConfigError(f"L1 must be >= 0, got {self.L1}")

    def _need(self, name: str) -> float:
        v = getattr(self, name)
        if v is None:
            raise ConfigError(f"class {self.kind} requires constant {name!r}")
        return float(v)

    # -- constructors -------------------------------------------------------

    @classmethod
    def tb(cls, a: float) -> "ClassSpec":
        return cls(TB, a=a)

    @classmethod
    def tk(cls, b: float) -> "ClassSpec":
        return cls(TK, b=b)

    @classmethod
    def tc(cls, c: float) -> "ClassSpec":
        return cls(TC, c=c)

    @classmethod
    def tz(cls, a: float, b: float, c: float) -> "ClassSpec":
        return cls(TZ, a=a, b=b, c=c)

    @classmethod
    def tw(cls, delta: float, L: float) -> "ClassSpec":
        return cls(TW, delta=delta, L=L)

    @classmethod
    def tw_dual(cls, delta: float, L: float) -> "ClassSpec":
        return cls(TW_DUAL, delta=delta, L=L)

    @classmethod
    def twu(cls, theta: float, L1: float) -> "ClassSpec":
        return cls(TWU, theta=theta, L1=L1)

    def constants(self) -> dict[str, float]:
        return {
            k: float(v)
            for k, v in (
                ("a", self.a), ("b", self.b), ("c", self.c),
                ("delta", self.delta), ("L", self.L),
                ("theta", self.theta), ("L1", self.L1),
            )
            if v is not None
        }


@dataclass
class ConditionViolation:
    x: object
    y: object
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray


@dataclass
class ConditionReport:
    spec: ClassSpec
    pairs_checked: int
    violations: list[ConditionViolation]
    branch_stats: dict[str, int] | None = None
    inconclusive: bool = False
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# Condition evaluation
# ---------------------------------------------------------------------------

@dataclass
class _PairTerms:
    lhs: np.ndarray        # d(TSx, TSy)
    d_tx_ty: np.ndarray
    d_tx_tsx: np.ndarray
    d_ty_tsy: np.ndarray
    d_tx_tsy: np.ndarray
    d_ty_tsx: np.ndarray


def _pair_terms(space: ConeMetricSpace, maps: MapPair, x, y) -> _PairTerms:
    T, S = maps.T, maps.S
    sx = space.require_point(S(x), "S-image")
    sy = space.require_point(S(y), "S-image")
    tx = space.require_point(T(x), "T-image")
    ty = space.require_point(T(y), "T-image")
    tsx = space.require_point(T(sx), "TS-image")
    tsy = space.require_point(T(sy), "TS-image")
    d = space.d
    return _PairTerms(
        lhs=d(tsx, tsy),
        d_tx_ty=d(tx, ty),
        d_tx_tsx=d(tx, tsx),
        d_ty_tsy=d(ty, tsy),
        d_tx_tsy=d(tx, tsy),
        d_ty_tsx=d(ty, tsx),
    )


def _rhs(spec: ClassSpec, t: _PairTerms) -> np.ndarray:
    if spec.kind == TB:
        return spec.a * t.d_tx_ty
    if spec.kind == TK:
        return spec.b * (t.d_tx_tsx + t.d_ty_tsy)
    if spec.kind == TC:
        return spec.c * (t.d_tx_tsy + t.d_ty_tsx)
    if spec.kind == TW:
        return spec.delta * t.d_tx_ty + spec.L * t.d_ty_tsx
    if spec.kind == TW_DUAL:
        return spec.delta * t.d_tx_ty + spec.L * t.d_tx_tsy
    if spec.kind == TWU:
        return spec.theta * t.d_tx_ty + spec.L1 * t.d_tx_tsx
    raise ConfigError(f"no single inequality for class {spec.kind}")


_TZ_BRANCHES = ("TZ1", "TZ2", "TZ3")


def check_condition(
    space: ConeMetricSpace,
    maps: MapPair,
    spec: ClassSpec,
    pairs: Sequence[tuple],
) -> ConditionReport:
    """Evaluate the class inequality on every pair as a cone-order test
    (RHS - LHS in P, up to the cone's declared slack).  For TZ a pair
    passes when at least one branch does; branch statistics count every
    branch satisfied.
    """
    pairs = list(pairs)
    notes: tuple[str, ...] = ()
    if spec.kind in (TK, TZ):
        notes = ("second Kannan-style term is evaluated through T-images: d(Ty, TSy)",)
    if not pairs:
        return ConditionReport(spec, 0, [], inconclusive=True, notes=notes)

    cone = space.cone
    violations: list[ConditionViolation] = []

    if spec.kind != TZ:
        for x, y in pairs:
            t = _pair_terms(space, maps, x, y)
            rhs = _rhs(spec, t)
            res = rhs - t.lhs
            if not cone.contains_relaxed(res):
                violations.append(ConditionViolation(x, y, t.lhs, rhs, res))
        return ConditionReport(spec, len(pairs), violations, notes=notes)

    stats = {name: 0 for name in _TZ_BRANCHES}
    branch_specs = (ClassSpec.tb(spec.a), ClassSpec.tk(spec.b), ClassSpec.tc(spec.c))
    for x, y in pairs:
        t = _pair_terms(space, maps, x, y)
        passed = False
        best = None
        for name, bspec in zip(_TZ_BRANCHES, branch_specs):
            rhs = _rhs(bspec, t)
            res = rhs - t.lhs
            if cone.contains_relaxed(res):
                stats[name] += 1
                passed = True
            slack = float(np.min(cone.inequality_values(res)))
            if best is None or slack > best[0]:
                best = (slack, rhs, res)
        if not passed:
            violations.append(ConditionViolation(x, y, t.lhs, best[1], best[2]))
    return ConditionReport(spec, len(pairs), violations, branch_stats=stats, notes=notes)


# ---------------------------------------------------------------------------
# Zamfirescu reduction
# ---------------------------------------------------------------------------

def zamfirescu_delta(a: float, b: float, c: float) -> float:
    """max{a, b/(1-b), c/(1-c)}; lands in [0, 1) for in-range constants."""
    _require_range("a", a, 0.0, 1.0)
    _require_range("b", b, 0.0, 0.5)
    _require_range("c", c, 0.0, 0.5)
    return max(a, b / (1.0 - b), c / (1.0 - c))


def delta_branch(a: float, b: float, c: float) -> tuple[str, float]:
    """Which of a, b/(1-b), c/(1-c) attains the max, decided by
    cross-multiplied comparisons so dyadic inputs are compared exactly.
    Returns (branch, raw constant) with branch in {'a', 'b', 'c'}.
    """
    a_ge_b = a * (1.0 - b) >= b
    a_ge_c = a * (1.0 - c) >= c
    b_ge_c = b * (1.0 - c) >= c * (1.0 - b)
    if a_ge_b and a_ge_c:
        return "a", a
    if not a_ge_b and b_ge_c:
        return "b", b
    return "c", c


def _reduction_residual(branch: str, const: float, lhs, d1, dl) -> np.ndarray:
    # Cleared-denominator form of lhs <= delta d1 + 2 delta dl: for the
    # b- and c-branches multiply through by (1 - const) > 0, which does
    # not change cone membership and avoids inexact division.
    if branch == "a":
        return const * d1 + 2.0 * const * dl - lhs
    return const * d1 + 2.0 * const * dl - (1.0 - const) * lhs


@dataclass
class ReductionReport:
    delta: float
    applicable: bool
    tz_report: ConditionReport
    primary: ConditionReport | None
    dual: ConditionReport | None

    @property
    def holds(self) -> bool:
        return bool(
            self.applicable
            and self.primary is not None and self.primary.holds
            and self.dual is not None and self.dual.holds
        )


def verify_zamfirescu_reduction(
    space: ConeMetricSpace,
    maps: MapPair,
    a: float,
    b: float,
    c: float,
    pairs: Sequence[tuple],
) -> ReductionReport:
    """Check that TZ(a, b, c) forces the reduced inequality with
    delta = max{a, b/(1-b), c/(1-c)} in both its forms:

    * primary: d(TSx, TSy) <= delta d(Tx, Ty) + 2 delta d(Tx, TSx)
    * dual:    d(TSx, TSy) <= delta d(Tx, Ty) + 2 delta d(Tx, TSy)

    TZ must hold on the pair set first; otherwise the report is marked
    not applicable and carries the TZ violation witnesses.
    """
    pairs = list(pairs)
    tz_report = check_condition(space, maps, ClassSpec.tz(a, b, c), pairs)
    delta = zamfirescu_delta(a, b, c)
    if not tz_report.holds or tz_report.inconclusive:
        return ReductionReport(delta, False, tz_report, None, None)

    branch, const = delta_branch(a, b, c)
    cone = space.cone
    note = (f"residuals are in cleared-denominator form (branch {branch!r})",)

    prim_spec = ClassSpec.twu(delta, 2.0 * delta)
    dual_spec = ClassSpec.tw_dual(delta, 2.0 * delta)
    prim_violations: list[ConditionViolation] = []
    dual_violations: list[ConditionViolation] = []
    for x, y in pairs:
        t = _pair_terms(space, maps, x, y)
        res_p = _reduction_residual(branch, const, t.lhs, t.d_tx_ty, t.d_tx_tsx)
        if not cone.contains_relaxed(res_p):
            prim_violations.append(ConditionViolation(x, y, t.lhs, res_p + t.lhs, res_p))
        res_d = _reduction_residual(branch, const, t.lhs, t.d_tx_ty, t.d_tx_tsy)
        if not cone.contains_relaxed(res_d):
            dual_violations.append(ConditionViolation(x, y, t.lhs, res_d + t.lhs, res_d))

    primary = ConditionReport(prim_spec, len(pairs), prim_violations, notes=note)
    dual = ConditionReport(dual_spec, len(pairs), dual_violations, notes=note)
    return ReductionReport(delta, True, tz_report, primary, dual)


def rate_from_primary_form(delta: float) -> float:
    """The step-ratio bound delta / (1 - 2 delta) obtained when the
    self-gap term of the primary reduced inequality is absorbed on the
    left.  Finite only for delta < 1/2, and below 1 only for delta < 1/3;
    the dual form yields the bound ``delta`` itself for every delta < 1.
    """
    if delta < 0.5:
        return delta / (1.0 - 2.0 * delta)
    return math.inf


# ---------------------------------------------------------------------------
# Promotion to the weak class
# ---------------------------------------------------------------------------

def promote_to_weak(spec: ClassSpec) -> ClassSpec:
    """The TW constants implied by a stronger class:

    TB(a) -> (a, 0);  TK(b) -> (b/(1-b), 2b/(1-b));
    TC(c) -> (c/(1-c), 2c/(1-c));  TZ -> (delta, 2 delta).

    TW and TW_DUAL pass through unchanged.
    """
    if spec.kind == TB:
        return ClassSpec.tw(spec.a, 0.0)
    if spec.kind == TK:
        return ClassSpec.tw(spec.b / (1.0 - spec.b), 2.0 * spec.b / (1.0 - spec.b))
    if spec.kind == TC:
        return ClassSpec.tw(spec.c / (1.0 - spec.c), 2.0 * spec.c / (1.0 - spec.c))
    if spec.kind == TZ:
        d = zamfirescu_delta(spec.a, spec.b, spec.c)
        return ClassSpec.tw(d, 2.0 * d)
    if spec.kind in (TW, TW_DUAL):
        return spec
    raise ConfigError(f"class {spec.kind} does not promote to the weak class")


# ---------------------------------------------------------------------------
# Constant fitting
# ---------------------------------------------------------------------------

@dataclass
class FitResult:
    kind: str
    feasible: bool
    spec: ClassSpec | None
    hard_witnesses: list[tuple]
    tolerance: float = 1e-6


_FIT_UPPER = {TB: 1.0, TK: 0.5, TC: 0.5}


def _base_terms(kind: str, t: _PairTerms) -> np.ndarray:
    if kind == TB:
        return t.d_tx_ty
    if kind == TK:
        return t.d_tx_tsx + t.d_ty_tsy
    return t.d_tx_tsy + t.d_ty_tsx


def _bisect_constant(predicate: Callable[[float], bool], hi: float, tol: float) -> float | None:
    """Smallest passing constant in [0, hi], assuming monotone predicate.
    Returns None when even hi fails."""
    if predicate(0.0):
        return 0.0
    if not predicate(hi):
        return None
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def fit_constants(
    space: ConeMetricSpace,
    maps: MapPair,
    class_kind: str,
    pairs: Sequence[tuple],
    *,
    pinned: dict[str, float] | None = None,
    tol: float = 1e-6,
) -> FitResult:
    """Smallest constants (bisection to absolute tolerance ``tol``) for
    which the class inequality passes on the pair set: a for TB, b for TK,
    c for TC, and for TW the minimal delta followed by the minimal L
    (delta may be pinned via ``pinned={'delta': v}``).  Pairs whose RHS
    terms are all zero but whose LHS is not are returned as hard
    infeasibility witnesses: no constant can repair them.
    """
    pairs = list(pairs)
    pinned = pinned or {}
    if class_kind not in (TB, TK, TC, TW):
        raise ConfigError(f"constant fitting supports TB/TK/TC/TW, not {class_kind!r}")
    if not pairs:
        raise ConfigError("constant fitting needs a nonempty pair set")

    terms = [(x, y, _pair_terms(space, maps, x, y)) for x, y in pairs]
    cone = space.cone

    def zero(v) -> bool:
        return cone.norm(v) == 0.0

    if class_kind in (TB, TK, TC):
        hard = [
            (x, y)
            for x, y, t in terms
            if zero(_base_terms(class_kind, t)) and not cone.contains_relaxed(-t.lhs)
        ]
        if hard:
            return FitResult(class_kind, False, None, hard, tol)

        def make(v: float) -> ClassSpec:
            return ClassSpec(class_kind, **{{"TB": "a", "TK": "b", "TC": "c"}[class_kind]: v})

        def pred(v: float) -> bool:
            return all(
                cone.contains_relaxed(v * _base_terms(class_kind, t) - t.lhs)
                for _, _, t in terms
            )

        upper = _FIT_UPPER[class_kind]
        fitted = _bisect_constant(pred, math.nextafter(upper, 0.0), tol)
        if fitted is None:
            return FitResult(class_kind, False, None, [], tol)
        return FitResult(class_kind, True, make(fitted), [], tol)

    # TW: delta first (constrained only by pairs whose L-term vanishes),
    # then L at that delta.
    hard = [
        (x, y)
        for x, y, t in terms
        if zero(t.d_tx_ty) and zero(t.d_ty_tsx) and not cone.contains_relaxed(-t.lhs)
    ]
    if hard:
        return FitResult(TW, False, None, hard, tol)

    if "delta" in pinned:
        delta = float(pinned["delta"])
    else:
        pinned_pairs = [t for _, _, t in terms if zero(t.d_ty_tsx)]

        def pred_delta(v: float) -> bool:
            return all(cone.contains_relaxed(v * t.d_tx_ty - t.lhs) for t in pinned_pairs)

        delta = _bisect_constant(pred_delta, math.nextafter(1.0, 0.0), tol)
        if delta is None:
            return FitResult(TW, False, None, [], tol)

    def pred_l(v: float) -> bool:
        return all(
            cone.contains_relaxed(delta * t.d_tx_ty + v * t.d_ty_tsx - t.lhs)
            for _, _, t in terms
        )

    hi = 1.0
    while not pred_l(hi):
        hi *= 2.0
        if hi > 1e9:
            return FitResult(TW, False, None, [], tol)
    fitted_l = _bisect_constant(pred_l, hi, tol)
    if fitted_l is None:
        return FitResult(TW, False, None, [], tol)
    return FitResult(TW, True, ClassSpec.tw(delta, fitted_l), [], tol)


# ---------------------------------------------------------------------------
# Pair sets
# ---------------------------------------------------------------------------

def grid_pairs(space: ConeMetricSpace) -> list[tuple]:
    """All ordered pairs of the carrier's grid points."""
    pts = list(space.carrier.grid_points())
    return list(itertools.product(pts, pts))


def sampled_pairs(space: ConeMetricSpace, count: int, seed: int = 0) -> list[tuple]:
    rng = np.random.default_rng(seed)
    xs = space.carrier.sample(rng, count)
    ys = space.carrier.sample(rng, count)
    return list(zip(list(xs), list(ys)))


def all_pairs(points: Sequence) -> list[tuple]:
    return list(itertools.product(points, points))
