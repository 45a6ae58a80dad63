"""Exact brute-force engine on finite instances.

A finite instance is a tabulated cone metric space on at most 200 labelled
points together with index maps for T and S.  All checks here scan every
ordered pair (or triple) with exact cone tests: tables are built from
dyadic values, so plain float comparisons are exact and the tolerance is
genuinely zero.  Derived constants such as b/(1-b) are never divided out;
inequalities are multiplied through by the positive denominator instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cone_space import ConeMetricSpace, ConeSpec, ConfigError, FinitePointsCarrier, TabulatedMetric
from .contractions import (
    TB, TC, TK, TW, TW_DUAL, TWU, TZ,
    ClassSpec, DeclaredProperties, MapPair, TabulatedMap,
    delta_branch, promote_to_weak, zamfirescu_delta,
)

MAX_POINTS = 200


@dataclass(eq=False)
class FiniteInstance:
    """Tabulated cone metric space with index maps for T and S.

    The metric table is validated exactly (all n^3 triples) at
    construction, so every downstream check may assume d1-d3.
    """

    points: list[int]
    metric_table: np.ndarray
    t_table: np.ndarray
    s_table: np.ndarray
    cone: ConeSpec

    def __post_init__(self):
        n = len(self.points)
        if not 1 <= n <= MAX_POINTS:
            raise ConfigError(f"finite instances support 1..{MAX_POINTS} points, got {n}")
        self.metric_table = np.asarray(self.metric_table, dtype=float)
        if self.metric_table.shape != (n, n, self.cone.dimension):
            raise ConfigError(
                f"metric table must have shape ({n}, {n}, {self.cone.dimension}), "
                f"got {self.metric_table.shape}"
            )
        self.t_table = np.asarray(self.t_table, dtype=int)
        self.s_table = np.asarray(self.s_table, dtype=int)
        for name, tab in (("t_table", self.t_table), ("s_table", self.s_table)):
            if tab.shape != (n,) or np.any(tab < 0) or np.any(tab >= n):
                raise ConfigError(f"{name} must map the {n} labels into themselves")
        _validate_metric_table(self.metric_table, self.cone)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def t_injective(self) -> bool:
        return len(set(self.t_table.tolist())) == self.n

    def as_space_and_maps(self) -> tuple[ConeMetricSpace, MapPair]:
        carrier = FinitePointsCarrier(list(self.points))
        metric = TabulatedMetric(list(self.points), self.metric_table)
        space = ConeMetricSpace(self.cone, carrier, metric)
        t_map = TabulatedMap(self.points, [self.points[i] for i in self.t_table])
        s_map = TabulatedMap(self.points, [self.points[i] for i in self.s_table])
        declared = DeclaredProperties(t_injective=self.t_injective)
        return space, MapPair(t_map, s_map, declared)


def _validate_metric_table(table: np.ndarray, cone: ConeSpec):
    n = table.shape[0]
    diag = table[np.arange(n), np.arange(n)]
    if np.any(diag != 0.0):
        raise ConfigError("metric table violates d1: nonzero diagonal entry")
    off = ~np.eye(n, dtype=bool)
    if np.any(np.all(table == 0.0, axis=-1) & off):
        raise ConfigError("metric table violates d1: zero distance between distinct points")
    flat = table.reshape(-1, table.shape[-1])
    if not np.all(cone.contains_exact_rows(flat)):
        raise ConfigError("metric table violates d1: a value leaves the cone")
    if np.any(table != np.swapaxes(table, 0, 1)):
        raise ConfigError("metric table violates d2: asymmetric entry")
    for k in range(n):
        res = table[:, k, None, :] + table[None, k, :, :] - table
        ok = cone.contains_exact_rows(res.reshape(-1, table.shape[-1]))
        if not np.all(ok):
            bad = np.argwhere(~ok.reshape(n, n))[0]
            raise ConfigError(
                f"metric table violates d3 at triple ({bad[0]}, {bad[1]}, {k})"
            )


def finite_from_values(
    values: Sequence[float],
    t_table: Sequence[int],
    s_table: Sequence[int],
    *,
    direction: Sequence[float] = (1.0, 2.0),
    cone: ConeSpec | None = None,
) -> FiniteInstance:
    """Line-geometry instance: d(i, j) = direction * |values[i] - values[j]|."""
    vals = np.asarray(values, dtype=float)
    u = np.asarray(direction, dtype=float)
    cone = cone or ConeSpec.orthant(len(u), slack=0.0)
    diff = np.abs(vals[:, None] - vals[None, :])
    table = diff[:, :, None] * u
    return FiniteInstance(list(range(len(vals))), table, np.asarray(t_table), np.asarray(s_table), cone)


# ---------------------------------------------------------------------------
# Exhaustive checks
# ---------------------------------------------------------------------------

def enumerate_fixed_points(fin: FiniteInstance) -> list[int]:
    """Exact fixed-point set of S, by full scan."""
    idx = np.flatnonzero(fin.s_table == np.arange(fin.n))
    return [fin.points[i] for i in idx]


def _tensors(fin: FiniteInstance):
    d = fin.metric_table
    t = fin.t_table
    ts = fin.t_table[fin.s_table]
    return {
        "lhs": d[ts[:, None], ts[None, :]],
        "d_tx_ty": d[t[:, None], t[None, :]],
        "d_tx_tsx": d[t, ts],                 # row i, broadcast over j
        "d_tx_tsy": d[t[:, None], ts[None, :]],
        "d_ty_tsx": d[ts[:, None], t[None, :]],
    }


def _in_cone(fin: FiniteInstance, res: np.ndarray) -> np.ndarray:
    vals = res @ fin.cone.ineq_matrix.T
    return np.all(vals >= 0.0, axis=-1)


def _branch_masks(fin: FiniteInstance, spec: ClassSpec):
    t = _tensors(fin)
    own = t["d_tx_tsx"]
    m1 = _in_cone(fin, spec.a * t["d_tx_ty"] - t["lhs"])
    m2 = _in_cone(fin, spec.b * (own[:, None, :] + own[None, :, :]) - t["lhs"])
    m3 = _in_cone(fin, spec.c * (t["d_tx_tsy"] + t["d_ty_tsx"]) - t["lhs"])
    return m1, m2, m3


def condition_mask(fin: FiniteInstance, spec: ClassSpec) -> np.ndarray:
    """Boolean (n, n) mask: does the class inequality hold at (x_i, x_j)?"""
    t = _tensors(fin)
    if spec.kind == TZ:
        m1, m2, m3 = _branch_masks(fin, spec)
        return m1 | m2 | m3
    if spec.kind == TB:
        rhs = spec.a * t["d_tx_ty"]
    elif spec.kind == TK:
        own = t["d_tx_tsx"]
        rhs = spec.b * (own[:, None, :] + own[None, :, :])
    elif spec.kind == TC:
        rhs = spec.c * (t["d_tx_tsy"] + t["d_ty_tsx"])
    elif spec.kind == TW:
        rhs = spec.delta * t["d_tx_ty"] + spec.L * t["d_ty_tsx"]
    elif spec.kind == TW_DUAL:
        rhs = spec.delta * t["d_tx_ty"] + spec.L * t["d_tx_tsy"]
    else:
        own = t["d_tx_tsx"]
        rhs = spec.theta * t["d_tx_ty"] + spec.L1 * own[:, None, :]
    return _in_cone(fin, rhs - t["lhs"])


@dataclass
class OracleConditionReport:
    spec: ClassSpec
    holds: bool
    violating_pairs: list[tuple[int, int]]
    pairs_checked: int
    branch_stats: dict[str, int] | None = None


def exhaustive_condition_check(fin: FiniteInstance, spec: ClassSpec) -> OracleConditionReport:
    """Evaluate the class inequality on all n^2 ordered pairs, exactly."""
    mask = condition_mask(fin, spec)
    stats = None
    if spec.kind == TZ:
        m1, m2, m3 = _branch_masks(fin, spec)
        stats = {"TZ1": int(m1.sum()), "TZ2": int(m2.sum()), "TZ3": int(m3.sum())}
    pairs = [tuple(int(v) for v in p) for p in np.argwhere(~mask)]
    return OracleConditionReport(spec, bool(mask.all()), pairs, fin.n ** 2, stats)


# ---------------------------------------------------------------------------
# Tightest constants
# ---------------------------------------------------------------------------

@dataclass
class TightestResult:
    kind: str
    feasible: bool
    constants: dict[str, float] | None
    supremum: dict[str, float]
    infeasible_witnesses: list[tuple[int, int]]


def _min_passing_float(check, candidate: float) -> float:
    """Smallest float passing a monotone check, starting from a candidate
    within a few ulps of the real infimum (the candidate comes from an
    exact ratio supremum; float rounding can put it one ulp either side).
    """
    v = max(candidate, 0.0)
    for _ in range(128):
        if check(v):
            break
        v = math.nextafter(v, math.inf)
    else:
        raise ConfigError("tightest-constant refinement failed to bracket")
    while v > 0.0:
        prev = math.nextafter(v, -math.inf)
        if prev < 0.0 or not check(prev):
            break
        v = prev
    return v


def _ratio_sup(fin: FiniteInstance, lhs: np.ndarray, base: np.ndarray):
    """sup over pairs and cone inequalities of lhs-row / base-row, plus the
    pairs made hard-infeasible by a zero base against a positive lhs."""
    a_mat = fin.cone.ineq_matrix
    lv = lhs @ a_mat.T
    bv = base @ a_mat.T
    hard_mask = np.any((bv == 0.0) & (lv > 0.0), axis=-1)
    hard = [tuple(int(v) for v in p) for p in np.argwhere(hard_mask)]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(bv > 0.0, lv / bv, 0.0)
    return float(np.max(ratios)) if ratios.size else 0.0, hard


def tightest_constants(
    fin: FiniteInstance,
    class_kind: str,
    *,
    pinned_delta: float | None = None,
) -> TightestResult:
    """Exact minimal constants by closed-form ratio supremum over all pairs
    (refined to the smallest passing float).  For TW the minimal delta is
    found first (constrained by pairs whose L-term vanishes), then the
    minimal L on that boundary; pass ``pinned_delta`` to fix delta instead.
    """
    t = _tensors(fin)
    lhs = t["lhs"]

    if class_kind in (TB, TK, TC):
        if class_kind == TB:
            base, name, upper = t["d_tx_ty"], "a", 1.0
        elif class_kind == TK:
            own = t["d_tx_tsx"]
            base, name, upper = own[:, None, :] + own[None, :, :], "b", 0.5
        else:
            base, name, upper = t["d_tx_tsy"] + t["d_ty_tsx"], "c", 0.5
        sup, hard = _ratio_sup(fin, lhs, base)
        if hard:
            return TightestResult(class_kind, False, None, {name: sup}, hard)
        fitted = _min_passing_float(lambda v: bool(_in_cone(fin, v * base - lhs).all()), sup)
        feasible = fitted < upper
        return TightestResult(
            class_kind, feasible, {name: fitted} if feasible else None, {name: fitted}, []
        )

    if class_kind != TW:
        raise ConfigError(f"tightest constants support TB/TK/TC/TW, not {class_kind!r}")

    base = t["d_tx_ty"]
    ell = t["d_ty_tsx"]
    a_mat = fin.cone.ineq_matrix
    lv = lhs @ a_mat.T
    bv = base @ a_mat.T
    ev = ell @ a_mat.T

    hard_mask = np.any((bv == 0.0) & (ev == 0.0) & (lv > 0.0), axis=-1)
    hard = [tuple(int(v) for v in p) for p in np.argwhere(hard_mask)]
    if hard:
        return TightestResult(TW, False, None, {}, hard)

    if pinned_delta is None:
        # delta is constrained only where the L-term row vanishes
        free = (ev == 0.0) & (bv > 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(free, lv / np.where(bv > 0.0, bv, 1.0), 0.0)
        sup_d = float(np.max(ratios)) if ratios.size else 0.0

        def check_delta(v: float) -> bool:
            rows = v * bv - lv
            return bool(np.all(rows[ev == 0.0] >= 0.0))

        delta = _min_passing_float(check_delta, sup_d)
    else:
        delta = float(pinned_delta)

    deficit = lv - delta * bv
    pos = ev > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        l_ratios = np.where(pos, deficit / np.where(pos, ev, 1.0), 0.0)
    sup_l = max(0.0, float(np.max(l_ratios))) if l_ratios.size else 0.0
    if pinned_delta is not None and np.any((~pos) & (deficit > 0.0)):
        # pinned delta too small on a pair with no L-term to compensate
        bad = np.argwhere(np.any((~pos) & (deficit > 0.0), axis=-1))
        return TightestResult(TW, False, None, {"delta": delta}, [tuple(map(int, p)) for p in bad])

    fitted_l = _min_passing_float(
        lambda v: bool(_in_cone(fin, delta * base + v * ell - lhs).all()), sup_l
    )
    feasible = delta < 1.0
    consts = {"delta": delta, "L": fitted_l}
    return TightestResult(TW, feasible, consts if feasible else None, consts, [])


# ---------------------------------------------------------------------------
# Lemma and promotion oracles (exact, cleared-denominator forms)
# ---------------------------------------------------------------------------

@dataclass
class ReductionExhaustive:
    delta: float
    applicable: bool
    primary_ok: bool
    dual_ok: bool
    primary_violations: list[tuple[int, int]]
    dual_violations: list[tuple[int, int]]

    @property
    def holds(self) -> bool:
        return self.applicable and self.primary_ok and self.dual_ok


def exhaustive_reduction_check(fin: FiniteInstance, a: float, b: float, c: float) -> ReductionExhaustive:
    """Exact all-pairs check of the reduced inequality (primary and dual
    forms) with delta = max{a, b/(1-b), c/(1-c)}, evaluated with the
    denominator multiplied through so dyadic tables are decided exactly.
    Requires TZ(a, b, c) to hold exhaustively first.
    """
    delta = zamfirescu_delta(a, b, c)
    tz = exhaustive_condition_check(fin, ClassSpec.tz(a, b, c))
    if not tz.holds:
        return ReductionExhaustive(delta, False, False, False, tz.violating_pairs, [])

    branch, const = delta_branch(a, b, c)
    t = _tensors(fin)
    own = t["d_tx_tsx"][:, None, :] + np.zeros_like(t["lhs"])
    scale = 1.0 if branch == "a" else 1.0 - const

    res_p = const * t["d_tx_ty"] + 2.0 * const * own - scale * t["lhs"]
    res_d = const * t["d_tx_ty"] + 2.0 * const * t["d_tx_tsy"] - scale * t["lhs"]
    ok_p = _in_cone(fin, res_p)
    ok_d = _in_cone(fin, res_d)
    return ReductionExhaustive(
        delta,
        True,
        bool(ok_p.all()),
        bool(ok_d.all()),
        [tuple(map(int, p)) for p in np.argwhere(~ok_p)],
        [tuple(map(int, p)) for p in np.argwhere(~ok_d)],
    )


@dataclass
class PromotionExhaustive:
    source: ClassSpec
    promoted: ClassSpec
    weak_ok: bool
    weak_dual_ok: bool
    weak_violations: list[tuple[int, int]]
    weak_dual_violations: list[tuple[int, int]]

    @property
    def holds(self) -> bool:
        return self.weak_ok and self.weak_dual_ok


def exhaustive_promotion_check(fin: FiniteInstance, source: ClassSpec) -> PromotionExhaustive:
    """On every pair where the source class holds, check the promoted weak
    inequality (both the d(Ty, TSx) and the dual d(Tx, TSy) shapes),
    exactly.  The promoted constants delta = k/(1-k), L = 2k/(1-k) are
    verified in the multiplied-through form k d(Tx,Ty) + 2k ell >= (1-k) lhs.
    """
    if source.kind not in (TB, TK, TC, TZ):
        raise ConfigError(f"promotion oracle applies to TB/TK/TC/TZ, not {source.kind!r}")
    src_mask = condition_mask(fin, source)
    t = _tensors(fin)

    if source.kind == TB:
        branch, const = "a", source.a
    elif source.kind == TK:
        branch, const = "b", source.b
    elif source.kind == TC:
        branch, const = "c", source.c
    else:
        branch, const = delta_branch(source.a, source.b, source.c)
    scale = 1.0 if branch == "a" else 1.0 - const

    def ok_for(ell: np.ndarray) -> np.ndarray:
        res = const * t["d_tx_ty"] + 2.0 * const * ell - scale * t["lhs"]
        return _in_cone(fin, res)

    ok_w = ok_for(t["d_ty_tsx"]) | ~src_mask
    ok_d = ok_for(t["d_tx_tsy"]) | ~src_mask
    return PromotionExhaustive(
        source,
        promote_to_weak(source),
        bool(ok_w.all()),
        bool(ok_d.all()),
        [tuple(map(int, p)) for p in np.argwhere(~ok_w)],
        [tuple(map(int, p)) for p in np.argwhere(~ok_d)],
    )


# ---------------------------------------------------------------------------
# Cross-validation of fixed-point conclusions
# ---------------------------------------------------------------------------

UNIQUENESS_CLASSES = (TB, TK, TC, TZ, TWU)


@dataclass
class CrossValidation:
    spec: ClassSpec
    applicable: bool
    t_injective: bool
    precondition_violations: list[tuple[int, int]]
    fixed_points: list[int]
    unique_expected: bool
    exists_ok: bool
    unique_ok: bool
    orbit_steps: dict[int, int]
    orbit_targets: dict[int, int]
    orbits_ok: bool
    multiplicity_allowed: bool

    @property
    def passed(self) -> bool:
        return self.applicable and self.exists_ok and self.unique_ok and self.orbits_ok


def cross_validate(fin: FiniteInstance, spec: ClassSpec) -> CrossValidation:
    """Verify the fixed-point conclusions on a finite carrier: existence,
    uniqueness for the unique-fixed-point classes (TB/TK/TC/TZ/TWU), and
    that every Picard orbit reaches a fixed point within n steps.  For the
    weak classes multiplicity is permitted and simply reported.
    """
    report = exhaustive_condition_check(fin, spec)
    injective = fin.t_injective
    unique_expected = spec.kind in UNIQUENESS_CLASSES
    multiplicity = spec.kind in (TW, TW_DUAL)
    if not report.holds or not injective:
        return CrossValidation(
            spec, False, injective, report.violating_pairs, [], unique_expected,
            False, False, {}, {}, False, multiplicity,
        )

    fps = enumerate_fixed_points(fin)
    fp_set = {fin.points.index(p) for p in fps}
    n = fin.n
    steps: dict[int, int] = {}
    targets: dict[int, int] = {}
    all_ok = True
    for start in range(n):
        cur = start
        count = 0
        while cur not in fp_set and count <= n:
            cur = int(fin.s_table[cur])
            count += 1
        if cur in fp_set:
            steps[start] = count
            targets[start] = cur
        else:
            all_ok = False
            steps[start] = -1
            targets[start] = -1

    exists_ok = len(fps) >= 1
    unique_ok = (len(fps) == 1) if unique_expected else True
    if unique_expected and unique_ok and all_ok:
        only = next(iter(fp_set))
        all_ok = all(t == only for t in targets.values())
    orbits_ok = all_ok and all(s <= n for s in steps.values() if s >= 0)
    return CrossValidation(
        spec, True, injective, [], fps, unique_expected,
        exists_ok, unique_ok, steps, targets, orbits_ok, multiplicity,
    )


# ---------------------------------------------------------------------------
# Random finite instances (rejection sampling)
# ---------------------------------------------------------------------------

@dataclass
class GeneratorConfig:
    """Knobs for the rejection sampler.  Values are dyadic so that every
    metric entry, and hence every cone test, is exact in float64."""

    n_min: int = 6
    n_max: int = 20
    max_attempts: int = 200_000
    direction_choices: tuple = ((1.0, 2.0), (0.5, 1.0), (1.0, 0.25), (2.0, 3.0))


@dataclass
class GeneratedInstance:
    fin: FiniteInstance
    spec: ClassSpec
    proposal: str
    extra: dict[str, float] = field(default_factory=dict)


def _ladder_values(rng: np.random.Generator, n: int) -> np.ndarray:
    scale = rng.integers(1, 5) / 4.0
    vals = [scale * 2.0 ** (-i) for i in range(n - 1)] + [0.0]
    return np.asarray(vals)


def _grid_values(rng: np.random.Generator, n: int) -> np.ndarray:
    ks = rng.choice(65, size=n, replace=False)
    return np.sort(ks)[::-1] / 64.0


def _propose_s(rng: np.random.Generator, n: int) -> tuple[str, np.ndarray]:
    roll = rng.random()
    if roll < 0.45:
        t = int(rng.integers(2, 5))
        return f"ladder-{t}", np.minimum(np.arange(n) + t, n - 1)
    if roll < 0.65:
        s = rng.integers(n - 2, n, size=n)
        s[n - 1] = n - 1
        return "cluster", s
    if roll < 0.75:
        hub = int(rng.integers(0, n))
        return "constant", np.full(n, hub)
    return "random", rng.integers(0, n, size=n)


def _draw_instance(rng: np.random.Generator, cfg: GeneratorConfig) -> tuple[FiniteInstance, str]:
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    values = _ladder_values(rng, n) if rng.random() < 0.6 else _grid_values(rng, n)
    name, base_s = _propose_s(rng, n)
    # T is a random permutation; conjugating the proposal keeps its
    # contraction geometry when read through T-images.
    if rng.random() < 0.3:
        pi = np.arange(n)
    else:
        pi = rng.permutation(n)
    inv = np.empty(n, dtype=int)
    inv[pi] = np.arange(n)
    s_table = inv[base_s[pi]]
    direction = cfg.direction_choices[int(rng.integers(0, len(cfg.direction_choices)))]
    fin = finite_from_values(values, pi, s_table, direction=direction)
    return fin, name


def _draw_units(rng: np.random.Generator, lo: int, hi: int, denom: float) -> float:
    return float(rng.integers(lo, hi)) / denom


def random_finite_instance(rng: np.random.Generator, cfg: GeneratorConfig | None = None) -> FiniteInstance:
    """A valid finite instance with no class requirement (metric axioms
    hold by construction and are re-validated exactly)."""
    fin, _ = _draw_instance(rng, cfg or GeneratorConfig())
    return fin


def generate_tz_corpus(
    count: int,
    *,
    seed: int = 0,
    cfg: GeneratorConfig | None = None,
) -> list[GeneratedInstance]:
    """Rejection-sample finite instances exhaustively satisfying
    TZ(a, b, c) for dyadic constants drawn per instance."""
    cfg = cfg or GeneratorConfig()
    rng = np.random.default_rng(seed)
    out: list[GeneratedInstance] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > cfg.max_attempts:
            raise RuntimeError(f"TZ corpus generation starved after {attempts} attempts")
        fin, name = _draw_instance(rng, cfg)
        a = _draw_units(rng, 0, 64, 64.0)
        b = _draw_units(rng, 0, 32, 64.0)
        c = _draw_units(rng, 0, 32, 64.0)
        spec = ClassSpec.tz(a, b, c)
        if exhaustive_condition_check(fin, spec).holds:
            out.append(GeneratedInstance(fin, spec, name))
    return out


def generate_twu_corpus(
    count: int,
    *,
    seed: int = 0,
    cfg: GeneratorConfig | None = None,
) -> list[GeneratedInstance]:
    """Instances exhaustively satisfying both a weak contraction TW(delta, L)
    and the uniqueness condition TWU(theta, L1).  Both are required: the
    TWU inequality alone admits fixed-point-free instances (a two-point
    swap passes it whenever theta + L1 >= 1), while the weak condition
    forces every orbit onto a fixed point."""
    cfg = cfg or GeneratorConfig()
    rng = np.random.default_rng(seed)
    out: list[GeneratedInstance] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > cfg.max_attempts:
            raise RuntimeError(f"TWU corpus generation starved after {attempts} attempts")
        fin, name = _draw_instance(rng, cfg)
        delta = _draw_units(rng, 1, 64, 64.0)
        big_l = _draw_units(rng, 0, 9, 4.0)
        theta = _draw_units(rng, 1, 64, 64.0)
        l1 = _draw_units(rng, 0, 9, 4.0)
        twu = ClassSpec.twu(theta, l1)
        tw = ClassSpec.tw(delta, big_l)
        if exhaustive_condition_check(fin, tw).holds and exhaustive_condition_check(fin, twu).holds:
            out.append(GeneratedInstance(fin, twu, name, extra={"delta": delta, "L": big_l}))
    return out
