"""Sign of the price premium ``E(p_H) - E(p_L)`` as a function of the search cost."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .closed_form import (
    benchmark_distribution_high,
    competition_distribution_high,
    expected_prices,
    expected_prices_at,
)
from .market_model import MarketParams, Model, validate_params

# Expected prices are evaluated on [K_EDGE u, (1 - K_EDGE) u].
K_EDGE = 1e-9
BISECT_XTOL = 1e-12


@dataclass
class ThresholdResult:
    model: Model
    k_star: float | None  # None when no sign change exists
    existence_condition_value: float
    bracket: tuple[float, float]
    residual: float | None
    note: str = ""

    @property
    def exists(self) -> bool:
        return self.k_star is not None

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "k_star": self.k_star,
            "exists": self.exists,
            "existence_condition_value": self.existence_condition_value,
            "bracket": list(self.bracket),
            "residual": self.residual,
            "note": self.note,
        }


def premium(p: MarketParams, model: Model, k):
    """``E_H - E_L`` at search cost(s) ``k`` with the other parameters of ``p``."""
    e_low, e_high = expected_prices_at(p.u, p.c, p.r_L, p.r_H, k, model)
    return e_high - e_low


def benchmark_existence_condition(p: MarketParams) -> float:
    """``ln((r_H u - c) / ((r_H - r_L) u))``; a threshold exists when this is >= 1."""
    return math.log((p.r_H * p.u - p.c) / p.parity_gap)


def _bisect(p: MarketParams, model: Model, condition: float, note: str = "") -> ThresholdResult:
    model = Model(model)
    lo, hi = K_EDGE * p.u, (1.0 - K_EDGE) * p.u
    f = lambda k: float(premium(p, model, k))  # noqa: E731
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo < 0.0 < f_hi):
        return ThresholdResult(model, None, condition, (lo, hi), None,
                               note or f"no sign change on the bracket: {f_lo:.3g}, {f_hi:.3g}")
    root = optimize.bisect(f, lo, hi, xtol=BISECT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=400)
    return ThresholdResult(model, root, condition, (lo, hi), abs(f(root)), note)


def find_threshold_benchmark(p: MarketParams) -> ThresholdResult:
    """Search cost ``k1*`` at which the two-seller premium changes sign (``p.k`` ignored)."""
    condition = benchmark_existence_condition(p)
    if condition < 1.0:
        lo, hi = K_EDGE * p.u, (1.0 - K_EDGE) * p.u
        return ThresholdResult(Model.BENCHMARK, None, condition, (lo, hi), None,
                               "existence condition fails; premium positive on (0, u)")
    return _bisect(p, Model.BENCHMARK, condition)


def find_threshold_competition(p: MarketParams) -> ThresholdResult:
    """Search cost ``k2*`` of the four-seller game (``p.k`` ignored).

    The premium tends to ``c - r_L u < 0`` as ``k -> 0`` and is positive near
    ``k = u``, so the root always exists.
    """
    limit_at_zero = p.c - p.r_L * p.u
    return _bisect(p, Model.COMPETITION, limit_at_zero)


@dataclass
class PremiumMap:
    model: Model
    k: np.ndarray
    e_low: np.ndarray
    e_high: np.ndarray

    @property
    def premium(self) -> np.ndarray:
        return self.e_high - self.e_low

    @property
    def sign(self) -> np.ndarray:
        return np.sign(self.premium).astype(int)

    def sign_changes(self) -> int:
        signs = self.sign[self.sign != 0]
        return int(np.count_nonzero(signs[1:] != signs[:-1]))

    def rows(self) -> list[tuple[float, float, float, int]]:
        return [(float(k), float(lo), float(hi), int(s))
                for k, lo, hi, s in zip(self.k, self.e_low, self.e_high, self.sign)]


def premium_map(p: MarketParams, model: Model, k_grid) -> PremiumMap:
    k = np.asarray(k_grid, dtype=float)
    if k.ndim != 1 or np.any(np.diff(k) <= 0):
        raise ValueError("k_grid must be ascending")
    if k[0] <= 0 or k[-1] >= p.u:
        raise ValueError("k_grid must lie inside (0, u)")
    e_low, e_high = expected_prices_at(p.u, p.c, p.r_L, p.r_H, k, model)
    return PremiumMap(Model(model), k, np.asarray(e_low, float), np.asarray(e_high, float))


def default_k_grid(p: MarketParams, points: int = 512) -> np.ndarray:
    return np.linspace(K_EDGE * p.u, (1.0 - K_EDGE) * p.u, points)


@dataclass
class MonotonicityReport:
    model: Model
    min_slope_low: float
    min_slope_high: float
    min_slope_premium: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.min_slope_low >= -self.tolerance
            and self.min_slope_high >= -self.tolerance
            and self.min_slope_premium > -self.tolerance
        )


def monotonicity_check(p: MarketParams, model: Model, k_grid, tolerance: float = 1e-8) -> MonotonicityReport:
    """Forward differences of expected prices and premium along ``k_grid``.

    Slopes are checked in the form ``diff(E) / diff(k)``; the premium slope
    must be positive and the expected-price slopes nonnegative, up to
    ``tolerance``.
    """
    m = premium_map(p, model, k_grid)
    dk = np.diff(m.k)
    slope_low = np.diff(m.e_low) / dk
    slope_high = np.diff(m.e_high) / dk
    slope_prem = np.diff(m.premium) / dk
    return MonotonicityReport(Model(model), float(slope_low.min()), float(slope_high.min()),
                              float(slope_prem.min()), tolerance)


@dataclass
class CompetitionEffect:
    e_high_benchmark: float
    e_high_competition: float
    e_low_benchmark: float
    e_low_competition: float
    max_cdf_excess: float  # max over the common support of F_H - F_Hj (should be <= 0)

    @property
    def high_price_falls(self) -> bool:
        return self.e_high_competition <= self.e_high_benchmark

    @property
    def low_price_rises(self) -> bool:
        return self.e_low_competition >= self.e_low_benchmark

    @property
    def cdf_ordered(self) -> bool:
        return self.max_cdf_excess <= 1e-12

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out.update(high_price_falls=self.high_price_falls, low_price_rises=self.low_price_rises,
                   cdf_ordered=self.cdf_ordered)
        return out


def competition_effect_report(p: MarketParams, points: int = 2001) -> CompetitionEffect:
    """Compare high and low sellers' prices with and without a same-type rival."""
    e_low_b, e_high_b = expected_prices(p, Model.BENCHMARK)
    e_low_c, e_high_c = expected_prices(p, Model.COMPETITION)
    bench = benchmark_distribution_high(p)
    comp = competition_distribution_high(p)
    lo, hi = max(bench.lower, comp.lower), min(bench.upper, comp.upper)
    xs = np.linspace(lo, hi, points)
    excess = float(np.max(bench.cdf(xs) - comp.cdf(xs)))
    return CompetitionEffect(e_high_b, e_high_c, e_low_b, e_low_c, excess)


# ------------------------------------------------------------------------ sweeps


@dataclass
class SweepRow:
    params: MarketParams
    k1: ThresholdResult
    k2: ThresholdResult

    @property
    def ordered(self) -> bool:
        return self.k1.exists and self.k2.exists and self.k1.k_star < self.k2.k_star

    def to_dict(self) -> dict:
        d = self.params.as_dict()
        d.pop("k")
        d.pop("n")
        d.update(k1_star=self.k1.k_star, k2_star=self.k2.k_star,
                 residual_k1=self.k1.residual, residual_k2=self.k2.residual,
                 condition=self.k1.existence_condition_value, ordered=self.ordered)
        return d


@dataclass
class SweepResult:
    rows: list[SweepRow]
    rejected: int = 0
    seed: int = 0
    violations: list[int] = field(default_factory=list)

    @property
    def all_ordered(self) -> bool:
        return not self.violations


def random_params(rng: np.random.Generator, n: int = 100) -> MarketParams:
    """One draw from the sweep prior: u in [1, 10], r_L in (0.1, 0.9),
    r_H in (r_L, 1), c in [0, r_L u / 2); ``k`` is set to ``u / 2``."""
    while True:
        u = rng.uniform(1.0, 10.0)
        r_L = rng.uniform(0.1, 0.9)
        r_H = rng.uniform(r_L, 1.0)
        c = rng.uniform(0.0, 0.5 * r_L * u)
        if r_L < r_H < 1.0 and r_H - r_L > 1e-9:
            return validate_params(dict(u=u, c=c, r_L=r_L, r_H=r_H, k=0.5 * u, n=n))


def sweep(points: int = 100, seed: int = 0, max_draws: int = 1_000_000) -> SweepResult:
    """Thresholds for random parameter sets satisfying the ``k1*`` existence condition."""
    rng = np.random.default_rng(seed)
    rows, rejected, violations = [], 0, []
    while len(rows) < points:
        if rejected + len(rows) >= max_draws:
            raise RuntimeError(f"only {len(rows)} admissible draws in {max_draws}")
        p = random_params(rng)
        if benchmark_existence_condition(p) < 1.0:
            rejected += 1
            continue
        row = SweepRow(p, find_threshold_benchmark(p), find_threshold_competition(p))
        if not row.ordered:
            violations.append(len(rows))
        rows.append(row)
    return SweepResult(rows, rejected, seed, violations)
