"""Standardisation, regression, median-split tests and summary tables."""

from __future__ import annotations

import dataclasses
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .records import OfferingRecord

REGRESSORS = ("intercept", "sales", "comments", "rating")


class DegenerateGroup(ValueError):
    pass


class RankDeficient(np.linalg.LinAlgError):
    pass


class InsufficientData(ValueError):
    pass


class EmptyGroup(ValueError):
    pass


def significance_stars(p_value: float) -> str:
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.10:
        return "*"
    return ""


# ------------------------------------------------------------------ standardise


@dataclass
class StandardizeResult:
    records: list[OfferingRecord]
    excluded: dict[tuple[str, str], str] = field(default_factory=dict)  # group -> reason


def zscores(values) -> np.ndarray:
    """``(x - mean) / sd`` with the n-1 denominator."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise DegenerateGroup(f"group of size {x.size}")
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DegenerateGroup("zero standard deviation")
    return (x - x.mean()) / sd


def standardize(records: list[OfferingRecord]) -> StandardizeResult:
    """Attach per-product z-scores of price; degenerate products are left out."""
    groups = defaultdict(list)
    for i, r in enumerate(records):
        groups[r.group_key].append(i)
    z = {}
    excluded = {}
    for key, members in groups.items():
        try:
            scores = zscores([records[i].price for i in members])
        except DegenerateGroup as exc:
            excluded[key] = str(exc)
            continue
        z.update(zip(members, scores))
    out = [dataclasses.replace(r, std_price=float(z[i])) for i, r in enumerate(records) if i in z]
    return StandardizeResult(out, excluded)


# -------------------------------------------------------------------- regression


@dataclass
class RegressionResult:
    category: str
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    n: int
    names: tuple[str, ...] = REGRESSORS

    @property
    def stars(self) -> list[str]:
        return [significance_stars(p) for p in self.p_values]

    @property
    def df(self) -> int:
        return self.n - len(self.coefficients)

    def confidence_interval(self, level: float = 0.99) -> np.ndarray:
        half = stats.t.ppf(0.5 + level / 2, self.df) * self.std_errors
        return np.column_stack((self.coefficients - half, self.coefficients + half))

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "n": self.n,
            "terms": [
                {"name": name, "coef": float(b), "se": float(se), "t": float(t), "p": float(p),
                 "stars": significance_stars(p)}
                for name, b, se, t, p in zip(self.names, self.coefficients, self.std_errors,
                                            self.t_stats, self.p_values)
            ],
        }


def ols(y, X, category: str = "", names=REGRESSORS) -> RegressionResult:
    """Least squares with classical standard errors and two-sided t p-values."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    if n < max(5, k + 1):
        raise InsufficientData(f"{n} observations for {k} coefficients")
    # column scaling keeps the rank test meaningful when regressors differ in magnitude
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    Xs = X / scale
    Q, R = np.linalg.qr(Xs)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * diag.max():
        raise RankDeficient("design matrix is not of full column rank")
    beta_s = np.linalg.solve(R, Q.T @ y)
    resid = y - Xs @ beta_s
    sigma2 = float(resid @ resid) / (n - k)
    R_inv = np.linalg.solve(R, np.eye(k))
    cov_s = sigma2 * (R_inv @ R_inv.T)
    beta = beta_s / scale
    se = np.sqrt(np.diag(cov_s)) / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.where(beta == 0, 0.0, np.inf * np.sign(beta)))
    p = 2 * stats.t.sf(np.abs(t), n - k)
    return RegressionResult(category, beta, se, t, p, n, tuple(names))


def regress(records: list[OfferingRecord], category: str) -> RegressionResult:
    """Standardised price on sales, comments and rating within a category."""
    rows = [r for r in records if r.category == category and r.std_price is not None]
    if len(rows) < 5:
        raise InsufficientData(f"category {category!r} has {len(rows)} standardised records")
    X = np.array([[1.0, r.sales, r.comments, r.rating] for r in rows])
    y = np.array([r.std_price for r in rows])
    return ols(y, X, category)


# ------------------------------------------------------------------------- t-test


@dataclass
class TTestResult:
    category: str
    median_rating: float
    mean_high: float
    sd_high: float
    n_high: int
    mean_low: float
    sd_low: float
    n_low: int
    t: float
    df: float
    p_value: float
    counts_high: dict = field(default_factory=dict)  # standardised price >0 / <0 / =0
    counts_low: dict = field(default_factory=dict)

    @property
    def direction(self) -> str:
        if self.mean_low > self.mean_high:
            return "low>high"
        if self.mean_low < self.mean_high:
            return "low<high"
        return "equal"

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out.update(direction=self.direction, stars=self.stars)
        return out


def welch_t(low, high) -> tuple[float, float, float]:
    """Welch statistic for ``mean(low) - mean(high)``: ``(t, df, two-sided p)``."""
    a = np.asarray(low, dtype=float)
    b = np.asarray(high, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InsufficientData("each group needs at least two observations")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    diff = a.mean() - b.mean()
    if va + vb == 0.0:
        if diff == 0.0:
            return 0.0, float(a.size + b.size - 2), 1.0
        return math.copysign(math.inf, diff), float(a.size + b.size - 2), 0.0
    t = diff / math.sqrt(va + vb)
    wa, wb = va / (va + vb), vb / (va + vb)  # normalised so tiny variances do not underflow
    df = 1.0 / (wa**2 / (a.size - 1) + wb**2 / (b.size - 1))
    return float(t), float(df), float(2 * stats.t.sf(abs(t), df))


def _sign_counts(values) -> dict:
    v = np.asarray(values)
    return {">0": int(np.sum(v > 0)), "<0": int(np.sum(v < 0)), "=0": int(np.sum(v == 0))}


def median_split_ttest(records: list[OfferingRecord], category: str) -> TTestResult:
    """Split at the category's median rating (ties go high) and compare
    standardised prices with a two-sided Welch test."""
    rows = [r for r in records if r.category == category and r.std_price is not None]
    if not rows:
        raise EmptyGroup(f"category {category!r} has no standardised records")
    median = float(np.median([r.rating for r in rows]))
    low = [r.std_price for r in rows if r.rating < median]
    high = [r.std_price for r in rows if r.rating >= median]
    if not low or not high:
        raise EmptyGroup(f"median split of {category!r} leaves an empty group")
    t, df, p = welch_t(low, high)
    return TTestResult(
        category=category,
        median_rating=median,
        mean_high=float(np.mean(high)),
        sd_high=float(np.std(high, ddof=1)),
        n_high=len(high),
        mean_low=float(np.mean(low)),
        sd_low=float(np.std(low, ddof=1)),
        n_low=len(low),
        t=t,
        df=df,
        p_value=p,
        counts_high=_sign_counts(high),
        counts_low=_sign_counts(low),
    )


# ------------------------------------------------------------------------ summary


@dataclass
class CategorySummary:
    category: str
    products: int
    offerings: int
    price_max: float
    price_min: float
    std_price_max: float | None
    std_price_min: float | None
    rating_mean: float
    rating_median: float
    rating_sd: float | None
    rating_max: float
    rating_min: float
    above_450: int
    above_400: int
    notes: list[str] = field(default_factory=list)

    @property
    def pct_above_450(self) -> float:
        return 100.0 * self.above_450 / self.offerings

    @property
    def pct_above_400(self) -> float:
        return 100.0 * self.above_400 / self.offerings

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out.update(pct_above_450=self.pct_above_450, pct_above_400=self.pct_above_400)
        return out


def summarize(records: list[OfferingRecord]) -> list[CategorySummary]:
    """Per-category sample size, price and rating dispersion."""
    by_cat = defaultdict(list)
    for r in records:
        by_cat[r.category].append(r)
    out = []
    for category in sorted(by_cat):
        rows = by_cat[category]
        ratings = np.array([r.rating for r in rows], dtype=float)
        z = [r.std_price for r in standardize(rows).records]
        notes = []
        sd = None
        if len(rows) >= 2:
            sd = float(np.std(ratings, ddof=1))
        else:
            notes.append("rating SD undefined for a single record")
        if not z:
            notes.append("no product group could be standardised")
        prices = [r.price for r in rows]
        out.append(CategorySummary(
            category=category,
            products=len({r.product for r in rows}),
            offerings=len(rows),
            price_max=max(prices),
            price_min=min(prices),
            std_price_max=max(z) if z else None,
            std_price_min=min(z) if z else None,
            rating_mean=float(ratings.mean()),
            rating_median=float(np.median(ratings)),
            rating_sd=sd,
            rating_max=float(ratings.max()),
            rating_min=float(ratings.min()),
            above_450=int(np.sum(ratings > 4.5)),
            above_400=int(np.sum(ratings > 4.0)),
            notes=notes,
        ))
    return out
