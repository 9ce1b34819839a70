"""Independent checks of the closed forms.

Nothing here reads the closed-form densities: profits are computed from the
buyer allocation rule, the indifference condition is solved pointwise, and
best responses are found by grid search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize

from . import kernels
from .distribution import DiscreteLaw, PriceDistribution, TabulatedLaw
from .market_model import MarketParams, Model, Role

TIE_TOL = 1e-12


class PriceOutOfRange(ValueError):
    pass


class NoSolution(ArithmeticError):
    """The indifference equation has no solution inside [0, 1]."""


@dataclass(frozen=True)
class ProfitSpec:
    model: Model
    role: Role
    index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "role", Role(self.role))
        if not 1 <= self.index <= self.model.sellers_per_role:
            raise ValueError(f"{self.model.value} model has no seller {self.role.value}{self.index}")

    @property
    def label(self) -> str:
        if self.model is Model.BENCHMARK:
            return self.role.value
        return f"{self.role.value}{self.index}"

    def rivals(self) -> list["ProfitSpec"]:
        return [s for s in sellers(self.model) if s != self]


def sellers(model: Model) -> list[ProfitSpec]:
    """All sellers of a model in canonical order (lows first)."""
    model = Model(model)
    return [
        ProfitSpec(model, role, j)
        for role in (Role.LOW, Role.HIGH)
        for j in range(1, model.sellers_per_role + 1)
    ]


def _tol(p: MarketParams) -> float:
    return TIE_TOL * max(1.0, p.u)


def _units(p: MarketParams, model: Model, informed_share):
    n_sellers = model.seller_count
    return p.n * p.k / (p.u * n_sellers) + p.n * (1.0 - p.k / p.u) * informed_share


def _share_from_odds(below: Sequence, tie: Sequence):
    """Expected informed share given per-rival P(rival worse) and P(tie).

    Ties among ``m + 1`` sellers split the informed buyers equally.
    """
    coeffs = [np.ones_like(below[0])]
    for b, t in zip(below, tie):
        nxt = [coeffs[0] * b]
        for m in range(1, len(coeffs)):
            nxt.append(coeffs[m] * b + coeffs[m - 1] * t)
        nxt.append(coeffs[-1] * t)
        coeffs = nxt
    return sum(coef / (m + 1) for m, coef in enumerate(coeffs))


def _check_range(p: MarketParams, spec: ProfitSpec, own):
    top = p.top_price(spec.role)
    slack = 1e-12 * max(1.0, top)
    if np.any(own < p.c - slack) or np.any(own > top + slack):
        raise PriceOutOfRange(f"price outside [{p.c}, {top}] for seller {spec.label}")


def expected_profit(
    p: MarketParams,
    spec: ProfitSpec,
    own_price,
    opponents: Sequence[PriceDistribution],
):
    """Expected profit of ``spec`` at ``own_price`` (scalar or array).

    ``opponents`` are the rivals' price laws in the order of ``spec.rivals()``.
    """
    rivals = spec.rivals()
    if len(opponents) != len(rivals):
        raise ValueError(f"expected {len(rivals)} opponent distributions, got {len(opponents)}")
    own = np.asarray(own_price, dtype=float)
    _check_range(p, spec, own)
    tol = _tol(p)
    r_own = p.reputation(spec.role)
    below, tie = [], []
    for rival, dist in zip(rivals, opponents):
        # rival's utility equals ours when its price is t
        t = own + (p.reputation(rival.role) - r_own) * p.u
        upper = dist.cdf(t + tol)
        below.append(1.0 - upper)
        tie.append(upper - dist.cdf_left(t - tol))
    share = _share_from_odds(below, tie)
    return (own - p.c) * _units(p, spec.model, share)


def pure_profit(p: MarketParams, spec: ProfitSpec, own_price, rival_prices: Sequence):
    """Profit against pure rival prices (``+inf`` = never competitive, ``-inf`` = always wins)."""
    own = np.asarray(own_price, dtype=float)
    tol = _tol(p)
    own_util = p.reputation(spec.role) * p.u - own
    beaten = np.zeros(np.broadcast(own, *[np.asarray(r) for r in rival_prices]).shape, dtype=bool)
    ties = np.zeros(beaten.shape)
    for rival, price in zip(spec.rivals(), rival_prices):
        util = p.reputation(rival.role) * p.u - np.asarray(price, dtype=float)
        beaten |= util > own_util + tol
        ties += np.abs(util - own_util) <= tol
    share = np.where(beaten, 0.0, 1.0 / (1.0 + ties))
    return (own - p.c) * _units(p, spec.model, share)


# --------------------------------------------------------------------- certificate


@dataclass
class DeviationReport:
    seller: str
    max_gain: float
    argmax_price: float
    tolerance: float
    grid_size: int
    equilibrium_profit: float

    @property
    def passed(self) -> bool:
        return self.max_gain <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "seller": self.seller,
            "max_gain": self.max_gain,
            "argmax_price": self.argmax_price,
            "tolerance": self.tolerance,
            "grid_size": self.grid_size,
            "equilibrium_profit": self.equilibrium_profit,
            "passed": self.passed,
        }


def _law_of(dists, spec: ProfitSpec) -> PriceDistribution:
    if spec in dists:
        return dists[spec]
    return dists[spec.role]


def _own_average(p, spec, own_law, opponents, quantiles: int = 20000):
    q = (np.arange(quantiles) + 0.5) / quantiles
    return float(np.mean(expected_profit(p, spec, own_law.ppf(q), opponents)))


def verify_equilibrium(
    p: MarketParams,
    model: Model,
    dists: Mapping,
    grid_size: int = 2001,
    rel_tolerance: float = 0.01,
) -> dict[str, DeviationReport]:
    """Largest gain from a unilateral deviation to any grid price, per seller.

    ``dists`` maps a :class:`Role` (shared by all sellers of that role) or a
    :class:`ProfitSpec` to a price law. The certificate for a seller passes
    when the gain is at most ``rel_tolerance`` times its equilibrium profit.
    """
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    reports = {}
    for spec in sellers(model):
        opponents = [_law_of(dists, r) for r in spec.rivals()]
        grid = np.linspace(p.c, p.top_price(spec.role), grid_size)
        profits = expected_profit(p, spec, grid, opponents)
        base = _own_average(p, spec, _law_of(dists, spec), opponents)
        best = int(np.argmax(profits))
        reports[spec.label] = DeviationReport(
            seller=spec.label,
            max_gain=float(profits[best] - base),
            argmax_price=float(grid[best]),
            tolerance=rel_tolerance * abs(base),
            grid_size=grid_size,
            equilibrium_profit=base,
        )
    return reports


# --------------------------------------------------------------- indifference solve


def support_floor(p: MarketParams, spec: ProfitSpec, fixed: Mapping | None = None) -> float:
    """Price at which winning every informed buyer pays as much as conceding them
    and charging the top price."""
    fixed = fixed or {}
    top = p.top_price(spec.role)

    def rivals(value):
        return [fixed.get(r, value) for r in spec.rivals()]

    give_up = float(pure_profit(p, spec, top, rivals(-np.inf)))

    def excess(x):
        return float(pure_profit(p, spec, x, rivals(np.inf))) - give_up

    return optimize.brentq(excess, p.c, top, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def solve_indifference_cdf(
    p: MarketParams, model: Model, role: Role, grid_size: int = 20001
) -> PriceDistribution:
    """Recover a seller's equilibrium law from its rival's indifference condition.

    The anchor rival must earn the same profit at every price of its support.
    Its profit is affine in ``F(x) = P(target price < x)``, so each grid point
    gives ``F(x) = (W - pi) / (W - L)`` with ``W``/``L`` the anchor's profit when
    the target is surely above/below the utility-parity price.
    """
    model, role = Model(model), Role(role)
    if model is Model.COMPETITION and role is Role.LOW:
        return _competition_low_best_response(p, grid_size)

    if model is Model.BENCHMARK:
        target = ProfitSpec(model, role)
        anchor = ProfitSpec(model, Role.HIGH if role is Role.LOW else Role.LOW)
        fixed = {}
        low_floor = support_floor(p, ProfitSpec(model, Role.LOW))
        target_floor = low_floor if role is Role.LOW else low_floor + p.parity_gap
    else:
        target = ProfitSpec(model, Role.HIGH, 1)
        anchor = ProfitSpec(model, Role.HIGH, 2)
        # low sellers concede the informed buyers and sit at their top price
        fixed = {s: p.top_price(Role.LOW) for s in sellers(model) if s.role is Role.LOW}
        target_floor = support_floor(p, anchor, fixed)

    shift = (p.reputation(anchor.role) - p.reputation(target.role)) * p.u
    anchor_floor = target_floor + shift

    def profit(y, target_price):
        prices = [fixed.get(r, target_price) for r in anchor.rivals()]
        return pure_profit(p, anchor, y, prices)

    pi = float(profit(anchor_floor, np.inf))
    grid = np.linspace(target_floor, p.top_price(target.role), grid_size)
    y = grid + shift
    win = profit(y, np.inf)
    lose = profit(y, -np.inf)
    F = (win - pi) / (win - lose)
    if F.min() < -1e-9 or F.max() > 1 + 1e-9:
        raise NoSolution(f"indifference gives F outside [0, 1]: [{F.min()}, {F.max()}]")
    F = np.clip(F, 0.0, 1.0)
    F[0] = 0.0
    residual = 1.0 - F[-1]
    atoms = [(grid[-1], residual)] if residual > 1e-12 else []
    return TabulatedLaw(grid, F, atoms)


def _competition_low_best_response(p: MarketParams, grid_size: int) -> DiscreteLaw:
    high = solve_indifference_cdf(p, Model.COMPETITION, Role.HIGH, grid_size)
    spec = ProfitSpec(Model.COMPETITION, Role.LOW, 1)
    opponents = [
        DiscreteLaw.pure(p.top_price(Role.LOW)) if r.role is Role.LOW else high
        for r in spec.rivals()
    ]
    grid = np.linspace(p.c, p.top_price(Role.LOW), grid_size)
    profits = expected_profit(p, spec, grid, opponents)
    return DiscreteLaw.pure(float(grid[int(np.argmax(profits))]))


# ------------------------------------------------------------ pure-strategy search


@dataclass
class NoPureReport:
    low_grid: np.ndarray
    high_grid: np.ndarray
    gain_low: np.ndarray  # [i, j]: L's best gain at pair (low_grid[i], high_grid[j])
    gain_high: np.ndarray
    best_low_price: np.ndarray  # L's best reply to each high_grid[j]
    best_high_price: np.ndarray  # H's best reply to each low_grid[i]
    threshold: float = 1e-12

    @property
    def best_gain(self) -> np.ndarray:
        return np.maximum(self.gain_low, self.gain_high)

    @property
    def every_pair_deviates(self) -> bool:
        return bool(np.all(self.best_gain > self.threshold))

    def witness(self, i: int, j: int) -> tuple[str, float, float]:
        """(deviating seller, deviation price, gain) for pair ``(i, j)``."""
        if self.gain_low[i, j] >= self.gain_high[i, j]:
            return "L", float(self.best_low_price[j]), float(self.gain_low[i, j])
        return "H", float(self.best_high_price[i]), float(self.gain_high[i, j])

    def summary(self) -> dict:
        gains = self.best_gain
        i, j = np.unravel_index(int(np.argmin(gains)), gains.shape)
        seller, price, gain = self.witness(i, j)
        return {
            "grid": [len(self.low_grid), len(self.high_grid)],
            "pairs": int(gains.size),
            "pairs_with_deviation": int(np.count_nonzero(gains > self.threshold)),
            "every_pair_deviates": self.every_pair_deviates,
            "smallest_gain": float(gains[i, j]),
            "smallest_gain_pair": [float(self.low_grid[i]), float(self.high_grid[j])],
            "smallest_gain_witness": {"seller": seller, "price": price},
        }


def no_pure_equilibrium_check(p: MarketParams, grid_size: int = 201) -> NoPureReport:
    """Show by exhaustive search that every pure price pair of the two-seller
    game admits a profitable unilateral deviation."""
    low = np.linspace(p.c, p.top_price(Role.LOW), grid_size)
    high = np.linspace(p.c, p.top_price(Role.HIGH), grid_size)
    args = (p.u, p.c, p.k, float(p.n), _tol(p))
    profit_low = kernels.pure_payoffs(low, high, p.r_L, p.r_H, *args)  # [i, j]
    profit_high = kernels.pure_payoffs(high, low, p.r_H, p.r_L, *args).T  # [i, j]
    best_low = profit_low.max(axis=0)
    best_high = profit_high.max(axis=1)
    return NoPureReport(
        low_grid=low,
        high_grid=high,
        gain_low=best_low[None, :] - profit_low,
        gain_high=best_high[:, None] - profit_high,
        best_low_price=low[np.argmax(profit_low, axis=0)],
        best_high_price=high[np.argmax(profit_high, axis=1)],
    )


def best_deviation(p: MarketParams, price_low: float, price_high: float, grid_size: int = 201) -> dict:
    """Best unilateral deviation of each seller from a pure pair (benchmark game)."""
    out = {}
    for spec, own, rival in (
        (ProfitSpec(Model.BENCHMARK, Role.LOW), price_low, price_high),
        (ProfitSpec(Model.BENCHMARK, Role.HIGH), price_high, price_low),
    ):
        grid = np.linspace(p.c, p.top_price(spec.role), grid_size)
        current = float(pure_profit(p, spec, own, [rival]))
        profits = pure_profit(p, spec, grid, [rival])
        best = int(np.argmax(profits))
        out[spec.role] = {
            "current": current,
            "price": float(grid[best]),
            "profit": float(profits[best]),
            "gain": float(profits[best] - current),
        }
    return out


# ----------------------------------------------------------------- learning probe


@dataclass
class FictitiousPlayResult:
    grids: dict[str, np.ndarray]
    strategies: dict[str, np.ndarray]  # time-averaged mixed strategies on the grids
    payoff_trace: np.ndarray  # [iteration, seller] payoff of averaged strategies
    labels: list[str] = field(default_factory=list)

    @property
    def final_payoffs(self) -> dict[str, float]:
        return {label: float(self.payoff_trace[-1, s]) for s, label in enumerate(self.labels)}


class _DiscreteGame:
    """Profit vectors of each seller's grid against rivals' mixed strategies."""

    def __init__(self, p: MarketParams, model: Model, grid_size: int):
        self.p = p
        self.specs = sellers(model)
        self.grids = [np.linspace(p.c, p.top_price(s.role), grid_size) for s in self.specs]
        tol = _tol(p)
        self.index = {}
        for a, spec in enumerate(self.specs):
            for b, rival in enumerate(self.specs):
                if a == b:
                    continue
                t = self.grids[a] + (p.reputation(rival.role) - p.reputation(spec.role)) * p.u
                hi = np.searchsorted(self.grids[b], t + tol, side="right")
                lo = np.searchsorted(self.grids[b], t - tol, side="left")
                self.index[a, b] = (lo, hi)

    def profits(self, a: int, mixes: Sequence[np.ndarray]) -> np.ndarray:
        below, tie = [], []
        for b in range(len(self.specs)):
            if b == a:
                continue
            cum = np.concatenate(([0.0], np.cumsum(mixes[b])))
            lo, hi = self.index[a, b]
            below.append(1.0 - cum[hi])
            tie.append(cum[hi] - cum[lo])
        share = _share_from_odds(below, tie)
        return (self.grids[a] - self.p.c) * _units(self.p, self.specs[a].model, share)


def fictitious_play(
    p: MarketParams,
    model: Model,
    grid_size: int = 501,
    iterations: int = 10_000,
    seed: int = 0,
) -> FictitiousPlayResult:
    """Simultaneous fictitious play on the discretised game.

    Each seller starts from a random grid price and then, every iteration,
    plays a best response (lowest price on ties) to the empirical mixture of
    its rivals' past play, initial prices included. Returned strategies
    average the best responses only, so one iteration returns the pure best
    response to the initial profile.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    game = _DiscreteGame(p, Model(model), grid_size)
    count = len(game.specs)
    rng = np.random.default_rng(seed)
    beliefs = [np.zeros(grid_size) for _ in range(count)]
    played = [np.zeros(grid_size) for _ in range(count)]
    for a in range(count):
        beliefs[a][rng.integers(grid_size)] = 1.0
    trace = np.empty((iterations, count))
    for it in range(1, iterations + 1):
        mixes = [b / b.sum() for b in beliefs]
        replies = [int(np.argmax(game.profits(a, mixes))) for a in range(count)]
        for a, r in enumerate(replies):
            beliefs[a][r] += 1.0
            played[a][r] += 1.0
        averages = [x / it for x in played]
        for a in range(count):
            trace[it - 1, a] = float(np.dot(averages[a], game.profits(a, averages)))
    labels = [s.label for s in game.specs]
    return FictitiousPlayResult(
        grids=dict(zip(labels, game.grids)),
        strategies={label: x / iterations for label, x in zip(labels, played)},
        payoff_trace=trace,
        labels=labels,
    )
