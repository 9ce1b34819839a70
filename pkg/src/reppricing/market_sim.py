"""Seeded Monte-Carlo simulation of the buyer-seller market.

Rounds are split into fixed-size blocks; block ``b`` draws from its own
``SeedSequence(seed).spawn`` child, so the report does not depend on how the
blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .distribution import PriceDistribution
from .market_model import MarketParams, Model, Role
from .oracle import TIE_TOL, ProfitSpec, sellers

BLOCK_ROUNDS = 4096


@dataclass
class SimulationConfig:
    params: MarketParams
    model: Model
    strategies: Mapping  # Role or ProfitSpec -> PriceDistribution
    rounds: int
    seed: int = 0

    def __post_init__(self):
        self.model = Model(self.model)
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        for spec in sellers(self.model):
            law = self.strategy(spec)
            top = self.params.top_price(spec.role)
            slack = 1e-12 * max(1.0, top)
            if law.lower < self.params.c - slack or law.upper > top + slack:
                raise ValueError(f"strategy of {spec.label} leaves [{self.params.c}, {top}]")

    def strategy(self, spec: ProfitSpec) -> PriceDistribution:
        if spec in self.strategies:
            return self.strategies[spec]
        return self.strategies[spec.role]


@dataclass
class SellerStats:
    mean_profit: float
    se_profit: float
    mean_price: float
    se_price: float
    mean_informed_sales: float
    mean_uninformed_sales: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SimulationReport:
    rounds: int
    uninformed_buyers: int
    informed_buyers: int
    rounding_error: float  # round(k/u n) - k/u n
    sellers: dict[str, SellerStats]
    mean_round_profit: float
    prices: np.ndarray = field(repr=False)  # [round, seller]
    profits: np.ndarray = field(repr=False)
    informed_sales: np.ndarray = field(repr=False)
    uninformed_sales: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "uninformed_buyers": self.uninformed_buyers,
            "informed_buyers": self.informed_buyers,
            "rounding_error": self.rounding_error,
            "mean_round_profit": self.mean_round_profit,
            "sellers": {label: s.to_dict() for label, s in self.sellers.items()},
        }


def uninformed_count(p: MarketParams) -> int:
    """``k/u * n`` rounded half-up to a whole number of buyers."""
    return int(math.floor(p.k / p.u * p.n + 0.5))


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error; a constant sample is reported exactly."""
    if np.ptp(x) == 0:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _block_generators(seed: int, rounds: int):
    blocks = -(-rounds // BLOCK_ROUNDS)
    children = np.random.SeedSequence(seed).spawn(blocks)
    for b, child in enumerate(children):
        size = min(BLOCK_ROUNDS, rounds - b * BLOCK_ROUNDS)
        yield size, np.random.Generator(np.random.PCG64(child))


def _draw_prices(config: SimulationConfig, rng, size: int) -> np.ndarray:
    specs = sellers(config.model)
    out = np.empty((size, len(specs)))
    for s, spec in enumerate(specs):
        out[:, s] = config.strategy(spec).ppf(rng.random(size))
    return out


def simulate(config: SimulationConfig) -> SimulationReport:
    p = config.params
    specs = sellers(config.model)
    reps = np.array([p.reputation(s.role) for s in specs])
    n_uninf = uninformed_count(p)
    price_blocks, uninf_blocks, inf_blocks = [], [], []
    for size, rng in _block_generators(config.seed, config.rounds):
        prices = _draw_prices(config, rng, size)
        draws = rng.random((size, p.n))
        uninf, inf = kernels.allocate_sales(prices, reps, p.u, n_uninf, draws, TIE_TOL * max(1.0, p.u))
        price_blocks.append(prices)
        uninf_blocks.append(uninf)
        inf_blocks.append(inf)
    prices = np.concatenate(price_blocks)
    uninf = np.concatenate(uninf_blocks)
    inf = np.concatenate(inf_blocks)
    profits = (uninf + inf) * (prices - p.c)

    stats = {}
    for s, spec in enumerate(specs):
        mean_profit, se_profit = _mean_se(profits[:, s])
        mean_price, se_price = _mean_se(prices[:, s])
        stats[spec.label] = SellerStats(
            mean_profit=mean_profit,
            se_profit=se_profit,
            mean_price=mean_price,
            se_price=se_price,
            mean_informed_sales=float(inf[:, s].mean()),
            mean_uninformed_sales=float(uninf[:, s].mean()),
        )
    return SimulationReport(
        rounds=config.rounds,
        uninformed_buyers=n_uninf,
        informed_buyers=p.n - n_uninf,
        rounding_error=n_uninf - p.k / p.u * p.n,
        sellers=stats,
        mean_round_profit=float(profits.sum(axis=1).mean()),
        prices=prices,
        profits=profits,
        informed_sales=inf,
        uninformed_sales=uninf,
    )


@dataclass
class PriceCheck:
    seller: str
    mean: float
    se: float
    expected: float
    z: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def mean_price_check(
    config: SimulationConfig,
    closed_form_expectation: float,
    seller: ProfitSpec | Role = Role.LOW,
    z_max: float = 3.0,
) -> PriceCheck:
    """Compare the simulated mean price of one seller with a closed-form value.

    Uses the same price draws as :func:`simulate` without allocating buyers.
    """
    if config.rounds < 10_000:
        raise ValueError("mean_price_check needs at least 10^4 rounds")
    spec = seller if isinstance(seller, ProfitSpec) else ProfitSpec(config.model, Role(seller), 1)
    column = sellers(config.model).index(spec)
    draws = [_draw_prices(config, rng, size)[:, column] for size, rng in _block_generators(config.seed, config.rounds)]
    mean, se = _mean_se(np.concatenate(draws))
    diff = mean - closed_form_expectation
    if se == 0.0:
        z = 0.0 if abs(diff) <= 1e-12 * max(1.0, abs(mean)) else math.copysign(math.inf, diff)
    else:
        z = diff / se
    return PriceCheck(spec.label, mean, se, closed_form_expectation, z, abs(z) <= z_max)
