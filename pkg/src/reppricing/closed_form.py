"""Closed-form mixed-strategy equilibria of the benchmark and competition games."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .distribution import DiscreteLaw, InverseSquareLaw, PriceDistribution
from .market_model import MarketParams, Model, Role, check_regime

# The four-seller density as printed next to the game's statement has an
# unsquared (p - c); only the squared form integrates to one and satisfies
# the indifference condition.
COMPETITION_HIGH_DENSITY = "k (r_H u - c) / (4 (u - k) (p - c)^2)"


class Support(NamedTuple):
    lower: float
    upper: float


@dataclass
class EquilibriumReport:
    model: Model
    params: MarketParams
    distributions: dict[Role, PriceDistribution]
    expected_price: dict[Role, float]
    equilibrium_profit: dict[Role, float]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "params": self.params.as_dict(),
            "roles": {
                role.value: {
                    "support": [dist.lower, dist.upper],
                    "distribution": dist.describe(),
                    "expected_price": self.expected_price[role],
                    "equilibrium_profit": self.equilibrium_profit[role],
                }
                for role, dist in self.distributions.items()
            },
            "notes": list(self.notes),
        }


def benchmark_supports(p: MarketParams) -> tuple[Support, Support]:
    low_lower = p.c + p.k / (2 * p.u - p.k) * (p.r_L * p.u - p.c)
    return (
        Support(low_lower, p.r_L * p.u),
        Support(low_lower + p.parity_gap, p.r_H * p.u),
    )


def competition_supports(p: MarketParams) -> tuple[Support, Support]:
    def bounds(r):
        return Support(p.c + p.k / (4 * p.u - 3 * p.k) * (r * p.u - p.c), r * p.u)

    return bounds(p.r_L), bounds(p.r_H)


def benchmark_distribution_low(p: MarketParams) -> InverseSquareLaw:
    """Low seller: continuous part on ``[lower, r_L u)`` and an atom at ``r_L u``."""
    check_regime(p)
    u, c, k = p.u, p.c, p.k
    low, _ = benchmark_supports(p)
    numerator = (2 * u - k) * (p.r_H * u - c) - 2 * (u - k) * (p.r_L * u - c)
    mass = p.parity_gap / (p.r_H * u - c)
    return InverseSquareLaw(
        low.lower,
        low.upper,
        scale=numerator / (2 * (u - k)),
        shift=c - p.parity_gap,
        point_masses=[(low.upper, mass)],
    )


def benchmark_distribution_high(p: MarketParams) -> InverseSquareLaw:
    check_regime(p)
    _, high = benchmark_supports(p)
    return InverseSquareLaw(
        high.lower,
        high.upper,
        scale=p.k * (p.r_L * p.u - p.c) / (2 * (p.u - p.k)),
        shift=p.parity_gap + p.c,
    )


def competition_distribution_high(p: MarketParams) -> InverseSquareLaw:
    check_regime(p)
    _, high = competition_supports(p)
    return InverseSquareLaw(
        high.lower,
        high.upper,
        scale=p.k * (p.r_H * p.u - p.c) / (4 * (p.u - p.k)),
        shift=p.c,
    )


def competition_price_low(p: MarketParams) -> DiscreteLaw:
    return DiscreteLaw.pure(p.r_L * p.u)


def equilibrium_distributions(p: MarketParams, model: Model) -> dict[Role, PriceDistribution]:
    if Model(model) is Model.BENCHMARK:
        return {Role.LOW: benchmark_distribution_low(p), Role.HIGH: benchmark_distribution_high(p)}
    return {Role.LOW: competition_price_low(p), Role.HIGH: competition_distribution_high(p)}


def expected_prices_at(u, c, r_L, r_H, k, model: Model):
    """Closed-form ``(E_L, E_H)``; ``k`` may be an array."""
    k = np.asarray(k, dtype=float)
    if Model(model) is Model.BENCHMARK:
        a = (2 * u - k) * (r_H * u - c)
        b = a - 2 * (u - k) * (r_L * u - c)
        e_low = b / (2 * (u - k)) * np.log(a / b) + c
        e_high = np.log((2 * u - k) / k) * k * (r_L * u - c) / (2 * (u - k)) + (r_H - r_L) * u + c
    else:
        e_low = np.full_like(k, r_L * u)
        e_high = c + k * (r_H * u - c) / (4 * (u - k)) * np.log((4 * u - 3 * k) / k)
    if e_low.ndim == 0:
        return float(e_low), float(e_high)
    return e_low, e_high


def expected_prices(p: MarketParams, model: Model) -> tuple[float, float]:
    check_regime(p)
    return expected_prices_at(p.u, p.c, p.r_L, p.r_H, p.k, model)


def equilibrium_profits(p: MarketParams, model: Model) -> dict[Role, float]:
    """Per-seller equilibrium profit, scaled by the number of buyers."""
    u, c, k, n = p.u, p.c, p.k, p.n
    if Model(model) is Model.BENCHMARK:
        low = k * n / (2 * u) * (p.r_L * u - c)
        high = k * n / (2 * u) * (p.r_H * u - c) + (u - k) / u * n * p.parity_gap
    else:
        low = k * n / (4 * u) * (p.r_L * u - c)
        high = k * n / (4 * u) * (p.r_H * u - c)
    return {Role.LOW: low, Role.HIGH: high}


def equilibrium(p: MarketParams, model: Model) -> EquilibriumReport:
    model = Model(model)
    dists = equilibrium_distributions(p, model)
    e_low, e_high = expected_prices(p, model)
    notes = []
    if model is Model.COMPETITION:
        notes.append(f"high-seller density: {COMPETITION_HIGH_DENSITY}")
    return EquilibriumReport(
        model=model,
        params=p,
        distributions=dists,
        expected_price={Role.LOW: e_low, Role.HIGH: e_high},
        equilibrium_profit=equilibrium_profits(p, model),
        notes=notes,
    )
