"""Market parameters for the two-reputation pricing game.

A market has buyers who value the product at ``u`` and sellers with unit cost
``c``. A seller with reputation ``r`` offers expected utility ``r*u - p`` at
price ``p``. A fraction ``k/u`` of the ``n`` buyers is uninformed and picks a
seller at random; the rest pay the search cost ``k`` and buy from the seller
with the highest expected utility.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

PARAM_KEYS = ("u", "c", "r_L", "r_H", "k", "n")


class ParameterError(ValueError):
    """Raised when raw parameters violate a market invariant."""


class ReputationOrder(ParameterError):
    pass


class SearchCostRange(ParameterError):
    pass


class UnprofitableMarket(ParameterError):
    pass


class NonPositive(ParameterError):
    pass


class DegenerateRegime(ParameterError):
    """Parameters are valid but too close to a boundary for stable closed forms."""


class Model(str, enum.Enum):
    BENCHMARK = "benchmark"
    COMPETITION = "competition"

    @property
    def sellers_per_role(self) -> int:
        return 1 if self is Model.BENCHMARK else 2

    @property
    def seller_count(self) -> int:
        return 2 * self.sellers_per_role


class Role(str, enum.Enum):
    LOW = "L"
    HIGH = "H"


@dataclass(frozen=True)
class MarketParams:
    """Validated model parameters. Construct through :func:`validate_params`."""

    u: float
    c: float
    r_L: float
    r_H: float
    k: float
    n: int

    def __post_init__(self):
        _check(self.u, self.c, self.r_L, self.r_H, self.k, self.n)

    def reputation(self, role: Role) -> float:
        return self.r_L if Role(role) is Role.LOW else self.r_H

    def top_price(self, role: Role) -> float:
        """Highest price at which a buyer still gets nonnegative utility."""
        return self.reputation(role) * self.u

    @property
    def parity_gap(self) -> float:
        """Price difference ``(r_H - r_L) u`` that equalises expected utilities."""
        return (self.r_H - self.r_L) * self.u

    def with_k(self, k: float) -> "MarketParams":
        return dataclasses.replace(self, k=float(k))

    def with_n(self, n: int) -> "MarketParams":
        return dataclasses.replace(self, n=n)

    def as_dict(self) -> dict:
        return {key: getattr(self, key) for key in PARAM_KEYS}


def _check(u, c, r_L, r_H, k, n):
    for name, value in (("u", u), ("c", c), ("r_L", r_L), ("r_H", r_H), ("k", k)):
        if not math.isfinite(value):
            raise NonPositive(f"{name} must be finite, got {value!r}")
    if u <= 0:
        raise NonPositive(f"u must be > 0, got {u}")
    if c < 0:
        raise NonPositive(f"c must be >= 0, got {c}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise NonPositive(f"n must be an integer >= 1, got {n!r}")
    if not (0 < r_L < r_H < 1):
        raise ReputationOrder(f"need 0 < r_L < r_H < 1, got r_L={r_L}, r_H={r_H}")
    if not (0 < k < u):
        raise SearchCostRange(f"need 0 < k < u, got k={k}, u={u}")
    if r_L * u <= c:
        raise UnprofitableMarket(f"r_L*u = {r_L * u} must exceed c = {c}")


def _as_count(value) -> int:
    if isinstance(value, bool):
        raise NonPositive(f"n must be an integer >= 1, got {value!r}")
    if isinstance(value, int):
        return value
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise NonPositive(f"n must be an integer >= 1, got {value!r}") from None
    if not as_float.is_integer():
        raise NonPositive(f"n must be an integer >= 1, got {value!r}")
    return int(as_float)


def validate_params(raw) -> MarketParams:
    """Build a :class:`MarketParams` from a mapping, a 6-sequence or an instance.

    Sequences are read in the order ``(u, c, r_L, r_H, k, n)``. Raises a
    :class:`ParameterError` subclass naming the violated constraint.
    """
    if isinstance(raw, MarketParams):
        return MarketParams(**raw.as_dict())
    if isinstance(raw, Mapping):
        missing = [key for key in PARAM_KEYS if key not in raw]
        if missing:
            raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
        values = [raw[key] for key in PARAM_KEYS]
    elif isinstance(raw, Sequence) and not isinstance(raw, str):
        if len(raw) != 6:
            raise ParameterError(f"expected 6 values {PARAM_KEYS}, got {len(raw)}")
        values = list(raw)
    else:
        raise ParameterError(f"cannot read parameters from {type(raw).__name__}")
    try:
        u, c, r_L, r_H, k = (float(v) for v in values[:5])
    except (TypeError, ValueError) as exc:
        raise NonPositive(f"non-numeric parameter: {exc}") from None
    return MarketParams(u=u, c=c, r_L=r_L, r_H=r_H, k=k, n=_as_count(values[5]))


def uninformed_fraction(params: MarketParams) -> float:
    return params.k / params.u


def informed_fraction(params: MarketParams) -> float:
    return 1.0 - params.k / params.u


def check_regime(params: MarketParams, eps: float = 1e-12) -> None:
    """Reject parameters whose closed forms are numerically singular."""
    if params.r_H - params.r_L < eps:
        raise DegenerateRegime(f"r_H - r_L = {params.r_H - params.r_L:.3g} < {eps}")
    if params.u - params.k < eps:
        raise DegenerateRegime(f"u - k = {params.u - params.k:.3g} < {eps}")


# Parameter sets used for the figures: u=2, c=1, r_H=0.9, r_L=0.8.
FIGURE_PARAMS = {
    "fig1a": (Model.BENCHMARK, dict(u=2.0, c=1.0, r_L=0.8, r_H=0.9, k=1.4, n=100)),
    "fig1b": (Model.BENCHMARK, dict(u=2.0, c=1.0, r_L=0.8, r_H=0.9, k=0.6, n=100)),
    "fig2a": (Model.COMPETITION, dict(u=2.0, c=1.0, r_L=0.8, r_H=0.9, k=1.4, n=100)),
    "fig2b": (Model.COMPETITION, dict(u=2.0, c=1.0, r_L=0.8, r_H=0.9, k=0.6, n=100)),
}


def figure_params(name: str) -> tuple[Model, MarketParams]:
    model, raw = FIGURE_PARAMS[name]
    return model, validate_params(raw)
