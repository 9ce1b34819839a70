"""Homogenisation of raw offerings before analysis.

Rules, applied in order:

1. ``no_rating``  drop sellers without a rating
2. ``used``       drop used or refurbished offerings
3. ``official``   drop offerings of official sellers
4. ``outlier``    drop prices more than ``outlier_sd`` sample SDs from the
                  product mean (single pass, statistics taken before removal)
5. ``keyword``    for products with a configured keyword, drop titled
                  offerings whose title lacks it
6. ``variant``    merge rows sharing (product, seller, variant_group) into one
                  record priced at their mean, rounded half-up
"""

from __future__ import annotations

import dataclasses
import math
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping

import numpy as np

from .records import OfferingRecord


@dataclass
class CleanConfig:
    outlier_sd: float = 5.0
    variant_keywords: Mapping[str, str] = field(default_factory=dict)  # product -> keyword
    merge_variants: bool = True


@dataclass(frozen=True)
class AuditEntry:
    rule: str
    row: int
    reason: str


def round_half_up(value: float) -> int:
    return int(Decimal(repr(value)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _flag_rule(records, flag, rule, reason, audit):
    kept = []
    for r in records:
        if flag in r.flags:
            audit.append(AuditEntry(rule, r.row, reason))
        else:
            kept.append(r)
    return kept


def _outlier_rule(records, limit, audit):
    groups = defaultdict(list)
    for r in records:
        groups[r.group_key].append(r.price)
    stats = {}
    for key, prices in groups.items():
        if len(prices) >= 2:
            stats[key] = (float(np.mean(prices)), float(np.std(prices, ddof=1)))
    kept = []
    for r in records:
        if r.group_key in stats:
            mean, sd = stats[r.group_key]
            if abs(r.price - mean) > limit * sd:
                audit.append(AuditEntry("outlier", r.row,
                                        f"price {r.price:g} is {abs(r.price - mean) / sd:.2f} SD from mean {mean:.6g}"))
                continue
        kept.append(r)
    return kept


def _keyword_rule(records, keywords, audit):
    lowered = {product: word.lower() for product, word in keywords.items()}
    kept = []
    for r in records:
        word = lowered.get(r.product)
        if word and r.title and word not in r.title.lower():
            audit.append(AuditEntry("keyword", r.row, f"title lacks configuration keyword {keywords[r.product]!r}"))
        else:
            kept.append(r)
    return kept


def _variant_rule(records, audit):
    groups = defaultdict(list)
    order = []
    for r in records:
        if r.variant_group is None:
            order.append(r)
            continue
        key = (r.category, r.product, r.seller_id, r.variant_group)
        if key not in groups:
            order.append(key)
        groups[key].append(r)
    kept = []
    for item in order:
        if isinstance(item, OfferingRecord):
            kept.append(item)
            continue
        members = groups[item]
        first = members[0]
        if len(members) == 1 and float(first.price).is_integer():
            kept.append(first)
            continue
        price = float(round_half_up(math.fsum(m.price for m in members) / len(members)))
        kept.append(dataclasses.replace(first, price=price))
        for m in members[1:]:
            audit.append(AuditEntry("variant", m.row, f"merged into row {first.row} at price {price:g}"))
    return kept


def clean(records: list[OfferingRecord], config: CleanConfig | None = None):
    """Apply the cleaning rules. Returns ``(kept, audit)``.

    Every input row ends up either in ``kept`` or in exactly one audit entry;
    a merged variant group keeps the row index of its first member.
    """
    config = config or CleanConfig()
    audit: list[AuditEntry] = []
    kept = _flag_rule(records, "no_rating", "no_rating", "seller has no rating", audit)
    kept = _flag_rule(kept, "used", "used", "used or refurbished offering", audit)
    kept = _flag_rule(kept, "official", "official", "official seller", audit)
    kept = _outlier_rule(kept, config.outlier_sd, audit)
    if config.variant_keywords:
        kept = _keyword_rule(kept, config.variant_keywords, audit)
    if config.merge_variants:
        kept = _variant_rule(kept, audit)
    return kept, audit
