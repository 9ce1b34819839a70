"""Offering records and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

REQUIRED_COLUMNS = ("category", "product", "seller_id", "rating", "sales", "comments", "price")
OPTIONAL_COLUMNS = ("flags", "variant_group", "title")
KNOWN_FLAGS = frozenset({"used", "official", "no_rating"})


class MissingColumn(ValueError):
    pass


@dataclass(frozen=True)
class MalformedRow:
    row: int  # 1-based data row index (header excluded)
    column: str
    value: str
    reason: str


@dataclass(frozen=True)
class OfferingRecord:
    category: str
    product: str
    seller_id: str
    rating: float | None
    sales: int
    comments: int
    price: float
    flags: frozenset = frozenset()
    variant_group: str | None = None
    title: str = ""
    row: int = 0
    std_price: float | None = None

    def __post_init__(self):
        if not self.price > 0:
            raise ValueError(f"price must be positive, got {self.price}")
        if self.rating is None and "no_rating" not in self.flags:
            raise ValueError("rating missing without the no_rating flag")

    @property
    def group_key(self) -> tuple[str, str]:
        return self.category, self.product


@dataclass
class IngestResult:
    records: list[OfferingRecord]
    diagnostics: list[MalformedRow] = field(default_factory=list)


def _parse_count(text: str) -> int:
    value = float(text)
    if not value.is_integer() or value < 0:
        raise ValueError("expected a nonnegative integer")
    return int(value)


def _parse_row(index: int, raw: dict) -> tuple[OfferingRecord | None, list[MalformedRow]]:
    problems = []

    def bad(column, reason):
        problems.append(MalformedRow(index, column, raw.get(column) or "", reason))

    flags = frozenset(t.strip() for t in (raw.get("flags") or "").split(";") if t.strip())
    unknown = flags - KNOWN_FLAGS
    if unknown:
        bad("flags", f"unknown flag(s) {sorted(unknown)}")

    rating = None
    rating_text = (raw.get("rating") or "").strip()
    if rating_text:
        try:
            rating = float(rating_text)
            if not (1.0 <= rating <= 5.0):
                bad("rating", "rating outside [1, 5]")
        except ValueError:
            bad("rating", "not a number")
    else:
        # an empty rating is a seller without a rating
        flags = flags | {"no_rating"}

    counts = {}
    for column in ("sales", "comments"):
        try:
            counts[column] = _parse_count((raw.get(column) or "").strip())
        except ValueError:
            bad(column, "not a nonnegative integer")

    price = math.nan
    try:
        price = float((raw.get("price") or "").strip())
        if not (price > 0 and math.isfinite(price)):
            bad("price", "price must be positive")
    except ValueError:
        bad("price", "not a number")

    if problems:
        return None, problems
    record = OfferingRecord(
        category=raw["category"].strip(),
        product=raw["product"].strip(),
        seller_id=raw["seller_id"].strip(),
        rating=rating,
        sales=counts["sales"],
        comments=counts["comments"],
        price=price,
        flags=flags,
        variant_group=(raw.get("variant_group") or "").strip() or None,
        title=(raw.get("title") or "").strip(),
        row=index,
    )
    return record, []


def ingest(path: str | Path) -> IngestResult:
    """Read offerings from CSV. Malformed rows are reported and skipped."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise MissingColumn(f"missing column(s): {', '.join(missing)}")
        reader.fieldnames = header
        result = IngestResult([])
        for index, raw in enumerate(reader, start=1):
            record, problems = _parse_row(index, raw)
            if record is not None:
                result.records.append(record)
            result.diagnostics.extend(problems)
    return result
