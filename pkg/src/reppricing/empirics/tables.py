"""Per-category result tables of the empirical pipeline."""

from __future__ import annotations

from .records import OfferingRecord
from .stats import (
    EmptyGroup,
    InsufficientData,
    RankDeficient,
    median_split_ttest,
    regress,
    standardize,
    summarize,
)

TABLE1 = ("category", "products", "offerings", "price_max", "price_min", "std_price_max", "std_price_min")
TABLE2 = ("category", "rating_mean", "rating_median", "rating_sd", "rating_max", "rating_min",
          "above_450", "pct_above_450", "above_400", "pct_above_400")
TABLE3 = ("category", "group", "mean", "sd", "n", "positive", "negative", "zero",
          "t", "df", "p_value", "stars", "direction")
TABLE4 = ("category", "term", "coef", "se", "t", "p_value", "stars", "n")


def analysis_tables(records: list[OfferingRecord]) -> tuple[dict, dict]:
    """Summaries, median-split tests and regressions for every category.

    Returns a JSON-ready payload and ``{table name: (header, rows)}``.
    Categories where a test cannot run are reported under ``skipped``.
    """
    summaries = summarize(records)
    std = standardize(records)
    tests, regressions, skipped = [], [], []
    for category in sorted({r.category for r in records}):
        try:
            tests.append(median_split_ttest(std.records, category))
        except (EmptyGroup, InsufficientData) as exc:
            skipped.append({"category": category, "analysis": "ttest", "reason": str(exc)})
        try:
            regressions.append(regress(std.records, category))
        except (RankDeficient, InsufficientData) as exc:
            skipped.append({"category": category, "analysis": "regression", "reason": str(exc)})

    table1 = [tuple(getattr(s, c) for c in TABLE1) for s in summaries]
    table2 = [tuple(s.to_dict()[c] for c in TABLE2) for s in summaries]
    table3 = []
    for t in tests:
        for group in ("high", "low"):
            counts = getattr(t, f"counts_{group}")
            table3.append((t.category, group, getattr(t, f"mean_{group}"), getattr(t, f"sd_{group}"),
                           getattr(t, f"n_{group}"), counts[">0"], counts["<0"], counts["=0"],
                           t.t, t.df, t.p_value, t.stars, t.direction))
    table4 = []
    for r in regressions:
        for term in r.to_dict()["terms"]:
            table4.append((r.category, term["name"], term["coef"], term["se"], term["t"], term["p"],
                           term["stars"], r.n))

    payload = {
        "standardize_excluded": [
            {"category": c, "product": p, "reason": reason} for (c, p), reason in std.excluded.items()
        ],
        "summary": [s.to_dict() for s in summaries],
        "ttests": [t.to_dict() for t in tests],
        "regressions": [r.to_dict() for r in regressions],
        "skipped": skipped,
    }
    tables = {
        "table1_prices": (TABLE1, table1),
        "table2_ratings": (TABLE2, table2),
        "table3_median_split": (TABLE3, table3),
        "table4_regression": (TABLE4, table4),
    }
    return payload, tables
