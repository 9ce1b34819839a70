"""Marketplace-data pipeline: ingest, clean, standardise, regress, test."""

from .cleaning import AuditEntry, CleanConfig, clean, round_half_up
from .records import IngestResult, MalformedRow, MissingColumn, OfferingRecord, ingest
from .stats import (
    CategorySummary,
    DegenerateGroup,
    EmptyGroup,
    InsufficientData,
    RankDeficient,
    RegressionResult,
    TTestResult,
    median_split_ttest,
    ols,
    regress,
    significance_stars,
    standardize,
    summarize,
    welch_t,
    zscores,
)

__all__ = [
    "AuditEntry", "CleanConfig", "clean", "round_half_up",
    "IngestResult", "MalformedRow", "MissingColumn", "OfferingRecord", "ingest",
    "CategorySummary", "DegenerateGroup", "EmptyGroup", "InsufficientData", "RankDeficient",
    "RegressionResult", "TTestResult", "median_split_ttest", "ols", "regress",
    "significance_stars", "standardize", "summarize", "welch_t", "zscores",
]
