"""Metrics, the ADF stationarity test and result records."""

from .adf import AdfResult, adf_test, pvalue_cdf, schwert_lags, segment_pvalues
from .metrics import achievable_se, cosine_similarity, mean_nmse, nmse, to_db
from .report import CSV_COLUMNS, MetricsReport, reports_from_csv, reports_to_csv, reports_to_json

__all__ = [
    "AdfResult",
    "adf_test",
    "pvalue_cdf",
    "schwert_lags",
    "segment_pvalues",
    "achievable_se",
    "cosine_similarity",
    "mean_nmse",
    "nmse",
    "to_db",
    "CSV_COLUMNS",
    "MetricsReport",
    "reports_from_csv",
    "reports_to_csv",
    "reports_to_json",
]
