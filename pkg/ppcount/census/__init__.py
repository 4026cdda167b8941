from ppcount.census.census import (
    Anomaly,
    Census,
    CensusRow,
    census_deg1,
    census_deg2,
    count_label_deg1,
)
from ppcount.census.counting import (
    count_NQ1_direct,
    fiber_size_report,
    projective_images,
    verify_gcd_lemma,
)
from ppcount.census.enumerate import count_rationals, enum_rationals
from ppcount.census.report import CompareRow, compare_report

__all__ = [
    "Anomaly",
    "Census",
    "CensusRow",
    "CompareRow",
    "census_deg1",
    "census_deg2",
    "compare_report",
    "count_NQ1_direct",
    "count_label_deg1",
    "count_rationals",
    "enum_rationals",
    "fiber_size_report",
    "projective_images",
    "verify_gcd_lemma",
]
