"""Matched-molecular-pair rule mining and candidate enumeration."""

from .filters import FilterThresholds, filter_candidates, load_property_table
from .mmp import (
    Candidate,
    TransformRule,
    apply_rules,
    extract_rules,
    load_rules,
    save_rules,
    single_cuts,
)

__all__ = [
    "Candidate", "FilterThresholds", "TransformRule", "apply_rules", "extract_rules",
    "filter_candidates", "load_property_table", "load_rules", "save_rules", "single_cuts",
]
