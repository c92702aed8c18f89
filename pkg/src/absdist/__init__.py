"""Abstract interpretation of logic programs and distances between analyses."""

from absdist.analyzer import AnalysisError, analyze
from absdist.graph import AndOrGraph, node_table
from absdist.parser import parse_program
from absdist.treemetrics import flat_distance, intersect, top_distance, translate_base, tree_distance

__all__ = [
    "AnalysisError",
    "AndOrGraph",
    "analyze",
    "flat_distance",
    "intersect",
    "node_table",
    "parse_program",
    "top_distance",
    "translate_base",
    "tree_distance",
]

__version__ = "0.1.0"
