"""Exact structure, approximation schemes and hardness gadgets for graphs of highway dimension 1."""
from .graph import DistMatrix, Graph, GraphFormatError, all_pairs, metric_preprocess, parse_graph
from .spcover import Hd1Certificate, Hd1Witness, verify_hd1

__all__ = [
    "DistMatrix",
    "Graph",
    "GraphFormatError",
    "Hd1Certificate",
    "Hd1Witness",
    "all_pairs",
    "metric_preprocess",
    "parse_graph",
    "verify_hd1",
]
__version__ = "0.1.0"
