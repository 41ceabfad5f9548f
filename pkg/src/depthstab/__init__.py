"""Depth stability of powers of edge ideals: depth S/I^k, dstab, astab,
analytic spread and the linear relation graph, computed exactly."""

__version__ = "0.1.0"

from .errors import (
    DepthStabError,
    GraphParseError,
    PreconditionError,
    ResourceLimitError,
    ValidationError,
)
from .graphs import Graph, broom, enumerate_connected_graphs, enumerate_trees, graph_metrics, parse_graph
from .homology import BettiTable, betti_table, depth, socle_depth_zero_oracle
from .ideals import MonomialIdeal, edge_ideal, minimalize, parse_ideal, power, substitute
from .invariants import (
    analytic_spread,
    associated_primes,
    astab,
    depth_sequence,
    linear_relation_graph,
    verify_paper,
)
from .linalg import GF2, QQ, Field
