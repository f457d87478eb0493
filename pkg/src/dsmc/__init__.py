"""Design-structure-matrix clustering for recovering architecture module views."""

from .baselines import KmeansParams, edge_betweenness_cluster, kmeans_jaccard
from .clustering import ClusterRunResult, DsmcParams, dsmc_cluster
from .dsm import CostState, Dsm, bid_auction, build_dsm, calc_coord_cost, update_tcc
from .graph_io import (
    DesignGraph,
    GraphParseError,
    GraphValidationError,
    PlantedInstance,
    authoritative_partition,
    gen_planted,
    parse_graph,
    parse_partition,
    write_partition,
)
from .metrics import MetricSeries, above_all, above_pair, mojo, mojo_brute_force, mojo_sim, ned
from .partition import Partition

__version__ = "0.1.0"

__all__ = [
    "ClusterRunResult", "CostState", "DesignGraph", "Dsm", "DsmcParams", "GraphParseError",
    "GraphValidationError", "KmeansParams", "MetricSeries", "Partition", "PlantedInstance",
    "above_all", "above_pair", "authoritative_partition", "bid_auction", "build_dsm",
    "calc_coord_cost", "dsmc_cluster", "edge_betweenness_cluster", "gen_planted",
    "kmeans_jaccard", "mojo", "mojo_brute_force", "mojo_sim", "ned", "parse_graph",
    "parse_partition", "update_tcc", "write_partition",
]
