"""Dynamic structural similarity on graphs and SCAN/ISCAN community detection."""

__version__ = "0.1.0"

from .errors import ContractError, DomainError, DssGraphError, GraphFormatError
from .graph import Graph, common_closed_neighbors, load_edge_list, read_edge_list
from .metrics import (
    Partition,
    PartitionScore,
    clustering_to_partition,
    evaluate,
    modularity,
    nmi,
    size_distribution_mse,
)
from .scan import HUB, OUTLIER, Clustering, ScanParams, epsilon_neighborhood, iscan, scan, scan_cluster
from .similarity import (
    DssTrace,
    EdgeSimilarity,
    dss_init,
    dss_run,
    dss_sweep,
    edge_dynamics_counts,
    local_similarities,
    local_similarity,
    normalize,
)
from .synth import PlantedSpec, generate_planted
