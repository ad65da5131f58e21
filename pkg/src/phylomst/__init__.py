"""MST-based ancestral maximum-likelihood and phylogeography inference
under time-reversible Markov models."""

__version__ = "0.1.0"

from .cost_oracle import (  # noqa: F401
    CostMatrix,
    CostOracle,
    EdgeCost,
    GeoCostModel,
    Sample,
    build_cost_matrix,
)
from .errors import GeoError, ModelError, ParseError, PhylomstError  # noqa: F401
from .geo_rw import (  # noqa: F401
    GeoBounds,
    GeoGraph,
    SpectralInfo,
    cutoff_time,
    derive_bounds,
    mixing_lambda,
    neg_log_sup_rw,
    rw_stationary,
    sup_rw_additive,
    sup_rw_multiplicative,
)
from .steiner_mst import (  # noqa: F401
    PhyloTree,
    kruskal_mst,
    root_tree,
    spider_quotient,
    tree_cost_directed,
    tree_cost_symmetric,
)
from .synth import TruthNode, TruthTree, simulate, write_truth  # noqa: F401
from .substitution import (  # noqa: F401
    GTR,
    JC69,
    BinarySymmetric,
    SiteModel,
    count_matrix,
    stationary,
    sup_seq_loglik,
    transition_prob,
)
