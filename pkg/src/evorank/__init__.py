"""Evolutionary ranking of strategies and agents in K-player meta-games.

The pipeline: represent the game (:mod:`evorank.metagame`), build the
finite-population Markov chain over monomorphic states
(:mod:`evorank.evodyn`), solve for its unique stationary distribution
(:mod:`evorank.stationary`), and read rankings off the ordered masses
(:mod:`evorank.alpharank`).  The response graph's sink components
(:mod:`evorank.mcc`) describe the infinite-intensity limit, while replicator
dynamics (:mod:`evorank.replicator`) and stochastic simulation
(:mod:`evorank.simulator`) provide independent cross-checks.
"""

from .alpharank import (
    RankingEntry,
    RankingResult,
    SweepResult,
    alpha_rank,
    alpha_sweep,
    converged_alpha,
    ranking_from_distribution,
    sweep_to_csv,
)
from .errors import (
    EpsilonOutOfRange,
    EvoRankError,
    IndexOutOfRange,
    NoConvergence,
    NonFinitePayoff,
    NotSquare,
    OutOfRangeEntry,
    ReducibleChain,
    ShapeMismatch,
    SizeMismatch,
    StepUnstable,
    SymmetryViolation,
)
from .evodyn import (
    EvoParams,
    PairwiseContest,
    SparseMarkovChain,
    chain_to_coo_csv,
    fermi_copy_prob,
    fitness,
    fixation_probability,
    sparsity,
    transition_matrix,
)
from .mcc import (
    CorrespondenceReport,
    MccSet,
    ResponseGraph,
    check_limit_correspondence,
    is_deviation_stable,
    mcc_chains,
    response_graph,
    response_graph_to_dot,
    sink_sccs,
)
from .metagame import (
    MetaGame,
    affine_transform,
    canonical_json,
    from_winrate_matrix,
    index_profile,
    load_game,
    load_winrate_csv,
    neighbors,
    new_metagame,
    payoff,
    profile_index,
    save_game,
)
from .replicator import (
    Trajectory,
    edge_mean_dynamics,
    integrate,
    replicator_derivative,
    trajectory_to_csv,
)
from .simulator import (
    FixationEstimate,
    OccupancyReport,
    SimConfig,
    empirical_fixation,
    simulate,
)
from .stationary import (
    StationaryDistribution,
    distribution_to_csv,
    is_irreducible,
    stationary_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "EvoParams",
    "EvoRankError",
    "EpsilonOutOfRange",
    "FixationEstimate",
    "IndexOutOfRange",
    "MccSet",
    "MetaGame",
    "NoConvergence",
    "NonFinitePayoff",
    "NotSquare",
    "OccupancyReport",
    "OutOfRangeEntry",
    "PairwiseContest",
    "RankingEntry",
    "RankingResult",
    "ReducibleChain",
    "ResponseGraph",
    "ShapeMismatch",
    "SimConfig",
    "SizeMismatch",
    "SparseMarkovChain",
    "StationaryDistribution",
    "StepUnstable",
    "SweepResult",
    "SymmetryViolation",
    "Trajectory",
    "CorrespondenceReport",
    "affine_transform",
    "alpha_rank",
    "alpha_sweep",
    "canonical_json",
    "chain_to_coo_csv",
    "check_limit_correspondence",
    "converged_alpha",
    "distribution_to_csv",
    "edge_mean_dynamics",
    "empirical_fixation",
    "fermi_copy_prob",
    "fitness",
    "fixation_probability",
    "from_winrate_matrix",
    "index_profile",
    "integrate",
    "is_deviation_stable",
    "is_irreducible",
    "load_game",
    "load_winrate_csv",
    "mcc_chains",
    "neighbors",
    "new_metagame",
    "payoff",
    "profile_index",
    "ranking_from_distribution",
    "replicator_derivative",
    "response_graph",
    "response_graph_to_dot",
    "save_game",
    "simulate",
    "sink_sccs",
    "sparsity",
    "stationary_distribution",
    "sweep_to_csv",
    "trajectory_to_csv",
    "transition_matrix",
]
