"""Shapley values and marginal-contribution variance for cooperative games.

Exact engines (dense enumeration plus closed-form fast paths), a seeded
Monte Carlo estimator over random orderings, property suites for the proven
facts about the variance measure, and a CLI front end.
"""

from coalition_var._backend import BACKEND, HAVE_COMPILED
from coalition_var.analysis import (
    MixtureParams,
    SignificanceRow,
    asymptotic_sweep,
    chebyshev_bound,
    conjecture_probe,
    mixture_variance,
    normal_deviation_band,
    run_property_suite,
    significance_table,
)
from coalition_var.exact import (
    PlayerProfile,
    all_profiles,
    average_uncertainty,
    marginal_covariance,
    ordering_marginal_sum,
    permutation_oracle,
    profile,
    symmetric_profile,
    two_type_profile,
)
from coalition_var.games import (
    AdditiveGame,
    Game,
    SymmetricGame,
    TabularGame,
    TwoTypeGame,
    TypeTag,
    add_games,
    generate_additive,
    generate_majority,
    generate_symmetric,
    generate_two_type,
    is_superadditive,
    is_symmetric_convex,
    make_tabular,
    mask_of,
    members_of,
    mix_games,
    scale_game,
    sqrt_product_worth,
    to_tabular,
)
from coalition_var.sampling import (
    EstimateReport,
    SampleStats,
    estimate,
    estimate_all,
    estimate_parallel,
    sample_ordering,
)
from coalition_var.weights import BANZHAF, SHAPLEY, Weighting, banzhaf_weight, shapley_weight

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "BANZHAF",
    "SHAPLEY",
    "AdditiveGame",
    "EstimateReport",
    "Game",
    "MixtureParams",
    "PlayerProfile",
    "SampleStats",
    "SignificanceRow",
    "SymmetricGame",
    "TabularGame",
    "TwoTypeGame",
    "TypeTag",
    "Weighting",
    "add_games",
    "all_profiles",
    "asymptotic_sweep",
    "average_uncertainty",
    "banzhaf_weight",
    "chebyshev_bound",
    "conjecture_probe",
    "estimate",
    "estimate_all",
    "estimate_parallel",
    "generate_additive",
    "generate_majority",
    "generate_symmetric",
    "generate_two_type",
    "is_superadditive",
    "is_symmetric_convex",
    "make_tabular",
    "marginal_covariance",
    "mask_of",
    "members_of",
    "mix_games",
    "mixture_variance",
    "normal_deviation_band",
    "ordering_marginal_sum",
    "permutation_oracle",
    "profile",
    "run_property_suite",
    "sample_ordering",
    "scale_game",
    "significance_table",
    "sqrt_product_worth",
    "symmetric_profile",
    "to_tabular",
    "two_type_profile",
]
