"""Combinatorial multi-armed bandits with partial user feedback.

Single-play policies build super-arms slot by slot; a feedback strategy
(Bandit, Semi-Bandit or one of the three Partial Bandit with Semi-Bandit
settings) decides which hidden rewards the policy learns from.
"""
from .combinatorial import RoundOutcome, build_super_arm, overall_reward
from .core import (
    EmptyCandidateError,
    Observation,
    SuperArm,
    argmax_tiebreak,
    derive_rng,
    make_rng,
    sample_patience,
)
from .environments import (
    ClassificationReplayEnv,
    DatasetError,
    Interaction,
    RatingsReplayEnv,
    SyntheticBernoulliEnv,
    load_classification_table,
    load_ratings_table,
    oracle_success_probability,
)
from .feedback import Strategy, apply_strategy, select_partial_subset
from .policies import (
    POLICIES,
    UCB1,
    UCB2,
    DimensionError,
    EpsilonGreedy,
    LinTS,
    LinUCB,
    ThompsonSampling,
    make_policy,
)

__version__ = "0.1.0"
