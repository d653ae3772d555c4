"""Predecessor-representation credit assignment for TD policy evaluation.

Tabular TD(λ) and TD-PR, linear TD-PF and ET(λ, η), exact dynamic-programming
oracles for every learned quantity, and a small experiment harness.
"""
from .core import (CreditMode, Episode, LearnerConfig, MInitMode, RngStream,
                   SrDiscountMode, Transition, generate_episode, generate_episodes, make_rng)
from .envs import (FeatureMap, TabularMdp, chain_mdp, one_hot_features, path_mdp,
                   plinko_mdp, row_col_features)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CreditMode", "Episode", "FeatureMap", "LearnerConfig", "MInitMode",
    "RngStream", "SrDiscountMode", "TabularMdp", "Transition", "chain_mdp",
    "generate_episode", "generate_episodes", "make_rng", "one_hot_features", "path_mdp",
    "plinko_mdp", "row_col_features",
]
