"""Tabular TD(λ) and TD-PR.

Learner states hold numpy arrays that the episode functions update in
place; each function also returns the state for chaining.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import CreditMode, Episode, LearnerConfig, MInitMode, Transition


@dataclass
class TdLambdaState:
    v: np.ndarray
    e: np.ndarray
    config: LearnerConfig


@dataclass
class TdPrState:
    v: np.ndarray
    M: np.ndarray
    e: np.ndarray
    config: LearnerConfig


def new_td_lambda(n_states: int, config: LearnerConfig) -> TdLambdaState:
    return TdLambdaState(np.zeros(n_states), np.zeros(n_states), config)


def new_td_pr(n_states: int, config: LearnerConfig) -> TdPrState:
    if config.m_init_mode is MInitMode.IDENTITY:
        M = np.eye(n_states)
    else:
        M = np.zeros((n_states, n_states))
    return TdPrState(np.zeros(n_states), M, np.zeros(n_states), config)


def td_lambda_step(state: TdLambdaState, t: Transition) -> TdLambdaState:
    """One accumulating-trace TD(λ) update; terminal successors have value 0."""
    cfg = state.config
    v, e = state.v, state.e
    e[t.from_] += 1.0
    vj = 0.0 if t.to_is_terminal else v[t.to]
    delta = t.reward + cfg.gamma * vj - v[t.from_]
    v += (cfg.alpha_v * delta) * e
    e *= cfg.gamma * cfg.lambda_
    return state


def td_lambda_episode(state: TdLambdaState, ep: Episode, backend=None) -> TdLambdaState:
    cfg = state.config
    state.e[:] = 0.0
    frm, to, rew, term = ep.arrays()
    kernels.get(backend).td_lambda_episode(
        state.v, state.e, frm, to, rew, term, cfg.alpha_v, cfg.gamma, cfg.lambda_
    )
    return state


def td0_episode(v: np.ndarray, ep: Episode, alpha: float, gamma: float, backend=None) -> np.ndarray:
    """One-step TD(0) written without traces; reference for the λ=0 case."""
    frm, to, rew, term = ep.arrays()
    kernels.get(backend).td0_episode(v, frm, to, rew, term, alpha, gamma)
    return v


def sr_td_update(M: np.ndarray, e: np.ndarray, i: int, j: int, beta: float,
                 bootstrap_discount: float, j_terminal: bool = False) -> np.ndarray:
    """Return ``M + β e (onehot(j) + κ_b M[j] - M[i])ᵀ``.

    ``e`` must already include the increment at ``i``.  A terminal ``j``
    contributes no bootstrap row.
    """
    row = kernels.py.sr_row_target(M, i, j, j_terminal, bootstrap_discount)
    return M + np.multiply.outer(beta * e, row)


def _credit(M: np.ndarray, i: int, cfg: LearnerConfig) -> np.ndarray:
    if cfg.credit_mode is CreditMode.STRICT:
        return M[:, i].copy()
    c = cfg.kappa_b * M[:, i]
    c[i] += 1.0
    return c


def td_pr_step(state: TdPrState, t: Transition, beta: float | None = None) -> TdPrState:
    """One TD-PR update; ``beta`` overrides ``config.alpha_m`` (rate schedules)."""
    cfg = state.config
    beta = cfg.alpha_m if beta is None else beta
    i, j = t.from_, t.to
    state.e[i] += 1.0
    state.M = sr_td_update(state.M, state.e, i, j, beta, cfg.kappa_b, t.to_is_terminal)
    vj = 0.0 if t.to_is_terminal else state.v[j]
    delta = t.reward + cfg.gamma * vj - state.v[i]
    state.v += (cfg.alpha_v * delta) * _credit(state.M, i, cfg)
    state.e *= cfg.gamma * cfg.lambda_
    return state


def td_pr_episode(state: TdPrState, ep: Episode, backend=None) -> TdPrState:
    """Run TD-PR over one episode; the trace is reset first.

    The SR update precedes the value update within a step, and the value
    update reads column ``i`` of the freshly updated matrix.
    """
    cfg = state.config
    state.e[:] = 0.0
    frm, to, rew, term = ep.arrays()
    kernels.get(backend).td_pr_episode(
        state.v, state.M, state.e, frm, to, rew, term,
        cfg.alpha_v, cfg.alpha_m, cfg.gamma, cfg.lambda_, cfg.kappa_b,
        cfg.credit_mode is CreditMode.INCLUSIVE,
    )
    return state


def credit_vector(state: TdPrState, s: int) -> np.ndarray:
    """Column ``s`` of the learned matrix (copy)."""
    return state.M[:, s].copy()


def applied_credit(state: TdPrState, s: int) -> np.ndarray:
    """The vector that scales δ when leaving ``s`` under the state's credit mode."""
    return _credit(state.M, s, state.config)
