"""Linear value prediction: TD(λ), predecessor features (TD-PF) and ET(λ, η).

With a linear value function the gradient ``∇_w v_w(s)`` is just ``x(s)``,
so every target below is written in terms of feature vectors.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .core import Episode, LearnerConfig, Transition
from .envs import FeatureMap


def linear_value(w: np.ndarray, x: np.ndarray) -> float:
    if w.shape != x.shape:
        raise ValueError(f"dimension mismatch: w{w.shape} vs x{x.shape}")
    return float(w @ x)


def values(w: np.ndarray, fmap: FeatureMap, terminal_mask: np.ndarray) -> np.ndarray:
    """State values ``x(s)·w`` with terminal states pinned to zero."""
    v = fmap.table @ w
    v[terminal_mask] = 0.0
    return v


def td_error(w: np.ndarray, t: Transition, fmap: FeatureMap, gamma: float) -> float:
    vj = 0.0 if t.to_is_terminal else linear_value(w, fmap(t.to))
    return t.reward + gamma * vj - linear_value(w, fmap(t.from_))


def pf_target(x_curr, z_prev=None, e_prev=None, *, gamma: float, lambda_: float,
              eta: float = 0.0, initial: bool = False) -> np.ndarray:
    """Target for the expected trace at the current state.

    ``x`` at an episode-initial state, else ``x + λγ((1-η) z_prev + η e_prev)``.
    ``e_prev`` may be omitted when ``eta == 0``.
    """
    x_curr = np.asarray(x_curr, dtype=np.float64)
    if initial:
        if z_prev is not None or e_prev is not None:
            raise ValueError("initial state takes no predecessor estimate")
        return x_curr.copy()
    if z_prev is None or (e_prev is None and eta != 0.0):
        raise ValueError("non-initial state needs z_prev (and e_prev when eta > 0)")
    z_prev = np.asarray(z_prev, dtype=np.float64)
    mixed = z_prev if e_prev is None else (1.0 - eta) * z_prev + eta * np.asarray(e_prev)
    return x_curr + (lambda_ * gamma) * mixed


def psi_update(psi: np.ndarray, x: np.ndarray, y: np.ndarray, beta: float) -> np.ndarray:
    """One gradient step on ``½‖Ψx - y‖²`` at fixed ``y``: ``Ψ - β(Ψx - y)xᵀ``."""
    if psi.shape != (len(y), len(x)):
        raise ValueError("psi, x and y dimensions disagree")
    return psi - np.multiply.outer(beta * (psi @ x - y), x)


def _run_pf(w, psi, ep, fmap, config, mix, backend):
    frm, to, rew, term = ep.arrays()
    kernels.get(backend).pf_episode(
        w, psi, fmap.table, ep.initial, frm, to, rew, term,
        config.alpha_v, config.alpha_m, config.gamma, config.lambda_, config.eta, mix,
    )
    return w, psi


def td_pf_episode(w: np.ndarray, psi: np.ndarray, ep: Episode, fmap: FeatureMap,
                  config: LearnerConfig, backend=None):
    """Linear TD-PF over one episode; ``w`` and ``psi`` are updated in place.

    Ψ is first pulled toward ``x(S_0)``.  Each transition then computes
    ``z(S_t) = Ψx(S_t)`` once, moves Ψ at ``x(S_{t+1})`` toward
    ``x(S_{t+1}) + λγ z(S_t)`` and finally applies ``w += αδ z(S_t)``.
    ``config.eta`` is ignored.
    """
    return _run_pf(w, psi, ep, fmap, config, False, backend)


def et_episode(w: np.ndarray, psi: np.ndarray, ep: Episode, fmap: FeatureMap,
               config: LearnerConfig, backend=None):
    """ET(λ, η): TD-PF with the Ψ target mixed toward the sampled trace by ``eta``."""
    return _run_pf(w, psi, ep, fmap, config, True, backend)


def linear_td_lambda_episode(w: np.ndarray, ep: Episode, fmap: FeatureMap,
                             config: LearnerConfig, backend=None) -> np.ndarray:
    frm, to, rew, term = ep.arrays()
    kernels.get(backend).linear_td_lambda_episode(
        w, fmap.table, frm, to, rew, term, config.alpha_v, config.gamma, config.lambda_
    )
    return w


def td_pf_reference_episode(w, psi, ep: Episode, fmap: FeatureMap, config: LearnerConfig):
    """Step-by-step TD-PF/ET built from ``pf_target`` and ``psi_update``.

    Slow; kept as an independent check on the kernels.  Uses the η-mixed
    target, which equals the bootstrapped one at ``eta == 0``.
    """
    g, lam, eta = config.gamma, config.lambda_, config.eta
    x0 = fmap(ep.initial)
    psi = psi_update(psi, x0, pf_target(x0, gamma=g, lambda_=lam, initial=True), config.alpha_m)
    etrace = x0.copy()
    for t in ep.steps:
        x, xn = fmap(t.from_), fmap(t.to)
        z = psi @ x
        delta = td_error(w, t, fmap, g)
        y = pf_target(xn, z, etrace, gamma=g, lambda_=lam, eta=eta)
        psi = psi_update(psi, xn, y, config.alpha_m)
        w = w + (config.alpha_v * delta) * z
        etrace = (g * lam) * etrace + xn
    return w, psi
