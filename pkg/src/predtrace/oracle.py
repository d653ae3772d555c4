"""Exact ground truth: Bellman solves, closed-form SR and expected traces."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import RngStream, generate_episode
from .envs import TabularMdp


# probability mass allowed to survive past the horizon in unbounded chains
_TAIL = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    pass


class Convention(enum.Enum):
    INCLUSIVE = "inclusive"
    STRICT = "strict"


@dataclass(frozen=True, eq=False)
class SrMatrix:
    m: np.ndarray
    discount: float
    convention: Convention


class ExpectedTrace(NamedTuple):
    z: np.ndarray
    """Column ``j`` is the expected trace on arrival at ``j``; NaN if undefined."""
    defined: np.ndarray


def _solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("non-finite solution")
    return x


def true_values(mdp: TabularMdp, gamma: float) -> np.ndarray:
    """Solve ``(I - γ P_NN) v_N = r̄_N``; terminal values are exactly 0."""
    nt = mdp.nonterminal
    A = np.eye(len(nt)) - gamma * mdp.P[np.ix_(nt, nt)]
    v = np.zeros(mdp.n_states)
    v[nt] = _solve(A, mdp.expected_reward()[nt])
    return v


def successor_matrix(mdp: TabularMdp, kappa: float,
                     convention: Convention = Convention.INCLUSIVE) -> SrMatrix:
    """``(I - κP)^-1`` (INCLUSIVE) or ``P (I - κP)^-1`` (STRICT).

    STRICT row ``i`` holds the κ-discounted occupancies counted from the
    first step after leaving ``i``, i.e. ``Σ_k κ^k P^(k+1)``.
    """
    n = mdp.n_states
    incl = _solve(np.eye(n) - kappa * mdp.P, np.eye(n))
    m = incl if convention is Convention.INCLUSIVE else mdp.P @ incl
    return SrMatrix(m, kappa, convention)


def expected_trace(mdp: TabularMdp, kappa: float, horizon: int) -> ExpectedTrace:
    """``z(j) = E[Σ_n κ^n onehot(S_{t-n}) | S_t = j]`` by forward propagation.

    ``A_t[k, s] = E[Σ_n κ^n 1{S_{t-n}=k} 1{S_t=s}]`` obeys
    ``A_{t+1} = κ A_t P + diag(μ_{t+1})``; the column sums over ``t``
    divided by the total visit mass give the conditional expectation.
    """
    n = mdp.n_states
    mu = mdp.start_dist.copy()
    A = np.diag(mu)
    num = A.copy()
    den = mu.copy()
    for _ in range(horizon):
        mu = mu @ mdp.P
        if not mu.any():
            break
        A = kappa * (A @ mdp.P) + np.diag(mu)
        num += A
        den += mu
    if mu.sum() > _TAIL:
        raise ValueError(f"horizon {horizon} shorter than the episodes of {mdp.name}")
    defined = den > 0
    z = np.full((n, n), np.nan)
    z[:, defined] = num[:, defined] / den[defined]
    return ExpectedTrace(z, defined)


def visit_probabilities(mdp: TabularMdp, horizon: int) -> np.ndarray:
    """Probability that each state is visited at least once in an episode.

    For each target the first-passage mass is propagated with the target
    made absorbing; in layered chains this equals the time-summed occupancy.
    """
    n = mdp.n_states
    out = np.zeros(n)
    for s in range(n):
        nu = mdp.start_dist.copy()
        hit = 0.0
        for _ in range(horizon + 1):
            hit += nu[s]
            nu[s] = 0.0
            if not nu.any():
                break
            nu = nu @ mdp.P
        out[s] = hit
    return out


def verify_sr_trace_identity(mdp: TabularMdp, kappa: float, n_samples: int,
                             rng: RngStream, backend=None, max_steps=None) -> np.ndarray:
    """Residual ``|M_strict(i,j) - (P̂(j)/P̂(i)) Ê[e(i) | arrive at j]|``.

    Traces are sampled with decay κ; ``P̂`` is the fraction of sampled
    episodes visiting a state.  Entries are NaN where either state was
    never visited.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    k = kernels.get(backend)
    n = mdp.n_states
    S = np.zeros((n, n))
    arrivals = np.zeros(n)
    visited = np.zeros(n)
    for _ in range(n_samples):
        ep = generate_episode(mdp, rng, max_steps)
        frm, to, _, _ = ep.arrays()
        k.arrival_trace_sums(S, arrivals, visited, ep.initial, frm, to, kappa)
    p_hat = visited / n_samples
    with np.errstate(invalid="ignore", divide="ignore"):
        e_hat = S / arrivals[None, :]
        ratio = p_hat[None, :] / p_hat[:, None]
        est = ratio * e_hat
    m = successor_matrix(mdp, kappa, Convention.STRICT).m
    resid = np.abs(m - est)
    ok = (p_hat[:, None] > 0) & (p_hat[None, :] > 0)
    resid[~ok] = np.nan
    return resid
