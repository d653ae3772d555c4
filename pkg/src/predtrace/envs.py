"""MDP constructors and feature maps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

PLINKO_SIDE = 6
PLINKO_GOAL = 6 * 5 + 3


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Markov reward process under a fixed policy.

    Terminal rows of ``P`` are all zero, so ``I - kappa P`` stays invertible
    at ``kappa = 1`` for episodic chains.  Rewards live on transitions.
    """

    P: np.ndarray
    rewards: np.ndarray
    start_dist: np.ndarray
    terminal: frozenset
    name: str = "mdp"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        R = np.asarray(self.rewards, dtype=np.float64)
        d0 = np.asarray(self.start_dist, dtype=np.float64)
        n = P.shape[0]
        if P.shape != (n, n) or R.shape != (n, n) or d0.shape != (n,):
            raise ValueError("P, rewards and start_dist shapes disagree")
        if np.any(P < 0) or np.any(d0 < 0):
            raise ValueError("negative probability")
        mask = np.zeros(n, dtype=bool)
        for s in self.terminal:
            mask[s] = True
        sums = P.sum(axis=1)
        if np.any(P[mask] != 0):
            raise ValueError("terminal rows of P must be all zero")
        if np.any(np.abs(sums[~mask] - 1.0) > 1e-12):
            raise ValueError("non-terminal rows of P must sum to 1")
        if abs(d0.sum() - 1.0) > 1e-12:
            raise ValueError("start_dist must sum to 1")
        if not np.all(np.isfinite(R)):
            raise ValueError("rewards must be finite")
        for arr in (P, R, d0, mask):
            arr.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "rewards", R)
        object.__setattr__(self, "start_dist", d0)
        object.__setattr__(self, "terminal", frozenset(int(s) for s in self.terminal))
        object.__setattr__(self, "terminal_mask", mask)

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def nonterminal(self) -> np.ndarray:
        return np.flatnonzero(~self.terminal_mask)

    def expected_reward(self) -> np.ndarray:
        """r̄(s) = Σ_s' P(s, s') reward(s, s')."""
        return (self.P * self.rewards).sum(axis=1)

    def cumulative(self) -> tuple[np.ndarray, np.ndarray]:
        if "cum" not in self._cache:
            self._cache["cum"] = (np.cumsum(self.start_dist), np.cumsum(self.P, axis=1))
        return self._cache["cum"]

    def scaled(self, c: float) -> "TabularMdp":
        return TabularMdp(self.P, c * self.rewards, self.start_dist, self.terminal, self.name)


def plinko_mdp() -> TabularMdp:
    """6×6 Plinko board, state id ``6*row + col`` with row 0 on top."""
    side = PLINKO_SIDE
    n = side * side
    P = np.zeros((n, n))
    for r in range(side - 1):
        for c in range(side):
            s = side * r + c
            below = side * (r + 1)
            if c == 0:
                P[s, below + 1] = 1.0
            elif c == side - 1:
                P[s, below + side - 2] = 1.0
            else:
                P[s, below + c - 1] = 0.5
                P[s, below + c + 1] = 0.5
    R = np.zeros((n, n))
    R[:, PLINKO_GOAL] = 1.0
    R[P == 0] = 0.0
    d0 = np.zeros(n)
    d0[:side] = 1.0 / side
    terminal = frozenset(range(side * (side - 1), n))
    return TabularMdp(P, R, d0, terminal, name="plinko")


def chain_mdp(n: int, p_right: float) -> TabularMdp:
    if n < 3:
        raise ValueError("chain needs at least 3 states")
    if not 0.0 <= p_right <= 1.0:
        raise ValueError("p_right must lie in [0, 1]")
    P = np.zeros((n, n))
    for i in range(1, n - 1):
        P[i, i + 1] += p_right
        P[i, i - 1] += 1.0 - p_right
    R = np.zeros((n, n))
    R[n - 2, n - 1] = 1.0
    d0 = np.zeros(n)
    d0[math.ceil((n - 1) / 2)] = 1.0
    return TabularMdp(P, R, d0, frozenset({0, n - 1}), name=f"chain:{n}")


def path_mdp(n: int, reward: float = 1.0) -> TabularMdp:
    """Deterministic path 0 → 1 → … → n-1 (terminal), reward on the last step."""
    P = np.zeros((n, n))
    for i in range(n - 1):
        P[i, i + 1] = 1.0
    R = np.zeros((n, n))
    R[n - 2, n - 1] = reward
    d0 = np.zeros(n)
    d0[0] = 1.0
    return TabularMdp(P, R, d0, frozenset({n - 1}), name=f"path:{n}")


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """State → feature lookup; ``table[s]`` is ``x(s)``."""

    table: np.ndarray
    name: str = "features"

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64)
        if table.ndim != 2 or not np.all(np.isfinite(table)):
            raise ValueError("feature table must be a finite 2-d array")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def dim(self) -> int:
        return self.table.shape[1]

    def __call__(self, s: int) -> np.ndarray:
        return self.table[s]


def one_hot_features(n: int) -> FeatureMap:
    return FeatureMap(np.eye(n), name="onehot")


def row_col_features() -> FeatureMap:
    side = PLINKO_SIDE
    table = np.zeros((side * side, 2 * side))
    for s in range(side * side):
        r, c = divmod(s, side)
        table[s, r] = 1.0
        table[s, side + c] = 1.0
    return FeatureMap(table, name="rowcol")


def make_env(name: str) -> TabularMdp:
    """Resolve ``plinko``, ``chain:N`` (p_right 0.5) or ``chain:N:P``."""
    if name == "plinko":
        return plinko_mdp()
    if name.startswith("chain:"):
        parts = name.split(":")
        try:
            n = int(parts[1])
            p = float(parts[2]) if len(parts) > 2 else 0.5
        except (IndexError, ValueError):
            raise ValueError(f"bad chain name {name!r}") from None
        return chain_mdp(n, p)
    raise ValueError(f"unknown env {name!r}")


FEATURES: dict[str, Callable[[TabularMdp], FeatureMap]] = {
    "onehot": lambda mdp: one_hot_features(mdp.n_states),
    "rowcol": lambda mdp: row_col_features(),
}


def make_features(name: str, mdp: TabularMdp) -> FeatureMap:
    try:
        fmap = FEATURES[name](mdp)
    except KeyError:
        raise ValueError(f"unknown feature map {name!r}") from None
    if fmap.table.shape[0] != mdp.n_states:
        raise ValueError(f"feature map {name!r} does not fit env {mdp.name!r}")
    return fmap
