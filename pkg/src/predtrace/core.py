"""Shared domain types, the seeded random stream and episode sampling."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

StateId = int

_BUFFER = 1024


class EpisodeTooLongError(RuntimeError):
    """Raised when a sampled episode hits the max-length guard."""


class SrDiscountMode(enum.Enum):
    GAMMA = "gamma"
    GAMMA_LAMBDA = "gamma_lambda"


class MInitMode(enum.Enum):
    ZERO = "zero"
    IDENTITY = "identity"


class CreditMode(enum.Enum):
    """Which column of the learned SR is used to spread the TD error.

    ``INCLUSIVE`` credits ``onehot(i) + kappa_b * M[:, i]``, i.e. the column of
    ``I + kappa_b * M``.  ``STRICT`` credits ``M[:, i]`` verbatim; a state then
    never receives its own TD error unless it can revisit itself.
    """

    INCLUSIVE = "inclusive"
    STRICT = "strict"


class Transition(NamedTuple):
    from_: StateId
    to: StateId
    reward: float
    to_is_terminal: bool


@dataclass(frozen=True)
class Episode:
    initial: StateId
    steps: tuple[Transition, ...]
    _arrays: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        steps = self.steps
        if steps and steps[0].from_ != self.initial:
            raise ValueError("first transition does not start at the initial state")
        for a, b in zip(steps, steps[1:]):
            if a.to != b.from_:
                raise ValueError(f"broken chain: {a} -> {b}")

    def __len__(self) -> int:
        return len(self.steps)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Column view ``(from, to, reward, to_is_terminal)`` for the kernels."""
        if not self._arrays:
            k = len(self.steps)
            frm = np.empty(k, dtype=np.int64)
            to = np.empty(k, dtype=np.int64)
            rew = np.empty(k, dtype=np.float64)
            term = np.empty(k, dtype=np.uint8)
            for n, t in enumerate(self.steps):
                frm[n], to[n], rew[n], term[n] = t.from_, t.to, t.reward, t.to_is_terminal
            self._arrays["cols"] = (frm, to, rew, term)
        return self._arrays["cols"]

    def discounted_return(self, gamma: float) -> float:
        g, disc = 0.0, 1.0
        for t in self.steps:
            g += disc * t.reward
            disc *= gamma
        return g


class RngStream:
    """Deterministic uniform stream.

    Philox4x64-10 (counter based) keyed directly by ``seed``; the counter
    starts at zero.  Doubles are ``(u64 >> 11) * 2**-53`` as produced by
    ``numpy.random.Generator.random``, so the sequence depends only on the
    seed.  Draws are pulled in blocks of 1024; the block size does not
    change the sequence.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.Philox(key=seed))
        self._buf = np.empty(0)
        self._pos = 0
        self.drawn = 0

    def uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BUFFER)
            self._pos = 0
        u = float(self._buf[self._pos])
        self._pos += 1
        self.drawn += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


def make_rng(seed: int) -> RngStream:
    return RngStream(seed)


@dataclass(frozen=True)
class LearnerConfig:
    alpha_v: float = 0.01
    alpha_m: float = 0.1
    gamma: float = 1.0
    lambda_: float = 0.9
    eta: float = 0.0
    sr_discount_mode: SrDiscountMode = SrDiscountMode.GAMMA
    m_init_mode: MInitMode = MInitMode.ZERO
    credit_mode: CreditMode = CreditMode.INCLUSIVE

    def __post_init__(self):
        for name in ("alpha_v", "alpha_m"):
            val = getattr(self, name)
            # zero is allowed so a component can be frozen in reduction tests
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        for name in ("gamma", "lambda_", "eta"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")

    @property
    def kappa_b(self) -> float:
        """Bootstrap discount used inside the SR update."""
        if self.sr_discount_mode is SrDiscountMode.GAMMA:
            return self.gamma
        return self.gamma * self.lambda_


def _draw(cum: np.ndarray, u: float) -> int:
    # first index whose cumulative mass exceeds u; guards the round-off tail
    k = int(np.searchsorted(cum, u, side="right"))
    if k >= len(cum):
        k = int(np.flatnonzero(np.diff(np.concatenate(([0.0], cum))) > 0)[-1])
    return k


def generate_episode(mdp, rng: RngStream, max_steps: int | None = None) -> Episode:
    """Sample one episode: a start state from ``start_dist`` then follow ``P``.

    One uniform is consumed for the start state and one per transition.
    """
    if max_steps is None:
        max_steps = 10 * mdp.n_states
    cum_start, cum_rows = mdp.cumulative()
    s = _draw(cum_start, rng.uniform())
    initial = s
    steps: list[Transition] = []
    terminal = mdp.terminal_mask
    while not terminal[s]:
        if len(steps) >= max_steps:
            raise EpisodeTooLongError(
                f"episode exceeded {max_steps} steps; chain may not terminate"
            )
        j = _draw(cum_rows[s], rng.uniform())
        steps.append(Transition(s, j, float(mdp.rewards[s, j]), bool(terminal[j])))
        s = j
    return Episode(initial, tuple(steps))


def generate_episodes(mdp, rng: RngStream, n: int, max_steps: int | None = None) -> list[Episode]:
    return [generate_episode(mdp, rng, max_steps) for _ in range(n)]


def episode_from_states(mdp, states: Sequence[int]) -> Episode:
    """Build an episode along a given state path (rewards from ``mdp``)."""
    steps = tuple(
        Transition(a, b, float(mdp.rewards[a, b]), bool(mdp.terminal_mask[b]))
        for a, b in zip(states, states[1:])
    )
    return Episode(int(states[0]), steps)


def is_finite(*arrays) -> bool:
    return all(np.all(np.isfinite(a)) for a in arrays)


def trace_bound(gamma: float, lambda_: float) -> float:
    decay = gamma * lambda_
    return math.inf if decay >= 1 else 1.0 / (1.0 - decay) + 1.0
