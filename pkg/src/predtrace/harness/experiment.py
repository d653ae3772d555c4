"""Experiment configuration, runs, sweeps and the metrics CSV."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .. import linear, oracle, tabular
from ..core import (CreditMode, EpisodeTooLongError, LearnerConfig, MInitMode,
                    SrDiscountMode, generate_episodes, make_rng)
from ..envs import make_env, make_features

log = logging.getLogger(__name__)

ALGOS = ("td-lambda", "td-pr", "td-pf", "et")
SWEEP_AXES = ("alpha_v", "alpha_m", "lambda", "gamma", "eta")
CSV_HEADER = ("algo", "env", "seed", "episode", "rmse", "return",
              "alpha_v", "alpha_m", "gamma", "lambda", "eta")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "plinko"
    algos: tuple[str, ...] = ("td-pr",)
    alpha_v: float = 0.01
    alpha_m: float = 0.1
    gamma: float = 1.0
    lambda_: float = 0.9
    eta: float = 0.0
    episodes: int = 500
    seeds: tuple[int, ...] = tuple(range(30))
    eval_every: int = 1
    out: str | None = None
    features: str = "onehot"
    sr_discount_mode: str = "gamma"
    m_init_mode: str = "zero"
    credit_mode: str = "inclusive"
    max_steps: int | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.algos:
            raise ConfigError("no algorithm given")
        for a in self.algos:
            if a not in ALGOS:
                raise ConfigError(f"unknown algo {a!r}; choose from {', '.join(ALGOS)}")
        if self.episodes < 1:
            raise ConfigError("episodes must be >= 1")
        if self.eval_every < 1:
            raise ConfigError("eval_every must be >= 1")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            make_features(self.features, make_env(self.env))
            self.learner()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def learner(self) -> LearnerConfig:
        return LearnerConfig(
            alpha_v=self.alpha_v, alpha_m=self.alpha_m, gamma=self.gamma,
            lambda_=self.lambda_, eta=self.eta,
            sr_discount_mode=SrDiscountMode(self.sr_discount_mode),
            m_init_mode=MInitMode(self.m_init_mode),
            credit_mode=CreditMode(self.credit_mode),
        )


class Row(NamedTuple):
    algo: str
    env: str
    seed: int
    episode: int
    rmse: float
    ret: float
    alpha_v: float
    alpha_m: float
    gamma: float
    lambda_: float
    eta: float

    @property
    def diverged(self) -> bool:
        return math.isnan(self.rmse)


@dataclass
class RunResult:
    rows: list[Row] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def extend(self, other: "RunResult"):
        self.rows.extend(other.rows)

    def select(self, algo=None, episode=None) -> list[Row]:
        return [r for r in self.rows
                if (algo is None or r.algo == algo) and (episode is None or r.episode == episode)]

    def mean_rmse(self, algo: str, episode: int) -> float:
        vals = [r.rmse for r in self.select(algo, episode)]
        return float(np.mean(vals)) if vals else math.nan

    @property
    def all_diverged(self) -> bool:
        runs: dict = {}
        for r in self.rows:
            key = (r.algo, r.seed, r.alpha_v, r.alpha_m, r.gamma, r.lambda_, r.eta)
            runs[key] = runs.get(key, False) or r.diverged
        return bool(runs) and all(runs.values())


def rmse(v_est, v_true, mask) -> float:
    """Root-mean-square error over the states selected by ``mask``."""
    v_est = np.asarray(v_est, dtype=np.float64)
    v_true = np.asarray(v_true, dtype=np.float64)
    if v_est.shape != v_true.shape:
        raise ValueError("value vectors differ in length")
    idx = np.asarray(mask)
    if idx.dtype == bool:
        idx = np.flatnonzero(idx)
    if idx.size == 0:
        raise ValueError("empty mask")
    d = v_est[idx] - v_true[idx]
    return math.sqrt(float(np.mean(d * d)))


class _Learner:
    """Uniform episode/value interface over the four algorithms."""

    def __init__(self, algo, mdp, cfg: ExperimentConfig):
        self.algo = algo
        self.mdp = mdp
        self.lc = cfg.learner()
        n = mdp.n_states
        if algo == "td-lambda":
            self.state = tabular.new_td_lambda(n, self.lc)
        elif algo == "td-pr":
            self.state = tabular.new_td_pr(n, self.lc)
        else:
            self.fmap = make_features(cfg.features, mdp)
            d = self.fmap.dim
            self.w = np.zeros(d)
            self.psi = np.eye(d) if self.lc.m_init_mode is MInitMode.IDENTITY else np.zeros((d, d))

    def episode(self, ep):
        if self.algo == "td-lambda":
            tabular.td_lambda_episode(self.state, ep)
        elif self.algo == "td-pr":
            tabular.td_pr_episode(self.state, ep)
        elif self.algo == "td-pf":
            linear.td_pf_episode(self.w, self.psi, ep, self.fmap, self.lc)
        else:
            linear.et_episode(self.w, self.psi, ep, self.fmap, self.lc)

    def values(self) -> np.ndarray:
        if self.algo in ("td-lambda", "td-pr"):
            return self.state.v
        return linear.values(self.w, self.fmap, self.mdp.terminal_mask)

    def finite(self) -> bool:
        if self.algo == "td-lambda":
            arrays = (self.state.v,)
        elif self.algo == "td-pr":
            arrays = (self.state.v, self.state.M)
        else:
            arrays = (self.w, self.psi)
        return all(np.all(np.isfinite(a)) for a in arrays)


def _max_steps(cfg: ExperimentConfig, n_states: int) -> int:
    return cfg.max_steps if cfg.max_steps is not None else 100 * n_states


def _run_seed(cfg: ExperimentConfig, seed: int) -> list[Row]:
    mdp = make_env(cfg.env)
    v_true = oracle.true_values(mdp, cfg.gamma)
    mask = mdp.nonterminal
    echo = (cfg.alpha_v, cfg.alpha_m, cfg.gamma, cfg.lambda_, cfg.eta)
    rows: list[Row] = []
    try:
        # one stream per seed, replayed to every algorithm
        episodes = generate_episodes(mdp, make_rng(seed), cfg.episodes, _max_steps(cfg, mdp.n_states))
    except EpisodeTooLongError as exc:
        log.warning("seed %d: %s", seed, exc)
        return [Row(a, cfg.env, seed, 0, math.nan, math.nan, *echo) for a in cfg.algos]
    for algo in cfg.algos:
        learner = _Learner(algo, mdp, cfg)
        with np.errstate(over="ignore", invalid="ignore"):
            for k, ep in enumerate(episodes, start=1):
                learner.episode(ep)
                err = rmse(learner.values(), v_true, mask) if learner.finite() else math.inf
                if not math.isfinite(err):
                    log.warning("%s seed %d diverged at episode %d", algo, seed, k)
                    rows.append(Row(algo, cfg.env, seed, k, math.nan, math.nan, *echo))
                    break
                if k % cfg.eval_every == 0 or k == cfg.episodes:
                    rows.append(Row(algo, cfg.env, seed, k, err,
                                    ep.discounted_return(cfg.gamma), *echo))
    return rows


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Run every (seed, algo) cell; rows come back in seed, algo, episode order."""
    if cfg.workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_seed, [cfg] * len(cfg.seeds), cfg.seeds))
    else:
        chunks = [_run_seed(cfg, s) for s in cfg.seeds]
    return RunResult([r for chunk in chunks for r in chunk])


_AXIS_FIELD = {"alpha_v": "alpha_v", "alpha_m": "alpha_m", "lambda": "lambda_",
               "gamma": "gamma", "eta": "eta"}


def sweep(base: ExperimentConfig, axis: str, values: Sequence[float]) -> list[RunResult]:
    if axis not in _AXIS_FIELD:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    out = []
    for val in values:
        try:
            cfg = replace(base, **{_AXIS_FIELD[axis]: float(val)})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        out.append(run_experiment(cfg))
    return out


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_csv(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def write_csv(rows: Iterable[Row], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(rows))


def read_csv(path) -> RunResult:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ConfigError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            rows.append(Row(rec[0], rec[1], int(rec[2]), int(rec[3]),
                            *(float(x) for x in rec[4:])))
    return RunResult(rows)


# ---------------------------------------------------------------- config files

_KEY_ALIASES = {"lambda": "lambda_", "algo": "algos"}


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"30"`` means seeds 0..29; anything with a comma is an explicit list."""
    text = str(text).strip()
    try:
        if "," in text:
            return tuple(int(s) for s in text.split(",") if s.strip())
        return tuple(range(int(text)))
    except ValueError:
        raise ConfigError(f"bad seed list {text!r}") from None


def coerce(key: str, value: str):
    key = key.strip().replace("-", "_")
    key = _KEY_ALIASES.get(key, key)
    names = {f.name: f for f in fields(ExperimentConfig)}
    if key not in names:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if key == "algos":
            val = tuple(a.strip() for a in str(value).split(",") if a.strip())
        elif key == "seeds":
            val = parse_seeds(value)
        elif key in ("episodes", "eval_every", "workers"):
            val = int(value)
        elif key == "max_steps":
            val = None if str(value).lower() in ("", "none") else int(value)
        elif key in ("alpha_v", "alpha_m", "gamma", "lambda_", "eta"):
            val = float(value)
        else:
            val = str(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return key, val


def load_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        key, val = coerce(k, v)
        out[key] = val
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
