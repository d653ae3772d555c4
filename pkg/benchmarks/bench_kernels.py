"""Time the compiled and numpy kernel backends on identical episode streams.

    python3 benchmarks/bench_kernels.py --episodes 2000 --repeat 3
"""
import argparse
import time

import numpy as np

from predtrace import kernels
from predtrace.core import LearnerConfig, generate_episodes, make_rng
from predtrace.envs import make_env, make_features


def _td_lambda(k, mdp, fmap, eps, cfg):
    v, e = np.zeros(mdp.n_states), np.zeros(mdp.n_states)
    for frm, to, rew, term, _ in eps:
        e[:] = 0
        k.td_lambda_episode(v, e, frm, to, rew, term, cfg.alpha_v, cfg.gamma, cfg.lambda_)


def _td_pr(k, mdp, fmap, eps, cfg):
    n = mdp.n_states
    v, M, e = np.zeros(n), np.zeros((n, n)), np.zeros(n)
    for frm, to, rew, term, _ in eps:
        e[:] = 0
        k.td_pr_episode(v, M, e, frm, to, rew, term, cfg.alpha_v, cfg.alpha_m, cfg.gamma,
                        cfg.lambda_, cfg.kappa_b, True)


def _pf(k, mdp, fmap, eps, cfg):
    d = fmap.dim
    w, psi = np.zeros(d), np.zeros((d, d))
    for frm, to, rew, term, init in eps:
        k.pf_episode(w, psi, fmap.table, init, frm, to, rew, term, cfg.alpha_v, cfg.alpha_m,
                     cfg.gamma, cfg.lambda_, 0.5, True)


def _arrivals(k, mdp, fmap, eps, cfg):
    n = mdp.n_states
    S, arr, vis = np.zeros((n, n)), np.zeros(n), np.zeros(n)
    for frm, to, _, _, init in eps:
        k.arrival_trace_sums(S, arr, vis, init, frm, to, cfg.kappa_b)


KERNELS = {"td_lambda": _td_lambda, "td_pr": _td_pr, "pf": _pf, "arrival_sums": _arrivals}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--env", default="plinko")
    p.add_argument("--features", default="onehot")
    p.add_argument("--episodes", type=int, default=2000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    mdp = make_env(args.env)
    fmap = make_features(args.features, mdp)
    eps = [(*ep.arrays(), ep.initial)
           for ep in generate_episodes(mdp, make_rng(args.seed), args.episodes)]
    cfg = LearnerConfig()
    backends = kernels.available()
    print(f"env={args.env} episodes={args.episodes} backends={','.join(backends)}")
    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in KERNELS.items():
        best = []
        for b in backends:
            k = kernels.get(b)
            times = []
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                fn(k, mdp, fmap, eps, cfg)
                times.append(time.perf_counter() - t0)
            best.append(min(times))
        speed = f"{best[-1] / best[0]:>9.1f}x" if len(best) > 1 else f"{'n/a':>10}"
        print(f"{name:<14}" + "".join(f"{t * 1e3:>10.1f}ms" for t in best) + speed)


if __name__ == "__main__":
    main()
