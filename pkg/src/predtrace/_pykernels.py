"""Pure numpy kernels.

Reference backend and fallback for ``_kernels.pyx``.  Every function
mutates its array arguments in place and mirrors the compiled version
operation for operation, so the elementwise kernels (TD(λ), TD-PR) agree
bitwise across backends; kernels with dot products agree to rounding.
"""
import numpy as np

NAME = "numpy"


def td_lambda_episode(v, e, frm, to, rew, term, alpha, gamma, lam):
    decay = gamma * lam
    for k in range(len(frm)):
        i, j = frm[k], to[k]
        e[i] += 1.0
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        v += (alpha * delta) * e
        e *= decay


def td0_episode(v, frm, to, rew, term, alpha, gamma):
    for k in range(len(frm)):
        i, j = frm[k], to[k]
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        v[i] += alpha * delta


def sr_row_target(M, i, j, j_terminal, kappa_b):
    """``onehot(j) + kappa_b M[j] - M[i]`` with a zero bootstrap row for terminal j."""
    if j_terminal:
        row = np.zeros(M.shape[1])
    else:
        row = kappa_b * M[j]
    row[j] += 1.0
    row -= M[i]
    return row


def td_pr_episode(v, M, e, frm, to, rew, term, alpha, beta, gamma, lam, kappa_b, inclusive):
    decay = gamma * lam
    for k in range(len(frm)):
        i, j = frm[k], to[k]
        e[i] += 1.0
        row = sr_row_target(M, i, j, term[k], kappa_b)
        M += np.multiply.outer(beta * e, row)
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        if inclusive:
            credit = kappa_b * M[:, i]
            credit[i] += 1.0
        else:
            credit = M[:, i].copy()
        v += (alpha * delta) * credit
        e *= decay


def linear_td_lambda_episode(w, X, frm, to, rew, term, alpha, gamma, lam):
    decay = gamma * lam
    e = np.zeros(X.shape[1])
    for k in range(len(frm)):
        x = X[frm[k]]
        e *= decay
        e += x
        vj = 0.0 if term[k] else float(w @ X[to[k]])
        delta = rew[k] + gamma * vj - float(w @ x)
        w += (alpha * delta) * e


def pf_episode(w, psi, X, initial, frm, to, rew, term, alpha, beta, gamma, lam, eta, mix):
    """Linear TD-PF (``mix`` false) or ET(λ, η) (``mix`` true) over one episode.

    With ``mix`` false the Ψ target is ``x' + λγ z``; with ``mix`` true it is
    ``x' + λγ((1-η) z + η e)`` for the sampled feature trace ``e``.
    """
    decay = gamma * lam
    x0 = X[initial]
    psi -= np.multiply.outer(beta * (psi @ x0 - x0), x0)
    etrace = x0.copy()
    for k in range(len(frm)):
        x = X[frm[k]]
        xn = X[to[k]]
        z = psi @ x
        vj = 0.0 if term[k] else float(w @ xn)
        delta = rew[k] + gamma * vj - float(w @ x)
        if not mix:
            y = xn + decay * z
        else:
            y = xn + decay * ((1.0 - eta) * z + eta * etrace)
        psi -= np.multiply.outer(beta * (psi @ xn - y), xn)
        w += (alpha * delta) * z
        etrace *= decay
        etrace += xn


def arrival_trace_sums(S, arrivals, visited, initial, frm, to, kappa):
    """Accumulate traces-at-arrival for one episode.

    ``S[:, j]`` gains the trace as it stands on entering ``j`` (after the
    increment at the previous state, before decay); ``arrivals[j]`` counts
    arrivals (the initial state arrives with an empty trace) and
    ``visited[s]`` counts episodes that visit ``s`` at least once.
    """
    n = S.shape[0]
    e = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    arrivals[initial] += 1.0
    seen[initial] = True
    for k in range(len(frm)):
        i, j = frm[k], to[k]
        e[i] += 1.0
        S[:, j] += e
        arrivals[j] += 1.0
        seen[j] = True
        e *= kappa
    visited += seen
