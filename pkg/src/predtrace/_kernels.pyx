# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same signatures and arithmetic order as ``_pykernels``."""
import numpy as np

NAME = "cython"


def td_lambda_episode(double[::1] v, double[::1] e, const long[::1] frm, const long[::1] to,
                      const double[::1] rew, const unsigned char[::1] term,
                      double alpha, double gamma, double lam):
    cdef Py_ssize_t k, s, n = v.shape[0]
    cdef long i, j
    cdef double decay = gamma * lam, vj, delta, coef
    for k in range(frm.shape[0]):
        i = frm[k]
        j = to[k]
        e[i] += 1.0
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        coef = alpha * delta
        for s in range(n):
            v[s] += coef * e[s]
        for s in range(n):
            e[s] *= decay


def td0_episode(double[::1] v, const long[::1] frm, const long[::1] to,
                const double[::1] rew, const unsigned char[::1] term,
                double alpha, double gamma):
    cdef Py_ssize_t k
    cdef long i, j
    cdef double vj, delta
    for k in range(frm.shape[0]):
        i = frm[k]
        j = to[k]
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        v[i] += alpha * delta


def td_pr_episode(double[::1] v, double[:, ::1] M, double[::1] e, const long[::1] frm,
                  const long[::1] to, const double[::1] rew, const unsigned char[::1] term,
                  double alpha, double beta, double gamma, double lam, double kappa_b,
                  bint inclusive):
    cdef Py_ssize_t k, a, b, n = v.shape[0]
    cdef long i, j
    cdef double decay = gamma * lam, vj, delta, coef, be
    cdef double[::1] row = np.empty(n)
    for k in range(frm.shape[0]):
        i = frm[k]
        j = to[k]
        e[i] += 1.0
        if term[k]:
            for b in range(n):
                row[b] = 0.0
        else:
            for b in range(n):
                row[b] = kappa_b * M[j, b]
        row[j] += 1.0
        for b in range(n):
            row[b] -= M[i, b]
        for a in range(n):
            be = beta * e[a]
            for b in range(n):
                M[a, b] += be * row[b]
        vj = 0.0 if term[k] else v[j]
        delta = rew[k] + gamma * vj - v[i]
        coef = alpha * delta
        if inclusive:
            for a in range(n):
                if a == i:
                    v[a] += coef * (kappa_b * M[a, i] + 1.0)
                else:
                    v[a] += coef * (kappa_b * M[a, i])
        else:
            for a in range(n):
                v[a] += coef * M[a, i]
        for a in range(n):
            e[a] *= decay


cdef inline double _dot(const double[::1] w, const double[:, ::1] X, long s, Py_ssize_t d):
    cdef Py_ssize_t c
    cdef double acc = 0.0
    for c in range(d):
        acc += w[c] * X[s, c]
    return acc


def linear_td_lambda_episode(double[::1] w, const double[:, ::1] X, const long[::1] frm,
                             const long[::1] to, const double[::1] rew,
                             const unsigned char[::1] term,
                             double alpha, double gamma, double lam):
    cdef Py_ssize_t k, c, d = X.shape[1]
    cdef double decay = gamma * lam, vj, delta, coef
    cdef double[::1] e = np.zeros(d)
    for k in range(frm.shape[0]):
        for c in range(d):
            e[c] *= decay
            e[c] += X[frm[k], c]
        vj = 0.0 if term[k] else _dot(w, X, to[k], d)
        delta = rew[k] + gamma * vj - _dot(w, X, frm[k], d)
        coef = alpha * delta
        for c in range(d):
            w[c] += coef * e[c]


cdef void _psi_step(double[:, ::1] psi, const double[:, ::1] X, long s,
                    double[::1] y, double beta, double[::1] tmp, Py_ssize_t d):
    # psi <- psi - beta (psi x - y) x^T
    cdef Py_ssize_t a, c
    cdef double acc, r
    for a in range(d):
        acc = 0.0
        for c in range(d):
            acc += psi[a, c] * X[s, c]
        tmp[a] = beta * (acc - y[a])
    for a in range(d):
        r = tmp[a]
        for c in range(d):
            psi[a, c] -= r * X[s, c]


def pf_episode(double[::1] w, double[:, ::1] psi, const double[:, ::1] X, long initial,
               const long[::1] frm, const long[::1] to, const double[::1] rew,
               const unsigned char[::1] term, double alpha, double beta, double gamma,
               double lam, double eta, bint mix):
    cdef Py_ssize_t k, a, c, d = X.shape[1]
    cdef long s, sn
    cdef double decay = gamma * lam, vj, delta, coef, acc
    cdef double[::1] z = np.empty(d)
    cdef double[::1] y = np.empty(d)
    cdef double[::1] tmp = np.empty(d)
    cdef double[::1] etrace = np.empty(d)
    for c in range(d):
        y[c] = X[initial, c]
        etrace[c] = X[initial, c]
    _psi_step(psi, X, initial, y, beta, tmp, d)
    for k in range(frm.shape[0]):
        s = frm[k]
        sn = to[k]
        for a in range(d):
            acc = 0.0
            for c in range(d):
                acc += psi[a, c] * X[s, c]
            z[a] = acc
        vj = 0.0 if term[k] else _dot(w, X, sn, d)
        delta = rew[k] + gamma * vj - _dot(w, X, s, d)
        if not mix:
            for a in range(d):
                y[a] = X[sn, a] + decay * z[a]
        else:
            for a in range(d):
                y[a] = X[sn, a] + decay * ((1.0 - eta) * z[a] + eta * etrace[a])
        _psi_step(psi, X, sn, y, beta, tmp, d)
        coef = alpha * delta
        for a in range(d):
            w[a] += coef * z[a]
        for a in range(d):
            etrace[a] *= decay
            etrace[a] += X[sn, a]


def arrival_trace_sums(double[:, ::1] S, double[::1] arrivals, double[::1] visited,
                       long initial, const long[::1] frm, const long[::1] to, double kappa):
    cdef Py_ssize_t k, a, n = S.shape[0]
    cdef long i, j
    cdef double[::1] e = np.zeros(n)
    cdef unsigned char[::1] seen = np.zeros(n, dtype=np.uint8)
    arrivals[initial] += 1.0
    seen[initial] = 1
    for k in range(frm.shape[0]):
        i = frm[k]
        j = to[k]
        e[i] += 1.0
        for a in range(n):
            S[a, j] += e[a]
        arrivals[j] += 1.0
        seen[j] = 1
        for a in range(n):
            e[a] *= kappa
    for a in range(n):
        if seen[a]:
            visited[a] += 1.0
