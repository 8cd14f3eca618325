"""Compiled single-sample SGD pass used by :func:`semigraph.training.train`.

The update rule mirrors :func:`semigraph.training.sample_gradient`; the test
suite checks the two against each other.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _log_sigmoid(x):
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@numba.njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@numba.njit(cache=True, error_model="numpy")
def sgd_pass(
    P, TH,
    si, sj, sg, st,
    weights, eta1, eta2, tau0, total, floor,
    loss_sum, loss_cnt,
):
    """Sequential ascent over one shuffled sample stream.

    ``P`` stacks ``(v_f, v_d, u_f, u_d)`` and ``TH`` stacks
    ``(theta_f, theta_d)``; both are updated in place. Term ``t`` pairs row
    ``i`` of block ``t % 2`` with row ``j`` of block ``t``.
    """
    d = P.shape[2]
    cs = np.empty((2, d))
    sn = np.empty((2, d))
    for r in range(2):
        for k in range(d):
            cs[r, k] = math.cos(TH[r, k])
            sn[r, k] = math.sin(TH[r, k])
    tau = tau0
    for n in range(si.shape[0]):
        t = st[n]
        i = si[n]
        j = sj[n]
        gamma = sg[n]
        left = t % 2
        phased = t < 2

        score = 0.0
        if phased:
            for k in range(d):
                a = P[left, i, k].real
                b = P[left, i, k].imag
                c = P[t, j, k].real
                e = P[t, j, k].imag
                score += cs[t, k] * (a * c + b * e) + sn[t, k] * (b * c - a * e)
        else:
            for k in range(d):
                x = P[left, i, k]
                y = P[t, j, k]
                score += x.real * y.real + x.imag * y.imag

        x = gamma * score
        loss_sum[t] += _log_sigmoid(x)
        loss_cnt[t] += 1
        g = gamma * _sigmoid(-x)

        decay = 1.0 - tau / total
        if decay < floor:
            decay = floor
        lr1 = eta1 * decay * weights[t] * g
        tau += 1.0

        if phased:
            lr2 = eta2 * decay * g
            for k in range(d):
                a = P[left, i, k].real
                b = P[left, i, k].imag
                c = P[t, j, k].real
                e = P[t, j, k].imag
                ck = cs[t, k]
                sk = sn[t, k]
                P[left, i, k] = complex(a + lr1 * (ck * c - sk * e), b + lr1 * (ck * e + sk * c))
                P[t, j, k] = complex(c + lr1 * (ck * a + sk * b), e + lr1 * (ck * b - sk * a))
                TH[t, k] += lr2 * (-sk * (a * c + b * e) + ck * (b * c - a * e))
                cs[t, k] = math.cos(TH[t, k])
                sn[t, k] = math.sin(TH[t, k])
        else:
            for k in range(d):
                x = P[left, i, k]
                y = P[t, j, k]
                P[left, i, k] = x + lr1 * y
                P[t, j, k] = y + lr1 * x
    return tau
