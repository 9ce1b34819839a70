"""Pure numpy implementations of the hot loops (fallback for ``_kernels``)."""

import numpy as np


def pure_payoffs(own_prices, rival_prices, r_own, r_rival, u, c, k, n, tol):
    """Profit matrix ``[i, j]`` of a seller pricing ``own_prices[i]`` against a
    single rival pricing ``rival_prices[j]`` in the two-seller market."""
    own = np.asarray(own_prices, dtype=np.float64)[:, None]
    rival = np.asarray(rival_prices, dtype=np.float64)[None, :]
    gap = (r_own * u - own) - (r_rival * u - rival)
    uninformed = k * n / (2.0 * u)
    units = np.where(gap > tol, n - uninformed, np.where(gap < -tol, uninformed, 0.5 * n))
    return (own - c) * units


def allocate_sales(prices, reputations, u, n_uninformed, draws, tol):
    """Units sold per round and seller to uninformed and informed buyers.

    Buyer ``b`` of round ``t`` uses ``draws[t, b]``. The first ``n_uninformed``
    buyers pick seller ``floor(draw * S)``; the others pick the
    ``floor(draw * m)``-th of the ``m`` sellers tied for the best utility.
    Nobody buys at negative expected utility.
    """
    prices = np.asarray(prices, dtype=np.float64)
    draws = np.asarray(draws, dtype=np.float64)
    rounds, sellers = prices.shape
    util = np.asarray(reputations, dtype=np.float64)[None, :] * u - prices
    ok = util >= 0.0

    uninf = np.zeros((rounds, sellers), dtype=np.int64)
    inf = np.zeros((rounds, sellers), dtype=np.int64)

    if n_uninformed > 0:
        pick = np.minimum((draws[:, :n_uninformed] * sellers).astype(np.int64), sellers - 1)
        for s in range(sellers):
            uninf[:, s] = np.count_nonzero(pick == s, axis=1) * ok[:, s]

    if draws.shape[1] > n_uninformed:
        best = util.max(axis=1, keepdims=True)
        tied = (util >= best - tol) & (best >= 0.0)
        m = tied.sum(axis=1, keepdims=True)
        rank = np.cumsum(tied, axis=1) - 1
        slot = np.minimum((draws[:, n_uninformed:] * m).astype(np.int64), m - 1)
        for s in range(sellers):
            hits = np.count_nonzero(slot == rank[:, s : s + 1], axis=1)
            inf[:, s] = hits * tied[:, s]
    return uninf, inf
