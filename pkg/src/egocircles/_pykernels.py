"""Pure numpy versions of the hot kernels; used when the compiled module is absent.

Arrays: ``sims``/``dist`` are (n, n) float64, ``adj`` is (n, n) uint8,
``membership`` is (K, n) uint8 with one row per circle, ``taus`` is (K,) float64.
"""
import numpy as np

SIM_CAP = 1e6
EPS = 1e-6


def softplus(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x + np.log1p(np.exp(-np.abs(x))), np.log1p(np.exp(np.minimum(x, 0.0))))


def pair_betas(sims, membership, taus):
    """(beta1, beta2) matrices over all alter pairs."""
    n = sims.shape[0]
    if len(taus) == 0:
        return np.zeros((n, n)), np.zeros((n, n))
    lam = taus.max()
    terms = 1.0 / (sims[None, :, :] - taus[:, None, None] + lam)
    m = membership.astype(bool)
    shared = m[:, :, None] & m[:, None, :]
    b1 = np.where(shared, terms, 0.0).sum(axis=0)
    b2 = np.where(shared, 0.0, terms).sum(axis=0)
    return b1, b2


def log_likelihood(sims, adj, membership, taus):
    n = sims.shape[0]
    if n < 2:
        return 0.0
    b1, b2 = pair_betas(sims, membership, taus)
    phi = b1 * b1 - b2 * b2
    iu = np.triu_indices(n, 1)
    phi = phi[iu]
    return float(np.sum(adj[iu] * phi) - np.sum(softplus(phi)))


def circle_thresholds(dist, membership):
    """Per circle, the minimum member-to-circle similarity (SIM_CAP for singletons)."""
    k = membership.shape[0]
    out = np.empty(k)
    m = membership.astype(bool)
    for c in range(k):
        idx = np.flatnonzero(m[c])
        s = len(idx)
        if s <= 1:
            out[c] = SIM_CAP
            continue
        # sequential sums, matching the compiled kernel bit for bit
        mean_d = np.cumsum(dist[np.ix_(idx, idx)], axis=1)[:, -1] / (s - 1)
        out[c] = np.minimum(1.0 / np.maximum(mean_d, EPS), SIM_CAP).min()
    return out
