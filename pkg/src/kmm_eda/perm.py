"""Permutations, Hamming distance and exact-distance sampling.

Permutations are plain 1-d integer numpy arrays holding a bijection of
``{0, ..., n-1}``. Counting tables are kept in log-space so that sizes
well beyond the range of fixed-width integers stay usable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

MAX_TABLE_SIZE = 512


def as_permutation(values) -> np.ndarray:
    """Validate ``values`` as a 0-based permutation and return it as an array.

    Raises
    ------
    ValueError
        If ``values`` is empty, not one-dimensional or not a bijection of
        ``{0, ..., n-1}``.
    """
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a permutation must be a non-empty 1-d sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError("not a permutation: non-integer entries")
    arr = arr.astype(np.intp)
    n = arr.size
    if arr.min() < 0 or arr.max() >= n or np.unique(arr).size != n:
        raise ValueError("not a permutation of 0..%d" % (n - 1))
    return arr


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("permutation size must be >= 1, got %d" % n)
    return np.arange(n, dtype=np.intp)


def hamming_distance(a, b) -> int:
    """Number of positions at which ``a`` and ``b`` disagree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("length mismatch: %d vs %d" % (a.size, b.size))
    return int(np.count_nonzero(a != b))


@dataclass(frozen=True)
class CountTables:
    """Log-counts of derangements and of permutations at each distance.

    Attributes
    ----------
    n : int
        Permutation size.
    log_derangements : ndarray, shape (n + 1,)
        ``log D(k)``; ``-inf`` at ``k = 1``.
    log_at_distance : ndarray, shape (n + 1,)
        ``log S(n, k) = log C(n, k) + log D(k)``, the log-number of
        permutations at Hamming distance ``k`` from a fixed one.
    """

    n: int
    log_derangements: np.ndarray
    log_at_distance: np.ndarray


def build_count_tables(n: int) -> CountTables:
    if not 1 <= n <= MAX_TABLE_SIZE:
        raise ValueError("table size must lie in [1, %d], got %d" % (MAX_TABLE_SIZE, n))
    log_d = np.empty(n + 1)
    log_d[0] = 0.0
    log_d[1] = -np.inf
    for k in range(2, n + 1):
        log_d[k] = np.log(k - 1) + np.logaddexp(log_d[k - 1], log_d[k - 2])
    k = np.arange(n + 1)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_s = log_binom + log_d
    log_d.setflags(write=False)
    log_s.setflags(write=False)
    return CountTables(n=n, log_derangements=log_d, log_at_distance=log_s)


def uniform_derangement(k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a derangement of size ``k`` uniformly at random.

    Rejection sampling over Fisher-Yates shuffles; the acceptance rate
    tends to ``1/e``.
    """
    if k == 1 or k < 0:
        raise ValueError("no derangement of size %d exists" % k)
    base = np.arange(k, dtype=np.intp)
    while True:
        perm = rng.permutation(k)
        if not np.any(perm == base):
            return perm.astype(np.intp)


def sample_at_distance(center, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw among the permutations at Hamming distance ``k`` from ``center``."""
    center = np.asarray(center)
    n = center.size
    if k == 1 or k < 0 or k > n:
        raise ValueError("distance %d is not attainable for size %d" % (k, n))
    out = center.copy()
    if k == 0:
        return out
    positions = rng.permutation(n)[:k]
    der = uniform_derangement(k, rng)
    out[positions] = center[positions[der]]
    return out


def sample_at_distances(centers: np.ndarray, ks: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Row-wise batch version of :func:`sample_at_distance`.

    ``centers`` has shape ``(B, n)`` and ``ks`` shape ``(B,)``; row ``b`` of
    the result is uniform over the permutations at distance ``ks[b]`` from
    ``centers[b]``. Each row chooses its ``k`` positions as the first ``k``
    entries of a random permutation of ``0..n-1``, then deranges them by
    rejection.
    """
    centers = np.asarray(centers)
    ks = np.asarray(ks, dtype=np.intp)
    batch, n = centers.shape
    if np.any((ks == 1) | (ks < 0) | (ks > n)):
        raise ValueError("distances must lie in {0} U [2, %d]" % n)
    positions = np.argsort(rng.random((batch, n)), axis=1)
    slots = np.arange(n)
    active = slots[None, :] < ks[:, None]

    slot_perm = np.broadcast_to(slots, (batch, n)).copy()
    pending = np.flatnonzero(ks > 0)
    while pending.size:
        keys = rng.random((pending.size, n))
        # inactive slots sort after every active one and keep their order
        keys = np.where(active[pending], keys, 1.0 + slots)
        trial = np.argsort(keys, axis=1)
        fixed = np.any((trial == slots) & active[pending], axis=1)
        slot_perm[pending[~fixed]] = trial[~fixed]
        pending = pending[fixed]

    rows = np.arange(batch)[:, None]
    out = centers.copy()
    out[rows, positions] = centers[rows, positions[rows, slot_perm]]
    return out
