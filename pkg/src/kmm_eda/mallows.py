"""Mallows models under the Hamming distance and their kernel mixture.

Under the Hamming distance the Mallows law factorises into a law over the
distance ``K`` to the consensus, ``p(K=k) = S(n,k) exp(-theta k) / psi``,
times a uniform choice among the ``S(n,k)`` permutations at that distance.
All arithmetic on the distance law happens in log-space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from .perm import CountTables, build_count_tables, hamming_distance, sample_at_distances

MAX_EXHAUSTIVE_SIZE = 8
_BISECTION_STEPS = 200


class InversionError(RuntimeError):
    """The theta <-> expected distance inversion failed to converge."""


def logsumexp(x: np.ndarray) -> float:
    # scipy.special.logsumexp costs ~100x more per call on these short vectors
    top = x.max()
    if top == -np.inf:
        return -np.inf
    return float(top + np.log(np.exp(x - top).sum()))


@lru_cache(maxsize=64)
def _tables(n: int) -> CountTables:
    return build_count_tables(n)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("theta must be finite, got %r" % theta)
    if theta < 0:
        raise ValueError("theta must be >= 0, got %r" % theta)
    return theta


@dataclass(frozen=True)
class HammingMallows:
    """Distance law of a Hamming-Mallows model of size ``n``.

    Attributes
    ----------
    n, theta :
        Size and concentration parameter.
    tables : CountTables
    log_psi : float
        Log normaliser ``log sum_k S(n,k) exp(-theta k)`` over the full
        support, regardless of ``exclude_consensus``.
    log_pk : ndarray, shape (n + 1,)
        Log probability of each distance. With ``exclude_consensus`` the
        mass at ``k = 0`` is removed and the rest renormalised.
    exclude_consensus : bool
    """

    n: int
    theta: float
    tables: CountTables
    log_psi: float
    log_pk: np.ndarray
    exclude_consensus: bool = False

    @property
    def pk(self) -> np.ndarray:
        return np.exp(self.log_pk)

    @property
    def cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.pk)
        cdf[-1] = 1.0
        return cdf

    def sample_distances(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF draws of the distance."""
        ks = np.searchsorted(self.cdf, rng.random(size), side="right")
        return np.minimum(ks, self.n)


def distance_pmf(n: int, theta: float, exclude_consensus: bool = False) -> HammingMallows:
    theta = _check_theta(theta)
    if n < 2:
        raise ValueError("size must be >= 2, got %d" % n)
    tables = _tables(n)
    log_w = tables.log_at_distance - theta * np.arange(n + 1)
    log_psi = logsumexp(log_w)
    if exclude_consensus:
        log_w = log_w.copy()
        log_w[0] = -np.inf
        log_pk = log_w - logsumexp(log_w)
    else:
        log_pk = log_w - log_psi
    log_pk.setflags(write=False)
    return HammingMallows(n, theta, tables, log_psi, log_pk, exclude_consensus)


def expected_distance(n: int, theta: float) -> float:
    pmf = distance_pmf(n, theta)
    return float(np.dot(np.arange(n + 1), pmf.pk))


def theta_from_expected_distance(n: int, target: float, tol: float = 1e-6) -> float:
    """Concentration parameter whose full-support expected distance is ``target``.

    Bisection on ``[0, hi]`` where ``hi`` is doubled from 1 until it
    brackets the target. ``target`` must lie strictly inside ``(0, n-1)``.
    """
    target = float(target)
    if n < 2:
        raise ValueError("size must be >= 2, got %d" % n)
    if not 0 < target < n - 1:
        raise ValueError("target expected distance must lie in (0, %d), got %r" % (n - 1, target))

    hi = 1.0
    for _ in range(_BISECTION_STEPS):
        if expected_distance(n, hi) < target:
            break
        hi *= 2.0
    else:
        raise InversionError("could not bracket expected distance %r" % target)

    lo = 0.0
    mid = hi
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        value = expected_distance(n, mid)
        if abs(value - target) <= 1e-3 * tol:
            return mid
        if value > target:
            lo = mid
        else:
            hi = mid
    if abs(expected_distance(n, mid) - target) > tol:
        raise InversionError("bisection did not converge for target %r" % target)
    return mid


@dataclass(frozen=True)
class KernelSet:
    """Centres of a kernel mixture of Mallows models, shape ``(m, n)``."""

    centers: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.intp))
        if centers.ndim != 2 or centers.shape[0] == 0 or centers.shape[1] == 0:
            raise ValueError("kernel set must hold at least one permutation")
        object.__setattr__(self, "centers", centers)

    @property
    def m(self) -> int:
        return self.centers.shape[0]

    @property
    def n(self) -> int:
        return self.centers.shape[1]


def kmm_sample_many(
    kernels: KernelSet,
    pmf: HammingMallows,
    size: int,
    rng: np.random.Generator,
):
    """Draw ``size`` permutations from the kernel mixture.

    Returns ``(samples, center_index, distances)`` so callers can relate
    each sample to the centre it was drawn around.
    """
    if pmf.n != kernels.n:
        raise ValueError("distance law size %d does not match kernels size %d" % (pmf.n, kernels.n))
    which = rng.integers(kernels.m, size=size)
    ks = pmf.sample_distances(size, rng)
    samples = sample_at_distances(kernels.centers[which], ks, rng)
    return samples, which, ks


def kmm_sample(kernels: KernelSet, theta: float, rng: np.random.Generator) -> np.ndarray:
    """One draw from the kernel mixture; never equal to the chosen centre."""
    if not isinstance(kernels, KernelSet):
        kernels = KernelSet(kernels)
    if kernels.n < 2:
        raise ValueError("kernels must have size >= 2")
    pmf = distance_pmf(kernels.n, theta, exclude_consensus=True)
    samples, _, _ = kmm_sample_many(kernels, pmf, 1, rng)
    return samples[0]


def mallows_pmf_exhaustive(center: Sequence[int], theta: float) -> dict:
    """Enumerate ``p(sigma) = exp(-theta d(sigma, center)) / psi`` over all of S_n.

    Test oracle; only feasible for ``n <= 8``.
    """
    theta = _check_theta(theta)
    center = np.asarray(center)
    n = center.size
    if n > MAX_EXHAUSTIVE_SIZE:
        raise ValueError("exhaustive enumeration limited to n <= %d" % MAX_EXHAUSTIVE_SIZE)
    weights = {}
    for perm in itertools.permutations(center.tolist()):
        weights[perm] = math.exp(-theta * hamming_distance(perm, center))
    psi = math.fsum(weights.values())
    return {perm: w / psi for perm, w in weights.items()}
