"""Quadratic assignment instances and their objective.

The objective of a permutation ``sigma`` is::

    f(sigma) = sum_i sum_j dist[i, j] * flow[sigma[i], sigma[j]]

computed exactly in 64-bit integer arithmetic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class QapFormatError(ValueError):
    """Raised for malformed QAPLIB text."""


@dataclass(frozen=True, eq=False)
class QapInstance:
    """An immutable QAP instance.

    ``dist`` is indexed by locations, ``flow`` by the facilities assigned
    to them. Both are read-only ``int64`` arrays.
    """

    dist: np.ndarray
    flow: np.ndarray
    name: str = "unnamed"
    n: int = field(init=False)

    def __post_init__(self):
        dist = np.array(self.dist, dtype=np.int64)
        flow = np.array(self.flow, dtype=np.int64)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ValueError("distance matrix must be square")
        if flow.shape != dist.shape:
            raise ValueError("flow matrix shape %s does not match %s" % (flow.shape, dist.shape))
        if dist.shape[0] < 2:
            raise ValueError("instance size must be >= 2")
        if (dist < 0).any() or (flow < 0).any():
            raise ValueError("matrix entries must be non-negative")
        dist.setflags(write=False)
        flow.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "flow", flow)
        object.__setattr__(self, "n", dist.shape[0])

    def __eq__(self, other):
        if not isinstance(other, QapInstance):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.dist, other.dist)
            and np.array_equal(self.flow, other.flow)
        )

    __hash__ = None


def parse_qaplib(text, name: str = "unnamed") -> QapInstance:
    """Parse QAPLIB text: ``n``, then the ``n*n`` distance and flow entries."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    tokens = text.split()
    if not tokens:
        raise QapFormatError("empty instance")
    try:
        values = [int(tok) for tok in tokens]
    except ValueError as exc:
        raise QapFormatError("non-integer token: %s" % exc) from None
    n = values[0]
    if n < 2:
        raise QapFormatError("instance size must be >= 2, got %d" % n)
    expected = 1 + 2 * n * n
    if len(values) != expected:
        raise QapFormatError(
            "token count mismatch: expected %d for n=%d, got %d" % (expected, n, len(values))
        )
    body = np.array(values[1:], dtype=np.int64)
    if (body < 0).any():
        raise QapFormatError("negative matrix entry")
    dist = body[: n * n].reshape(n, n)
    flow = body[n * n :].reshape(n, n)
    return QapInstance(dist, flow, name=name)


def load_qaplib(path) -> QapInstance:
    path = Path(path)
    return parse_qaplib(path.read_bytes(), name=path.stem)


def serialize_qaplib(inst: QapInstance) -> str:
    rows = [str(inst.n), ""]
    rows += [" ".join(str(v) for v in row) for row in inst.dist]
    rows.append("")
    rows += [" ".join(str(v) for v in row) for row in inst.flow]
    return "\n".join(rows) + "\n"


def _check_length(inst: QapInstance, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.intp)
    if sigma.shape != (inst.n,):
        raise ValueError("permutation length %d does not match n=%d" % (sigma.size, inst.n))
    return sigma


def evaluate(inst: QapInstance, sigma) -> int:
    sigma = _check_length(inst, sigma)
    return int((inst.dist * inst.flow[np.ix_(sigma, sigma)]).sum())


def evaluate_many(inst: QapInstance, sigmas: np.ndarray) -> np.ndarray:
    """Objectives of each row of ``sigmas`` (shape ``(B, n)``) as ``int64``."""
    sigmas = np.asarray(sigmas, dtype=np.intp)
    permuted = inst.flow[sigmas[:, :, None], sigmas[:, None, :]]
    return np.einsum("ij,bij->b", inst.dist, permuted)


def _touching_terms(inst: QapInstance, sigma: np.ndarray, i1: int, i2: int) -> int:
    """Sum of every objective term whose row or column is ``i1`` or ``i2``."""
    d, h = inst.dist, inst.flow
    total = 0
    for k in (i1, i2):
        total += int(d[:, k] @ h[sigma, sigma[k]])
        total += int(d[k, :] @ h[sigma[k], sigma])
    # pairs with both ends in {i1, i2} were counted twice above
    for a in (i1, i2):
        for b in (i1, i2):
            total -= int(d[a, b] * h[sigma[a], sigma[b]])
    return total


def delta_swap(inst: QapInstance, sigma, f: int, i1: int, i2: int) -> int:
    """Objective after swapping positions ``i1`` and ``i2`` of ``sigma``, in O(n).

    ``f`` must be the objective of ``sigma``. Exact for asymmetric matrices.
    """
    sigma = _check_length(inst, sigma)
    n = inst.n
    if not (0 <= i1 < n and 0 <= i2 < n):
        raise IndexError("swap index out of range for n=%d" % n)
    if i1 == i2:
        raise ValueError("swap positions must differ")
    swapped = sigma.copy()
    swapped[i1], swapped[i2] = sigma[i2], sigma[i1]
    return int(f) - _touching_terms(inst, sigma, i1, i2) + _touching_terms(inst, swapped, i1, i2)


def evaluate_from(inst: QapInstance, center, f_center: int, sigma) -> int:
    """Objective of ``sigma`` by chaining swap deltas from ``center``.

    Costs O(n * d) where ``d`` is the Hamming distance between the two.
    """
    cur = _check_length(inst, center).copy()
    target = _check_length(inst, sigma)
    where = np.empty(inst.n, dtype=np.intp)
    where[cur] = np.arange(inst.n)
    f = int(f_center)
    for i in np.flatnonzero(cur != target):
        if cur[i] == target[i]:
            continue
        j = where[target[i]]
        f = delta_swap(inst, cur, f, i, j)
        cur[i], cur[j] = cur[j], cur[i]
        where[cur[i]] = i
        where[cur[j]] = j
    return f


def ardp(f_best_known: int, objectives) -> float:
    """Average relative deviation from ``f_best_known``, in percent."""
    if f_best_known <= 0:
        raise ValueError("best known objective must be positive")
    values = list(objectives)
    if not values:
        raise ValueError("no objectives given")
    mean = sum(values) / len(values)
    return 100.0 * abs(f_best_known - mean) / f_best_known


def is_qaplib_file(path: os.PathLike) -> bool:
    return Path(path).suffix.lower() == ".dat"
