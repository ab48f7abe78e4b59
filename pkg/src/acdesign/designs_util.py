"""Efficient rounding of approximate-design weights to integer allocations."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DesignError


def efficient_round(weights: np.ndarray, n: int) -> tuple[int, ...]:
    """Multiplier-method apportionment of n subjects to design weights.

    Start from n_i = ceil((n - l/2) * w_i) for l support points, then move
    single subjects between points by the efficiency quotients n_i / w_i
    (to add) and (n_i - 1) / w_i (to remove) until the total is n.  Ties
    break at the lowest index, so the result is deterministic.
    """
    w = np.asarray(weights, float)
    ell = w.size
    if n < ell:
        raise DesignError(f"cannot allocate {n} subjects to {ell} support points")
    alloc = np.array([math.ceil((n - ell / 2.0) * wi) for wi in w], dtype=int)
    alloc = np.maximum(alloc, 1)
    while alloc.sum() < n:
        q = alloc / w
        alloc[int(np.argmin(q))] += 1
    while alloc.sum() > n:
        q = np.where(alloc > 1, (alloc - 1) / w, np.inf)
        # remove from the point with the largest quotient; lowest index on ties
        i = int(np.argmax(np.where(np.isinf(q), -np.inf, q)))
        if alloc[i] <= 1:
            raise DesignError("cannot reduce allocation below one subject per point")
        alloc[i] -= 1
    return tuple(int(a) for a in alloc)
