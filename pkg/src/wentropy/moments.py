"""Exact moments of jointly Gaussian vectors by pair-partition (Isserlis) summation.

These are the ground-truth values every transcribed closed form is measured
against.  Evaluation is purely algebraic in the covariance entries: the matrix
is never factorized, so positive definiteness is not required (degenerate
covariances, e.g. duplicated coordinates, are fine).
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .errors import DimensionMismatchError, OddOrderError, OrderCapError

ORDER_CAP = 12


def count_matchings(order: int) -> int:
    """Number of perfect matchings of ``order`` symbols, (order-1)!!."""
    order = int(order)
    if order < 0 or order > ORDER_CAP:
        raise OrderCapError(f"order {order} outside 0..{ORDER_CAP}")
    if order % 2 != 0:
        raise OddOrderError(f"order {order} is odd; matchings need an even count")
    result = 1
    for k in range(order - 1, 0, -2):
        result *= k
    return result


def _check_spec(cov: np.ndarray, exponents) -> tuple[np.ndarray, list[int]]:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DimensionMismatchError(f"cov must be square, got shape {cov.shape}")
    r = [int(e) for e in exponents]
    if any(e < 0 for e in r):
        raise ValueError(f"exponents must be nonnegative, got {r}")
    if len(r) != cov.shape[0]:
        raise DimensionMismatchError(
            f"{len(r)} exponents for covariance of dimension {cov.shape[0]}"
        )
    if sum(r) > ORDER_CAP:
        raise OrderCapError(f"total order {sum(r)} exceeds cap {ORDER_CAP}")
    return cov, r


def _pairing_sum(cov: np.ndarray, symbols: list[int]) -> float:
    # pair the first symbol with each later one, recurse on the rest
    if not symbols:
        return 1.0
    first = symbols[0]
    rest = symbols[1:]
    total = 0.0
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        total += cov[first, partner] * _pairing_sum(cov, remaining)
    return total


def central_moment(cov, exponents) -> float:
    """E[prod_i Y_i^{r_i}] for centered jointly Gaussian Y with covariance ``cov``.

    Odd total order returns exactly 0 without enumeration; even order sums the
    product of paired covariances over all perfect matchings of the flattened
    symbol list.
    """
    cov, r = _check_spec(cov, exponents)
    order = sum(r)
    if order % 2 != 0:
        return 0.0
    symbols = [i for i, e in enumerate(r) for _ in range(e)]
    return _pairing_sum(cov, symbols)


def shifted_moment(cov, deltas, exponents) -> float:
    """E[prod_i (Y_i + delta_i)^{r_i}] by binomial expansion into central moments."""
    cov, r = _check_spec(cov, exponents)
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != (cov.shape[0],):
        raise DimensionMismatchError(
            f"deltas shape {deltas.shape} does not match dimension {cov.shape[0]}"
        )
    if not np.all(np.isfinite(deltas)):
        raise ValueError("deltas must be finite")
    total = 0.0
    for k in product(*(range(e + 1) for e in r)):
        if sum(k) % 2 != 0:
            continue
        coeff = 1.0
        for ri, ki, di in zip(r, k, deltas):
            coeff *= math.comb(ri, ki) * di ** (ri - ki)
        if coeff == 0.0:
            continue
        total += coeff * central_moment(cov, k)
    return total
