"""Closed-form weighted-entropy expressions for trivariate Gaussians.

Everything here exists in two modes.  ``"wick"`` assembles the expression from
exact pair-partition moments and is authoritative: it must agree with the
quadrature oracles.  ``"paper"`` evaluates the transcribed factored formulas
verbatim, including their known defects; the verify command measures each one
against wick mode and reports a CONFIRMED/DISCREPANT verdict instead of
trusting it.

The product weight is always centered at the marginal means.  Coordinate
indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian import (
    ConditionSpec,
    Gaussian,
    check_entropy_mode,
    condition,
    example1_cov,
    example2_cov,
    validate,
)
from .moments import central_moment, shifted_moment

FORMULA_MODES = ("paper", "wick")


def check_formula_mode(mode: str) -> str:
    if mode not in FORMULA_MODES:
        raise ValueError(f"mode must be one of {FORMULA_MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class PairConditional:
    """A trivariate Gaussian together with its leading pair, conditioned on the
    third coordinate.

    Derived fields: ``pair`` is the marginal of coordinates (0, 1), ``cond``
    the conditional of (0, 1) given coordinate 2 equal to ``x3``, and ``delta``
    the shift between conditional and marginal means.
    """

    base: Gaussian
    x3: float
    pair: Gaussian = None
    cond: Gaussian = None
    delta: np.ndarray = None

    def __post_init__(self):
        if self.base.dim != 3:
            raise ValueError(f"base must be trivariate, got dimension {self.base.dim}")
        validate(self.base)
        x3 = float(self.x3)
        pair = self.base.marginal([0, 1])
        cond = condition(self.base, ConditionSpec((0, 1), (2,), np.array([x3])))
        delta = cond.mean - pair.mean
        delta.setflags(write=False)
        object.__setattr__(self, "x3", x3)
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def from_example1(cls, rho: float, x3: float) -> "PairConditional":
        return cls(example1_cov(rho), x3)

    @classmethod
    def from_example2(cls, rho: float, x3: float) -> "PairConditional":
        return cls(example2_cov(rho), x3)


def _centers(pc: PairConditional, centers) -> np.ndarray:
    if centers is None:
        return pc.pair.mean
    arr = getattr(centers, "centers", centers)
    arr = np.atleast_1d(np.asarray(arr, dtype=float))
    if arr.shape != (2,):
        raise ValueError(f"need 2 centers, got shape {arr.shape}")
    return arr


def xi(cov) -> float:
    """Transcribed factored form of the sixth-order product moment E[prod Y_k^2].

    This factorization is a confirmed identity: it equals
    ``central_moment(cov, (2, 2, 2))`` to rounding error.
    """
    s = np.asarray(cov, dtype=float)
    return float(
        s[0, 0] * (s[1, 1] * s[2, 2] + 2.0 * s[1, 2] ** 2)
        + 2.0 * s[0, 1] * (s[0, 1] * s[2, 2] + 2.0 * s[0, 2] * s[1, 2])
        + 2.0 * s[0, 2] * (2.0 * s[0, 1] * s[1, 2] + s[0, 2] * s[1, 1])
    )


def lambda_paper(cov, i: int, j: int) -> float:
    """Transcribed factored form of E[Y_1^2 Y_2^2 Y_3^2 Y_i Y_j] (0-based i, j).

    The factorization drops pairings and provably disagrees with the full
    eighth-order sum for some (i, j); see :func:`lambda_wick`.
    """
    s = np.asarray(cov, dtype=float)
    return float(
        (s[0, 0] * s[1, 1] + 2.0 * s[0, 1] ** 2)
        * (s[2, 2] * s[i, j] + 2.0 * s[2, i] * s[2, j])
    )


def lambda_wick(cov, i: int, j: int) -> float:
    """Exact E[Y_1^2 Y_2^2 Y_3^2 Y_i Y_j] by pair-partition enumeration."""
    r = [2, 2, 2]
    r[i] += 1
    r[j] += 1
    return central_moment(cov, r)


def wde_trivariate(dist: Gaussian, mode: str = "wick") -> float:
    """Weighted entropy of a trivariate Gaussian with the mean-centered product
    weight: 0.5 log((2 pi)^3 |cov|) * Xi + 0.5 sum_ij inv(cov)_ij Lambda_ij."""
    check_formula_mode(mode)
    if dist.dim != 3:
        raise ValueError(f"need a trivariate distribution, got dimension {dist.dim}")
    validate(dist)
    cov = dist.cov
    _, log_det = np.linalg.slogdet(cov)
    inv = np.linalg.inv(cov)
    if mode == "paper":
        bulk = xi(cov)
        lam = lambda_paper
    else:
        bulk = central_moment(cov, (2, 2, 2))
        lam = lambda_wick
    quad_term = sum(
        inv[i, j] * lam(cov, i, j) for i in range(3) for j in range(3)
    )
    return 0.5 * (3.0 * math.log(2.0 * math.pi) + log_det) * bulk + 0.5 * quad_term


def relative_de_pair(pc: PairConditional, mode: str = "corrected") -> float:
    """Divergence of the conditional pair from the marginal pair.

    Paper mode evaluates the transcribed representation, which exceeds the
    true Kullback-Leibler divergence by the constant 1; corrected mode
    subtracts it and matches :func:`wentropy.gaussian.gaussian_kl` exactly.
    """
    check_entropy_mode(mode)
    inv1 = np.linalg.inv(pc.pair.cov)
    _, log_det1 = np.linalg.slogdet(pc.pair.cov)
    _, log_det_bar = np.linalg.slogdet(pc.cond.cov)
    mu = pc.pair.mean
    mu_bar = pc.cond.mean
    brace = (
        pc.cond.cov
        + np.outer(mu_bar, mu_bar)
        - np.outer(mu_bar, mu)
        - np.outer(mu, mu_bar)
        + np.outer(mu, mu)
    )
    value = 0.5 * (log_det1 - log_det_bar) + 0.5 * float(np.sum(inv1 * brace))
    if mode == "corrected":
        value -= 1.0
    return value


def theta(pc: PairConditional, centers=None) -> float:
    """Conditional expectation of the squared-deviation product,
    E[(X_1 - a_1)^2 (X_2 - a_2)^2 | X_3 = x3], exactly via shifted moments."""
    a = _centers(pc, centers)
    return shifted_moment(pc.cond.cov, pc.cond.mean - a, (2, 2))


# fourth- and sixth-order helpers used by the transcribed conditional formulas


def _e_sq_sq_pair(s: np.ndarray, i: int, j: int) -> float:
    """E[Y_1^2 Y_2^2 Y_i Y_j] for centered bivariate Y with covariance s."""
    return float(
        s[0, 0] * (s[1, 1] * s[i, j] + 2.0 * s[1, i] * s[1, j])
        + 2.0 * s[0, 1] * (s[0, 1] * s[i, j] + s[0, i] * s[1, j] + s[0, j] * s[1, i])
        + s[0, i] * (2.0 * s[0, 1] * s[1, j] + s[1, 1] * s[0, j])
        + s[0, j] * (2.0 * s[0, 1] * s[1, i] + s[1, 1] * s[0, i])
    )


def _e_sq_pair(s: np.ndarray, k: int, i: int, j: int) -> float:
    """E[Y_k^2 Y_i Y_j]."""
    return float(s[k, k] * s[i, j] + 2.0 * s[k, i] * s[k, j])


def _e_quad(s: np.ndarray, i: int, j: int) -> float:
    """E[Y_1 Y_2 Y_i Y_j]."""
    return float(s[0, 1] * s[i, j] + s[0, i] * s[1, j] + s[0, j] * s[1, i])


def lambda_bar(pc: PairConditional, i: int, j: int, mode: str = "wick") -> float:
    """Conditional moment E[prod_k (X_k - mu_k)^2 (X_i - mubar_i)(X_j - mubar_j) | X_3].

    Wick mode evaluates it mechanically as a shifted moment over duplicated
    coordinates (the singled-out factors are unshifted copies).  Paper mode
    follows the transcribed four-term expansion, whose middle sum pairs each
    squared shift with the same coordinate's moment rather than the
    complementary one, so the two modes disagree when the shifts differ.
    """
    check_formula_mode(mode)
    s = pc.cond.cov
    d = pc.delta
    if mode == "wick":
        dup = [0, 1, i, j]
        cov4 = s[np.ix_(dup, dup)]
        deltas = np.array([d[0], d[1], 0.0, 0.0])
        return shifted_moment(cov4, deltas, (2, 2, 1, 1))
    return (
        _e_sq_sq_pair(s, i, j)
        + d[0] ** 2 * _e_sq_pair(s, 0, i, j)
        + d[1] ** 2 * _e_sq_pair(s, 1, i, j)
        + d[0] ** 2 * d[1] ** 2 * float(s[i, j])
        + 4.0 * d[0] * d[1] * _e_quad(s, i, j)
    )


def upsilon(pc: PairConditional, i: int, j: int, mode: str = "wick") -> float:
    """Conditional moment E[prod_k (X_k - mu_k)^2 (X_i - mu_i)(X_j - mu_j) | X_3].

    All factors share the mean-shift, so wick mode is a single shifted moment.
    Paper mode follows the transcribed eighteen-term expansion, which is a
    complete binomial expansion and agrees with wick mode to rounding error.
    """
    check_formula_mode(mode)
    s = pc.cond.cov
    d = pc.delta
    if mode == "wick":
        r = [2, 2]
        r[i] += 1
        r[j] += 1
        return shifted_moment(s, d, r)
    return (
        _e_sq_sq_pair(s, i, j)
        + (s[0, 0] * s[1, 1] + 2.0 * s[0, 1] ** 2) * d[i] * d[j]
        + 2.0 * _e_sq_pair(s, 0, 1, i) * d[1] * d[j]
        + 2.0 * _e_sq_pair(s, 0, 1, j) * d[1] * d[i]
        + _e_sq_pair(s, 0, i, j) * d[1] ** 2
        + s[0, 0] * d[1] ** 2 * d[i] * d[j]
        + 2.0 * _e_sq_pair(s, 1, 0, i) * d[0] * d[j]
        + 2.0 * _e_sq_pair(s, 1, 0, j) * d[0] * d[i]
        + 4.0 * _e_quad(s, i, j) * d[0] * d[1]
        + 4.0 * s[0, 1] * d[0] * d[1] * d[i] * d[j]
        + 2.0 * s[0, i] * d[j] * d[0] * d[1] ** 2
        + 2.0 * s[0, j] * d[i] * d[0] * d[1] ** 2
        + _e_sq_pair(s, 1, i, j) * d[0] ** 2
        + s[1, 1] * d[0] ** 2 * d[i] * d[j]
        + 2.0 * s[1, i] * d[1] * d[0] ** 2 * d[j]
        + 2.0 * s[1, j] * d[1] * d[0] ** 2 * d[i]
        + s[i, j] * d[0] ** 2 * d[1] ** 2
        + d[0] ** 2 * d[1] ** 2 * d[i] * d[j]
    )


def _pair_inverses(pc: PairConditional):
    inv1 = np.linalg.inv(pc.pair.cov)
    inv_bar = np.linalg.inv(pc.cond.cov)
    _, log_det1 = np.linalg.slogdet(pc.pair.cov)
    _, log_det_bar = np.linalg.slogdet(pc.cond.cov)
    return inv1, inv_bar, log_det1, log_det_bar


def cond_wde_pair(pc: PairConditional, mode: str = "wick") -> float:
    """Weighted entropy of the conditional pair:
    0.5 log((2 pi)^2 |cond cov|) * Theta + 0.5 sum_ij inv(cond cov)_ij LambdaBar_ij."""
    check_formula_mode(mode)
    _, inv_bar, _, log_det_bar = _pair_inverses(pc)
    th = theta(pc)
    quad = sum(
        inv_bar[i, j] * lambda_bar(pc, i, j, mode) for i in range(2) for j in range(2)
    )
    return 0.5 * (2.0 * math.log(2.0 * math.pi) + log_det_bar) * th + 0.5 * quad


def cross_wde_pair(pc: PairConditional, mode: str = "wick") -> float:
    """Cross weighted entropy -int phi f(.|x3) log f of the pair:
    0.5 log((2 pi)^2 |pair cov|) * Theta + 0.5 sum_ij inv(pair cov)_ij Upsilon_ij."""
    check_formula_mode(mode)
    inv1, _, log_det1, _ = _pair_inverses(pc)
    th = theta(pc)
    quad = sum(
        inv1[i, j] * upsilon(pc, i, j, mode) for i in range(2) for j in range(2)
    )
    return 0.5 * (2.0 * math.log(2.0 * math.pi) + log_det1) * th + 0.5 * quad


def relative_we_pair(pc: PairConditional, mode: str = "wick") -> float:
    """Weighted divergence of the conditional pair from the marginal pair:
    0.5 log(|pair cov| / |cond cov|) * Theta + the Upsilon and LambdaBar sums."""
    check_formula_mode(mode)
    inv1, inv_bar, log_det1, log_det_bar = _pair_inverses(pc)
    th = theta(pc)
    ups = sum(
        inv1[i, j] * upsilon(pc, i, j, mode) for i in range(2) for j in range(2)
    )
    lam = sum(
        inv_bar[i, j] * lambda_bar(pc, i, j, mode) for i in range(2) for j in range(2)
    )
    return 0.5 * (log_det1 - log_det_bar) * th + 0.5 * ups - 0.5 * lam


def gibbs_gap(pc: PairConditional, centers=None) -> float:
    """Theta(x3) minus the unconditional product moment: the sign that decides
    whether the weighted Gibbs condition holds at this x3."""
    a = _centers(pc, centers)
    unconditional = shifted_moment(pc.pair.cov, pc.pair.mean - a, (2, 2))
    return theta(pc, a) - unconditional


# ---------------------------------------------------------------------------
# Verbatim transcriptions of the printed per-example formulas.  These exist to
# be measured against wick mode; several are known to deviate.
# ---------------------------------------------------------------------------


def _check_example1_rho(rho: float) -> float:
    r = float(rho)
    if 1.0 - r * r - r**4 <= 0.0:
        raise DomainError(f"rho={r!r} violates 1 - rho^2 - rho^4 > 0")
    return r


def _check_example2_rho(rho: float) -> float:
    r = float(rho)
    if not 0.0 < r < 0.5:
        raise DomainError(f"rho outside (0, 0.5): {r!r}")
    return r


def example1_relative_de_paper(rho: float, x3: float) -> float:
    """Printed closed form of the pair divergence for the first family
    (carries the transcribed +1 constant)."""
    r = _check_example1_rho(rho)
    r2, r4 = r * r, r**4
    return (
        0.5 * math.log((1.0 - r2) / (1.0 - r2 - r4))
        + r4 / (2.0 * (1.0 - r2)) * (x3 * x3 - 1.0)
        + 1.0
    )


def example2_relative_de_paper(rho: float, x3: float) -> float:
    """Printed closed form of the pair divergence for the second family
    (its final printed line subtracts 1, i.e. it equals the corrected value)."""
    r = _check_example2_rho(rho)
    return 0.5 * (1.0 + r + (1.0 - r) * x3 * x3 - math.log(r)) - 1.0


def example1_theta_paper(rho: float, x3: float) -> float:
    """Printed conditional product moment for the first family (exact)."""
    r = _check_example1_rho(rho)
    return 1.0 + 2.0 * r * r + r**4 * (x3 * x3 - 1.0)


def example2_theta_paper(rho: float, x3: float) -> float:
    """Printed conditional product moment for the second family.

    The constant term carries 4 rho^4 where the exact moment has 2 rho^4; the
    verify report flags the difference.
    """
    r = _check_example2_rho(rho)
    x2 = x3 * x3
    return (
        r * r * (2.0 - r) ** 2
        + 4.0 * r**4
        + 2.0 * r * (2.0 - r) * (1.0 - r) ** 2 * x2
        - 4.0 * r * r * (1.0 - r) ** 2 * x2
        + (1.0 - r) ** 4 * x2 * x2
    )


def _example1_sigma_bar(r: float) -> np.ndarray:
    return np.array([[1.0 - r**4, r], [r, 1.0]])


def _example1_alpha(r: float, i: int, j: int) -> float:
    s = _example1_sigma_bar(r)
    return (
        (1.0 - r**4) * (s[i, j] + 2.0 * s[1, i] * s[1, j])
        + 2.0 * r * (r * s[i, j] + s[0, i] * s[1, j] + s[0, j] * s[1, i])
        + s[0, i] * (2.0 * r * s[1, j] + s[0, j])
        + s[0, j] * (2.0 * r * s[1, i] + s[0, i])
    )


def example1_lambda_bar_paper(rho: float, x3: float, i: int, j: int) -> float:
    """Printed conditional-moment expansion for the first family (0-based i, j)."""
    r = _check_example1_rho(rho)
    s = _example1_sigma_bar(r)
    return _example1_alpha(r, i, j) + r**4 * x3 * x3 * (
        (1.0 - r**4) * s[i, j] + 2.0 * s[0, i] * s[0, j]
    )


def example1_upsilon_paper(rho: float, x3: float, i: int, j: int) -> float:
    """Printed shifted-moment expansion for the first family (0-based i, j)."""
    r = _check_example1_rho(rho)
    s = _example1_sigma_bar(r)
    d = np.array([r * r * x3, 0.0])
    beta = d[i] * d[j]
    theta_val = 1.0 + 2.0 * r * r + r**4 * (x3 * x3 - 1.0)
    return (
        _example1_alpha(r, i, j)
        + beta * theta_val
        + 2.0 * r * r * x3 * d[j] * (s[0, i] + 2.0 * r * s[1, i])
        + 2.0 * r * r * x3 * d[i] * (s[i, j] + 2.0 * r * s[1, j])
        + r**4 * x3 * x3 * (s[i, j] + 2.0 * s[1, i] * s[1, j])
    )


def example1_relative_we_paper(rho: float, x3: float) -> float:
    """Printed weighted-divergence closed form for the first family.

    Evaluated verbatim; its middle bracket is internally inconsistent, so it
    is reported against wick mode rather than asserted.
    """
    r = _check_example1_rho(rho)
    r2, r4, r6, r8 = r * r, r**4, r**6, r**8
    x2 = x3 * x3
    term1 = 0.5 * math.log((1.0 - r2) / (1.0 - r2 - r4)) * (
        1.0 + 2.0 * r2 + r4 * (x2 - 1.0)
    )
    term2 = (
        3.0 * (1.0 - r4) ** 2
        + 3.0 * (1.0 - r4)
        + 6.0 * r2
        - 6.0 * r4
        - 6.0 * r6 * x2
        + 9.0 * r4 * x2
        - 6.0 * r8 * x2
        + r8 * x2
    ) / (2.0 * (1.0 - r2))
    term3 = -(
        6.0 * r2 * (1.0 - r4)
        + 6.0 * (1.0 - r4) ** 2
        + 4.0 * r4 * (1.0 - r4) * x2
        - 12.0 * r4
        - 4.0 * r6 * (1.0 - r4) * x2
    ) / (2.0 * (1.0 - r2 - r4))
    return term1 + term2 + term3


def example2_lambda_bar_paper(rho: float, x3: float, i: int, j: int) -> float:
    """Printed appendix polynomials for the second family's conditional moments."""
    r = _check_example2_rho(rho)
    x2 = x3 * x3
    x4 = x2 * x2
    if i == j == 0:
        return (
            12.0 * r**5 * (2.0 - r)
            + 3.0 * r**3 * (2.0 - r) ** 3
            + 4.0 * x2 * r * r * (2.0 - r) ** 2 * (1.0 - r) ** 2
            + 2.0 * r**4 * x2 * (1.0 - r) ** 2
            + x4 * r * (2.0 - r) * (1.0 - r) ** 4
            - 12.0 * r**3 * x2 * (2.0 - r) * (1.0 - r) ** 2
        )
    if i == j == 1:
        return (
            3.0 * r**4 * (2.0 - r) ** 3
            + 12.0 * r**5 * (2.0 - r)
            + 4.0 * r * r * x2 * (2.0 - r) ** 2 * (1.0 - r) ** 2
            + 2.0 * r**4 * x2 * (1.0 - r) ** 2
            + x4 * r * (2.0 - r) * (1.0 - r) ** 4
            - 12.0 * x2 * r**3 * (2.0 - r) * (1.0 - r) ** 2
        )
    return (
        -9.0 * r**4 * (2.0 - r) ** 2
        - 6.0 * r**6
        - 6.0 * x2 * (1.0 - r) ** 2 * r**3 * (2.0 - r)
        - r * r * x4 * (1.0 - r) ** 4
        + 8.0 * r**4 * x2 * (1.0 - r) ** 2
        + 4.0 * r * r * x2 * (1.0 - r) ** 2 * (2.0 - r) ** 2
    )


def example2_upsilon_paper(rho: float, x3: float, i: int, j: int) -> float:
    """Printed appendix polynomials for the second family's shifted moments."""
    r = _check_example2_rho(rho)
    x2 = x3 * x3
    x4 = x2 * x2
    x6 = x2 * x4
    base = r * r * (2.0 - r) ** 2 + 2.0 * r**4
    if i == j == 0:
        return (
            12.0 * r**5 * (2.0 - r)
            + 3.0 * r**3 * (2.0 - r) ** 3
            + 2.0 * (1.0 - r) ** 2 * x2 * base
            - 24.0 * (1.0 - r) ** 2 * x2 * r**3 * (2.0 - r)
            + 3.0 * (1.0 - r) ** 2 * x2 * r * r * (2.0 - r) ** 2
            + (1.0 - r) ** 6 * x6
            + 4.0 * (1.0 - r) ** 2 * x2 * (r * r * (2.0 - r) ** 2 - 2.0 * r**3 * (2.0 - r))
            - 8.0 * r * r * (1.0 - r) ** 4 * x4
            + 7.0 * r * (2.0 - r) * (1.0 - r) ** 4 * x4
        )
    if i == j == 1:
        return (
            3.0 * r**4 * (2.0 - r) ** 3
            + 12.0 * r**5 * (2.0 - r)
            + 6.0 * (1.0 - r) ** 2 * x2 * base
            - 24.0 * (1.0 - r) ** 2 * x2 * r**3 * (2.0 - r)
            + (1.0 - r) ** 6 * x6
            + 7.0 * r * (2.0 - r) * (1.0 - r) ** 4 * x4
            - 8.0 * r * r * (1.0 - r) ** 4 * x4
            + 3.0 * r * r * (2.0 - r) ** 2 * (1.0 - r) ** 2 * x2
        )
    return (
        -9.0 * r**4 * (2.0 - r) ** 2
        - 6.0 * r**6
        + 9.0 * (1.0 - r) ** 2 * x2 * base
        + (1.0 - r) ** 6 * x6
        - 18.0 * (1.0 - r) ** 2 * x2 * r**3 * (2.0 - r)
        + 6.0 * r * (2.0 - r) * (1.0 - r) ** 4 * x4
        - 6.0 * r * r * (1.0 - r) ** 4 * x4
    )


def example2_relative_we_paper(rho: float, x3: float) -> float:
    """Printed weighted-divergence closed form for the second family.

    Evaluated verbatim with its printed coefficients (including the extra
    (2 pi)^2 inside the log and a single off-diagonal shifted-moment term).
    """
    r = _check_example2_rho(rho)
    theta_val = example2_theta_paper(r, x3)
    det_bar = r * r * (2.0 - r) ** 2 - r**4
    log_term = 0.5 * math.log(
        (2.0 * math.pi) ** 2 * (4.0 * r * (1.0 - r) / det_bar)
    ) * theta_val
    ups_term = (
        example2_upsilon_paper(r, x3, 0, 0)
        + example2_upsilon_paper(r, x3, 1, 1)
        + (2.0 * r - 1.0) * example2_upsilon_paper(r, x3, 0, 1)
    ) / (8.0 * r * (1.0 - r))
    lam_term = -(
        r * (2.0 - r)
        * (example2_lambda_bar_paper(r, x3, 0, 0) + example2_lambda_bar_paper(r, x3, 1, 1))
        + 2.0 * r * r * example2_lambda_bar_paper(r, x3, 0, 1)
    ) / (2.0 * det_bar)
    return log_term + ups_term + lam_term
