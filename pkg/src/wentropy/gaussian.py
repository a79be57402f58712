"""Multivariate Gaussian container: validation, conditioning, entropy and KL closed forms.

Entropy values are in nats.  Every formula with a known constant discrepancy
takes an explicit mode: ``"paper"`` evaluates the transcribed closed form
verbatim, ``"corrected"`` the analytically exact one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SingularGivenBlockError,
)

SYMMETRY_ATOL = 1e-12
# smallest eigenvalue must be at least this fraction of the largest
SPD_EIG_RATIO = 1e-10
MAX_DIM = 6

ENTROPY_MODES = ("paper", "corrected")


def check_entropy_mode(mode: str) -> str:
    if mode not in ENTROPY_MODES:
        raise ValueError(f"mode must be one of {ENTROPY_MODES}, got {mode!r}")
    return mode


def _float_array(x, name: str, ndim: int) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Gaussian:
    """Mean vector and covariance matrix of a multivariate normal.

    Construction checks shapes and finiteness only; symmetry and positive
    definiteness are the job of :func:`validate`, which every downstream
    operation calls.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _float_array(self.mean, "mean", ndim=1)
        cov = _float_array(self.cov, "cov", ndim=2)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"cov shape {cov.shape} does not match mean length {mean.size}"
            )
        if mean.size == 0 or mean.size > MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {mean.size}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size

    def chol(self) -> np.ndarray:
        """Lower Cholesky factor of the covariance."""
        validate(self)
        return np.linalg.cholesky(self.cov)

    def log_pdf(self, points: np.ndarray) -> np.ndarray:
        """Log density at ``points`` of shape (m, dim)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"points have dimension {pts.shape[1]}, distribution has {self.dim}"
            )
        lower = self.chol()
        centered = pts - self.mean
        # solve L z = (x - mu)^T, quadratic form = |z|^2
        z = np.linalg.solve(lower, centered.T)
        quad = np.sum(z * z, axis=0)
        log_det = 2.0 * np.sum(np.log(np.diag(lower)))
        return -0.5 * (self.dim * np.log(2.0 * np.pi) + log_det + quad)

    def pdf(self, points: np.ndarray) -> np.ndarray:
        return np.exp(self.log_pdf(points))

    def marginal(self, indices) -> "Gaussian":
        idx = list(indices)
        return Gaussian(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def sampler(self):
        """Return ``draw(rng, n) -> (n, dim)`` sampling from this distribution."""
        lower = self.chol()

        def draw(rng: np.random.Generator, n: int) -> np.ndarray:
            z = rng.standard_normal((n, self.dim))
            return self.mean + z @ lower.T

        return draw


@dataclass(frozen=True)
class ConditionSpec:
    """Keep coordinates ``kept``, fix coordinates ``given`` to ``value`` (0-based)."""

    kept: tuple
    given: tuple
    value: np.ndarray

    def __post_init__(self):
        kept = tuple(int(i) for i in self.kept)
        given = tuple(int(i) for i in self.given)
        value = _float_array(np.atleast_1d(self.value), "value", ndim=1)
        if set(kept) & set(given):
            raise ValueError(f"kept {kept} and given {given} overlap")
        if len(set(kept)) != len(kept) or len(set(given)) != len(given):
            raise ValueError("kept/given indices must be distinct")
        if value.size != len(given):
            raise DimensionMismatchError(
                f"value length {value.size} does not match given set size {len(given)}"
            )
        object.__setattr__(self, "kept", kept)
        object.__setattr__(self, "given", given)
        object.__setattr__(self, "value", value)


def validate(dist: Gaussian) -> None:
    """Check symmetry and positive definiteness, raising a named error otherwise."""
    cov = dist.cov
    asym = np.abs(cov - cov.T)
    if asym.max() > SYMMETRY_ATOL:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise NotSymmetricError(
            f"cov[{i},{j}]={cov[i, j]!r} vs cov[{j},{i}]={cov[j, i]!r} "
            f"(difference {asym[i, j]:.3e})"
        )
    for k in range(1, dist.dim + 1):
        minor = float(np.linalg.det(cov[:k, :k]))
        if minor <= 0.0:
            raise NotPositiveDefiniteError(
                f"leading principal minor of order {k} is {minor:.6e} (must be > 0)"
            )
    eigs = np.linalg.eigvalsh(cov)
    if eigs[0] < SPD_EIG_RATIO * eigs[-1]:
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {eigs[0]:.6e} below {SPD_EIG_RATIO:g} x largest {eigs[-1]:.6e}"
        )


def condition(dist: Gaussian, spec: ConditionSpec) -> Gaussian:
    """Conditional distribution of the kept coordinates given the fixed ones.

    An empty given-set returns the marginal on the kept coordinates exactly
    (pure slicing, no arithmetic).
    """
    validate(dist)
    n = dist.dim
    for i in spec.kept + spec.given:
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range for dimension {n}")
    if not spec.given:
        return dist.marginal(spec.kept)
    a = list(spec.kept)
    b = list(spec.given)
    cov_aa = dist.cov[np.ix_(a, a)]
    cov_ab = dist.cov[np.ix_(a, b)]
    cov_bb = dist.cov[np.ix_(b, b)]
    try:
        lower = np.linalg.cholesky(cov_bb)
    except np.linalg.LinAlgError as exc:
        raise SingularGivenBlockError(
            f"covariance block of given coordinates {tuple(b)} is not invertible"
        ) from exc
    # gain = cov_ab @ cov_bb^{-1} via two triangular solves
    gain = np.linalg.solve(lower.T, np.linalg.solve(lower, cov_ab.T)).T
    mean = dist.mean[a] + gain @ (spec.value - dist.mean[b])
    cov = cov_aa - gain @ cov_ab.T
    cov = 0.5 * (cov + cov.T)
    out = Gaussian(mean, cov)
    validate(out)
    return out


def example1_cov(rho: float) -> Gaussian:
    """First bundled trivariate family: unit variances, couplings (rho, rho^2, 0).

    Positive definite iff 1 - rho^2 - rho^4 > 0.
    """
    r = float(rho)
    cov = np.array([[1.0, r, r * r], [r, 1.0, 0.0], [r * r, 0.0, 1.0]])
    dist = Gaussian(np.zeros(3), cov)
    validate(dist)
    return dist


def example2_cov(rho: float) -> Gaussian:
    """Second bundled trivariate family: unit variances, couplings (1-2rho, 1-rho, 1-rho).

    Requires 0 < rho < 1/2.  The quadratic form decomposes as
    (1-rho)(c1+c2+c3)^2 + rho(c1-c2)^2 + rho c3^2, hence positive definite.
    """
    r = float(rho)
    if not 0.0 < r < 0.5:
        raise DomainError(f"rho outside (0, 0.5): {r!r}")
    cov = np.array(
        [
            [1.0, 1.0 - 2.0 * r, 1.0 - r],
            [1.0 - 2.0 * r, 1.0, 1.0 - r],
            [1.0 - r, 1.0 - r, 1.0],
        ]
    )
    dist = Gaussian(np.zeros(3), cov)
    validate(dist)
    return dist


def gaussian_de(dist: Gaussian, mode: str = "corrected") -> float:
    """Differential entropy of a Gaussian in nats.

    ``"paper"`` evaluates 0.5 log((2 pi)^n |cov|); ``"corrected"`` adds the n/2
    term, i.e. uses (2 pi e)^n, which is what quadrature of -f log f gives.
    """
    check_entropy_mode(mode)
    validate(dist)
    _, log_det = np.linalg.slogdet(dist.cov)
    value = 0.5 * (dist.dim * np.log(2.0 * np.pi) + log_det)
    if mode == "corrected":
        value += 0.5 * dist.dim
    return float(value)


def gaussian_kl(f: Gaussian, g: Gaussian) -> float:
    """Kullback-Leibler divergence KL(f || g) between Gaussians, in nats."""
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimensions differ: {f.dim} vs {g.dim}")
    validate(f)
    validate(g)
    lower = np.linalg.cholesky(g.cov)
    solve = lambda rhs: np.linalg.solve(lower.T, np.linalg.solve(lower, rhs))
    trace = float(np.trace(solve(f.cov)))
    diff = g.mean - f.mean
    quad = float(diff @ solve(diff))
    _, log_det_f = np.linalg.slogdet(f.cov)
    _, log_det_g = np.linalg.slogdet(g.cov)
    return 0.5 * (trace + quad - f.dim + (log_det_g - log_det_f))
