import math

import numpy as np
import pytest

from helpers import rand_spd
from wentropy.errors import (
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)
from wentropy.gaussian import (
    ConditionSpec,
    Gaussian,
    condition,
    example1_cov,
    example2_cov,
    gaussian_de,
    gaussian_kl,
    validate,
)
from wentropy.quadrature import GridSpec, de_quadrature, relative_wde_quadrature


def test_validate_identity_ok():
    validate(Gaussian(np.zeros(3), np.eye(3)))


def test_validate_example2_spd():
    validate(example2_cov(0.3))


def test_validate_example1_rho_one_not_pd():
    cov = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
    with pytest.raises(NotPositiveDefiniteError) as err:
        validate(Gaussian(np.zeros(3), cov))
    assert "minor" in str(err.value) or "eigenvalue" in str(err.value)


def test_validate_not_symmetric_names_entry():
    cov = np.eye(3)
    cov[0, 2] = 0.5
    with pytest.raises(NotSymmetricError) as err:
        validate(Gaussian(np.zeros(3), cov))
    assert "0" in str(err.value) and "2" in str(err.value)


def test_condition_example1_matches_printed_form():
    rho, x3 = 0.5, 2.0
    out = condition(example1_cov(rho), ConditionSpec((0, 1), (2,), [x3]))
    assert out.mean == pytest.approx([rho**2 * x3, 0.0], abs=1e-14)
    expected = np.array([[1 - rho**4, rho], [rho, 1.0]])
    assert np.allclose(out.cov, expected, atol=1e-14)


def test_condition_example2_matches_printed_form():
    rho, x3 = 0.25, -1.5
    out = condition(example2_cov(rho), ConditionSpec((0, 1), (2,), [x3]))
    assert out.mean == pytest.approx([(1 - rho) * x3, (1 - rho) * x3], abs=1e-14)
    expected = np.array(
        [[rho * (2 - rho), -(rho**2)], [-(rho**2), rho * (2 - rho)]]
    )
    assert np.allclose(out.cov, expected, atol=1e-14)


def test_condition_rho_zero_equals_marginal():
    dist = example1_cov(0.0)
    out = condition(dist, ConditionSpec((0, 1), (2,), [1.7]))
    marg = dist.marginal([0, 1])
    assert np.allclose(out.mean, marg.mean, atol=1e-15)
    assert np.allclose(out.cov, marg.cov, atol=1e-15)


def test_condition_empty_given_is_exact_slice():
    rng = np.random.default_rng(3)
    dist = Gaussian(rng.normal(size=4), rand_spd(rng, 4))
    out = condition(dist, ConditionSpec((1, 3), (), []))
    assert np.array_equal(out.mean, dist.mean[[1, 3]])
    assert np.array_equal(out.cov, dist.cov[np.ix_([1, 3], [1, 3])])


def test_condition_schur_determinant_identity():
    rng = np.random.default_rng(11)
    for _ in range(50):
        dist = Gaussian(rng.normal(size=3), rand_spd(rng, 3))
        out = condition(dist, ConditionSpec((0, 1), (2,), [rng.normal()]))
        lhs = np.linalg.det(dist.cov)
        rhs = dist.cov[2, 2] * np.linalg.det(out.cov)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_condition_spec_validation():
    with pytest.raises(ValueError):
        ConditionSpec((0, 1), (1,), [0.0])
    with pytest.raises(DimensionMismatchError):
        ConditionSpec((0,), (1, 2), [0.0])


def test_example1_cov_values_and_domain():
    assert np.array_equal(example1_cov(0.0).cov, np.eye(3))
    dist = example1_cov(0.5)
    assert np.linalg.det(dist.cov[:2, :2]) == pytest.approx(0.75, abs=1e-15)
    assert np.linalg.det(dist.cov) == pytest.approx(0.6875, abs=1e-15)
    with pytest.raises(NotPositiveDefiniteError):
        example1_cov(0.9)


def test_example2_cov_entries_and_domain():
    dist = example2_cov(0.25)
    assert dist.cov[0, 1] == pytest.approx(0.5)
    assert dist.cov[0, 2] == pytest.approx(0.75)
    assert dist.cov[1, 2] == pytest.approx(0.75)
    for bad in (0.0, 0.5, 0.6, -0.1):
        with pytest.raises(DomainError):
            example2_cov(bad)


def test_example2_quadratic_form_identity():
    # C' S C = (1-rho)(c1+c2+c3)^2 + rho(c1-c2)^2 + rho c3^2; the probe
    # C = (1, -1, 0) gives 2 - 2*S12 = 4 rho on both sides
    rng = np.random.default_rng(42)
    for rho in (0.1, 0.25, 0.4):
        cov = example2_cov(rho).cov
        for _ in range(100):
            c = rng.normal(size=3)
            lhs = c @ cov @ c
            rhs = (
                (1 - rho) * c.sum() ** 2
                + rho * (c[0] - c[1]) ** 2
                + rho * c[2] ** 2
            )
            assert lhs == pytest.approx(rhs, abs=1e-12)
    c = np.array([1.0, -1.0, 0.0])
    cov = example2_cov(0.25).cov
    assert c @ cov @ c == pytest.approx(1.0, abs=1e-15)
    zero = np.zeros(3)
    assert zero @ cov @ zero == 0.0


def test_gaussian_de_univariate_values():
    dist = Gaussian([0.0], [[1.0]])
    assert gaussian_de(dist, "corrected") == pytest.approx(
        0.5 * math.log(2 * math.pi * math.e), abs=1e-14
    )
    assert gaussian_de(dist, "paper") == pytest.approx(
        0.5 * math.log(2 * math.pi), abs=1e-14
    )


def test_gaussian_de_mode_offset_is_half_dim():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 4):
        dist = Gaussian(rng.normal(size=n), rand_spd(rng, n))
        diff = gaussian_de(dist, "corrected") - gaussian_de(dist, "paper")
        assert diff == pytest.approx(n / 2, abs=1e-14)


def test_gaussian_de_matches_quadrature_50_seeds():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        dist = Gaussian(rng.normal(size=3), rand_spd(rng, 3))
        grid = GridSpec.for_gaussian(dist, 48)
        assert gaussian_de(dist, "corrected") == pytest.approx(
            de_quadrature(dist.pdf, grid), abs=1e-5
        )


def test_gaussian_kl_zero_iff_equal_and_nonnegative():
    rng = np.random.default_rng(5)
    dist = Gaussian(rng.normal(size=3), rand_spd(rng, 3))
    assert gaussian_kl(dist, dist) == 0.0
    for _ in range(20):
        f = Gaussian(rng.normal(size=3), rand_spd(rng, 3))
        g = Gaussian(rng.normal(size=3), rand_spd(rng, 3))
        assert gaussian_kl(f, g) >= 0.0


def test_gaussian_kl_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        gaussian_kl(Gaussian([0.0], [[1.0]]), Gaussian([0.0, 0.0], np.eye(2)))


def test_gaussian_kl_matches_quadrature():
    f = Gaussian([0.3], [[1.2]])
    g = Gaussian([-0.5], [[0.8]])
    grid = GridSpec.for_gaussians([f, g], 4096)
    quad = relative_wde_quadrature(f.pdf, g.pdf, None, grid)
    assert gaussian_kl(f, g) == pytest.approx(quad, abs=1e-6)


def test_gaussian_kl_conditional_vs_marginal():
    # independent third coordinate: conditioning changes nothing
    dist = example1_cov(0.0)
    cond = condition(dist, ConditionSpec((0, 1), (2,), [1.0]))
    assert gaussian_kl(cond, dist.marginal([0, 1])) == pytest.approx(0.0, abs=1e-15)
    # coupled case: the divergence equals the transcribed closed form minus 1
    rho, x3 = 0.4, 1.0
    dist = example1_cov(rho)
    cond = condition(dist, ConditionSpec((0, 1), (2,), [x3]))
    printed = (
        0.5 * math.log((1 - rho**2) / (1 - rho**2 - rho**4))
        + rho**4 / (2 * (1 - rho**2)) * (x3**2 - 1)
        + 1.0
    )
    assert gaussian_kl(cond, dist.marginal([0, 1])) == pytest.approx(
        printed - 1.0, abs=1e-12
    )
