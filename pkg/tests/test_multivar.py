import math

import numpy as np
import pytest

from sharpconst.exceptions import UnsupportedDimension
from sharpconst.extremal import sharp_constant
from sharpconst.multivar import (DomainSpec, MultiPolyCoeffs, ball_lp_norm, haar_symmetrize_full, laplacian_apply,
                                 multivariate_sharp_constant, reduction_factor, sphere_lp_norm,
                                 sphere_surface_measure, univariate_counterpart, zonal_symmetrize)
from sharpconst.operators import bessel_at_zero
from sharpconst.polybasis import evaluate

INF = math.inf


def poly(m, terms):
    deg = max(sum(a) for a in terms)
    return MultiPolyCoeffs(m, deg, terms)


def radius_sq(m, power=1):
    P = poly(m, {tuple(2 * (i == j) for i in range(m)): 1.0 for j in range(m)})
    out = P
    for _ in range(power - 1):
        out = out * P
    return out


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_laplacian_of_radius_squared(m):
    L = laplacian_apply(radius_sq(m), 1)
    assert L(np.zeros((1, m)))[0] == pytest.approx(2 * m)
    assert L.degree == 0


def test_laplacian_examples():
    assert not any(laplacian_apply(poly(2, {(1, 1): 1.0}), 1).terms.values())
    L = laplacian_apply(radius_sq(3, 2), 1)
    x = np.random.default_rng(0).standard_normal((5, 3))
    np.testing.assert_allclose(L(x), 20 * (x**2).sum(1), rtol=1e-13)


def test_evaluation_matches_naive():
    rng = np.random.default_rng(1)
    P = MultiPolyCoeffs.random(3, 5, rng)
    x = rng.standard_normal((7, 3))
    naive = [sum(c * np.prod(xi ** np.array(a)) for a, c in P.terms.items()) for xi in x]
    np.testing.assert_allclose(P(x), naive, rtol=1e-10)


def test_sphere_measure():
    assert sphere_surface_measure(2) == pytest.approx(2 * math.pi)
    assert sphere_surface_measure(3) == pytest.approx(4 * math.pi)
    assert sphere_surface_measure(1) == 2


def test_ball_norm_examples():
    one2 = poly(2, {(0, 0): 1.0})
    assert ball_lp_norm(one2, 1.0) == pytest.approx(math.pi, rel=1e-10)
    assert ball_lp_norm(poly(3, {(0, 0, 0): 1.0}), 2.0) == pytest.approx(math.sqrt(4 * math.pi / 3), rel=1e-10)
    assert ball_lp_norm(poly(2, {(1, 0): 1.0}), 2.0) == pytest.approx(math.sqrt(math.pi / 4), rel=1e-10)


def test_sphere_norm_examples():
    assert sphere_lp_norm(poly(2, {(0, 0): 1.0}), 2.0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
    assert sphere_lp_norm(poly(3, {(1, 0, 0): 1.0}), 2.0) == pytest.approx(math.sqrt(4 * math.pi / 3), rel=1e-10)
    for p in (0.5, 1.0, 3.0):
        assert sphere_lp_norm(radius_sq(3), p) == pytest.approx((4 * math.pi) ** (1 / p), rel=1e-8)


def test_dimension_cap():
    with pytest.raises(UnsupportedDimension):
        ball_lp_norm(poly(4, {(0, 0, 0, 0): 1.0}), 2.0)
    with pytest.raises(ValueError):
        DomainSpec("sphere", 1)


def test_haar_examples():
    np.testing.assert_allclose(haar_symmetrize_full(poly(2, {(2, 0): 1.0})).coeffs, [0, 0.5], atol=1e-15)
    np.testing.assert_allclose(haar_symmetrize_full(radius_sq(3, 2)).coeffs, [0, 0, 1], atol=1e-14)
    np.testing.assert_allclose(haar_symmetrize_full(poly(3, {(1, 0, 0): 1.0})).coeffs, 0, atol=1e-15)


def _random_rotations(m, count, rng):
    q, r = np.linalg.qr(rng.standard_normal((count, m, m)))
    return q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]


@pytest.mark.parametrize("m", [2, 3])
def test_haar_normalisation_monte_carlo(m):
    rng = np.random.default_rng(2024 + m)
    P = MultiPolyCoeffs.random(m, 4, rng)
    x = np.full(m, 0.8 / math.sqrt(m))
    Rs = _random_rotations(m, 1_000_000, rng)
    samples = P(Rs @ x)
    mc, se = samples.mean(), samples.std() / math.sqrt(samples.size)
    exact = evaluate(haar_symmetrize_full(P), float(np.linalg.norm(x)))
    assert abs(mc - exact) < 5 * se + 1e-12
    assert abs(mc - exact) <= 5e-3 * max(abs(exact), samples.std())


def test_haar_half_degree_bound():
    rng = np.random.default_rng(3)
    for n in (3, 4, 5):
        Q = haar_symmetrize_full(MultiPolyCoeffs.random(3, n, rng))
        assert Q.half_degree <= n // 2


def test_zonal_examples():
    e1 = np.array([1.0, 0.0, 0.0])
    u = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(evaluate(zonal_symmetrize(poly(3, {(1, 0, 0): 1.0}), e1), u), u, atol=1e-12)
    np.testing.assert_allclose(evaluate(zonal_symmetrize(poly(3, {(0, 1, 0): 1.0}), e1), u), 0, atol=1e-12)
    np.testing.assert_allclose(evaluate(zonal_symmetrize(poly(3, {(0, 2, 0): 1.0}), e1), u), (1 - u**2) / 2, atol=1e-12)


def test_zonal_monte_carlo():
    rng = np.random.default_rng(9)
    P = MultiPolyCoeffs.random(3, 3, rng)
    a = np.array([0.0, 0.0, 1.0])
    u = 0.4
    phi = rng.uniform(0, 2 * math.pi, 400_000)
    s = math.sqrt(1 - u * u)
    pts = np.stack([s * np.cos(phi), s * np.sin(phi), np.full_like(phi, u)], axis=1)
    vals = P(pts)
    want = evaluate(zonal_symmetrize(P, a), u)
    assert abs(vals.mean() - want) < 5 * vals.std() / math.sqrt(vals.size)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("N", [0, 1, 2])
def test_functional_preserved_by_symmetrization(m, N):
    P = MultiPolyCoeffs.random(m, 5, np.random.default_rng(10 * m + N))
    lhs = laplacian_apply(P, N)(np.zeros((1, m)))[0]
    rhs = bessel_at_zero(haar_symmetrize_full(P), m / 2 - 1, N)
    assert rhs == pytest.approx(lhs, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("p", [1.0, 2.0, INF])
def test_rotation_invariance(m, p):
    rng = np.random.default_rng(int(m * 10 + min(p, 9)))
    P = MultiPolyCoeffs.random(m, 4, rng)
    R = _random_rotations(m, 1, rng)[0]
    PR = P.compose_linear(R)
    tol = {1.0: 1e-6, 2.0: 1e-9}.get(p, 1e-7)
    rel = 1e-5 if p == 1 else 1e-8
    assert ball_lp_norm(PR, p, tol=tol) == pytest.approx(ball_lp_norm(P, p, tol=tol), rel=rel)
    assert sphere_lp_norm(PR, p, tol=tol) == pytest.approx(sphere_lp_norm(P, p, tol=tol), rel=rel)


def test_reduction_factor_examples():
    assert reduction_factor(DomainSpec.ball(2, 2.0)) == pytest.approx(math.sqrt(1 / math.pi))
    assert reduction_factor(DomainSpec.sphere(3, 1.0)) == pytest.approx(1 / (2 * math.pi))
    assert reduction_factor(DomainSpec.ball(3, INF)) == 1.0
    assert reduction_factor(DomainSpec.sphere(2, INF)) == 1.0


def test_multivariate_examples():
    r = multivariate_sharp_constant(2, 0, 0, DomainSpec.ball(2, INF))
    assert r.value == pytest.approx(1.0, abs=1e-9)
    d = DomainSpec.ball(2, 2.0)
    want = reduction_factor(d) * sharp_constant(univariate_counterpart(d, 2, 0)).value
    assert multivariate_sharp_constant(2, 2, 0, d).value == pytest.approx(want, rel=1e-10)
    s = DomainSpec.sphere(3, 2.0)
    assert multivariate_sharp_constant(3, 1, 0, s).value == pytest.approx(math.sqrt(2) / math.sqrt(2 * math.pi), rel=1e-10)


@pytest.mark.parametrize("n", [2, 4])
@pytest.mark.parametrize("N", [0, 1])
def test_circle_reduction_p2(n, N):
    d = DomainSpec.sphere(2, 2.0)
    want = reduction_factor(d) * sharp_constant(univariate_counterpart(d, n, N)).value
    assert multivariate_sharp_constant(2, n, N, d).value == pytest.approx(want, rel=1e-6)


def test_multivariate_validation():
    with pytest.raises(UnsupportedDimension):
        multivariate_sharp_constant(4, 2, 0, DomainSpec.ball(4))
    with pytest.raises(ValueError):
        multivariate_sharp_constant(2, 2, 0, DomainSpec.ball(2, 3.0))
