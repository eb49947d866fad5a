import numpy as np
import pytest
import sympy as sp

from oracles import naive_bessel, sym_d_nu_b, sym_gegenbauer_op, sym_poly, t_sym
from sharpconst.exceptions import ZeroScale
from sharpconst.operators import (OperatorSpec, bessel_apply, bessel_at_zero, bessel_j_even_series, d_nu_b_apply,
                                  gegenbauer_apply, gegenbauer_at_one)
from sharpconst.polybasis import EvenPolyCoeffs, PolyCoeffs1D, evaluate, to_gegenbauer, to_monomial
from sharpconst.quadrature import sup_norm


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.3, 2.0])
def test_bessel_t2(nu):
    out = bessel_apply(EvenPolyCoeffs([0, 1]), nu, 1)
    assert out.coeffs[0] == pytest.approx(4 * (1 + nu))
    assert bessel_at_zero(EvenPolyCoeffs([0, 1]), nu, 1) == pytest.approx(4 * (1 + nu))


def test_bessel_examples():
    p = EvenPolyCoeffs([3, 1, 2])
    np.testing.assert_array_equal(bessel_apply(p, 0.7, 0).coeffs, p.coeffs)
    assert bessel_apply(EvenPolyCoeffs([0, 0, 1]), 0.5, 2).coeffs[0] == pytest.approx(120)
    assert bessel_at_zero(EvenPolyCoeffs([0, 0, 1]), 0.5, 2) == pytest.approx(120)
    assert bessel_at_zero(p, 1.0, 0) == 3
    assert bessel_at_zero(p, 1.0, 3) == 0


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 3.5])
@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_bessel_closed_form_vs_naive(nu, l):
    c = np.random.default_rng(int(10 * nu) + l + 5).standard_normal(21)
    got = bessel_apply(EvenPolyCoeffs(c), nu, l).coeffs
    want = naive_bessel(c, nu, l)
    np.testing.assert_allclose(got, want[: got.size], rtol=1e-11, atol=1e-11 * np.abs(want).max())


def test_gegenbauer_apply_examples():
    out = gegenbauer_apply(PolyCoeffs1D([0, 1], lam=0.5), 1)
    np.testing.assert_allclose(out.coeffs, [0, -2])
    q = PolyCoeffs1D([1, 2, 3], lam=1.0)
    np.testing.assert_array_equal(gegenbauer_apply(q, 0).coeffs, q.coeffs)
    np.testing.assert_allclose(gegenbauer_apply(PolyCoeffs1D([0, 0, 1], lam=0.5), 1).coeffs, [0, 0, -6])


def test_gegenbauer_at_one_examples():
    q = PolyCoeffs1D([0.3, -1.0, 2.0])
    assert gegenbauer_at_one(q, 0.5, 0) == pytest.approx(evaluate(q, 1.0))
    assert gegenbauer_at_one(PolyCoeffs1D([0, 1], lam=0.5), 0.5, 1) == pytest.approx(-2)
    assert gegenbauer_at_one(PolyCoeffs1D([0, 0, 1]), 0.5, 1) == pytest.approx(-4)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.25])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_gegenbauer_vs_sympy(lam, N):
    c = np.random.default_rng(N).integers(-5, 6, 8).astype(float)
    want = sym_gegenbauer_op(sym_poly(c), lam, N)
    got = to_monomial(gegenbauer_apply(to_gegenbauer(PolyCoeffs1D(c), lam) if lam > 0 else to_gegenbauer(PolyCoeffs1D(c), lam), N))
    want_c = np.array([float(want.coeff(t_sym, k)) for k in range(got.coeffs.size)])
    np.testing.assert_allclose(got.coeffs, want_c, rtol=1e-9, atol=1e-9 * np.abs(want_c).max())
    assert gegenbauer_at_one(PolyCoeffs1D(c), lam, N) == pytest.approx(float(want.subs(t_sym, 1)), rel=1e-9)


def test_d_nu_b_examples():
    for nu in (-0.5, 0.0, 1.5):
        out = d_nu_b_apply(EvenPolyCoeffs([1, -0.5]), nu, 2)
        np.testing.assert_allclose(out.coeffs[:2], [-(2 * nu + 2), (2 * nu + 2) / 2], atol=1e-14)
    np.testing.assert_allclose(d_nu_b_apply(EvenPolyCoeffs([4.0]), 0.3, 3).coeffs, 0)
    np.testing.assert_allclose(d_nu_b_apply(EvenPolyCoeffs([0, 0, 1]), 0, 1).coeffs[:3], [0, 4, -6], atol=1e-14)
    with pytest.raises(ZeroScale):
        d_nu_b_apply(EvenPolyCoeffs([1, 1]), 0, 0)


@pytest.mark.parametrize("nu,b", [(0.0, 2.0), (0.5, 10.0), (2.5, 0.75)])
def test_d_nu_b_vs_sympy(nu, b):
    c = np.random.default_rng(7).integers(-4, 5, 5).astype(float)
    full = np.zeros(9)
    full[::2] = c
    want = sym_d_nu_b(sym_poly(full), nu, b)
    got = d_nu_b_apply(EvenPolyCoeffs(c), nu, b).coeffs
    want_c = np.array([float(want.coeff(t_sym, 2 * k)) for k in range(got.size)])
    np.testing.assert_allclose(got, want_c, rtol=1e-12, atol=1e-12 * np.abs(want_c).max())


def test_bessel_series_examples():
    np.testing.assert_allclose(bessel_j_even_series(0.7, 0.0, 4).coeffs, [1, 0, 0, 0, 0])
    np.testing.assert_allclose(bessel_j_even_series(0.0, 1.0, 1).coeffs, [1, -0.25])
    s = bessel_j_even_series(0.5, 1.0, 10)
    t = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(s(t), np.sinc(t / np.pi), atol=1e-15)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 1.0])
@pytest.mark.parametrize("c", [0.5, 4.0])
def test_bessel_eigen_relation(nu, c):
    f = bessel_j_even_series(nu, c, 25)
    lhs = bessel_apply(f, nu, 1)
    resid = lambda t: lhs(t) + c * EvenPolyCoeffs(f.coeffs[: lhs.coeffs.size])(t)
    assert np.abs(resid(np.linspace(-1, 1, 20001))).max() < 1e-10


def test_markov_type_bound():
    rng = np.random.default_rng(11)
    for _ in range(10):
        k = int(rng.integers(1, 9))
        P = EvenPolyCoeffs(rng.standard_normal(k + 1))
        nu, a, l = float(rng.choice([-0.5, 0.0, 1.0])), float(rng.uniform(0.5, 2)), int(rng.integers(1, 3))
        lhs = sup_norm(bessel_apply(P, nu, l), (-a, a))[0]
        rhs = ((2 * nu + 2) * (2 * k) ** 4 / a**2) ** l * sup_norm(P, (-a, a))[0]
        assert lhs <= rhs


def test_operator_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec.bessel_at_zero(-0.6, 1)
    with pytest.raises(ValueError):
        OperatorSpec.gegenbauer_at_one(-0.7, 1)
    assert OperatorSpec.bessel_at_zero(0, 2).parity_even
    assert not OperatorSpec.gegenbauer_at_one(0.5, 1).parity_even
