import math

import numpy as np
import pytest

from sharpconst.exceptions import InsufficientData
from sharpconst.limits import (BESSEL, GEGENBAUER, LimitEstimate, ScaledSequence, bessel_origin_sequence,
                               default_ns, extrapolate, gegenbauer_endpoint_sequence, rescaled_ratio,
                               scaling_exponent, trial_lower_bound, verify_relation)

INV_SQRT_PI = 1 / math.sqrt(math.pi)


def test_default_ns():
    assert default_ns(2.0) == (8, 12, 16, 24, 32, 48, 64, 96)
    assert default_ns(math.inf) == default_ns(2.0)
    assert max(default_ns(3.0)) == 32
    assert min(default_ns(2.0, N=4)) >= 10


def test_scaling_exponent():
    assert scaling_exponent(-0.5, 0, 2.0) == pytest.approx(0.5)
    assert scaling_exponent(0.5, 1, 1.0) == pytest.approx(5.0)
    assert scaling_exponent(3.0, 2, math.inf) == 4.0


def test_bessel_pinf_constant_one():
    seq = bessel_origin_sequence(-0.5, 0, math.inf, [8, 16, 32])
    np.testing.assert_allclose(seq.scaled, 1.0, atol=1e-9)


def test_bessel_l2_n40_near_limit():
    seq = bessel_origin_sequence(-0.5, 0, 2.0, [40])
    assert seq.scaled[0] == pytest.approx(INV_SQRT_PI, rel=0.05)


def test_bessel_derivative_onset():
    seq = bessel_origin_sequence(0.0, 1, 2.0, [6, 8])
    a, b = seq.scaled
    assert abs(a - b) <= 0.3 * max(a, b)


def test_gegenbauer_l2_closed_form():
    ns = [4, 8, 16, 32]
    seq = gegenbauer_endpoint_sequence(0.0, 0, 2.0, ns)
    np.testing.assert_allclose(seq.raw, [(n + 1) / math.sqrt(2) for n in ns], rtol=1e-10)
    np.testing.assert_allclose(seq.scaled, [(n + 1) / n / math.sqrt(2) for n in ns], rtol=1e-10)


def test_gegenbauer_pinf_ones():
    seq = gegenbauer_endpoint_sequence(0.5, 0, math.inf, [8, 12])
    np.testing.assert_allclose(seq.raw, 1.0, atol=1e-9)
    np.testing.assert_allclose(seq.scaled, 1.0, atol=1e-9)


@pytest.mark.parametrize("family", [bessel_origin_sequence, gegenbauer_endpoint_sequence])
def test_raw_monotone_and_positive(family):
    seq = family(0.5, 1, 2.0, [4, 6, 8, 12])
    assert all(s > 0 for s in seq.scaled)
    assert all(b >= a * (1 - 1e-9) for a, b in zip(seq.raw, seq.raw[1:]))


@pytest.mark.parametrize("nu,N,p", [(0.0, 0, 2.0), (0.5, 1, 2.0), (0.0, 0, 1.0), (-0.5, 0, math.inf)])
def test_rescaled_ratio_identity(nu, N, p):
    seq = bessel_origin_sequence(nu, N, p, [8, 12])
    for i in range(len(seq.ns)):
        assert rescaled_ratio(seq, i) == pytest.approx(seq.scaled[i], rel=1e-8)


def test_rescaled_ratio_family_check():
    seq = gegenbauer_endpoint_sequence(0.0, 0, 2.0, [4])
    with pytest.raises(ValueError):
        rescaled_ratio(seq, 0)


def test_sequence_validation():
    with pytest.raises(ValueError):
        bessel_origin_sequence(-0.7, 0, 2.0, [8])
    with pytest.raises(ValueError):
        bessel_origin_sequence(0.0, 0, 2.0, [8, 4])
    with pytest.raises(ValueError):
        gegenbauer_endpoint_sequence(0.0, 2, 2.0, [4, 8])


def test_threads_do_not_change_values():
    a = bessel_origin_sequence(0.0, 0, 2.0, [8, 12, 16], threads=1)
    b = bessel_origin_sequence(0.0, 0, 2.0, [8, 12, 16], threads=3)
    assert a.scaled == b.scaled


def test_to_dict_rows():
    seq = gegenbauer_endpoint_sequence(0.0, 0, 2.0, [4, 6])
    d = seq.to_dict()
    assert d["family"] == GEGENBAUER
    assert [r["n"] for r in d["rows"]] == [4, 6]
    assert all(r["error"] is None for r in d["rows"])


def test_extrapolate_constant():
    est = extrapolate(([1, 2, 3, 4], [0.7] * 4))
    assert est.value == 0.7 and est.error_estimate == 0.0


def test_extrapolate_harmonic_tail():
    ns = list(range(10, 81, 10))
    est = extrapolate((ns, [0.5 + 1 / n for n in ns]))
    assert est.method == "Aitken"
    assert est.value == pytest.approx(0.5, abs=1e-3)


def test_extrapolate_harmonic_tail_without_doubling():
    ns = [10, 11, 13, 17, 23, 31]
    est = extrapolate((ns, [0.5 + 1 / n for n in ns]))
    assert abs(est.value - 0.5) <= abs(0.5 + 1 / 31 - 0.5)


def test_extrapolate_falls_back_on_oscillation():
    est = extrapolate(([1, 2, 3, 4], [1.0, 1.2, 0.9, 1.1]))
    assert est.method == "LastValue"
    assert est.value == 1.1
    assert est.error_estimate == pytest.approx(0.2)


def test_extrapolate_richardson():
    ns = [10, 20, 40, 80]
    est = extrapolate((ns, [0.5 + 1 / n for n in ns]), method="richardson")
    assert est.method == "Richardson" and est.value == pytest.approx(0.5, abs=1e-12)


def test_extrapolate_needs_four():
    with pytest.raises(InsufficientData):
        extrapolate(([1, 2, 3], [1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        extrapolate(([1, 2, 3, 4], [1.0] * 4), method="shanks")


def test_extrapolate_skips_failed_entries():
    seq = ScaledSequence(BESSEL, 0.0, 0, 2.0, [8, 16, 32, 64], [1, None, 1, 1], [1.0, None, 1.0, 1.0],
                         [True, False, True, True], failures={16: "LPFailure: x"})
    with pytest.raises(InsufficientData):
        extrapolate(seq)


def test_bessel_l2_limit():
    est = extrapolate(bessel_origin_sequence(-0.5, 0, 2.0))
    assert est.value == pytest.approx(INV_SQRT_PI, rel=0.01)


def test_limit_estimate_dict():
    d = LimitEstimate(1.0, 0.1, "Aitken", 0.9, 1.05).to_dict()
    assert d == {"value": 1.0, "error_estimate": 0.1, "method": "Aitken", "trial_lower_bound": 0.9,
                 "last_raw": 1.05}


def test_trial_sinc_exact():
    assert trial_lower_bound(-0.5, 0, 2.0) == pytest.approx(INV_SQRT_PI, abs=1e-10)


def test_trial_pinf_is_one():
    for nu in (-0.5, 0.0, 1.5):
        assert trial_lower_bound(nu, 0, math.inf) == pytest.approx(1.0, abs=1e-14)


def test_trial_sinc_squared():
    # sinc(t/2)^2 has unit L1 value at 0 and integral 2*pi
    assert trial_lower_bound(-0.5, 0, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-8)


def test_trial_extra_factor_is_weaker_here():
    assert trial_lower_bound(-0.5, 0, 2.0, d_extra=1) < trial_lower_bound(-0.5, 0, 2.0)


def test_trial_validation():
    with pytest.raises(ValueError):
        trial_lower_bound(-1.0, 0, 2.0)
    with pytest.raises(ValueError):
        trial_lower_bound(0.0, 0, 2.0, d_extra=-1)


@pytest.mark.parametrize("nu,N,p", [(0.0, 0, 2.0), (0.5, 1, 2.0), (0.0, 1, math.inf), (0.5, 0, 1.0)])
def test_trial_feasible(nu, N, p):
    ns = (8, 12, 16, 24, 32) if p == 1 else None
    est = extrapolate(bessel_origin_sequence(nu, N, p, ns))
    assert trial_lower_bound(nu, N, p) <= est.value + est.error_estimate


def test_verify_c4_6_p2():
    rep = verify_relation("C4_6", p=2.0)
    assert rep["status"] == "pass"
    assert rep["predicted"] == pytest.approx(math.sqrt(2))
    assert rep["observed"] == pytest.approx(math.sqrt(2), rel=0.02)


def test_verify_t4_1_pinf():
    rep = verify_relation("T4_1", p=math.inf, nu=1.0, ns=[8, 12, 16, 24])
    assert rep["passed"] and rep["checks"]["scaled_constant_one"]


def test_verify_c4_4_ball():
    rep = verify_relation("C4_4", p=2.0, m=2, ns=[8, 16, 32, 64])
    assert rep["checks"]["reduction"] and rep["checks"]["exponent"]
    assert rep["status"] == "pass"


def test_verify_indicative_below_one():
    rep = verify_relation("T4_3", p=0.8, nu=0.0, ns=[4, 6, 8, 10])
    assert rep["status"] in ("indicative", "solver_failure")


def test_verify_errors():
    with pytest.raises(ValueError):
        verify_relation("T9_9", p=2.0)
    with pytest.raises(ValueError):
        verify_relation("C4_4", p=2.0)
    with pytest.raises(ValueError):
        verify_relation("C4_5", p=1.0, m=3)
