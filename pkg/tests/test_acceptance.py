"""Acceptance checks, one per criterion.

Each check prints a single ``criterion k: PASS|FAIL`` line (also visible
under pytest's output capture).  Run directly with
``python tests/test_acceptance.py`` for the summary alone.
"""
import math
import time

import numpy as np
import pytest

from sharpconst.extremal import EvenPoly, ExtremalProblem, FullPoly, sharp_constant
from sharpconst.limits import (bessel_origin_sequence, extrapolate, gegenbauer_endpoint_sequence, trial_lower_bound,
                               verify_relation)
from sharpconst.multivar import (DomainSpec, MultiPolyCoeffs, ball_lp_norm, haar_symmetrize_full,
                                 multivariate_sharp_constant, radial_lp_norm, reduction_factor, sphere_lp_norm,
                                 univariate_counterpart, zonal_lp_norm, zonal_symmetrize)
from sharpconst.operators import OperatorSpec, d_nu_b_apply, gegenbauer_apply
from sharpconst.polybasis import PolyCoeffs1D, evaluate, substitute_quadratic
from sharpconst.quadrature import WeightSpec

INF = math.inf
_capture = None


@pytest.fixture(autouse=True)
def _grab_capsys(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(k, passed, detail):
    line = f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    return passed


def identity_tol(p):
    return 1e-6 if p == 2 else 1e-4


# 1 ------------------------------------------------------------------------

def check_1():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 21):
        prob = ExtremalProblem(FullPoly(n), WeightSpec(0.0, 0.0, (-1.0, 1.0), 2.0), OperatorSpec.identity(1.0))
        want = (n + 1) / math.sqrt(2)
        worst = max(worst, abs(sharp_constant(prob).value - want) / want)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 1.0
    return report(1, ok, f"max rel err {worst:.2e}, {elapsed:.2f}s")


# 2, 3 ---------------------------------------------------------------------

def _reduction(kind, ms):
    t0 = time.perf_counter()
    worst = {2.0: 0.0, INF: 0.0}
    for m in ms:
        for p in (2.0, INF):
            domain = DomainSpec(kind, m, p)
            for n in (2, 4, 6):
                for N in (0, 1):
                    lhs = multivariate_sharp_constant(m, n, N, domain).value
                    rhs = reduction_factor(domain) * sharp_constant(univariate_counterpart(domain, n, N)).value
                    worst[p] = max(worst[p], abs(lhs - rhs) / abs(rhs))
    elapsed = time.perf_counter() - t0
    ok = all(worst[p] <= identity_tol(p) for p in worst)
    return ok, f"max rel err p=2 {worst[2.0]:.2e}, p=inf {worst[INF]:.2e}, {elapsed:.1f}s", elapsed


def check_2():
    ok, detail, elapsed = _reduction("ball", (2, 3))
    return report(2, ok and elapsed < 120, detail)


def check_3():
    ok, detail, _ = _reduction("sphere", (3,))
    return report(3, ok, detail)


# 4 ------------------------------------------------------------------------

def check_4():
    t0 = time.perf_counter()
    est = extrapolate(bessel_origin_sequence(-0.5, 0, 2.0))
    elapsed = time.perf_counter() - t0
    want = 1 / math.sqrt(math.pi)
    err = abs(est.value - want) / want
    return report(4, err <= 0.01 and elapsed < 60, f"limit {est.value:.7f} vs {want:.7f} (rel {err:.1e}), "
                                                   f"{elapsed:.1f}s")


# 5, 10 --------------------------------------------------------------------

SWEEP = [(nu, N, p) for p in (1.0, 2.0, INF) for nu in (0.0, 0.5) for N in (0, 1)]


def check_5():
    bad = []
    worst = 0.0
    for nu, N, p in SWEEP:
        rep = verify_relation("T4_3", p=p, nu=nu, N=N, threads=4)
        if rep["status"] != "pass":
            bad.append((nu, N, p))
            continue
        worst = max(worst, abs(rep["observed"] / rep["predicted"] - 1) / rep["tolerance"])
    return report(5, not bad, f"{len(SWEEP) - len(bad)}/{len(SWEEP)} ratios within tolerance, "
                              f"worst deviation {worst:.2f} of allowed" + (f", failing {bad}" if bad else ""))


def check_10():
    bad = []
    for nu, N, p in SWEEP + [(-0.5, 0, 2.0), (-0.5, 0, INF), (1.0, 1, 2.0)]:
        est = extrapolate(bessel_origin_sequence(nu, N, p, threads=4))
        if trial_lower_bound(nu, N, p) > est.value + est.error_estimate:
            bad.append((nu, N, p))
    exact_gap = abs(trial_lower_bound(-0.5, 0, 2.0) - 1 / math.sqrt(math.pi))
    ok = not bad and exact_gap <= 1e-6
    return report(10, ok, f"feasible in {len(SWEEP) + 3 - len(bad)}/{len(SWEEP) + 3}, sinc gap {exact_gap:.1e}")


# 6 ------------------------------------------------------------------------

def check_6():
    worst = 0.0
    for space in (EvenPoly(0), EvenPoly(2), EvenPoly(5), FullPoly(1), FullPoly(4), FullPoly(9)):
        for alpha, beta in ((0.0, 0.0), (1.0, 0.5), (3.0, -0.5), (0.0, 2.0)):
            for a in (0.0, 0.4, -0.9, 1.0):
                if isinstance(space, EvenPoly) and a < 0:
                    continue
                prob = ExtremalProblem(space, WeightSpec(alpha, beta, (-1.0, 1.0), INF), OperatorSpec.identity(a))
                worst = max(worst, abs(sharp_constant(prob).value - 1))
    for m in (2, 3):
        for kind in ("ball", "sphere"):
            if kind == "sphere" and m == 2:
                continue
            worst = max(worst, abs(multivariate_sharp_constant(m, 4, 0, DomainSpec(kind, m, INF)).value - 1))
    seq_worst = 0.0
    for nu in (-0.5, 0.0, 0.5):
        for fam in (bessel_origin_sequence, gegenbauer_endpoint_sequence):
            seq = fam(nu, 0, INF, threads=4)
            seq_worst = max(seq_worst, max(abs(s - 1) for s in seq.scaled))
    ok = worst <= 1e-9 and seq_worst <= 1e-9
    return report(6, ok, f"max |C - 1| {worst:.1e}, scaled sequences {seq_worst:.1e}")


# 7 ------------------------------------------------------------------------

def check_7():
    rng = np.random.default_rng(57)
    worst = 0.0
    for _ in range(100):
        deg = int(rng.integers(0, 11))
        R = PolyCoeffs1D(rng.standard_normal(deg + 1))
        b = float(rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(-0.3, 2.3))
        N = int(rng.integers(0, 4))
        nu = float(rng.uniform(-0.5, 3.0))
        t = rng.uniform(-abs(b), abs(b), 20)
        lhs = evaluate(gegenbauer_apply(R, N, lam=nu + 0.5), 1 - 2 * t**2 / b**2)
        P = substitute_quadratic(R, b)
        for _ in range(N):
            P = d_nu_b_apply(P, nu, b)
        rhs = evaluate(P, t)
        scale = max(np.abs(lhs).max(), 1e-300)
        worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
    return report(7, worst < 1e-8, f"max rel err {worst:.2e} over 100 tuples")


# 8 ------------------------------------------------------------------------

def check_8():
    worst = 0.0
    for p in (1.0, 2.0, INF):
        for alpha, beta in ((0.0, 0.0), (1.0, 0.5), (3.0, -0.5)):
            w = WeightSpec(alpha, beta, (-1.0, 1.0), p)
            for n in range(9):
                ops = [OperatorSpec.identity(0.0)]
                if n >= 2:
                    ops += [OperatorSpec.derivative_at(0.0, 2), OperatorSpec.bessel_at_zero((alpha - 1) / 2, 1)]
                for op in ops:
                    full = sharp_constant(ExtremalProblem(FullPoly(n), w, op)).value
                    even = sharp_constant(ExtremalProblem(EvenPoly(n // 2), w, op)).value
                    worst = max(worst, abs(full - even) / even)
    rng = np.random.default_rng(88)
    violations = 0
    for i in range(200):
        m = 2 + i % 2
        p = (1.0, 2.0, 3.0, INF)[(i // 2) % 4]
        P = MultiPolyCoeffs.random(m, int(rng.integers(1, 6)), rng)
        if (i // 8) % 2 == 0:
            before = ball_lp_norm(P, p, tol=1e-7)
            after = radial_lp_norm(haar_symmetrize_full(P), m, p)
        else:
            pole = rng.standard_normal(m)
            before = sphere_lp_norm(P, p, tol=1e-7)
            after = zonal_lp_norm(zonal_symmetrize(P, pole / np.linalg.norm(pole)), m, p)
        if after > before * (1 + 1e-6):
            violations += 1
    ok = worst <= 1e-6 and violations == 0
    return report(8, ok, f"full vs even max rel diff {worst:.1e}, contraction violations {violations}/200")


# 9 ------------------------------------------------------------------------

def check_9():
    ns = np.array([8, 16, 32, 64])
    margin = math.inf
    for k in (0, 2):
        for p in (2.0, INF):
            for alpha in (0.0, 1.0, 3.0):
                w = WeightSpec(alpha, 0.0, (-1.0, 1.0), p)
                vals = [sharp_constant(ExtremalProblem(FullPoly(int(n)), w, OperatorSpec.derivative_at(0.0, k))).value
                        for n in ns]
                slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
                bound = k + (0.0 if math.isinf(p) else (alpha + 1) / p) + 0.1
                margin = min(margin, bound - slope)
    return report(9, margin >= 0, f"smallest margin below the slope bound {margin:.3f}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [c() for c in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
