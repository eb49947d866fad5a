"""Scaled constant sequences, their limits, and trial lower bounds.

For the Bessel family (even polynomials, weight ``|t|^(2nu+1)``, functional
``Be_nu^N`` at the origin) and the Gegenbauer family (all polynomials,
weight ``(1-t^2)^nu``, functional ``Ge_(nu+1/2)^N`` at ``t = 1``) the
constants grow like ``n^(2N + (2nu+2)/p)``.  The sequences divided by that
power converge; the two limits differ by the factor ``2^(1/p)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .exceptions import InsufficientData, NoConvergence, SharpConstError
from .extremal import EvenPoly, ExtremalProblem, FullPoly, SharpConstantResult, sharp_constant
from .operators import OperatorSpec, bessel_factor
from .polybasis import scale_argument
from .quadrature import WeightSpec, gauss_jacobi, weighted_lp_norm

__all__ = [
    "ScaledSequence",
    "LimitEstimate",
    "DEFAULT_NS",
    "default_ns",
    "scaling_exponent",
    "bessel_origin_sequence",
    "gegenbauer_endpoint_sequence",
    "extrapolate",
    "trial_lower_bound",
    "rescaled_ratio",
    "verify_relation",
    "DEFAULT_TOLERANCES",
]

DEFAULT_NS = (8, 12, 16, 24, 32, 48, 64, 96)
# general-p convex solves (other than p = 1) stop here to bound runtime
GENERAL_P_MAX_N = 32
T_MAX = 1e6
DEFAULT_TOLERANCES = {"limit": 0.02, "identity_p2": 1e-6, "identity_pinf": 1e-4}

BESSEL = "BesselOrigin"
GEGENBAUER = "GegenbauerEndpoint"


def default_ns(p: float, N: int = 0) -> tuple:
    """Default sweep for exponent ``p``, dropping degrees below ``2N + 2``."""
    ns = DEFAULT_NS
    if not (p in (1, 2) or math.isinf(p)):
        ns = tuple(n for n in ns if n <= GENERAL_P_MAX_N)
    return tuple(n for n in ns if n >= 2 * N + 2)


def scaling_exponent(nu: float, N: int, p: float) -> float:
    """``2N + (2nu + 2)/p`` (just ``2N`` for ``p = inf``)."""
    return 2 * N + (0.0 if math.isinf(p) else (2 * nu + 2) / p)


@dataclass
class ScaledSequence:
    """Constants ``C_n`` of one family and their rescaled values."""

    family: str
    nu: float
    N: int
    p: float
    ns: list
    raw: list
    scaled: list
    converged: list
    failures: dict = field(default_factory=dict)
    results: list = field(default_factory=list, repr=False)

    @property
    def exponent(self) -> float:
        return scaling_exponent(self.nu, self.N, self.p)

    def ok(self):
        """``(ns, scaled)`` restricted to successful entries."""
        pairs = [(n, s) for n, s in zip(self.ns, self.scaled) if s is not None and math.isfinite(s)]
        return [n for n, _ in pairs], [s for _, s in pairs]

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "nu": self.nu,
            "N": self.N,
            "p": self.p,
            "exponent": self.exponent,
            "rows": [
                {"n": n, "raw": r, "scaled": s, "converged": c, "error": self.failures.get(n)}
                for n, r, s, c in zip(self.ns, self.raw, self.scaled, self.converged)
            ],
        }


@dataclass
class LimitEstimate:
    value: float
    error_estimate: float
    method: str
    trial_lower_bound: float | None = None
    last_raw: float | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "method": self.method,
            "trial_lower_bound": self.trial_lower_bound,
            "last_raw": self.last_raw,
        }


def _problem(family, nu, N, p, n) -> ExtremalProblem:
    if family == BESSEL:
        return ExtremalProblem(EvenPoly(n // 2), WeightSpec(2 * nu + 1, 0.0, (-1.0, 1.0), p),
                               OperatorSpec.bessel_at_zero(nu, N), label=f"{family} n={n}")
    return ExtremalProblem(FullPoly(n), WeightSpec(0.0, nu, (-1.0, 1.0), p),
                           OperatorSpec.gegenbauer_at_one(nu + 0.5, N), label=f"{family} n={n}")


def _sequence(family, nu, N, p, ns, tol, seed, threads) -> ScaledSequence:
    if nu < -0.5:
        raise ValueError("nu must be >= -1/2")
    ns = [int(n) for n in ns]
    if ns != sorted(set(ns)):
        raise ValueError("ns must be strictly ascending")
    if any(n < 2 * N + 2 for n in ns):
        raise ValueError(f"every n must be >= 2N + 2 = {2 * N + 2}")
    expo = scaling_exponent(nu, N, p)

    def solve(n):
        try:
            return sharp_constant(_problem(family, nu, N, p, n), tol=tol, seed=seed), None
        except SharpConstError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(solve, ns))
    else:
        out = [solve(n) for n in ns]
    seq = ScaledSequence(family, float(nu), int(N), float(p), ns, [], [], [])
    for n, (res, err) in zip(ns, out):
        seq.results.append(res)
        if res is None:
            seq.raw.append(None)
            seq.scaled.append(None)
            seq.converged.append(False)
            seq.failures[n] = err
        else:
            seq.raw.append(res.value)
            seq.scaled.append(res.value * n ** (-expo))
            seq.converged.append(bool(res.converged))
    return seq


def bessel_origin_sequence(nu, N, p, ns=None, *, tol=1e-9, seed=0, threads=1) -> ScaledSequence:
    """Even polynomials of degree ``2 floor(n/2)``, weight ``|t|^(2nu+1)``, ``Be_nu^N`` at 0."""
    return _sequence(BESSEL, nu, N, p, default_ns(p, N) if ns is None else ns, tol, seed, threads)


def gegenbauer_endpoint_sequence(nu, N, p, ns=None, *, tol=1e-9, seed=0, threads=1) -> ScaledSequence:
    """All polynomials of degree ``n``, weight ``(1-t^2)^nu``, ``Ge_(nu+1/2)^N`` at 1."""
    return _sequence(GEGENBAUER, nu, N, p, default_ns(p, N) if ns is None else ns, tol, seed, threads)


def rescaled_ratio(seq: ScaledSequence, index: int) -> float:
    """Ratio of ``Q(t) = P_n(t/n)`` on ``[-n, n]`` for a Bessel-family extremizer.

    By the change of variables this equals ``seq.scaled[index]``.
    """
    if seq.family != BESSEL:
        raise ValueError("defined for the Bessel family")
    n = seq.ns[index]
    res: SharpConstantResult = seq.results[index]
    Q = scale_argument(res.extremizer_poly(), float(n))
    num = abs(bessel_factor(seq.nu, seq.N) * float(Q.coeffs[seq.N])) if seq.N <= Q.half_degree else 0.0
    weight = WeightSpec(2 * seq.nu + 1, 0.0, (-float(n), float(n)), seq.p)
    if math.isinf(seq.p):
        den = weighted_lp_norm(Q, weight)
    else:
        roots = np.sqrt(np.clip(np.polynomial.Polynomial(Q.coeffs).roots().real, 0, None))
        cuts = tuple(r for r in np.unique(roots) if 0 < r < n)
        den = weighted_lp_norm(Q, weight, tol=1e-12, even=True, breakpoints=cuts,
                               breakpoint_exponent=seq.p)
    return float(num / den)


def extrapolate(seq, method: str = "aitken") -> LimitEstimate:
    """Estimate the limit of ``seq.scaled``.

    ``aitken`` applies the delta-squared transform to three entries, taken at
    ``n/4, n/2, n`` for the largest ``n`` when available (so that tails like
    ``c/n`` are removed exactly), otherwise the last three.  When the two
    differences do not shrink with a common sign the last value is returned
    with the last difference as error.  ``richardson`` assumes ``L + c/n``
    from the last two entries.  Plain ``(ns, values)`` tuples are accepted.
    """
    if isinstance(seq, ScaledSequence):
        ns, vals = seq.ok()
    else:
        ns, vals = (list(x) for x in seq)
    if len(vals) < 4:
        raise InsufficientData(f"need at least 4 successful entries, got {len(vals)}")
    ns = np.asarray(ns, dtype=float)
    a = np.asarray(vals, dtype=float)
    last = float(a[-1])
    if method == "richardson":
        n1, n2 = ns[-2], ns[-1]
        value = float((n2 * a[-1] - n1 * a[-2]) / (n2 - n1))
        return LimitEstimate(value, abs(value - last), "Richardson", last_raw=last)
    if method != "aitken":
        raise ValueError(f"unknown method {method!r}")
    top = ns[-1]
    pos = {float(n): i for i, n in enumerate(ns)}
    if top / 2 in pos and top / 4 in pos:
        i1, i2, i3 = pos[top / 4], pos[top / 2], len(a) - 1
    else:
        i1, i2, i3 = len(a) - 3, len(a) - 2, len(a) - 1
    d1 = a[i2] - a[i1]
    d2 = a[i3] - a[i2]
    if d1 == 0 and d2 == 0:
        return LimitEstimate(last, 0.0, "LastValue", last_raw=last)
    if d1 * d2 <= 0 or abs(d2) >= abs(d1):
        return LimitEstimate(last, float(abs(a[-1] - a[-2])), "LastValue", last_raw=last)
    value = float(a[i3] - d2 * d2 / (d2 - d1))
    return LimitEstimate(value, abs(value - last), "Aitken", last_raw=last)


def _sinc_power_taylor(d: int, K: int) -> np.ndarray:
    """Coefficients of ``x^(2k)``, ``k <= K``, in ``(sin x / x)^d``."""
    base = np.array([(-1) ** k / math.factorial(2 * k + 1) for k in range(K + 1)])
    out = np.zeros(K + 1)
    out[0] = 1.0
    for _ in range(d):
        out = np.convolve(out, base)[: K + 1]
    return out


def _sinc_moment(q: float, s: float, tol: float) -> float:
    """``int_0^inf |sin x|^q x^s dx`` for ``s < -1`` and ``s + q > -1``.

    Whole periods are integrated with Jacobi rules matched to the zeros of
    ``sin``; the remainder past ``T = K pi`` uses the period average of
    ``|sin|^q`` against ``x^s``, whose error decays like ``T^(s-1)``.
    """
    n = 40
    first = gauss_jacobi(n, s + q, q)
    v = first.nodes
    core = (np.sin(math.pi * v) / (math.pi * v * (1 - v))) ** q
    head = math.pi ** (s + 1) * float(np.dot(first.weights, core)) * math.pi**q
    mid = gauss_jacobi(n, q, q)
    smooth = (np.sin(math.pi * mid.nodes) / (mid.nodes * (1 - mid.nodes))) ** q
    mean = math.exp(gammaln((q + 1) / 2) - gammaln(q / 2 + 1)) / math.sqrt(math.pi)

    def total(K):
        k = np.arange(1, K)[:, None]
        x = math.pi * (k + mid.nodes[None, :])
        body = math.pi * float(np.sum(mid.weights * smooth * x**s))
        T = math.pi * K
        tail = mean * T ** (s + 1) / (-s - 1)
        return head + body + tail

    K = 64
    prev = total(K)
    while True:
        K *= 2
        if math.pi * K > T_MAX:
            raise NoConvergence(f"sinc moment did not settle before T = {T_MAX:g}")
        cur = total(K)
        if abs(cur - prev) <= tol * abs(cur):
            return cur
        prev = cur


def trial_lower_bound(nu: float, N: int, p: float, d_extra: int = 0, tol: float = 1e-10) -> float:
    """Ratio ``|Be_nu^N f (0)| / ||f||_{L_p(|t|^(2nu+1) dt, R)}`` for ``f(t) = sinc(t/d)^d``.

    ``d = floor((2nu+2)/p) + 1 + d_extra`` makes ``f`` of exponential type 1
    and ``p``-integrable against the weight, so the ratio bounds the limit
    of the Bessel-family sequence from below.
    """
    if nu < -0.5:
        raise ValueError("nu must be >= -1/2")
    if d_extra < 0 or N < 0:
        raise ValueError("d_extra and N must be nonnegative")
    inf = math.isinf(p)
    d = (0 if inf else math.floor((2 * nu + 2) / p)) + 1 + d_extra
    c = _sinc_power_taylor(d, N)[N] / d ** (2 * N)
    num = abs(bessel_factor(nu, N) * c)
    if inf:
        return float(num)
    q = d * p
    moment = _sinc_moment(q, 2 * nu + 1 - q, tol)
    norm = (2 * d ** (2 * nu + 2) * moment) ** (1 / p)
    return float(num / norm)


# ---------------------------------------------------------------- relations

def _status(passed: bool, p: float, failed_solver: bool) -> str:
    if failed_solver:
        return "solver_failure"
    if p < 1:
        return "indicative"
    return "pass" if passed else "fail"


def _limit_or_none(seq):
    try:
        return extrapolate(seq)
    except InsufficientData:
        return None


def _ratio_check(nu, N, p, ns, tols, threads):
    g = gegenbauer_endpoint_sequence(nu, N, p, ns, threads=threads)
    b = bessel_origin_sequence(nu, N, p, ns, threads=threads)
    lg, lb = _limit_or_none(g), _limit_or_none(b)
    report = {"sequences": [g.to_dict(), b.to_dict()], "predicted": 2 ** (0.0 if math.isinf(p) else 1 / p)}
    if lg is None or lb is None:
        report.update(observed=None, tolerance=None, passed=False, failed_solver=True)
        return report
    ratio = lg.value / lb.value
    rel = tols["limit"] + lg.error_estimate / abs(lg.value) + lb.error_estimate / abs(lb.value)
    report.update(limits={"gegenbauer": lg.to_dict(), "bessel": lb.to_dict()}, observed=ratio,
                  tolerance=rel, passed=bool(abs(ratio / report["predicted"] - 1) <= rel), failed_solver=False)
    return report


def _reduction_rows(kind, m, N, p, small_ns, tols):
    from .multivar import DomainSpec, multivariate_sharp_constant, reduction_factor, univariate_counterpart

    domain = DomainSpec(kind, m, p)
    tol = tols["identity_p2"] if p == 2 else tols["identity_pinf"]
    rows = []
    for n in small_ns:
        try:
            lhs = multivariate_sharp_constant(m, n, N, domain).value
            rhs = reduction_factor(domain) * sharp_constant(univariate_counterpart(domain, n, N)).value
        except SharpConstError as exc:
            rows.append({"n": n, "error": f"{type(exc).__name__}: {exc}", "passed": False})
            continue
        err = abs(lhs - rhs) / max(abs(rhs), 1e-300) if rhs else abs(lhs)
        rows.append({"n": n, "multivariate": lhs, "reduced": rhs, "rel_error": err, "passed": bool(err <= tol)})
    return rows, tol


def verify_relation(which: str, *, p: float, nu: float | None = None, N: int = 0, m: int | None = None,
                    ns=None, small_ns=(2, 4, 6), tolerances: dict | None = None, threads: int = 1) -> dict:
    """Check one limit relation numerically and return a structured report.

    ``which`` is one of ``T4_1`` (Bessel limit against trial functions and,
    where known, the closed form), ``T4_3`` (Gegenbauer/Bessel limit ratio
    ``2^(1/p)``), ``C4_4`` (ball constants: reduction at small ``n`` plus the
    radial limit), ``C4_5`` (sphere analogue) and ``C4_6`` (unweighted
    endpoint case of ``T4_3``).
    """
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(tolerances or {})
    which = which.upper()
    report = {"relation": which, "params": {"p": p, "nu": nu, "N": N, "m": m}, "tolerances": tols}

    if which == "T4_1":
        nu = -0.5 if nu is None else nu
        report["params"]["nu"] = nu
        seq = bessel_origin_sequence(nu, N, p, ns, threads=threads)
        est = _limit_or_none(seq)
        report["sequences"] = [seq.to_dict()]
        if est is None:
            report.update(passed=False, status="solver_failure")
            return report
        est.trial_lower_bound = trial_lower_bound(nu, N, p)
        checks = {"trial_feasible": bool(est.trial_lower_bound <= est.value + est.error_estimate)}
        if math.isinf(p) and N == 0:
            checks["scaled_constant_one"] = all(abs(s - 1) < 1e-9 for s in seq.ok()[1])
        if nu == -0.5 and N == 0 and p == 2:
            exact = 1 / math.sqrt(math.pi)
            report["predicted"] = exact
            checks["closed_form"] = bool(abs(est.value - exact) <= 0.01 * exact)
        report.update(limits={"bessel": est.to_dict()}, checks=checks, observed=est.value)
        passed = all(checks.values())
        report.update(passed=passed, status=_status(passed, p, False))
        return report

    if which in ("T4_3", "C4_6"):
        if which == "C4_6":
            nu, N = 0.0, 0
        nu = 0.0 if nu is None else nu
        report["params"].update(nu=nu, N=N)
        r = _ratio_check(nu, N, p, ns, tols, threads)
        failed = r.pop("failed_solver")
        report.update(r)
        report["status"] = _status(report["passed"], p, failed)
        return report

    if which in ("C4_4", "C4_5"):
        if m is None:
            raise ValueError(f"{which} needs m")
        if not (p == 2 or math.isinf(p)):
            raise ValueError(f"{which} checks the multivariate side only for p in {{2, inf}}")
        kind = "ball" if which == "C4_4" else "sphere"
        nu = m / 2 - 1 if kind == "ball" else (m - 3) / 2
        report["params"]["nu"] = nu
        from .multivar import DomainSpec, reduction_factor

        rows, tol = _reduction_rows(kind, m, N, p, small_ns, tols)
        report["reduction_rows"] = rows
        report["exponent"] = {"multivariate": 2 * N + (0.0 if math.isinf(p) else m / p)}
        factor = reduction_factor(DomainSpec(kind, m, p))
        if kind == "ball":
            seq = bessel_origin_sequence(nu, N, p, ns, threads=threads)
            est = _limit_or_none(seq)
            report["sequences"] = [seq.to_dict()]
            report["exponent"]["univariate"] = seq.exponent
            failed = est is None
            checks = {"reduction": all(r["passed"] for r in rows),
                      "exponent": math.isclose(seq.exponent, report["exponent"]["multivariate"])}
            if est is not None:
                est.trial_lower_bound = trial_lower_bound(nu, N, p)
                checks["trial_feasible"] = bool(est.trial_lower_bound <= est.value + est.error_estimate)
                report["limits"] = {"bessel": est.to_dict(), "multivariate": factor * est.value}
        else:
            r = _ratio_check(nu, N, p, ns, tols, threads)
            failed = r.pop("failed_solver")
            report["sequences"] = r["sequences"]
            report["exponent"]["univariate"] = scaling_exponent(nu, N, p)
            # on the sphere S^(m-1) the exponent carries m - 1
            checks = {"reduction": all(x["passed"] for x in rows),
                      "exponent": math.isclose(report["exponent"]["univariate"],
                                               2 * N + (0.0 if math.isinf(p) else (m - 1) / p))}
            if not failed:
                checks["ratio"] = r["passed"]
                report["limits"] = dict(r["limits"], multivariate=factor * r["limits"]["gegenbauer"]["value"])
                report.update(predicted=r["predicted"], observed=r["observed"], tolerance=r["tolerance"])
        report["checks"] = checks
        passed = all(checks.values()) and not failed
        report.update(passed=passed, status=_status(passed, p, failed))
        report["tolerance_identity"] = tol
        return report

    raise ValueError(f"unknown relation {which!r}")
