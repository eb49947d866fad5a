"""Weighted L_p quasinorms on intervals and Gauss--Jacobi rules.

The weights handled here are ``|t|**alpha * (1 - t**2)**beta`` restricted to
an interval ``[a, b]``.  Integrals are split at ``t = 0`` so the algebraic
singularity sits at the end of a Jacobi rule; even integrands on symmetric
intervals are folded with ``u = t**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar
from scipy.special import betaln

from .exceptions import InvalidExponent, NoConvergence

__all__ = [
    "WeightSpec",
    "QuadratureRule",
    "jacobi_recurrence",
    "gauss_jacobi",
    "weighted_lp_norm",
    "sup_norm",
    "local_maxima",
    "chebyshev_points",
    "interval_rule",
]

MAX_NODES = 2**16
# above this node count a single Golub--Welsch rule is too slow; use panels
_SINGLE_RULE_MAX = 1024
_PANEL_ORDER = 64


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``|t|**alpha (1 - t**2)**beta`` on ``interval`` with exponent ``p``."""

    alpha: float = 0.0
    beta: float = 0.0
    interval: tuple[float, float] = (-1.0, 1.0)
    p: float = 2.0

    def __post_init__(self):
        if not self.alpha > -1:
            raise InvalidExponent(f"alpha must exceed -1, got {self.alpha}")
        if not self.beta > -1:
            raise InvalidExponent(f"beta must exceed -1, got {self.beta}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")
        a, b = (float(x) for x in self.interval)
        if not a < b:
            raise ValueError(f"empty interval {self.interval}")
        if self.beta != 0 and (a < -1 or b > 1):
            raise ValueError("(1 - t^2)^beta with beta != 0 needs interval inside [-1, 1]")
        object.__setattr__(self, "interval", (a, b))
        object.__setattr__(self, "p", float(self.p))

    @property
    def p_tilde(self) -> float:
        return min(1.0, self.p)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        out = np.abs(t) ** self.alpha
        if self.beta != 0:
            out = out * np.clip(1.0 - t * t, 0.0, None) ** self.beta
        return out


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int = field(default=-1)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def jacobi_recurrence(n: int, a_exp: float, b_exp: float):
    """Recurrence coefficients of the monic orthogonal polynomials for
    ``u**a_exp (1 - u)**b_exp`` on ``[0, 1]``.

    Returns ``(alpha, beta)`` of length ``n`` with
    ``pi_{k+1}(u) = (u - alpha_k) pi_k(u) - beta_k pi_{k-1}(u)`` and
    ``beta_0`` equal to the total mass.
    """
    if a_exp <= -1 or b_exp <= -1:
        raise InvalidExponent(f"exponents must exceed -1, got ({a_exp}, {b_exp})")
    # standard Jacobi on [-1, 1] with (1-x)^al (1+x)^be and u = (1+x)/2
    al, be = float(b_exp), float(a_exp)
    k = np.arange(n, dtype=float)
    s = 2 * k + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha_x = np.where(s * (s + 2) != 0, (be**2 - al**2) / (s * (s + 2)), 0.0)
    alpha_x[0] = (be - al) / (al + be + 2)
    beta_x = np.empty(n)
    beta_x[0] = math.exp(betaln(a_exp + 1, b_exp + 1))
    if n > 1:
        kk = k[1:]
        ss = s[1:]
        num = 4 * kk * (kk + al) * (kk + be) * (kk + al + be)
        den = ss**2 * (ss + 1) * (ss - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            beta_x[1:] = num / den
        # the generic formula is 0/0 at k=1 when al + be = -1
        beta_x[1] = 4 * (1 + al) * (1 + be) / ((2 + al + be) ** 2 * (3 + al + be))
    alpha_u = (1 + alpha_x) / 2
    beta_u = beta_x.copy()
    beta_u[1:] /= 4
    return alpha_u, beta_u


@lru_cache(maxsize=256)
def gauss_jacobi(n_nodes: int, a_exp: float, b_exp: float) -> QuadratureRule:
    """Gauss rule for ``int_0^1 f(u) u**a_exp (1-u)**b_exp du`` (Golub--Welsch)."""
    if n_nodes < 1:
        raise ValueError("n_nodes must be at least 1")
    if a_exp <= -1 or b_exp <= -1:
        raise InvalidExponent(f"exponents must exceed -1, got ({a_exp}, {b_exp})")
    alpha, beta = jacobi_recurrence(n_nodes, a_exp, b_exp)
    if n_nodes == 1:
        nodes = alpha[:1].copy()
        weights = beta[:1].copy()
    else:
        nodes, vecs = eigh_tridiagonal(alpha, np.sqrt(beta[1:]))
        weights = beta[0] * vecs[0] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, 2 * n_nodes - 1)


def _unit_rule(n: int, ea: float, eb: float):
    """Rule with ``n`` nodes for ``v**ea (1-v)**eb`` on ``[0, 1]``.

    Past ``_SINGLE_RULE_MAX`` nodes this is a composite rule with Jacobi
    panels at the two ends and Gauss--Legendre panels inside.
    """
    if n <= _SINGLE_RULE_MAX:
        rule = gauss_jacobi(n, ea, eb)
        return rule.nodes, rule.weights
    panels = n // _PANEL_ORDER
    h = 1.0 / panels
    gl = gauss_jacobi(_PANEL_ORDER, 0.0, 0.0)
    left = gauss_jacobi(_PANEL_ORDER, ea, 0.0)
    right = gauss_jacobi(_PANEL_ORDER, 0.0, eb)
    xs, ws = [], []
    for j in range(panels):
        lo = j * h
        if j == 0:
            x = lo + h * left.nodes
            w = h ** (ea + 1) * left.weights * (1 - x) ** eb
        elif j == panels - 1:
            x = lo + h * right.nodes
            w = h ** (eb + 1) * right.weights * x**ea
        else:
            x = lo + h * gl.nodes
            w = h * gl.weights * x**ea * (1 - x) ** eb
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _piece_rule(n, lo, hi, e0, beta, folded, e_lo=0.0, e_hi=0.0):
    """Nodes/weights on ``[lo, hi]`` (``0 <= lo < hi``) for the half-line density.

    ``folded`` selects the density ``x**e0 (1-x)**beta`` (variable ``u = t**2``)
    instead of ``x**e0 (1-x**2)**beta``.  ``e_lo``/``e_hi`` cluster the nodes
    like a Jacobi rule at that end without changing the measure, which suits
    integrands behaving like ``|x - end|**e``.
    """
    ea = (e0 if lo == 0 else 0.0) + e_lo
    at_one = hi == 1 and beta != 0
    eb = (beta if at_one else 0.0) + e_hi
    v, wv = _unit_rule(n, ea, eb)
    width = hi - lo
    x = lo + width * v
    # density divided by the Jacobi factor v**ea (1-v)**eb
    left = width**e0 if lo == 0 else x**e0
    if at_one:
        right = width**beta * (1.0 if folded else (1.0 + x) ** beta)
    elif beta != 0:
        right = (1.0 - x) ** beta if folded else (1.0 - x * x) ** beta
    else:
        right = 1.0
    w = wv * width * left * right
    if e_lo:
        w = w / v**e_lo
    if e_hi:
        w = w / (1.0 - v) ** e_hi
    return x, w


def _pieces(lo, hi, cuts):
    pts = sorted({lo, hi, *[c for c in cuts if lo < c < hi]})
    return list(zip(pts[:-1], pts[1:]))


def interval_rule(weight: WeightSpec, n: int, *, even: bool = False, breakpoints: Sequence[float] = (),
                  breakpoint_exponent: float = 0.0):
    """Positive rule for ``int g(t) |t|^alpha (1-t^2)^beta dt`` over ``weight.interval``.

    Every piece between ``0``, the interval ends and ``breakpoints`` gets
    ``n`` nodes.  With ``even=True`` the nodes are returned in the folded
    variable ``u = t**2`` and the rule integrates ``g(sqrt(u))`` for even ``g``.
    A nonzero ``breakpoint_exponent`` ``e > -1`` makes each piece exact for
    ``g`` equal to ``|t - c|**e`` times a polynomial near a breakpoint ``c``.
    """
    e = float(breakpoint_exponent)
    if not e > -1:
        raise ValueError("breakpoint_exponent must exceed -1")
    a, b = weight.interval
    xs, ws = [], []
    if even:
        top = max(abs(a), abs(b)) ** 2
        cuts = [c * c for c in breakpoints]
        e0 = (weight.alpha - 1) / 2
        cutset = set(cuts)
        for lo, hi in _pieces(0.0, top, cuts):
            x, w = _piece_rule(n, lo, hi, e0, weight.beta, folded=True,
                               e_lo=e if lo in cutset else 0.0, e_hi=e if hi in cutset else 0.0)
            xs.append(x)
            ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)
    sides = []
    if a < 0:
        sides.append((max(-b, 0.0), -a, -1.0))
    if b > 0:
        sides.append((max(a, 0.0), b, 1.0))
    for lo, hi, sign in sides:
        cuts = [sign * c for c in breakpoints]
        cutset = set(cuts)
        for plo, phi in _pieces(lo, hi, cuts):
            x, w = _piece_rule(n, plo, phi, weight.alpha, weight.beta, folded=False,
                               e_lo=e if plo in cutset else 0.0, e_hi=e if phi in cutset else 0.0)
            xs.append(sign * x)
            ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _norm_pass(f, weight: WeightSpec, n, even, breakpoints, exponent=0.0):
    x, w = interval_rule(weight, n, even=even, breakpoints=breakpoints, breakpoint_exponent=exponent)
    vals = f(np.sqrt(x)) if even else f(x)
    return float(np.dot(w, np.abs(vals) ** weight.p))


def weighted_lp_norm(
    f: Callable,
    weight: WeightSpec,
    tol: float = 1e-9,
    *,
    even: bool = False,
    breakpoints: Sequence[float] = (),
    n_start: int = 16,
    full_output: bool = False,
    breakpoint_exponent: float = 0.0,
):
    """``(int |f|**p mu)**(1/p)`` by node doubling.

    Parameters
    ----------
    f : callable
        Vectorised real function of ``t``.
    weight : WeightSpec
        Weight, interval and exponent ``p``.  ``p = inf`` falls back to
        :func:`sup_norm`.
    tol : float
        Stop when two successive doublings differ by less than ``tol``
        relatively.
    even : bool
        Declare ``f`` even; the interval must then be symmetric.
    breakpoints : sequence of float
        Points where ``|f|**p`` may be non-smooth (zeros of ``f``).  Each
        piece gets its own rule.
    full_output : bool
        Also return the last relative change.
    breakpoint_exponent : float
        Passed to :func:`interval_rule`; use ``p`` when the breakpoints are
        simple zeros of ``f``.

    Raises
    ------
    NoConvergence
        If ``2**16`` nodes per piece do not reach ``tol``.
    """
    a, b = weight.interval
    if math.isinf(weight.p):
        value, _ = sup_norm(f, (a, b), tol=1e-12)
        return (value, 0.0) if full_output else value
    if even and not math.isclose(a, -b):
        raise ValueError("even=True needs a symmetric interval")
    n = n_start
    prev = _norm_pass(f, weight, n, even, breakpoints, breakpoint_exponent)
    while True:
        n *= 2
        if n > MAX_NODES:
            raise NoConvergence(f"weighted_lp_norm: no convergence to {tol} with {MAX_NODES} nodes")
        cur = _norm_pass(f, weight, n, even, breakpoints, breakpoint_exponent)
        change = abs(cur - prev) / abs(cur) if cur != 0 else 0.0
        # measured on the p-th power; first-order conversion to the norm
        change /= weight.p
        if change < tol:
            value = cur ** (1.0 / weight.p)
            return (value, change) if full_output else value
        prev = cur


def chebyshev_points(n: int, interval=(-1.0, 1.0)) -> np.ndarray:
    """``n`` Chebyshev extreme points on ``interval``, ascending (endpoints included)."""
    a, b = interval
    if n < 2:
        return np.array([(a + b) / 2])
    x = -np.cos(np.pi * np.arange(n) / (n - 1))
    return (a + b) / 2 + (b - a) / 2 * x


def local_maxima(f: Callable, interval, *, degree: int | None = None, xtol: float = 1e-13,
                 n_samples: int | None = None):
    """Refined local maxima of ``|f|`` on ``interval``.

    Samples at Chebyshev points (``8*degree + 64`` of them when the degree is
    known, else 4096), then refines every sampled local maximum by a bounded
    golden-section/Brent search on its bracket.  Returns ``(points, values)``
    sorted by decreasing value.
    """
    if n_samples is None:
        n_samples = 8 * degree + 64 if degree is not None else 4096
    x = chebyshev_points(n_samples, interval)
    y = np.abs(f(x))
    idx = [i for i in range(len(x))
           if (i == 0 or y[i] >= y[i - 1]) and (i == len(x) - 1 or y[i] >= y[i + 1])]
    pts, vals = [], []
    for i in idx:
        if i == 0 or i == len(x) - 1:
            lo = x[max(i - 1, 0)]
            hi = x[min(i + 1, len(x) - 1)]
            res = minimize_scalar(lambda s: -abs(float(f(s))), bounds=(lo, hi),
                                  method="bounded", options={"xatol": xtol})
            cand = [(y[i], x[i]), (-res.fun, res.x)]
        else:
            res = minimize_scalar(lambda s: -abs(float(f(s))), bounds=(x[i - 1], x[i + 1]),
                                  method="bounded", options={"xatol": xtol})
            cand = [(y[i], x[i]), (-res.fun, res.x)]
        v, p = max(cand)
        pts.append(p)
        vals.append(v)
    order = np.argsort(vals)[::-1]
    return np.asarray(pts)[order], np.asarray(vals)[order]


def sup_norm(f: Callable, interval, tol: float = 1e-12, *, degree: int | None = None):
    """Return ``(max |f|, argmax)`` on a closed interval."""
    a, b = interval
    if not a < b:
        raise ValueError("sup_norm needs a < b")
    pts, vals = local_maxima(f, (a, b), degree=degree, xtol=tol)
    return float(vals[0]), float(pts[0])
