"""Sharp constants ``sup |l(P)| / ||P||`` for univariate weighted problems.

A problem is a polynomial space (all polynomials of degree ``<= n``, or even
ones of degree ``<= 2h``), a weight ``|t|^alpha (1-t^2)^beta`` on ``[-1, 1]``
with an exponent ``p``, and a linear functional given by an
:class:`~sharpconst.operators.OperatorSpec`.

Every solver works in an orthonormal basis for the weight.  Even
polynomials are handled in the folded variable ``u = t**2`` where the
weight becomes the Jacobi weight ``u^((alpha-1)/2) (1-u)^beta`` on
``[0, 1]``.

* ``p = 2`` -- Gram solve (closed form, certified both ways).
* ``p = inf`` -- linear program on a grid with exchange refinement.
* ``1 <= p < inf`` -- convex minimisation of ``||P||_p`` on ``l(P) = 1``.
* ``p < 1`` -- multi-start heuristic; lower bound only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigh_tridiagonal, null_space
from scipy.optimize import brentq, linprog
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import LPFailure, NoConvergence, SingularGram
from .operators import OperatorSpec, bessel_factor, gegenbauer_power_from_taylor
from .polybasis import EvenPolyCoeffs, PolyCoeffs1D
from .quadrature import (
    WeightSpec,
    chebyshev_points,
    interval_rule,
    jacobi_recurrence,
    local_maxima,
    weighted_lp_norm,
)

__all__ = [
    "EvenPoly",
    "FullPoly",
    "ExtremalProblem",
    "SharpConstantResult",
    "OrthoBasis",
    "sharp_constant",
    "sharp_constant_p2",
    "sharp_constant_pinf",
    "sharp_constant_general_p",
    "endpoint_equivalence_check",
    "SharpConstant",
]

PINF_VIOLATION_TOL = 1e-9
PINF_POLISH_TOL = 1e-11
PINF_POLISH_ROUNDS = 4
PINF_MAX_ROUNDS = 50
GRAM_COND_MAX = 1e14
MAX_ITER = 100_000
N_MULTISTART = 16


@dataclass(frozen=True)
class EvenPoly:
    """Even polynomials of degree ``<= 2 * half_degree``."""

    half_degree: int

    @property
    def dim(self) -> int:
        return self.half_degree + 1

    @property
    def degree(self) -> int:
        return 2 * self.half_degree


@dataclass(frozen=True)
class FullPoly:
    """All polynomials of degree ``<= degree``."""

    degree: int

    @property
    def dim(self) -> int:
        return self.degree + 1


class OrthoBasis:
    """Orthonormal polynomials for a measure, given by recurrence coefficients.

    ``p_{k+1} sqrt(b_{k+1}) = (s - a_k) p_k - sqrt(b_k) p_{k-1}`` with
    ``p_0 = 1 / sqrt(b_0)``.  The variable ``s`` is ``t`` for full spaces
    and ``u = t**2`` for even spaces.
    """

    def __init__(self, alpha, beta, domain):
        self.alpha = np.asarray(alpha, dtype=float)
        self.beta = np.asarray(beta, dtype=float)
        self.domain = tuple(domain)

    @classmethod
    def for_problem(cls, space, weight: WeightSpec, extra: int = 1) -> "OrthoBasis":
        n = space.dim + extra
        if isinstance(space, EvenPoly):
            a, b = jacobi_recurrence(n, (weight.alpha - 1) / 2, weight.beta)
            return cls(a, b, (0.0, 1.0))
        # symmetric measure on [-1, 1]: discretise exactly with a folded rule
        m = n + 16
        u, w = interval_rule(weight, m, even=True)
        nodes = np.concatenate([-np.sqrt(u[::-1]), np.sqrt(u)])
        weights = np.concatenate([w[::-1], w]) / 2
        a, b = _stieltjes(nodes, weights, n)
        return cls(a, b, (-1.0, 1.0))

    @property
    def size(self) -> int:
        return self.alpha.size

    def values(self, s, dim: int):
        """Matrix ``[p_k(s_i)]`` of shape ``(len(s), dim)``."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((s.size, dim))
        out[:, 0] = 1.0 / math.sqrt(self.beta[0])
        if dim > 1:
            out[:, 1] = (s - self.alpha[0]) * out[:, 0] / math.sqrt(self.beta[1])
        for k in range(1, dim - 1):
            out[:, k + 1] = ((s - self.alpha[k]) * out[:, k]
                             - math.sqrt(self.beta[k]) * out[:, k - 1]) / math.sqrt(self.beta[k + 1])
        return out

    def evaluate(self, coef, s):
        """``sum_k coef_k p_k(s)`` by Clenshaw's recurrence."""
        coef = np.asarray(coef, dtype=float)
        s = np.asarray(s, dtype=float)
        n = coef.size
        sb = np.sqrt(self.beta)
        b1 = np.zeros_like(s)
        b2 = np.zeros_like(s)
        for k in range(n - 1, -1, -1):
            nxt = sb[k + 2] if k + 2 < self.size else 0.0
            b1, b2 = coef[k] + (s - self.alpha[k]) / sb[k + 1] * b1 - (sb[k + 1] / nxt if nxt else 0.0) * b2, b1
        return b1 / sb[0]

    def taylor(self, s0: float, dim: int, order: int):
        """``T[k, j] = p_k^{(j)}(s0) / j!`` for ``j <= order``."""
        T = np.zeros((dim, order + 1))
        T[0, 0] = 1.0 / math.sqrt(self.beta[0])
        if dim > 1:
            T[1] = (s0 - self.alpha[0]) * T[0]
            T[1, 1:] += T[0, :-1]
            T[1] /= math.sqrt(self.beta[1])
        for k in range(1, dim - 1):
            row = (s0 - self.alpha[k]) * T[k] - math.sqrt(self.beta[k]) * T[k - 1]
            row[1:] += T[k, :-1]
            T[k + 1] = row / math.sqrt(self.beta[k + 1])
        return T

    def gauss(self, n_nodes: int):
        """Gauss rule with ``n_nodes`` nodes for the underlying measure."""
        if n_nodes > self.size:
            raise ValueError("recurrence too short for the requested rule")
        if n_nodes == 1:
            return self.alpha[:1].copy(), self.beta[:1].copy()
        x, v = eigh_tridiagonal(self.alpha[:n_nodes], np.sqrt(self.beta[1:n_nodes]))
        return x, self.beta[0] * v[0] ** 2

    def to_monomial(self, coef):
        """Monomial coefficients in ``s``; only sensible at moderate degree."""
        coef = np.asarray(coef, dtype=float)
        n = coef.size
        P = np.polynomial.polynomial
        prev = np.zeros(1)
        cur = np.array([1.0 / math.sqrt(self.beta[0])])
        total = coef[0] * cur
        for k in range(n - 1):
            nxt = P.polysub(P.polymulx(cur) - self.alpha[k] * np.pad(cur, (0, 1)),
                            math.sqrt(self.beta[k]) * prev) / math.sqrt(self.beta[k + 1])
            prev, cur = cur, nxt
            total = P.polyadd(total, coef[k + 1] * cur)
        return np.pad(total, (0, max(0, n - total.size)))[:n]


def _stieltjes(nodes, weights, n):
    """Discretised Stieltjes procedure for the measure ``sum w_i delta(s_i)``."""
    alpha = np.zeros(n)
    beta = np.zeros(n)
    beta[0] = weights.sum()
    p_prev = np.zeros_like(nodes)
    p = np.full_like(nodes, 1.0 / math.sqrt(beta[0]))
    for k in range(n):
        alpha[k] = np.dot(weights, nodes * p * p)
        q = (nodes - alpha[k]) * p - (math.sqrt(beta[k]) * p_prev if k else 0.0)
        if k + 1 < n:
            beta[k + 1] = np.dot(weights, q * q)
            p_prev, p = p, q / math.sqrt(beta[k + 1])
    return alpha, beta


@dataclass(frozen=True)
class ExtremalProblem:
    """``sup |functional(P)| / ||P||_{L_p,mu}`` over ``space``."""

    space: EvenPoly | FullPoly
    weight: WeightSpec
    functional: OperatorSpec
    label: str = ""

    def __post_init__(self):
        if self.weight.interval != (-1.0, 1.0):
            raise ValueError("extremal problems are posed on [-1, 1]")
        if self.functional.kind in ("laplacian", "spherical_laplacian"):
            raise ValueError("multivariate operators belong to the multivar module")
        if isinstance(self.space, EvenPoly):
            if self.functional.kind == "gegenbauer":
                raise ValueError("Gegenbauer functionals need a full polynomial space")
            if self.functional.kind == "derivative" and self.functional.point != 0:
                raise ValueError("even spaces support derivatives at the origin only")

    @property
    def even(self) -> bool:
        return isinstance(self.space, EvenPoly)

    @cached_property
    def basis(self) -> OrthoBasis:
        return OrthoBasis.for_problem(self.space, self.weight)

    @cached_property
    def functional_vector(self) -> np.ndarray:
        """``l(p_k)`` for every orthonormal basis function."""
        return _functional_vector(self)

    def evaluate(self, coef, t):
        """Values at ``t`` of the polynomial with basis coefficients ``coef``."""
        t = np.asarray(t, dtype=float)
        return self.basis.evaluate(coef, t * t if self.even else t)

    def describe(self) -> dict:
        space = ({"kind": "even", "half_degree": self.space.half_degree} if self.even
                 else {"kind": "full", "degree": self.space.degree})
        return {
            "space": space,
            "weight": {"alpha": self.weight.alpha, "beta": self.weight.beta, "p": self.weight.p},
            "functional": self.functional.describe(),
            "label": self.label,
        }


def _functional_vector(prob: ExtremalProblem) -> np.ndarray:
    op = prob.functional
    dim = prob.space.dim
    basis = prob.basis
    if prob.even:
        if op.kind == "bessel":
            if op.N >= dim:
                return np.zeros(dim)
            return bessel_factor(op.nu, op.N) * basis.taylor(0.0, dim, op.N)[:, op.N]
        if op.kind == "identity":
            return basis.values([op.point**2], dim)[0]
        # derivative at the origin of Q(t^2)
        k = op.order
        if k % 2 or k // 2 >= dim:
            return np.zeros(dim)
        return math.factorial(k) * basis.taylor(0.0, dim, k // 2)[:, k // 2]
    if op.kind == "bessel":
        # parity-even extension: Be^N of the even part at 0
        if 2 * op.N >= dim:
            return np.zeros(dim)
        return bessel_factor(op.nu, op.N) * basis.taylor(0.0, dim, 2 * op.N)[:, 2 * op.N]
    if op.kind == "identity":
        return basis.values([op.point], dim)[0]
    if op.kind == "derivative":
        return math.factorial(op.order) * basis.taylor(op.point, dim, op.order)[:, op.order]
    T = basis.taylor(1.0, dim, op.N)
    return gegenbauer_power_from_taylor(T, op.lam, op.N)


@dataclass
class SharpConstantResult:
    """Outcome of a sharp-constant solve.

    ``lower_bound`` is always the ratio attained by ``extremizer``;
    ``upper_bound`` is only certified for ``p`` in ``{2, inf}``.
    ``extremizer`` holds coefficients in the problem's orthonormal basis.
    """

    value: float
    extremizer: np.ndarray
    lower_bound: float
    upper_bound: float | None
    iterations: int
    converged: bool
    degenerate: bool = False
    certified: bool = True
    problem: ExtremalProblem | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    def evaluate(self, t):
        return self.problem.evaluate(self.extremizer, t)

    def extremizer_poly(self):
        """Extremizer in monomial coefficients (even or full)."""
        mono = self.problem.basis.to_monomial(self.extremizer)
        if self.problem.even:
            return EvenPolyCoeffs(mono)
        return PolyCoeffs1D(mono)

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "iterations": self.iterations,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "certified": self.certified,
            "extremizer": [float(c) for c in self.extremizer],
        }
        if self.problem is not None:
            out["problem"] = self.problem.describe()
        return out


def _degenerate(prob, iterations=0) -> SharpConstantResult:
    return SharpConstantResult(0.0, np.zeros(prob.space.dim), 0.0, 0.0, iterations, True,
                               degenerate=True, problem=prob)


def _orient(prob, coef):
    # tie-break: positive functional value
    return -coef if np.dot(prob.functional_vector, coef) < 0 else coef


def _real_roots(prob, coef):
    """Sign changes of the extremizer in ``t``, for quadrature breakpoints."""
    lo, hi = prob.basis.domain
    s = chebyshev_points(8 * prob.space.dim + 64, (lo, hi))
    q = prob.basis.evaluate(coef, s)
    roots = []
    for i in np.nonzero(np.sign(q[:-1]) * np.sign(q[1:]) < 0)[0]:
        roots.append(brentq(lambda x: float(prob.basis.evaluate(coef, x)), s[i], s[i + 1], xtol=1e-15))
    roots = np.asarray(roots)
    if prob.even:
        return np.sqrt(np.clip(roots, 0.0, None))
    return roots


def extremizer_norm(prob: ExtremalProblem, coef, tol: float = 1e-12) -> float:
    """``||P||_{L_p,mu([-1,1])}`` of the polynomial with basis coefficients ``coef``."""
    if math.isinf(prob.weight.p):
        return _sup_abs(prob, coef)
    f = lambda t: prob.evaluate(coef, t)
    return weighted_lp_norm(f, prob.weight, tol=tol, even=prob.even,
                            breakpoints=tuple(_real_roots(prob, coef)),
                            breakpoint_exponent=prob.weight.p)


def _sup_abs(prob, coef):
    _, vals = local_maxima(lambda s: prob.basis.evaluate(coef, s), prob.basis.domain,
                           degree=prob.space.dim - 1)
    return float(vals[0])


def sharp_constant_p2(prob: ExtremalProblem) -> SharpConstantResult:
    """Closed-form ``p = 2`` constant ``sqrt(v^T G^{-1} v)``."""
    if prob.weight.p != 2:
        raise ValueError("sharp_constant_p2 needs p = 2")
    v = prob.functional_vector
    if not np.any(v):
        return _degenerate(prob)
    dim = prob.space.dim
    x, w = prob.basis.gauss(dim + 1)
    phi = prob.basis.values(x, dim)
    gram = phi.T @ (w[:, None] * phi)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_COND_MAX:
        raise SingularGram(f"Gram matrix condition {cond:.3g} exceeds {GRAM_COND_MAX:g}")
    try:
        factor = cho_factor(gram)
    except LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
    coef = cho_solve(factor, v)
    value = math.sqrt(float(np.dot(v, coef)))
    return SharpConstantResult(value, coef, value, value, 1, True, problem=prob,
                               diagnostics={"gram_condition": float(cond)})


def _solve_grid_lp(v, phi):
    """``max v.c`` subject to ``|phi c| <= 1``; returns ``(c, optimum)``."""
    dim = v.size
    col = np.abs(phi).max(axis=0)
    col[col == 0] = 1.0
    a = phi / col
    obj = v / col
    scale = np.abs(obj).max()
    res = None
    for method in ("highs", "highs-ipm", "highs-ds"):
        res = linprog(-obj / scale, A_ub=np.vstack([a, -a]), b_ub=np.ones(2 * a.shape[0]),
                      bounds=[(None, None)] * dim, method=method,
                      options={"primal_feasibility_tolerance": 1e-10,
                               "dual_feasibility_tolerance": 1e-10})
        if res.status == 0:
            return res.x / col, -res.fun * scale
    raise LPFailure(f"LP solver failed: {res.message}")


def _tie_break_lp(v, phi, level):
    """Among near-optimal grid solutions pick the one with least degree-weighted l1 coefficients.

    Keeps the exchange from chasing oscillating vertices when the optimum is not unique.
    """
    dim = v.size
    col = np.abs(phi).max(axis=0)
    col[col == 0] = 1.0
    a = phi / col
    obj = v / col
    scale = np.abs(obj).max()
    m = a.shape[0]
    eye = np.eye(dim)
    zeros = np.zeros((m, dim))
    A_ub = np.block([[a, zeros], [-a, zeros], [eye, -eye], [-eye, -eye],
                     [-obj[None, :] / scale, np.zeros((1, dim))]])
    b_ub = np.concatenate([np.ones(2 * m), np.zeros(2 * dim), [-level / scale * (1 - 1e-12)]])
    cost = np.concatenate([np.zeros(dim), (1.0 + np.arange(dim)) ** 2])
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * dim + [(0, None)] * dim,
                  method="highs", options={"primal_feasibility_tolerance": 1e-10,
                                           "dual_feasibility_tolerance": 1e-10, "time_limit": 30.0})
    if res.status != 0:
        return None
    return res.x[:dim] / col


def sharp_constant_pinf(prob: ExtremalProblem) -> SharpConstantResult:
    """``p = inf`` constant by grid LP and exchange of refined maxima."""
    if not math.isinf(prob.weight.p):
        raise ValueError("sharp_constant_pinf needs p = inf")
    v = prob.functional_vector
    if not np.any(v):
        return _degenerate(prob)
    dim = prob.space.dim
    degree = dim - 1
    grid = chebyshev_points(max(4 * degree, dim + 1, 8), prob.basis.domain)
    prev_viol = math.inf
    stalled = 0
    best = None
    for rounds in range(1, PINF_MAX_ROUNDS + 1):
        phi = prob.basis.values(grid, dim)
        coef, upper = _solve_grid_lp(v, phi)
        if stalled and best is None:
            alt = _tie_break_lp(v, phi, upper)
            coef = coef if alt is None else alt
        pts, vals = local_maxima(lambda s: prob.basis.evaluate(coef, s), prob.basis.domain,
                                 degree=degree)
        sup = float(vals[0])
        viol = sup - 1.0
        if viol < PINF_VIOLATION_TOL:
            lower = float(np.dot(v, coef)) / sup
            if best is None or lower > best.value:
                best = SharpConstantResult(lower, coef, lower, max(upper, lower), rounds, True, problem=prob,
                                           diagnostics={"grid_size": int(grid.size), "violation": viol})
            # a few extra rounds push the violation down further when the LP allows it
        if best is not None:
            # the grid only grows, so the latest LP optimum is the tightest upper bound
            best.upper_bound = max(upper, best.value)
            if viol < PINF_POLISH_TOL or rounds - best.iterations >= PINF_POLISH_ROUNDS:
                return best
        stalled = stalled + 1 if viol > 0.5 * prev_viol else 0
        if stalled >= 5:
            if best is not None:
                return best
            raise NoConvergence(f"exchange stalled at violation {viol:.3g}")
        prev_viol = viol
        grid = np.union1d(grid, pts[vals > 1.0])
    if best is not None:
        return best
    raise LPFailure(f"no convergence after {PINF_MAX_ROUNDS} exchange rounds")


def _discretisation(prob, n_nodes=None):
    dim = prob.space.dim
    if n_nodes is None:
        n_nodes = max(64, 4 * dim + 32)
    x, w = interval_rule(prob.weight, n_nodes, even=prob.even)
    return prob.basis.values(x, dim), w


def _lp_l1(v, phi, w):
    m, dim = phi.shape
    c_obj = np.concatenate([np.zeros(dim), w])
    eye = np.eye(m)
    A_ub = np.block([[phi, -eye], [-phi, -eye]])
    A_eq = np.concatenate([v, np.zeros(m)])[None, :]
    res = linprog(c_obj, A_ub=A_ub, b_ub=np.zeros(2 * m), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(None, None)] * dim + [(0, None)] * m, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise LPFailure(f"L1 LP failed: {res.message}")
    return res.x[:dim], res.nit


def _newton_lp(v, phi, w, p, tol, c0):
    """Minimise ``sum w |phi c|^p`` on ``v.c = 1`` by damped Newton steps
    on the null-space parametrisation with Armijo backtracking."""
    Z = null_space(v[None, :])
    c = c0.copy()

    def objective(cc):
        return float(np.dot(w, np.abs(phi @ cc) ** p))

    f = objective(c)
    for it in range(1, MAX_ITER + 1):
        q = phi @ c
        aq = np.abs(q)
        grad_full = phi.T @ (w * p * aq ** (p - 1) * np.sign(q))
        g = Z.T @ grad_full
        floor = 1e-10 * aq.max()
        curv = w * p * (p - 1) * np.maximum(aq, floor) ** (p - 2)
        H = Z.T @ ((phi.T * curv) @ phi) @ Z
        try:
            d = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            d = -g
        if np.dot(d, g) >= 0:
            d = -g
        step = 1.0
        while True:
            cand = c + step * (Z @ d)
            fc = objective(cand)
            if fc <= f + 1e-4 * step * np.dot(g, d) or step < 1e-16:
                break
            step *= 0.5
        dc = cand - c
        c, f = cand, fc
        rel_step = np.linalg.norm(dc) / max(np.linalg.norm(c), 1e-300)
        resid = np.linalg.norm(g) / max(np.linalg.norm(grad_full), 1e-300)
        if rel_step < tol and resid < 10 * tol:
            return c, it, True
        if step < 1e-16:
            return c, it, resid < 1e-6
    raise NoConvergence(f"Lp minimisation did not converge in {MAX_ITER} iterations")


def _irls_quasi(v, phi, w, p, c0, iters=300):
    """Smoothed reweighted least squares for ``0 < p < 1`` (local only)."""
    c = c0.copy()
    q = phi @ c
    eps = np.abs(q).max()
    for _ in range(iters):
        W = w * (q * q + eps * eps) ** (p / 2 - 1)
        G = phi.T @ (W[:, None] * phi)
        try:
            y = np.linalg.solve(G, v)
        except np.linalg.LinAlgError:
            break
        c = y / np.dot(v, y)
        q = phi @ c
        eps = max(eps * 0.7, 1e-12 * np.abs(q).max())
    return c


def _density_s(prob, s):
    """Density of the weight in the basis variable ``s``."""
    s = np.asarray(s, dtype=float)
    a, b = prob.weight.alpha, prob.weight.beta
    if prob.even:
        return s ** ((a - 1) / 2) * (1 - s) ** b
    return np.abs(s) ** a * (1 - s * s) ** b


def _root_rule(prob, coef, n_piece, exponent=0.0):
    """Rule in ``s`` with pieces split at the sign changes of ``coef``."""
    roots_t = _real_roots(prob, coef)
    x, w = interval_rule(prob.weight, n_piece, even=prob.even, breakpoints=tuple(roots_t),
                         breakpoint_exponent=exponent)
    roots_s = roots_t**2 if prob.even else roots_t
    return x, w, roots_s


def _exact_objective(prob, coef, p, n_piece):
    x, w, _ = _root_rule(prob, coef, n_piece, p - 1)
    return float(np.dot(w, np.abs(prob.basis.evaluate(coef, x)) ** p))


def _exact_newton(prob, coef, p, tol, max_iter=60):
    """Newton iterations on the exact ``int |P|^p dmu`` (``p >= 1``).

    Quadrature is rebuilt around the current sign changes at every step, so
    ``sign(P)`` and ``|P|^p`` are smooth on each piece.  For ``p = 1`` the
    curvature comes entirely from the moving zeros.
    """
    v = prob.functional_vector
    dim = prob.space.dim
    Z = null_space(v[None, :])
    n_piece = dim + 24
    f = _exact_objective(prob, coef, p, n_piece)
    for it in range(1, max_iter + 1):
        x, w, roots = _root_rule(prob, coef, n_piece, p - 1)
        phi = prob.basis.values(x, dim)
        q = phi @ coef
        aq = np.abs(q)
        grad_full = phi.T @ (w * p * aq ** (p - 1) * np.sign(q))
        if p == 1:
            H_full = np.zeros((dim, dim))
            for r in roots:
                T = prob.basis.taylor(float(r), dim, 1)
                slope = abs(float(T[:, 1] @ coef))
                if slope > 0:
                    H_full += 2 * np.outer(T[:, 0], T[:, 0]) * float(_density_s(prob, r)) / slope
        elif p < 2:
            xh, wh, _ = _root_rule(prob, coef, n_piece, p - 2)
            ph = prob.basis.values(xh, dim)
            H_full = (ph.T * (wh * p * (p - 1) * np.abs(ph @ coef) ** (p - 2))) @ ph
        else:
            H_full = (phi.T * (w * p * (p - 1) * aq ** (p - 2))) @ phi
        g = Z.T @ grad_full
        H = Z.T @ H_full @ Z
        d = -np.linalg.lstsq(H, g, rcond=1e-12)[0]
        if np.dot(d, g) >= 0:
            d = -g
        step = 1.0
        improved = False
        if np.linalg.norm(Z @ d) < 1e-6 * np.linalg.norm(coef):
            # the decrease is below the rounding of f; trust the local model
            cand = coef + Z @ d
            fc = _exact_objective(prob, cand, p, n_piece)
            improved = True
        while not improved and step > 1e-12:
            cand = coef + step * (Z @ d)
            fc = _exact_objective(prob, cand, p, n_piece)
            if fc <= f + 1e-4 * step * np.dot(g, d):
                improved = True
                break
            step *= 0.5
        resid = np.linalg.norm(g) / max(np.linalg.norm(grad_full), 1e-300)
        if not improved:
            return coef, it, resid < 1e-6
        rel_step = step * np.linalg.norm(Z @ d) / np.linalg.norm(cand)
        coef, f = cand, fc
        if rel_step < tol and resid < 10 * tol:
            return coef, it, True
    return coef, max_iter, False


def sharp_constant_general_p(prob: ExtremalProblem, tol: float = 1e-9, seed: int = 0,
                             n_nodes: int | None = None) -> SharpConstantResult:
    """Constant for ``0 < p < inf`` by minimising ``||P||_p`` subject to ``l(P) = 1``.

    A discretised problem (LP for ``p = 1``, damped Newton for ``p > 1``)
    gives a starting point that is then polished by Newton steps on the exact
    norm.  The reported value is the ratio of the returned extremizer
    re-evaluated with root-aware adaptive quadrature, so it is always a
    certified lower bound.
    """
    p = prob.weight.p
    if math.isinf(p):
        raise ValueError("use sharp_constant_pinf for p = inf")
    v = prob.functional_vector
    if not np.any(v):
        return _degenerate(prob)
    phi, w = _discretisation(prob, n_nodes)
    G = phi.T @ (w[:, None] * phi)
    y = np.linalg.solve(G, v)
    c0 = y / np.dot(v, y)
    certified = p >= 1
    if p == 1:
        coef, iters = _lp_l1(v, phi, w)
    elif p > 1:
        coef, iters, _ = _newton_lp(v, phi, w, p, tol, c0)
    if p >= 1 and p != 2:
        coef, more, converged = _exact_newton(prob, coef, p, tol)
        iters += more
    elif p == 2:
        converged = True
    else:
        rng = np.random.default_rng(seed)
        scale = np.linalg.norm(c0)
        starts = [c0] + [c0 + 0.5 * scale * rng.standard_normal(c0.size) / math.sqrt(c0.size)
                         for _ in range(N_MULTISTART - 1)]
        best, best_f = None, math.inf
        for s in starts:
            s = s / np.dot(v, s)
            cand = _irls_quasi(v, phi, w, p, s)
            fc = float(np.dot(w, np.abs(phi @ cand) ** p))
            if fc < best_f:
                best, best_f = cand, fc
        coef, iters, converged = best, N_MULTISTART, False
    coef = _orient(prob, coef)
    discrete = float(np.dot(w, np.abs(phi @ coef) ** p)) ** (1 / p)
    norm = extremizer_norm(prob, coef, tol=min(tol, 1e-10))
    ratio = abs(float(np.dot(v, coef))) / norm
    return SharpConstantResult(ratio, coef, ratio, ratio if p == 2 else None, iters, converged,
                               certified=certified, problem=prob,
                               diagnostics={"discrete_value": abs(float(np.dot(v, coef))) / discrete,
                                            "n_nodes": int(w.size)})


def sharp_constant(prob: ExtremalProblem, tol: float = 1e-9, seed: int = 0) -> SharpConstantResult:
    """Dispatch on ``p``: Gram solve, exchange LP, or convex minimisation."""
    p = prob.weight.p
    if p == 2:
        return sharp_constant_p2(prob)
    if math.isinf(p):
        return sharp_constant_pinf(prob)
    return sharp_constant_general_p(prob, tol=tol, seed=seed)


def endpoint_equivalence_check(n: int, p: float, points=(0.0, 0.3, 0.7, 0.95, 1.0),
                               rtol: float = 1e-6) -> dict:
    """Compare point-evaluation constants for ``L_p([-1,1])`` over sampled points.

    The unweighted Nikolskii constant at a point is largest at the endpoint.
    """
    if not 1 <= p < math.inf:
        raise ValueError("p must lie in [1, inf)")
    weight = WeightSpec(0.0, 0.0, (-1.0, 1.0), p)
    values = {}
    for a in points:
        prob = ExtremalProblem(FullPoly(n), weight, OperatorSpec.identity(a))
        values[float(a)] = sharp_constant(prob).value
    at_one = values.get(1.0)
    best_a = max(values, key=values.get)
    return {
        "n": n,
        "p": p,
        "values": values,
        "argmax": best_a,
        "endpoint_is_max": at_one is not None and at_one >= values[best_a] * (1 - rtol),
    }


class SharpConstant(BaseEstimator):
    """Estimator-style front end for a univariate sharp constant.

    ``fit`` solves the extremal problem (no training data is involved);
    ``predict`` evaluates the normalised extremizer at points ``t``.

    Parameters
    ----------
    space : {"even", "full"}
    degree : int
        Degree bound ``n``; even spaces use half-degree ``n // 2``.
    alpha, beta : float
        Weight exponents of ``|t|`` and ``1 - t^2``.
    p : float
        Norm exponent, ``inf`` allowed.
    functional : OperatorSpec or None
        Defaults to evaluation at the origin.
    """

    def __init__(self, space="full", degree=4, alpha=0.0, beta=0.0, p=2.0, functional=None,
                 tol=1e-9, seed=0):
        self.space = space
        self.degree = degree
        self.alpha = alpha
        self.beta = beta
        self.p = p
        self.functional = functional
        self.tol = tol
        self.seed = seed

    def _problem(self) -> ExtremalProblem:
        if self.space == "even":
            space = EvenPoly(int(self.degree) // 2)
        elif self.space == "full":
            space = FullPoly(int(self.degree))
        else:
            raise ValueError(f"space must be 'even' or 'full', got {self.space!r}")
        functional = self.functional if self.functional is not None else OperatorSpec.identity(0.0)
        return ExtremalProblem(space, WeightSpec(self.alpha, self.beta, (-1.0, 1.0), self.p), functional)

    def fit(self, X=None, y=None):
        self.result_ = sharp_constant(self._problem(), tol=self.tol, seed=self.seed)
        self.value_ = self.result_.value
        self.lower_bound_ = self.result_.lower_bound
        self.upper_bound_ = self.result_.upper_bound
        self.coef_ = self.result_.extremizer
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        t = np.asarray(X, dtype=float)
        if t.ndim == 2:
            if t.shape[1] != 1:
                raise ValueError("predict expects a single feature column")
            t = t[:, 0]
        return self.result_.evaluate(t)
