"""Polynomials in ``m`` variables on the unit ball and the unit sphere.

Covers exact Laplacian powers on coefficient maps, product cubature for
``L_p`` norms in dimensions up to three, averaging over the orthogonal group
(full, or fixing a pole), and direct sharp constants over the whole
coefficient space for small degrees.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .exceptions import NoConvergence, UnsupportedDimension
from .extremal import GRAM_COND_MAX, PINF_MAX_ROUNDS, PINF_VIOLATION_TOL, SharpConstantResult, _solve_grid_lp
from .polybasis import EvenPolyCoeffs, PolyCoeffs1D
from .quadrature import gauss_jacobi

__all__ = [
    "MultiPolyCoeffs",
    "DomainSpec",
    "laplacian_apply",
    "spherical_laplacian_apply",
    "sphere_surface_measure",
    "ball_rule",
    "sphere_rule",
    "ball_lp_norm",
    "sphere_lp_norm",
    "haar_symmetrize_full",
    "zonal_symmetrize",
    "radial_extension",
    "zonal_extension",
    "radial_lp_norm",
    "zonal_lp_norm",
    "multivariate_sharp_constant",
    "reduction_factor",
    "univariate_counterpart",
]

MAX_DIM = 3
MAX_CUBATURE = 2**22
PINF_GAP_TOL = 1e-7


def _check_index(alpha, dim):
    if len(alpha) != dim or any(int(a) != a or a < 0 for a in alpha):
        raise ValueError(f"bad multi-index {alpha!r} for dimension {dim}")


@dataclass(frozen=True, eq=False)
class MultiPolyCoeffs:
    """``sum_alpha c_alpha x**alpha`` with ``|alpha| <= degree`` in ``dim`` variables."""

    dim: int
    degree: int
    terms: dict

    def __post_init__(self):
        if self.dim < 1 or self.degree < 0:
            raise ValueError("need dim >= 1 and degree >= 0")
        clean = {}
        for alpha, c in dict(self.terms).items():
            alpha = tuple(int(a) for a in alpha)
            _check_index(alpha, self.dim)
            if sum(alpha) > self.degree:
                raise ValueError(f"monomial {alpha} exceeds degree {self.degree}")
            if c != 0:
                clean[alpha] = clean.get(alpha, 0.0) + float(c)
        object.__setattr__(self, "terms", MappingProxyType(clean))
        exps = np.array(list(clean), dtype=float).reshape(-1, self.dim)
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coefs", np.array(list(clean.values()), dtype=float))
        object.__setattr__(self, "_degs", exps.sum(axis=1).astype(int))

    def monomial_values(self, x):
        """``x**alpha`` for every stored term, shape ``x.shape[:-1] + (n_terms,)``."""
        x = np.asarray(x, dtype=float)
        return np.prod(x[..., None, :] ** self._exps, axis=-1)

    @classmethod
    def from_vector(cls, dim, degree, coeffs) -> "MultiPolyCoeffs":
        """Inverse of :meth:`to_vector`."""
        idx = monomials(dim, degree)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size != len(idx):
            raise ValueError(f"expected {len(idx)} coefficients, got {coeffs.size}")
        return cls(dim, degree, dict(zip(idx, coeffs.tolist())))

    @classmethod
    def random(cls, dim, degree, rng) -> "MultiPolyCoeffs":
        """Standard normal coefficients on every monomial."""
        return cls.from_vector(dim, degree, rng.standard_normal(len(monomials(dim, degree))))

    def to_vector(self) -> np.ndarray:
        """Coefficients in the order of :func:`monomials`."""
        return np.array([self.terms.get(a, 0.0) for a in monomials(self.dim, self.degree)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates")
        flat = x.reshape(-1, self.dim)
        out = np.empty(flat.shape[0])
        for i in range(0, flat.shape[0], 4096):
            out[i:i + 4096] = self.monomial_values(flat[i:i + 4096]) @ self._coefs
        return out.reshape(x.shape[:-1])

    def homogeneous_parts(self) -> dict:
        parts: dict = {}
        for alpha, c in self.terms.items():
            parts.setdefault(sum(alpha), {})[alpha] = c
        return {j: MultiPolyCoeffs(self.dim, j, t) for j, t in sorted(parts.items())}

    def __add__(self, other):
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0.0) + c
        return MultiPolyCoeffs(self.dim, max(self.degree, other.degree), terms)

    def scale(self, s: float) -> "MultiPolyCoeffs":
        return MultiPolyCoeffs(self.dim, self.degree, {a: s * c for a, c in self.terms.items()})

    def __mul__(self, other):
        terms: dict = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                k = tuple(i + j for i, j in zip(a, b))
                terms[k] = terms.get(k, 0.0) + c * d
        return MultiPolyCoeffs(self.dim, self.degree + other.degree, terms)

    def compose_linear(self, A) -> "MultiPolyCoeffs":
        """Coefficients of ``x -> P(A x)``."""
        A = np.asarray(A, dtype=float)
        rows = [MultiPolyCoeffs(self.dim, 1, {_unit(self.dim, j): A[i, j] for j in range(self.dim)})
                for i in range(self.dim)]
        total = MultiPolyCoeffs(self.dim, self.degree, {})
        for alpha, c in self.terms.items():
            term = MultiPolyCoeffs(self.dim, 0, {(0,) * self.dim: c})
            for i, a in enumerate(alpha):
                for _ in range(a):
                    term = term * rows[i]
            total = total + term
        return MultiPolyCoeffs(self.dim, self.degree, total.terms)


def _unit(dim, j):
    return tuple(1 if i == j else 0 for i in range(dim))


@lru_cache(maxsize=None)
def monomials(dim: int, degree: int) -> tuple:
    """Multi-indices of total degree ``<= degree``, graded, then lexicographic."""
    out = [a for a in itertools.product(range(degree + 1), repeat=dim) if sum(a) <= degree]
    return tuple(sorted(out, key=lambda a: (sum(a), tuple(-x for x in a))))


@dataclass(frozen=True)
class DomainSpec:
    """Ball ``B^m`` or sphere ``S^(m-1)`` together with the exponent ``p``."""

    kind: str
    m: int
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("ball", "sphere"):
            raise ValueError(f"kind must be 'ball' or 'sphere', got {self.kind!r}")
        if self.m < 1 or (self.kind == "sphere" and self.m < 2):
            raise ValueError("sphere needs m >= 2, ball needs m >= 1")
        if not self.p > 0:
            raise ValueError("p must be positive")

    @classmethod
    def ball(cls, m, p=2.0):
        return cls("ball", int(m), float(p))

    @classmethod
    def sphere(cls, m, p=2.0):
        return cls("sphere", int(m), float(p))


# ---------------------------------------------------------------- operators

def laplacian_apply(P: MultiPolyCoeffs, N: int) -> MultiPolyCoeffs:
    """``Delta^N P`` by exact multi-index arithmetic."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    terms = dict(P.terms)
    for _ in range(N):
        nxt: dict = {}
        for alpha, c in terms.items():
            for i, a in enumerate(alpha):
                if a >= 2:
                    beta = alpha[:i] + (a - 2,) + alpha[i + 1:]
                    nxt[beta] = nxt.get(beta, 0.0) + c * a * (a - 1)
        terms = nxt
    return MultiPolyCoeffs(P.dim, max(P.degree - 2 * N, 0), terms)


def spherical_laplacian_apply(P: MultiPolyCoeffs, N: int) -> MultiPolyCoeffs:
    """``N``-th power of the Laplace--Beltrami operator on ``S^(m-1)``.

    The result is a polynomial whose restriction to the sphere is the
    operator applied to the restriction of ``P``.  For a homogeneous part
    ``P_j`` of degree ``j`` the Laplacian of the degree-0 extension
    ``P_j(x/|x|)`` on the sphere equals ``Delta P_j - j (j + m - 2) P_j``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    m = P.dim
    cur = P
    for _ in range(N):
        out = MultiPolyCoeffs(m, cur.degree, {})
        for j, Pj in cur.homogeneous_parts().items():
            out = out + laplacian_apply(Pj, 1) + Pj.scale(-j * (j + m - 2))
        cur = MultiPolyCoeffs(m, cur.degree, out.terms)
    return cur


def sphere_surface_measure(m: int) -> float:
    """``|S^(m-1)| = 2 pi^(m/2) / Gamma(m/2)``; equals 2 for ``m = 1``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)


def reduction_factor(domain: DomainSpec) -> float:
    """Factor linking the multivariate constant to its univariate reduction."""
    if math.isinf(domain.p):
        return 1.0
    if domain.kind == "ball":
        return (2.0 / sphere_surface_measure(domain.m)) ** (1.0 / domain.p)
    return (1.0 / sphere_surface_measure(domain.m - 1)) ** (1.0 / domain.p)


# ---------------------------------------------------------------- cubature

def _check_m(m, lo=1):
    if m > MAX_DIM or m < lo:
        raise UnsupportedDimension(f"dimension {m} not supported (need {lo} <= m <= {MAX_DIM})")


def _legendre(n):
    r = gauss_jacobi(n, 0.0, 0.0)
    return 2 * r.nodes - 1, 2 * r.weights


def _circle(k):
    th = 2 * math.pi * np.arange(k) / k
    return np.stack([np.cos(th), np.sin(th)], axis=-1), np.full(k, 2 * math.pi / k)


def sphere_rule(m: int, degree: int):
    """Points on ``S^(m-1)`` and weights, exact for polynomials of ``degree``.

    ``m = 2``: trapezoid in the angle; ``m = 3``: Gauss--Legendre in the
    height times trapezoid in the azimuth.
    """
    _check_m(m, 2)
    if m == 2:
        return _circle(degree + 1)
    z, wz = _legendre(degree // 2 + 1)
    ring, wr = _circle(degree + 1)
    rho = np.sqrt(1 - z * z)
    pts = np.concatenate([np.column_stack([rho[i] * ring, np.full(len(ring), z[i])]) for i in range(z.size)])
    return pts, np.outer(wz, wr).ravel()


def ball_rule(m: int, degree: int):
    """Points in ``B^m`` and weights, exact for polynomials of ``degree``."""
    _check_m(m)
    nr = degree // 2 + 1
    rad = gauss_jacobi(nr, float(m - 1), 0.0)
    if m == 1:
        return _legendre(nr)[0][:, None], _legendre(nr)[1]
    dirs, wd = sphere_rule(m, degree)
    pts = (rad.nodes[:, None, None] * dirs[None]).reshape(-1, m)
    return pts, np.outer(rad.weights, wd).ravel()


def _split_integral(F, weight_fn, edges, is_root, p, nq):
    """Row-wise ``sum_j int_{e_j}^{e_(j+1)} |F(x)|^p weight_fn(x) dx``.

    Pieces ending at a simple zero of ``F`` use a Jacobi rule with exponent
    ``p`` at that end, which makes the remaining integrand smooth.
    ``F(x, rows)`` and ``weight_fn(x, rows)`` take a ``(k, nq)`` array of
    abscissae for the selected rows.
    """
    K, J1 = edges.shape
    total = np.zeros(K)
    rules = {(a, b): gauss_jacobi(nq, a, b) for a in (0.0, float(p)) for b in (0.0, float(p))}
    for j in range(J1 - 1):
        lo, hi = edges[:, j], edges[:, j + 1]
        width = hi - lo
        live = width > 0
        for (a, b), rule in rules.items():
            rows = live & (is_root[:, j] == (a > 0)) & (is_root[:, j + 1] == (b > 0))
            if not rows.any():
                continue
            u = rule.nodes
            x = lo[rows, None] + width[rows, None] * u
            vals = np.abs(F(x, rows)) ** p * weight_fn(x, rows) / (u**a * (1 - u) ** b)
            total[rows] += width[rows] * (vals @ rule.weights)
    return total


def _edges(roots, lo, hi):
    """Sorted breakpoints ``[lo, roots..., hi]`` with a root mask; padding collapses onto ``hi``."""
    R = np.sort(roots, axis=1)
    flag = ~np.isnan(R)
    R = np.where(flag, R, hi)
    K = R.shape[0]
    edges = np.hstack([np.full((K, 1), lo), R, np.full((K, 1), hi)])
    mask = np.hstack([np.zeros((K, 1), bool), flag, np.zeros((K, 1), bool)])
    return edges, mask


def _horner_rows(C, x):
    out = np.zeros_like(x)
    for j in range(C.shape[1] - 1, -1, -1):
        out = out * x + C[:, j:j + 1]
    return out


def _radial_pieces_integral(P: MultiPolyCoeffs, dirs, p, nr):
    """``int_0^1 |P(r w)|^p r^(m-1) dr`` for each direction ``w``, split at real roots."""
    m = P.dim
    C = _ray_coefficients(P, dirs)
    edges, mask = _edges(_real_roots_batch(C), 0.0, 1.0)
    return _split_integral(lambda x, rows: _horner_rows(C[rows], x), lambda x, rows: x ** (m - 1),
                           edges, mask, p, nr)


def _meridian_polynomials(P: MultiPolyCoeffs, phi):
    """Coefficients in ``t = tan(theta/2)`` of ``(1+t^2)^n P`` on meridians (m=3) or the circle (m=2)."""
    pp = np.polynomial.polynomial
    n = P.degree
    exps = P._exps.astype(int)
    B = np.zeros((exps.shape[0], 2 * n + 1))
    for i, a in enumerate(exps):
        if P.dim == 2:
            f = pp.polymul(pp.polypow([1, 0, -1], a[0]), pp.polypow([0, 2], a[1]))
        else:
            f = pp.polymul(pp.polypow([0, 2], a[0] + a[1]), pp.polypow([1, 0, -1], a[2]))
        f = pp.polymul(f, pp.polypow([1, 0, 1], n - a.sum()))
        B[i, : f.size] = f
    if P.dim == 2:
        S = P._coefs[None, :]
    else:
        S = P._coefs * np.cos(phi)[:, None] ** exps[:, 0] * np.sin(phi)[:, None] ** exps[:, 1]
    return S @ B


def _sphere_split_integral(P: MultiPolyCoeffs, p, k, nq):
    m = P.dim
    if m == 2:
        C = _meridian_polynomials(P, None)
        t = _real_roots_batch(C, -np.inf, np.inf)
        edges, mask = _edges(2 * np.arctan(t), -math.pi, math.pi)
        F = lambda x, rows: P(np.stack([np.cos(x), np.sin(x)], axis=-1).reshape(-1, 2)).reshape(x.shape)
        return float(_split_integral(F, lambda x, rows: np.ones_like(x), edges, mask, p, nq)[0])
    phi = 2 * math.pi * np.arange(k) / k
    C = _meridian_polynomials(P, phi)
    t = _real_roots_batch(C, 0.0, np.inf)
    edges, mask = _edges(2 * np.arctan(t), 0.0, math.pi)

    def F(x, rows):
        ph = phi[rows][:, None] * np.ones_like(x)
        pts = np.stack([np.sin(x) * np.cos(ph), np.sin(x) * np.sin(ph), np.cos(x)], axis=-1)
        return P(pts.reshape(-1, 3)).reshape(x.shape)

    inner = _split_integral(F, lambda x, rows: np.sin(x), edges, mask, p, nq)
    return float(inner.sum() * 2 * math.pi / k)


def _is_even_int(p):
    return float(p).is_integer() and int(p) % 2 == 0


def _adaptive(integrate, start, tol):
    n = start
    prev = integrate(n)
    while True:
        n *= 2
        if n > MAX_CUBATURE:
            raise NoConvergence(f"cubature did not reach tolerance {tol}")
        cur = integrate(n)
        if cur == 0 or abs(cur - prev) <= tol * abs(cur):
            return cur
        prev = cur


def _direction_grid(m, n):
    """Angle grid on ``S^(m-1)``: ``theta`` for ``m = 2``, ``(theta, phi)`` for ``m = 3``."""
    if m == 2:
        return np.linspace(0, 2 * math.pi, n, endpoint=False)[:, None]
    th, ph = np.meshgrid(np.linspace(0, math.pi, n // 2 + 1), np.linspace(0, 2 * math.pi, n, endpoint=False),
                         indexing="ij")
    return np.column_stack([th.ravel(), ph.ravel()])


def _directions(m, q):
    q = np.atleast_2d(q)
    if m == 2:
        return np.column_stack([np.cos(q[:, 0]), np.sin(q[:, 0])])
    th, ph = q[:, 0], q[:, 1]
    return np.column_stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def _ray_coefficients(P: MultiPolyCoeffs, dirs):
    """Row ``k`` holds the coefficients in ``r`` of ``P(r * dirs[k])``."""
    vals = P.monomial_values(dirs) * P._coefs
    coeffs = np.zeros((dirs.shape[0], P.degree + 1))
    for j in range(P.degree + 1):
        coeffs[:, j] = vals[:, P._degs == j].sum(axis=1)
    return coeffs


def _real_roots_batch(D, lo=0.0, hi=1.0):
    """Real roots in ``(lo, hi)`` of each row of ``D`` (ascending coefficients), as a padded array."""
    k, n1 = D.shape
    out = np.full((k, max(n1 - 1, 0)), np.nan)
    if n1 < 2:
        return out
    scale = np.abs(D).max(axis=1)
    lead = D[:, -1]
    good = np.abs(lead) > 1e-12 * np.maximum(scale, 1e-300)
    if np.any(good):
        comp = np.zeros((good.sum(), n1 - 1, n1 - 1))
        comp[:, 1:, :-1] = np.eye(n1 - 2) if n1 > 2 else 0
        comp[:, :, -1] = -D[good, :-1] / lead[good, None]
        ev = np.linalg.eigvals(comp)
        ok = (np.abs(ev.imag) < 1e-9 * np.maximum(1.0, np.abs(ev))) & (ev.real > lo) & (ev.real < hi)
        out[good] = np.where(ok, ev.real, np.nan)
    for i in np.nonzero(~good)[0]:
        r = np.polynomial.Polynomial(D[i]).roots() if np.any(D[i]) else np.array([])
        r = [z.real for z in np.atleast_1d(r) if abs(z.imag) < 1e-9 * max(1.0, abs(z)) and lo < z.real < hi]
        out[i, :len(r)] = r
    return out


def _ray_max(P: MultiPolyCoeffs, dirs):
    """Exact ``max_{0 <= r <= 1} |P(r w)|`` per direction, with the maximising ``r``."""
    C = _ray_coefficients(P, dirs)
    D = C[:, 1:] * np.arange(1, C.shape[1])
    cand = np.concatenate([np.zeros((C.shape[0], 1)), np.ones((C.shape[0], 1)), _real_roots_batch(D)], axis=1)
    safe = np.nan_to_num(cand, nan=0.0)
    powers = safe[..., None] ** np.arange(C.shape[1])
    av = np.abs(np.einsum("kcj,kj->kc", powers, C))
    av[np.isnan(cand)] = -1.0
    i = np.argmax(av, axis=1)
    rows = np.arange(C.shape[0])
    return av[rows, i], safe[rows, i]


def _sup_search(P: MultiPolyCoeffs, domain_kind, n_refine=32):
    """Candidate maximisers of ``|P|`` over the ball or sphere.

    On the ball the radial maximum is found exactly along every ray, so only
    the direction is searched: a dense angular grid, then local refinement
    of the discrete peaks.  Returns ``(points, values)``, best first.
    """
    m = P.dim
    if m == 1:
        if domain_kind == "sphere":
            pts = np.array([[1.0], [-1.0]])
            vals = np.abs(P(pts))
        else:
            pts = np.array([[1.0]])
            vals, radii = _ray_max(P, np.array([[1.0], [-1.0]]))
            pts = np.array([[radii[0]], [-radii[1]]])
        order = np.argsort(-vals)
        return pts[order], vals[order]

    def profile(q):
        dirs = _directions(m, q)
        if domain_kind == "sphere":
            return np.abs(P(dirs)), dirs
        vals, radii = _ray_max(P, dirs)
        return vals, dirs * radii[:, None]

    n = max(16 * P.degree + 32, 64) if m == 2 else max(8 * P.degree + 24, 48)
    q = _direction_grid(m, n)
    vals, _ = profile(q)
    if m == 2:
        peaks = np.nonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))[0]
    else:
        grid = vals.reshape(n // 2 + 1, n)
        padded = np.pad(grid, ((1, 1), (0, 0)), mode="edge")
        is_peak = np.ones_like(grid, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    is_peak &= grid >= np.roll(padded, (-di, -dj), axis=(0, 1))[1:-1]
        peaks = np.nonzero(is_peak.ravel())[0]
    peaks = peaks[np.argsort(-vals[peaks])][:n_refine]
    bounds = [(None, None)] if m == 2 else [(0.0, math.pi), (None, None)]
    found_q, found_v = [], []
    for i in peaks:
        res = minimize(lambda z: -float(profile(z)[0][0]), q[i], method="L-BFGS-B", bounds=bounds,
                       options={"ftol": 1e-16, "gtol": 1e-13, "eps": 1e-9})
        z = res.x if -res.fun >= vals[i] else q[i]
        found_q.append(z)
    fv, pts = profile(np.array(found_q))
    order = np.argsort(-fv)
    return pts[order], fv[order]


def ball_lp_norm(P: MultiPolyCoeffs, p: float, tol: float = 1e-6) -> float:
    """``||P||_{L_p(B^m)}`` for ``m <= 3``.

    Even integer ``p`` uses an exact product rule.  Otherwise each ray is
    integrated exactly after splitting at the roots of ``r -> P(r w)``, and
    the angular rule is doubled until the relative change is below ``tol``.
    That last step converges only algebraically, so small ``tol`` is costly
    for ``m = 3``.
    """
    m = P.dim
    _check_m(m)
    if math.isinf(p):
        return float(_sup_search(P, "ball")[1][0])
    if _is_even_int(p):
        pts, w = ball_rule(m, int(p) * P.degree)
        return float(np.dot(w, P(pts) ** int(p))) ** (1 / p)
    nr = P.degree * max(1, math.ceil(p)) // 2 + 8
    if m == 1:
        dirs, wd = np.array([[1.0], [-1.0]]), np.ones(2)
        return float(np.dot(wd, _radial_pieces_integral(P, dirs, p, nr))) ** (1 / p)

    def integrate(k):
        dirs, wd = sphere_rule(m, k)
        return float(np.dot(wd, _radial_pieces_integral(P, dirs, p, nr)))

    return _adaptive(integrate, 2 * P.degree + 8, tol * p) ** (1 / p)


def sphere_lp_norm(P: MultiPolyCoeffs, p: float, tol: float = 1e-6) -> float:
    """``||P||_{L_p(S^(m-1))}`` with the surface measure, ``m in {2, 3}``."""
    m = P.dim
    _check_m(m, 2)
    if math.isinf(p):
        return float(_sup_search(P, "sphere")[1][0])
    if _is_even_int(p):
        pts, w = sphere_rule(m, int(p) * P.degree)
        return float(np.dot(w, P(pts) ** int(p))) ** (1 / p)

    nq = P.degree * max(1, math.ceil(p)) + 8
    if m == 2:
        return _sphere_split_integral(P, p, 0, nq) ** (1 / p)
    return _adaptive(lambda k: _sphere_split_integral(P, p, k, nq), 2 * P.degree + 8, tol * p) ** (1 / p)


def radial_lp_norm(Q: EvenPolyCoeffs, m: int, p: float, tol: float = 1e-12) -> float:
    """``||Q(|x|)||_{L_p(B^m)} = (|S^(m-1)| int_0^1 |Q(r)|^p r^(m-1) dr)^(1/p)``."""
    from .quadrature import WeightSpec, weighted_lp_norm

    if math.isinf(p):
        return weighted_lp_norm(Q, WeightSpec(0.0, 0.0, (-1.0, 1.0), p))
    roots = [r.real for r in np.roots(np.asarray(Q.to_full().coeffs)[::-1]) if abs(r.imag) < 1e-12 and 0 < r.real < 1] \
        if np.any(Q.coeffs[1:]) else []
    half = weighted_lp_norm(Q, WeightSpec(float(m - 1), 0.0, (-1.0, 1.0), p), tol=tol, even=True,
                            breakpoints=tuple(roots), breakpoint_exponent=p)
    return (sphere_surface_measure(m) / 2) ** (1 / p) * half


def zonal_lp_norm(Q: PolyCoeffs1D, m: int, p: float, tol: float = 1e-12) -> float:
    """``||Q((x, a))||_{L_p(S^(m-1))}`` via ``|S^(m-2)| int |Q(u)|^p (1-u^2)^((m-3)/2) du``."""
    from .polybasis import evaluate
    from .quadrature import WeightSpec, weighted_lp_norm

    if m < 2:
        raise ValueError("need m >= 2")
    f = lambda u: evaluate(Q, u)
    if math.isinf(p):
        return weighted_lp_norm(f, WeightSpec(0.0, 0.0, (-1.0, 1.0), p))
    from .polybasis import to_monomial

    c = np.trim_zeros(to_monomial(Q).coeffs, "b")
    roots = [r.real for r in np.roots(c[::-1]) if abs(r.imag) < 1e-12 and -1 < r.real < 1] if c.size > 1 else []
    val = weighted_lp_norm(f, WeightSpec(0.0, (m - 3) / 2, (-1.0, 1.0), p), tol=tol,
                           breakpoints=tuple(roots), breakpoint_exponent=p)
    return sphere_surface_measure(m - 1) ** (1 / p) * val


# ---------------------------------------------------------------- symmetrization

def _sphere_moment(alpha) -> float:
    """Mean of ``x**alpha`` over ``S^(m-1)`` under the normalised surface measure."""
    if any(a % 2 for a in alpha):
        return 0.0
    m = len(alpha)
    k = sum(alpha)
    logv = sum(gammaln((a + 1) / 2) for a in alpha) - gammaln((k + m) / 2) + gammaln(m / 2) - m * gammaln(0.5)
    return math.exp(logv)


def haar_symmetrize_full(P: MultiPolyCoeffs) -> EvenPolyCoeffs:
    """Radial profile ``Q`` with ``Q(|x|)`` the ``O(m)``-average of ``P`` at ``x``."""
    out = np.zeros(P.degree // 2 + 1)
    for alpha, c in P.terms.items():
        k = sum(alpha)
        if k % 2 == 0:
            out[k // 2] += c * _sphere_moment(alpha)
    return EvenPolyCoeffs(out)


def _orthonormal_complement(a):
    a = np.asarray(a, dtype=float)
    q, _ = np.linalg.qr(np.column_stack([a, np.eye(a.size)]))
    return q[:, 1:] * np.sign(q[:, :1].T @ a)[0]


def zonal_symmetrize(P: MultiPolyCoeffs, a) -> PolyCoeffs1D:
    """``Q`` with ``Q((x, a))`` the average of ``P`` over rotations fixing ``a``.

    The average over each latitude set ``{x in S : (x, a) = u}`` is taken at
    Chebyshev nodes ``u`` and interpolated by a polynomial of degree ``P.degree``.
    """
    m = P.dim
    _check_m(m, 2)
    a = np.asarray(a, dtype=float)
    if a.shape != (m,) or abs(np.linalg.norm(a) - 1) > 1e-12:
        raise ValueError("pole must be a unit vector in R^m")
    n = P.degree
    perp = _orthonormal_complement(a)
    u = np.cos(math.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    if m == 2:
        ring = np.array([[1.0], [-1.0]])
    else:
        ring, _ = _circle(n + 1)
    avg = np.empty(n + 1)
    for i, ui in enumerate(u):
        pts = ui * a + math.sqrt(1 - ui * ui) * ring @ perp.T
        avg[i] = P(pts).mean()
    cheb = np.polynomial.chebyshev.chebfit(u, avg, n)
    return PolyCoeffs1D(np.polynomial.chebyshev.cheb2poly(cheb))


def radial_extension(Q: EvenPolyCoeffs, m: int) -> MultiPolyCoeffs:
    """``x -> Q(|x|)`` as a polynomial in ``m`` variables."""
    r2 = MultiPolyCoeffs(m, 2, {tuple(2 if i == j else 0 for i in range(m)): 1.0 for j in range(m)})
    total = MultiPolyCoeffs(m, 2 * Q.half_degree, {})
    power = MultiPolyCoeffs(m, 0, {(0,) * m: 1.0})
    for c in Q.coeffs:
        total = total + power.scale(float(c))
        power = power * r2
    return MultiPolyCoeffs(m, 2 * Q.half_degree, total.terms)


def zonal_extension(Q: PolyCoeffs1D, a) -> MultiPolyCoeffs:
    """``x -> Q((x, a))`` as a polynomial in ``len(a)`` variables."""
    a = np.asarray(a, dtype=float)
    m = a.size
    lin = MultiPolyCoeffs(m, 1, {_unit(m, j): a[j] for j in range(m)})
    coeffs = Q.coeffs if Q.lam is None else None
    if coeffs is None:
        from .polybasis import to_monomial

        coeffs = to_monomial(Q).coeffs
    total = MultiPolyCoeffs(m, Q.degree, {})
    power = MultiPolyCoeffs(m, 0, {(0,) * m: 1.0})
    for c in coeffs:
        total = total + power.scale(float(c))
        power = power * lin
    return MultiPolyCoeffs(m, Q.degree, total.terms)


# ---------------------------------------------------------------- sharp constants

def _functional(domain: DomainSpec, n: int, N: int, pole):
    """Values of the functional on every monomial of degree ``<= n``."""
    idx = monomials(domain.m, n)
    out = np.empty(len(idx))
    for k, alpha in enumerate(idx):
        P = MultiPolyCoeffs(domain.m, n, {alpha: 1.0})
        if domain.kind == "ball":
            out[k] = laplacian_apply(P, N).terms.get((0,) * domain.m, 0.0)
        else:
            out[k] = float(spherical_laplacian_apply(P, N)(np.asarray(pole)[None])[0])
    return out


def _design(domain: DomainSpec, n: int, points):
    idx = monomials(domain.m, n)
    return np.column_stack([MultiPolyCoeffs(domain.m, n, {a: 1.0})(points) for a in idx])


def multivariate_sharp_constant(m: int, n: int, N: int, domain: DomainSpec, pole=None) -> SharpConstantResult:
    """Sharp constant over all polynomials of degree ``<= n`` in ``m`` variables.

    The functional is ``Delta^N P (0)`` on the ball and the ``N``-th power of
    the spherical Laplacian at ``pole`` (default ``e_m``) on the sphere.  No
    symmetry is assumed: ``p = 2`` is a Gram solve in an orthonormal basis
    built from the exact cubature, ``p = inf`` a grid LP with exchange.
    The extremizer is returned as monomial coefficients (see
    :func:`monomials`).
    """
    if domain.m != m:
        raise ValueError("domain dimension does not match m")
    if m not in (2, 3):
        raise UnsupportedDimension("direct multivariate solves need m in {2, 3}")
    if n > 10 or n < 0 or N < 0:
        raise ValueError("need 0 <= n <= 10 and N >= 0")
    p = domain.p
    if not (p == 2 or math.isinf(p)):
        raise ValueError("direct multivariate solves support p in {2, inf}")
    if pole is None:
        pole = np.eye(m)[-1]
    pole = np.asarray(pole, dtype=float)
    L = _functional(domain, n, N, pole)
    rule = ball_rule if domain.kind == "ball" else sphere_rule
    pts, w = rule(m, 2 * n)
    V = np.sqrt(w)[:, None] * _design(domain, n, pts)
    _, s, Wt = np.linalg.svd(V, full_matrices=False)
    keep = s > s[0] / math.sqrt(GRAM_COND_MAX)
    T = Wt[keep].T / s[keep]
    v = T.T @ L
    diag = {"monomials": [list(a) for a in monomials(m, n)], "rank": int(keep.sum()), "pole": pole.tolist()}
    if not np.any(np.abs(v) > 1e-13 * max(1.0, np.abs(L).max())):
        return SharpConstantResult(0.0, np.zeros(L.size), 0.0, 0.0, 0, True, degenerate=True, diagnostics=diag)
    if p == 2:
        value = float(np.linalg.norm(v))
        coef = T @ (v / value**2)
        return SharpConstantResult(value, coef, value, value, 1, True, diagnostics=diag)
    return _multivariate_pinf(domain, n, T, v, diag)


def _multivariate_pinf(domain, n, T, v, diag):
    """Grid LP with exchange.

    Optimal LP faces are often large (the identity functional is the extreme
    case), so the iteration also stops once the best certified ratio seen so
    far is within ``PINF_GAP_TOL`` of the LP bound.
    """
    m = domain.m
    kind = domain.kind
    dirs = _directions(m, _direction_grid(m, max(4 * n + 8, 16)))
    if kind == "ball":
        radii = np.sqrt((1 - np.cos(np.linspace(0, math.pi, n + 3))) / 2)
        grid = (radii[:, None, None] * dirs[None]).reshape(-1, m)
    else:
        grid = dirs
    best = (-math.inf, None, math.inf)
    for rounds in range(1, PINF_MAX_ROUNDS + 1):
        y, upper = _solve_grid_lp(v, _design(domain, n, grid) @ T)
        coef = T @ y
        P = MultiPolyCoeffs.from_vector(m, n, coef)
        pts, vals = _sup_search(P, kind)
        sup = float(vals[0])
        lower = float(np.dot(v, y)) / sup
        if lower > best[0]:
            best = (lower, coef / sup, sup - 1.0)
        if sup - 1.0 < PINF_VIOLATION_TOL or upper - best[0] < PINF_GAP_TOL * upper:
            diag.update(grid_size=int(grid.shape[0]), violation=best[2])
            return SharpConstantResult(best[0], best[1], best[0], max(upper, best[0]), rounds, True,
                                       diagnostics=diag)
        grid = np.vstack([grid, pts[vals > 1.0]])
    raise NoConvergence(f"multivariate exchange did not settle in {PINF_MAX_ROUNDS} rounds")


def univariate_counterpart(domain: DomainSpec, n: int, N: int):
    """The univariate problem whose constant, times :func:`reduction_factor`,
    equals the multivariate one."""
    from .extremal import EvenPoly, ExtremalProblem, FullPoly
    from .operators import OperatorSpec
    from .quadrature import WeightSpec

    m = domain.m
    if domain.kind == "ball":
        weight = WeightSpec(float(m - 1), 0.0, (-1.0, 1.0), domain.p)
        return ExtremalProblem(EvenPoly(n // 2), weight, OperatorSpec.bessel_at_zero(m / 2 - 1, N),
                               label=f"ball m={m}")
    weight = WeightSpec(0.0, (m - 3) / 2, (-1.0, 1.0), domain.p)
    return ExtremalProblem(FullPoly(n), weight, OperatorSpec.gegenbauer_at_one(m / 2 - 1, N),
                           label=f"sphere m={m}")
