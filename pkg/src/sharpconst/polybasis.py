"""Coefficient representations of univariate polynomials.

Two value types live here:

* :class:`EvenPolyCoeffs` -- ``sum_p c_p t**(2p)``, stored by half-degree.
* :class:`PolyCoeffs1D` -- a general polynomial in the monomial basis or in
  a Gegenbauer basis ``C_k^lam``.  For ``lam == 0`` the Gegenbauer basis
  degenerates, so the Chebyshev polynomials ``T_k`` are used instead.

All objects are immutable; every function returns a new object.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .exceptions import ZeroScale

__all__ = [
    "EvenPolyCoeffs",
    "PolyCoeffs1D",
    "evaluate",
    "gegenbauer_at_one",
    "to_gegenbauer",
    "to_monomial",
    "substitute_quadratic",
    "invert_substitution",
    "scale_argument",
    "symmetrize_even",
]

MAX_DEGREE = 200
# monomial Horner is only trusted up to this degree
HORNER_MAX_DEGREE = 30


def _frozen(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=float).ravel()
    if arr.size == 0:
        arr = np.zeros(1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EvenPolyCoeffs:
    """Even polynomial ``sum_{p=0}^{n} c_p t**(2p)``.

    ``half_degree`` is a declared bound; trailing zeros are kept.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        if 2 * (arr.size - 1) > MAX_DEGREE:
            raise ValueError(f"degree {2 * (arr.size - 1)} exceeds cap {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", arr)

    @property
    def half_degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def degree(self) -> int:
        return 2 * self.half_degree

    def __call__(self, t):
        return evaluate(self, t)

    def __repr__(self):
        return f"EvenPolyCoeffs({self.coeffs.tolist()!r})"

    def to_full(self) -> "PolyCoeffs1D":
        """Return the same polynomial as a monomial :class:`PolyCoeffs1D`."""
        full = np.zeros(self.degree + 1)
        full[::2] = self.coeffs
        return PolyCoeffs1D(full)


@dataclass(frozen=True, eq=False)
class PolyCoeffs1D:
    """Univariate polynomial in the monomial (``lam=None``) or Gegenbauer basis."""

    coeffs: np.ndarray
    lam: float | None = None

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        if arr.size - 1 > MAX_DEGREE:
            raise ValueError(f"degree {arr.size - 1} exceeds cap {MAX_DEGREE}")
        if self.lam is not None and not self.lam > -0.5:
            raise ValueError(f"Gegenbauer parameter must exceed -1/2, got {self.lam}")
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def basis(self) -> str:
        return "monomial" if self.lam is None else "gegenbauer"

    def __call__(self, t):
        return evaluate(self, t)

    def __repr__(self):
        if self.lam is None:
            return f"PolyCoeffs1D({self.coeffs.tolist()!r})"
        return f"PolyCoeffs1D({self.coeffs.tolist()!r}, lam={self.lam!r})"


def gegenbauer_at_one(lam: float, k: int) -> float:
    """``C_k^lam(1) = binom(k + 2 lam - 1, k)`` as a running product."""
    if not lam > -0.5:
        raise ValueError(f"lam must exceed -1/2, got {lam}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    value = 1.0
    for j in range(1, k + 1):
        value *= (j + 2.0 * lam - 1.0) / j
    return value


def _basis_at_one(lam: float, k: int) -> float:
    # value at t=1 of the basis function actually used for index k
    return 1.0 if lam == 0 else gegenbauer_at_one(lam, k)


def _clenshaw_gegenbauer(coeffs: np.ndarray, lam: float, t):
    t = np.asarray(t, dtype=float)
    if lam == 0:
        return np.polynomial.chebyshev.chebval(t, coeffs)
    n = coeffs.size - 1
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    # C_{k+1} = A_k(t) C_k + B_k C_{k-1}
    for k in range(n, 0, -1):
        a_k = 2.0 * (k + lam) * t / (k + 1)
        b_next = -(k + 2.0 * lam) / (k + 2)
        b1, b2 = coeffs[k] + a_k * b1 + b_next * b2, b1
    b_1 = -(2.0 * lam) / 2.0
    return coeffs[0] + 2.0 * lam * t * b1 + b_1 * b2


def _horner(coeffs: np.ndarray, t):
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * t + c
    return acc


def evaluate(poly, t):
    """Evaluate ``poly`` at ``t`` (scalar or array).

    Monomial coefficients use Horner up to degree 30; above that the
    polynomial is converted to the Legendre basis and evaluated by Clenshaw.
    """
    if isinstance(poly, EvenPolyCoeffs):
        t = np.asarray(t, dtype=float)
        if poly.half_degree <= HORNER_MAX_DEGREE:
            return _horner(poly.coeffs, t * t)
        return evaluate(poly.to_full(), t)
    if poly.lam is None:
        if poly.degree <= HORNER_MAX_DEGREE:
            return _horner(poly.coeffs, t)
        return _clenshaw_gegenbauer(to_gegenbauer(poly, 0.5).coeffs, 0.5, t)
    return _clenshaw_gegenbauer(poly.coeffs, poly.lam, t)


@lru_cache(maxsize=64)
def _conversion_matrices(lam: float, degree: int):
    """Return ``(M2G, G2M)`` with columns giving each basis element in the other basis."""
    n = degree + 1
    # Jacobi operator: t * phi_k expressed in the phi basis
    jac = np.zeros((n + 1, n))
    for k in range(n):
        if lam == 0:
            if k == 0:
                jac[1, 0] = 1.0
            else:
                jac[k + 1, k] = 0.5
                jac[k - 1, k] = 0.5
        else:
            denom = 2.0 * (k + lam)
            jac[k + 1, k] = (k + 1) / denom
            if k > 0:
                jac[k - 1, k] = (k + 2.0 * lam - 1) / denom
    m2g = np.zeros((n, n))
    col = np.zeros(n + 1)
    col[0] = 1.0
    m2g[:, 0] = col[:n]
    for j in range(1, n):
        col = jac @ col[:n]
        m2g[:, j] = col[:n]

    g2m = np.zeros((n, n))
    g2m[0, 0] = 1.0
    if n > 1:
        g2m[1, 1] = 1.0 if lam == 0 else 2.0 * lam
    for k in range(1, n - 1):
        shifted = np.concatenate([[0.0], g2m[:-1, k]])
        if lam == 0:
            g2m[:, k + 1] = 2.0 * shifted - g2m[:, k - 1]
        else:
            g2m[:, k + 1] = (2.0 * (k + lam) * shifted - (k + 2.0 * lam - 1) * g2m[:, k - 1]) / (k + 1)
    m2g.setflags(write=False)
    g2m.setflags(write=False)
    return m2g, g2m


def to_gegenbauer(poly, lam: float) -> PolyCoeffs1D:
    """Re-express ``poly`` in the Gegenbauer(``lam``) basis."""
    if isinstance(poly, EvenPolyCoeffs):
        poly = poly.to_full()
    if poly.lam is not None:
        if poly.lam == lam:
            return poly
        poly = to_monomial(poly)
    m2g, _ = _conversion_matrices(float(lam), poly.degree)
    return PolyCoeffs1D(m2g @ poly.coeffs, lam=float(lam))


def to_monomial(poly) -> PolyCoeffs1D:
    """Re-express ``poly`` in the monomial basis."""
    if isinstance(poly, EvenPolyCoeffs):
        return poly.to_full()
    if poly.lam is None:
        return poly
    _, g2m = _conversion_matrices(float(poly.lam), poly.degree)
    return PolyCoeffs1D(g2m @ poly.coeffs)


def _exact(x) -> Fraction:
    return Fraction(float(x))


def substitute_quadratic(r: PolyCoeffs1D, b: float) -> EvenPolyCoeffs:
    """Coefficients of ``P(t) = R(1 - 2 t**2 / b**2)``.

    The binomial expansion is carried out in exact rational arithmetic on
    the (exactly representable) float inputs, then rounded once.
    """
    if b == 0:
        raise ZeroScale("b must be nonzero")
    r = to_monomial(r)
    n = r.degree
    rc = [_exact(c) for c in r.coeffs]
    s = Fraction(-2) / (_exact(b) ** 2)
    out = []
    for j in range(n + 1):
        acc = sum(rc[k] * comb(k, j) for k in range(j, n + 1))
        out.append(float(acc * s**j))
    return EvenPolyCoeffs(out)


def invert_substitution(p: EvenPolyCoeffs, b: float) -> PolyCoeffs1D:
    """Return ``R`` with ``substitute_quadratic(R, b) == p``.

    With ``u = t**2`` and ``p(t) = V(u)``, ``R(y) = V(b**2 (1 - y) / 2)``.
    """
    if b == 0:
        raise ZeroScale("b must be nonzero")
    n = p.half_degree
    pc = [_exact(c) for c in p.coeffs]
    s = _exact(b) ** 2 / 2
    out = []
    for k in range(n + 1):
        acc = sum(pc[j] * s**j * comb(j, k) for j in range(k, n + 1))
        out.append(float(acc * (-1) ** k))
    return PolyCoeffs1D(out)


def scale_argument(p, s: float):
    """Coefficients of ``t -> p(t / s)``; same type as ``p``."""
    if s == 0:
        raise ZeroScale("s must be nonzero")
    if isinstance(p, EvenPolyCoeffs):
        powers = (1.0 / (s * s)) ** np.arange(p.half_degree + 1)
        return EvenPolyCoeffs(p.coeffs * powers)
    if p.lam is not None:
        p = to_monomial(p)
    powers = (1.0 / s) ** np.arange(p.degree + 1)
    return PolyCoeffs1D(p.coeffs * powers)


def symmetrize_even(p: PolyCoeffs1D) -> EvenPolyCoeffs:
    """Even part ``(p(t) + p(-t)) / 2``."""
    if isinstance(p, EvenPolyCoeffs):
        return p
    if p.lam is not None:
        raise ValueError("symmetrize_even expects monomial coefficients")
    return EvenPolyCoeffs(p.coeffs[::2])
