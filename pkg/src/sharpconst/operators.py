"""Bessel and Gegenbauer operators as exact maps on coefficient vectors.

``Be_nu(phi) = phi'' + (2 nu + 1) phi' / t`` acts on even polynomials;
``Ge_lam(phi) = (1 - t^2) phi'' - (2 lam + 1) t phi'`` has the Gegenbauer
polynomials ``C_k^lam`` as eigenfunctions with eigenvalues ``-k (k + 2 lam)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .exceptions import ZeroScale
from .polybasis import EvenPolyCoeffs, PolyCoeffs1D, _basis_at_one, to_gegenbauer

__all__ = [
    "OperatorSpec",
    "bessel_apply",
    "bessel_at_zero",
    "bessel_factor",
    "gegenbauer_apply",
    "gegenbauer_at_one",
    "gegenbauer_power_from_taylor",
    "d_nu_b_apply",
    "bessel_j_even_series",
]

_KINDS = ("bessel", "gegenbauer", "identity", "derivative", "laplacian", "spherical_laplacian")


@dataclass(frozen=True)
class OperatorSpec:
    """A point-evaluated differential operator ``l(P) = D(P)(a)``.

    Build instances with the class methods rather than the constructor.
    ``N = 0`` turns every kind into point evaluation.
    """

    kind: str
    N: int = 0
    nu: float | None = None
    lam: float | None = None
    point: tuple[float, ...] | float | None = None
    order: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.N < 0 or self.order < 0:
            raise ValueError("operator powers must be nonnegative")
        if self.kind == "bessel" and not self.nu >= -0.5:
            raise ValueError(f"Bessel operator needs nu >= -1/2, got {self.nu}")
        if self.kind == "gegenbauer" and not self.lam >= -0.5:
            raise ValueError(f"Gegenbauer operator needs lam >= -1/2, got {self.lam}")

    @classmethod
    def bessel_at_zero(cls, nu: float, N: int) -> "OperatorSpec":
        return cls("bessel", N=int(N), nu=float(nu), point=0.0)

    @classmethod
    def gegenbauer_at_one(cls, lam: float, N: int) -> "OperatorSpec":
        return cls("gegenbauer", N=int(N), lam=float(lam), point=1.0)

    @classmethod
    def identity(cls, a: float = 0.0) -> "OperatorSpec":
        return cls("identity", point=float(a))

    @classmethod
    def derivative_at(cls, a: float, k: int) -> "OperatorSpec":
        """``P -> P^(k)(a)``."""
        return cls("derivative", point=float(a), order=int(k))

    @classmethod
    def laplacian_at_zero(cls, N: int) -> "OperatorSpec":
        return cls("laplacian", N=int(N))

    @classmethod
    def spherical_laplacian_at(cls, a, N: int) -> "OperatorSpec":
        a = tuple(float(x) for x in a)
        if abs(np.linalg.norm(a) - 1) > 1e-12:
            raise ValueError("pole must be a unit vector")
        return cls("spherical_laplacian", N=int(N), point=a)

    @property
    def parity_even(self) -> bool:
        """True when ``l(P(-t)) == l(P(t))`` for univariate ``P``."""
        if self.kind == "bessel":
            return True
        if self.kind in ("identity", "derivative"):
            return self.point == 0 and self.order % 2 == 0
        return False

    def describe(self) -> dict:
        out = {"kind": self.kind, "N": self.N}
        if self.nu is not None:
            out["nu"] = self.nu
        if self.lam is not None:
            out["lam"] = self.lam
        if self.point is not None:
            out["point"] = list(self.point) if isinstance(self.point, tuple) else self.point
        if self.kind == "derivative":
            out["order"] = self.order
        return out


def bessel_factor(nu: float, N: int) -> float:
    """``2^(2N) prod_{d=1}^N d (d + nu)``, the weight of ``c_N`` in ``(Be_nu)^N P (0)``."""
    return 4.0**N * prod(d * (d + nu) for d in range(1, N + 1))


def bessel_apply(p: EvenPolyCoeffs, nu: float, l: int) -> EvenPolyCoeffs:
    """``(Be_nu)^l p`` via the closed form on even power series.

    The coefficient of ``t^(2q)`` is ``4^l prod_{d=1}^l (q+d)(q+d+nu) c_{q+l}``.
    """
    if nu < -0.5:
        raise ValueError("nu must be >= -1/2")
    if l < 0:
        raise ValueError("l must be nonnegative")
    c = p.coeffs
    n = p.half_degree
    if l == 0:
        return p
    if l > n:
        return EvenPolyCoeffs([0.0])
    out = np.empty(n - l + 1)
    for q in range(n - l + 1):
        out[q] = 4.0**l * prod((q + d) * (q + d + nu) for d in range(1, l + 1)) * c[q + l]
    return EvenPolyCoeffs(out)


def bessel_at_zero(p: EvenPolyCoeffs, nu: float, N: int) -> float:
    """``(Be_nu)^N p`` evaluated at the origin."""
    if nu < -0.5:
        raise ValueError("nu must be >= -1/2")
    if N > p.half_degree:
        return 0.0
    return bessel_factor(nu, N) * float(p.coeffs[N])


def _eigenvalues(lam: float, n: int, N: int) -> np.ndarray:
    k = np.arange(n + 1, dtype=float)
    return (-k * (k + 2 * lam)) ** N


def gegenbauer_apply(q: PolyCoeffs1D, N: int, lam: float | None = None) -> PolyCoeffs1D:
    """``(Ge_lam)^N q`` by spectral multiplication in the Gegenbauer basis.

    ``q`` must carry a Gegenbauer basis unless ``lam`` is given, in which
    case it is converted first.
    """
    if lam is None:
        if q.lam is None:
            raise ValueError("monomial input needs an explicit lam")
        lam = q.lam
    if lam < -0.5:
        raise ValueError("lam must be >= -1/2")
    q = to_gegenbauer(q, lam)
    return PolyCoeffs1D(q.coeffs * _eigenvalues(lam, q.degree, N), lam=q.lam)


def gegenbauer_at_one(q, lam: float, N: int) -> float:
    """``(Ge_lam)^N q`` evaluated at ``t = 1``."""
    g = to_gegenbauer(q, lam)
    ones = np.array([_basis_at_one(lam, k) for k in range(g.degree + 1)])
    return float(np.dot(g.coeffs * _eigenvalues(lam, g.degree, N), ones))


def gegenbauer_power_from_taylor(taylor, lam: float, N: int):
    """Value at ``t = 1`` of ``(Ge_lam)^N`` applied to a local expansion.

    ``taylor[..., j]`` holds the coefficient of ``(t - 1)^j``; orders up to
    ``N`` are needed.  Works on stacked expansions along the last axis.
    """
    a = np.array(taylor, dtype=float)[..., : N + 1].copy()
    if a.shape[-1] < N + 1:
        pad = [(0, 0)] * (a.ndim - 1) + [(0, N + 1 - a.shape[-1])]
        a = np.pad(a, pad)
    for _ in range(N):
        new = np.zeros_like(a)
        for j in range(1, a.shape[-1]):
            # Ge (t-1)^j = -j(2j+2lam-1)(t-1)^(j-1) - j(j+2lam)(t-1)^j
            new[..., j - 1] -= j * (2 * j + 2 * lam - 1) * a[..., j]
            new[..., j] -= j * (j + 2 * lam) * a[..., j]
        a = new
    return a[..., 0]


def d_nu_b_apply(p: EvenPolyCoeffs, nu: float, b: float) -> EvenPolyCoeffs:
    """``D_{nu,b} g = (b^2/4) [ (1 - t^2/b^2) g'' + ((2nu+1) - (4nu+3) t^2/b^2) g'/t ]``.

    On ``c_j t^(2j)`` this is ``b^2 j (j+nu) c_j t^(2j-2) - j (j+2nu+1) c_j t^(2j)``.
    """
    if b == 0:
        raise ZeroScale("b must be nonzero")
    c = p.coeffs
    out = np.zeros_like(c)
    for j in range(1, c.size):
        out[j - 1] += b * b * j * (j + nu) * c[j]
        out[j] -= j * (j + 2 * nu + 1) * c[j]
    return EvenPolyCoeffs(out)


def bessel_j_even_series(nu: float, c: float, K: int) -> EvenPolyCoeffs:
    """Degree-``2K`` Taylor truncation of the even eigenfunction of ``Be_nu``
    with eigenvalue ``-c``, normalised to constant term 1."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if c < 0:
        raise ValueError("c must be nonnegative")
    coeffs = np.empty(K + 1)
    coeffs[0] = 1.0
    for k in range(K):
        coeffs[k + 1] = -c * coeffs[k] / ((2 * k + 2) * (2 * k + 2 + 2 * nu))
    return EvenPolyCoeffs(coeffs)
