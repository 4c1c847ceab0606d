"""Root-of-unity arithmetic and the small numerical toolbox.

Everything downstream works in double-precision complex.  The deformation
parameter q is stored as the exact pair (k, N), so integer powers q^m are
looked up from a precomputed table indexed mod N instead of accumulating
rounding error through repeated multiplication.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateAbscissa,
    NoConvergence,
    NonPrimitive,
    OrderTooSmall,
    ZeroLambda,
    ZeroPolynomial,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class RootContext:
    """A primitive N-th root of unity q = exp(2 pi i k / N) and its derived data.

    Nprime is N for odd N and N/2 for even N; it is the dimension of the
    generic irreducible representations and the length of complete strings.
    """

    N: int
    k: int
    q: complex = field(init=False)
    Nprime: int = field(init=False)
    parity: str = field(init=False)
    _qpow: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 3:
            raise OrderTooSmall(f"order N={self.N} < 3")
        if math.gcd(self.k % self.N, self.N) != 1:
            raise NonPrimitive(f"q = exp(2 pi i {self.k}/{self.N}) is not primitive")
        table = tuple(
            cmath.exp(2j * cmath.pi * ((self.k * m) % self.N) / self.N)
            for m in range(self.N)
        )
        object.__setattr__(self, "q", table[1])
        object.__setattr__(self, "Nprime", self.N if self.N % 2 else self.N // 2)
        object.__setattr__(self, "parity", "odd" if self.N % 2 else "even")
        object.__setattr__(self, "_qpow", table)
        # numerical primitivity double-check
        for m in range(1, self.N):
            if abs(table[m] - 1.0) <= 1e-12:
                raise NonPrimitive(f"q^{m} = 1 numerically for N={self.N}, k={self.k}")

    def qpow(self, m: int) -> complex:
        """q^m by index arithmetic mod N (exact for any integer m)."""
        return self._qpow[m % self.N]

    @property
    def gamma(self) -> float:
        """The angle gamma with q = exp(i gamma)."""
        return 2.0 * math.pi * self.k / self.N

    @property
    def qdiff(self) -> complex:
        """q - 1/q, the ubiquitous denominator."""
        return self.qpow(1) - self.qpow(-1)

    def minus_q_context(self) -> "RootContext":
        """The context of -q (primitive of order 2N for N odd, N' for N even, N' odd)."""
        if self.N % 2:
            return RootContext(2 * self.N, (2 * self.k + self.N) % (2 * self.N))
        kk = (self.k + self.Nprime) // 2 % self.Nprime
        return RootContext(self.Nprime, kk)


def make_root_context(N: int, k: int = 1) -> RootContext:
    return RootContext(N, k)


def q_bracket(n: int, ctx: RootContext) -> complex:
    """[n]_q = (q^n - q^-n)/(q - q^-1)."""
    return (ctx.qpow(n) - ctx.qpow(-n)) / ctx.qdiff


def lambda_bracket(lam: complex, n: int, ctx: RootContext) -> complex:
    """[lam; n]_q = (lam q^-n - lam^-1 q^n)/(q - q^-1)."""
    if lam == 0:
        raise ZeroLambda("lambda bracket needs lambda != 0")
    return (lam * ctx.qpow(-n) - ctx.qpow(n) / lam) / ctx.qdiff


def big_F(x: complex, ctx: RootContext) -> complex:
    """The order-N' polynomial linking the Casimir value to the other central values.

    Satisfies big_F(mu + 1/mu) = mu^N' + mu^-N' for both parities.
    """
    acc = 1.0 + 0j
    if ctx.N % 2:
        for ell in range(ctx.N):
            acc *= x + ctx.qpow(ell) + ctx.qpow(-ell)
    else:
        for ell in range(0, ctx.N, 2):
            acc *= x - ctx.qpow(ell + 1) - ctx.qpow(-ell - 1)
    return acc - 2.0


@dataclass
class ComplexPoly:
    """Dense complex polynomial, coefficients in ascending degree.

    The zero polynomial is represented by an empty coefficient list.  `var`
    is a display tag only ('z' or 'w'); it records which spectral variable
    the curve was interpolated in.
    """

    coeffs: np.ndarray
    var: str = "z"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, x: complex) -> complex:
        if self.is_zero():
            return 0.0 + 0j
        acc = 0.0 + 0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def monic(self) -> "ComplexPoly":
        if self.is_zero():
            return self
        return ComplexPoly(self.coeffs / self.coeffs[-1], self.var)

    def trimmed(self, rel: float = 1e-10) -> "ComplexPoly":
        """Snap |coeff| below rel * max|coeff| to zero and strip trailing zeros."""
        if len(self.coeffs) == 0:
            return self
        scale = np.max(np.abs(self.coeffs))
        if scale == 0.0:
            return ComplexPoly(np.zeros(0), self.var)
        c = np.where(np.abs(self.coeffs) < rel * scale, 0.0, self.coeffs)
        nz = np.nonzero(c)[0]
        if len(nz) == 0:
            return ComplexPoly(np.zeros(0), self.var)
        return ComplexPoly(c[: nz[-1] + 1], self.var)


def interpolate(samples, var: str = "z", snap: float = 1e-10) -> ComplexPoly:
    """Unique polynomial of degree len(samples)-1 through the given (x, y) pairs."""
    xs = np.array([s[0] for s in samples], dtype=complex)
    ys = np.array([s[1] for s in samples], dtype=complex)
    n = len(xs)
    if n == 0:
        raise DuplicateAbscissa("no samples")
    scale = max(np.max(np.abs(xs)), 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(xs[i] - xs[j]) <= 1e-14 * scale:
                raise DuplicateAbscissa(f"abscissae {i} and {j} coincide")
    V = np.vander(xs, n, increasing=True)
    coeffs = np.linalg.solve(V, ys)
    return ComplexPoly(coeffs, var).trimmed(snap)


def poly_roots(p: ComplexPoly, tol: float = DEFAULT_TOL):
    """All roots of p, back-checked against |p(root)| <= tol * max|coeff|."""
    q = p.trimmed()
    if q.is_zero():
        raise ZeroPolynomial("zero polynomial has no well-defined roots")
    if q.degree < 1:
        return []
    roots = np.roots(q.coeffs[::-1])
    scale = q.norm() * max(1.0, float(np.max(np.abs(roots))) ** q.degree)
    bad = [r for r in roots if abs(q(r)) > max(tol, 1e3 * np.finfo(float).eps) * scale]
    if bad:
        raise NoConvergence(f"root back-substitution failed for {len(bad)} roots")
    return sorted(roots, key=lambda r: (round(r.real, 12), round(r.imag, 12)))


def cluster_roots(roots, rel: float = 1e-6):
    """Group near-coincident roots; returns list of (representative, multiplicity)."""
    remaining = list(roots)
    clusters = []
    while remaining:
        r0 = remaining.pop(0)
        group = [r0]
        scale = max(abs(r0), 1e-3)
        rest = []
        for r in remaining:
            if abs(r - r0) <= rel * scale:
                group.append(r)
            else:
                rest.append(r)
        remaining = rest
        clusters.append((sum(group) / len(group), len(group)))
    return clusters


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, aligned with eigenvalues
    residuals: np.ndarray
    tol: float


def eig_dense(A: np.ndarray, tol: float = DEFAULT_TOL) -> EigenResult:
    """Dense complex eigendecomposition, deterministically ordered by (Re, Im).

    Residual invariant: ||A v - lambda v|| <= tol * ||A|| for every pair.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if A.shape[0] > 4096:
        raise ValueError("dimension above the 4096 desk-scale cap")
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((vals.imag, vals.real))
    vals, vecs = vals[order], vecs[:, order]
    norm = np.linalg.norm(A)
    res = np.array(
        [np.linalg.norm(A @ vecs[:, i] - vals[i] * vecs[:, i]) for i in range(len(vals))]
    )
    if norm > 0 and np.any(res > tol * norm):
        raise NoConvergence(f"eigen residual {res.max():.3e} exceeds {tol:.1e} * ||A||")
    return EigenResult(vals, vecs, res, tol)
