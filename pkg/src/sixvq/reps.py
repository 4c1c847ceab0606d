"""Cyclic representations at a root of unity and the central-value geometry.

The generic irreducibles are N'-dimensional and labelled by a chart
(xi, zeta, lam).  Their central values (x, y, zc, c) live on a hypersurface
in C^4; most operators downstream depend only on the point, not on the
chart, which is what the gauge tests exercise.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousBranch,
    ChartNotFound,
    DegenerateMu,
    DiscriminantPoint,
    EvenParity,
    EvenParityCyclic,
    HypersurfaceViolation,
    NoSolution,
    ZeroEvaluationParameter,
)
from .qcore import RootContext, big_F, lambda_bracket, q_bracket

_SZ_TOL = 1e-8


@dataclass(frozen=True)
class RepParams:
    """Chart coordinates (xi, zeta, lam) of an N'-dimensional irreducible."""

    xi: complex
    zeta: complex
    lam: complex
    ctx: RootContext

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lam must be nonzero")

    @property
    def nilpotent(self) -> bool:
        return self.xi == 0 and self.zeta == 0

    @property
    def kind(self) -> str:
        if self.xi == 0 and self.zeta == 0:
            return "nilpotent"
        if self.xi == 0 or self.zeta == 0:
            return "semi-cyclic"
        return "cyclic"


@dataclass
class CyclicRep:
    """Generator matrices of one concrete representation.

    `khalf` is the square root of `k` fixed in the weight basis
    (lam^(1/2) q^-n on the n-th basis vector, principal lam^(1/2)); it is
    conjugated along with the other generators so that gauge transformations
    act coherently on the half-integer powers used by the breve intertwiner.
    """

    e: np.ndarray
    f: np.ndarray
    k: np.ndarray
    khalf: np.ndarray
    params: RepParams
    eta: complex

    @property
    def ctx(self) -> RootContext:
        return self.params.ctx

    @property
    def dim(self) -> int:
        return self.e.shape[0]

    def conjugate(self, phi: np.ndarray) -> "CyclicRep":
        inv = np.linalg.inv(phi)
        return CyclicRep(
            phi @ self.e @ inv,
            phi @ self.f @ inv,
            phi @ self.k @ inv,
            phi @ self.khalf @ inv,
            self.params,
            self.eta,
        )


def rep_eta(params: RepParams) -> complex:
    ctx = params.ctx
    acc = params.xi
    for n in range(1, ctx.Nprime):
        acc *= lambda_bracket(params.lam, n - 1, ctx) * q_bracket(n, ctx) + params.xi * params.zeta
    return acc


def build_cyclic_rep(params: RepParams, unchecked: bool = False) -> CyclicRep:
    """Weight-basis generator matrices of the chart representation.

    For even N only nilpotent charts extend to the breve algebra; passing
    unchecked=True builds the matrices anyway so the intertwiner obstruction
    can be measured.
    """
    ctx = params.ctx
    if ctx.parity == "even" and not params.nilpotent and not unchecked:
        raise EvenParityCyclic("cyclic/semi-cyclic charts are invalid for even N")
    d = ctx.Nprime
    lam, xi, zeta = params.lam, params.xi, params.zeta
    k = np.diag([lam * ctx.qpow(-2 * n) for n in range(d)]).astype(complex)
    lam_half = cmath.sqrt(lam)
    khalf = np.diag([lam_half * ctx.qpow(-n) for n in range(d)]).astype(complex)
    f = np.zeros((d, d), dtype=complex)
    for n in range(d - 1):
        f[n + 1, n] = 1.0
    f[0, d - 1] = zeta
    e = np.zeros((d, d), dtype=complex)
    for n in range(1, d):
        e[n - 1, n] = lambda_bracket(lam, n - 1, ctx) * q_bracket(n, ctx) + xi * zeta
    e[d - 1, 0] = xi
    return CyclicRep(e, f, k, khalf, params, rep_eta(params))


@dataclass(frozen=True)
class SpecZPoint:
    """A point (x, y, zc, c) on the central-value hypersurface plus its mu branch."""

    x: complex
    y: complex
    zc: complex
    c: complex
    mu: complex
    ctx: RootContext
    chart: Optional[RepParams] = None

    def sz_residual(self) -> float:
        sign = 1.0 if self.ctx.N % 2 else -1.0
        lhs = self.x * self.y + sign * (self.zc + 1.0 / self.zc)
        rhs = big_F(self.c, self.ctx)
        return abs(lhs - rhs) / max(1.0, abs(rhs))

    @property
    def nilpotent(self) -> bool:
        return abs(self.x) < 1e-12 and abs(self.y) < 1e-12


def _quad_roots(c: complex):
    disc = cmath.sqrt(c * c - 4.0)
    return (c + disc) / 2.0, (c - disc) / 2.0


def mu_branch(c: complex, params: RepParams, steps: int = 32) -> complex:
    """The root of mu^2 - c mu + 1 = 0 on the branch that continues to 1/(q lam).

    The branch is fixed by tracking the nearest root along the straight-line
    deformation (s xi, s zeta, lam), s from 0 to 1; nilpotent input returns
    the limit value directly.
    """
    ctx = params.ctx
    mu = 1.0 / (ctx.qpow(1) * params.lam)
    prod = params.xi * params.zeta
    if prod != 0:
        base_c = ctx.qpow(1) * params.lam + ctx.qpow(-1) / params.lam
        for j in range(1, steps + 1):
            s = j / steps
            cs = base_c + ctx.qdiff**2 * (s * s) * prod
            r1, r2 = _quad_roots(cs)
            if abs(r1 - r2) < 1e-10 and abs(cs * cs - 4.0) < 1e-10:
                raise AmbiguousBranch(f"double root mu = +-1 met at s={s:.3f}")
            mu = r1 if abs(r1 - mu) <= abs(r2 - mu) else r2
        if abs(mu + 1.0 / mu - c) > 1e-8 * max(1.0, abs(c)):
            raise AmbiguousBranch("continuation did not land on a root of the target Casimir")
    if abs(mu - 1.0) < 1e-9:
        raise DegenerateMu("mu = 1 is excluded (reducible tensor product)")
    return mu


def central_values(rep: CyclicRep) -> SpecZPoint:
    """Central values of the chart rep; verifies the hypersurface constraint."""
    ctx = rep.ctx
    p = rep.params
    d = ctx.Nprime
    x = ctx.qdiff**d * rep.eta
    y = p.zeta * ctx.qdiff**d
    zc = p.lam**d
    c = ctx.qpow(1) * p.lam + ctx.qpow(-1) / p.lam + ctx.qdiff**2 * p.xi * p.zeta
    mu = mu_branch(c, p)
    point = SpecZPoint(x, y, zc, c, mu, ctx, chart=p)
    if point.sz_residual() > _SZ_TOL:
        raise HypersurfaceViolation(
            f"hypersurface residual {point.sz_residual():.3e} (implementation bug)"
        )
    return point


def chart_point(params: RepParams) -> SpecZPoint:
    return central_values(build_cyclic_rep(params, unchecked=True))


def in_discriminant(p: SpecZPoint, tol: float = 1e-9) -> bool:
    """True on the finite singular set where the point no longer fixes the rep."""
    if abs(p.x) > tol or abs(p.y) > tol:
        return False
    ctx = p.ctx
    if ctx.N % 2:
        if min(abs(p.zc - 1.0), abs(p.zc + 1.0)) > tol:
            return False
        for ell in range(1, ctx.N):
            val = ctx.qpow(ell) + ctx.qpow(-ell)
            if min(abs(p.c - val), abs(p.c + val)) <= tol:
                return True
        return False
    for ell in range(1, ctx.N):
        if ell == ctx.Nprime:
            continue
        zkey = 1.0 if (ell - 1) % 2 == 0 else -1.0
        if abs(p.zc - zkey) <= tol and abs(p.c - (ctx.qpow(ell) + ctx.qpow(-ell))) <= tol:
            return True
    return False


def fiber(p: SpecZPoint):
    """The N' points over the same (x, y, zc) base, Casimir mu q^l + 1/(mu q^l)."""
    if in_discriminant(p):
        raise DiscriminantPoint("fiber is not defined over the discriminant set")
    ctx = p.ctx
    out = []
    for ell in range(ctx.Nprime):
        mu_l = p.mu * ctx.qpow(ell)
        c_l = mu_l + 1.0 / mu_l
        out.append(SpecZPoint(p.x, p.y, p.zc, c_l, mu_l, ctx, chart=p.chart if ell == 0 else None))
    return out


def spin_reversal_point(p: SpecZPoint) -> SpecZPoint:
    """(x, y, zc, c) -> (y, x, 1/zc, c); the mu branch flips to 1/mu."""
    return SpecZPoint(p.y, p.x, 1.0 / p.zc, p.c, 1.0 / p.mu, p.ctx, chart=None)


def reversal_coordinates(params: RepParams, tol: float = 1e-8) -> RepParams:
    """Chart of the spin-reversed point: (xi, zeta, lam) -> (xiR, eta, lam^-1 q^-2).

    xiR is selected among the roots of the one-dimensional polynomial
    condition by requiring the central values of the result to equal the
    point-level reversal of the input's central values.
    """
    ctx = params.ctx
    eta = rep_eta(params)
    lam_r = 1.0 / (params.lam * ctx.qpow(2))
    if params.nilpotent:
        return RepParams(0.0, 0.0, lam_r, ctx)
    if ctx.parity != "odd":
        raise EvenParity("coordinate-level reversal of non-nilpotent charts needs odd N")
    # eta(xiR) - zeta = 0 expands to a polynomial of degree N' in xiR
    poly = np.array([0.0, 1.0], dtype=complex)  # xiR
    for n in range(1, ctx.Nprime):
        lin = np.array(
            [lambda_bracket(lam_r, n - 1, ctx) * q_bracket(n, ctx), eta], dtype=complex
        )
        poly = np.convolve(poly, lin)
    poly[0] -= params.zeta
    roots = np.roots(poly[::-1]) if np.any(poly[1:] != 0) else []
    target = spin_reversal_point(chart_point(params))
    best = None
    best_err = np.inf
    for root in roots:
        cand = RepParams(complex(root), eta, lam_r, ctx)
        try:
            got = chart_point(cand)
        except (DegenerateMu, AmbiguousBranch, HypersurfaceViolation):
            continue
        err = max(
            abs(got.x - target.x),
            abs(got.y - target.y),
            abs(got.zc - target.zc),
            abs(got.c - target.c),
        ) / max(1.0, abs(target.c))
        if err < best_err:
            best, best_err = cand, err
    if best is None or best_err > tol:
        raise NoSolution(f"no xiR root matches the reversed central values (best {best_err:.2e})")
    return best


def point_chart(p: SpecZPoint, tol: float = 1e-8) -> RepParams:
    """A chart (xi, zeta, lam) whose central values realize the given point.

    Branches of lam^N' = zc are scanned; consistency with c (and with x when
    the zeta slot vanishes) picks the admissible ones, and the first in a
    deterministic angular order is returned.
    """
    if p.chart is not None:
        return p.chart
    ctx = p.ctx
    d = ctx.Nprime
    zeta = p.y / ctx.qdiff**d
    lam0 = p.zc ** (1.0 / d)
    candidates = sorted(
        (lam0 * cmath.exp(2j * cmath.pi * j / d) for j in range(d)),
        key=lambda v: (round(cmath.phase(v), 12)),
    )
    for lam in candidates:
        prod_needed = (p.c - ctx.qpow(1) * lam - ctx.qpow(-1) / lam) / ctx.qdiff**2
        if abs(zeta) > 1e-12:
            xi = prod_needed / zeta
        else:
            if abs(prod_needed) > tol:
                continue
            denom = 1.0 + 0j
            for n in range(1, d):
                denom *= lambda_bracket(lam, n - 1, ctx) * q_bracket(n, ctx)
            if abs(denom) < 1e-14:
                continue
            xi = p.x / (ctx.qdiff**d * denom)
        cand = RepParams(xi, zeta, lam, ctx)
        try:
            got = chart_point(cand)
        except (DegenerateMu, AmbiguousBranch, HypersurfaceViolation):
            continue
        err = max(abs(got.x - p.x), abs(got.y - p.y), abs(got.zc - p.zc), abs(got.c - p.c))
        if err <= tol * max(1.0, abs(p.c), abs(p.x), abs(p.y)):
            # mu is part of the point data; reject charts on the other branch
            if abs(got.mu - p.mu) <= tol * max(1.0, abs(p.mu)):
                return cand
    raise ChartNotFound("no chart realizes the requested point (is it in the discriminant?)")


def rep_from_point(p: SpecZPoint) -> CyclicRep:
    return build_cyclic_rep(point_chart(p), unchecked=True)


# ---------------------------------------------------------------------------
# evaluation representations of the loop algebra
# ---------------------------------------------------------------------------

_GEN_NAMES = ("e0", "f0", "k0", "e1", "f1", "k1")


@dataclass
class EvalRep:
    """Loop-algebra generator images of a chart rep under the evaluation map."""

    rep: CyclicRep
    w: complex
    gradation: str
    e0: np.ndarray
    f0: np.ndarray
    k0: np.ndarray
    e1: np.ndarray
    f1: np.ndarray
    k1: np.ndarray

    @property
    def dim(self) -> int:
        return self.e0.shape[0]

    def gen(self, name: str) -> np.ndarray:
        return getattr(self, name)


@dataclass
class TwoDimRep:
    """The two-dimensional evaluation representation on the chain site."""

    z: complex
    ctx: RootContext
    e0: np.ndarray
    f0: np.ndarray
    k0: np.ndarray
    e1: np.ndarray
    f1: np.ndarray
    k1: np.ndarray

    @property
    def dim(self) -> int:
        return 2

    def gen(self, name: str) -> np.ndarray:
        return getattr(self, name)


def evaluation_rep(rep: CyclicRep, w: complex, gradation: str = "homogeneous",
                   xroot: Optional[complex] = None) -> EvalRep:
    """Compose the rep with the evaluation homomorphism at parameter w.

    Homogeneous: e0 = w F, f0 = E / w, k0 = 1/K, (e1, f1, k1) = (E, F, K).
    Principal uses x with x^2 = w (principal square root unless given) and
    twists both node-1 step operators by x.
    """
    if w == 0:
        raise ZeroEvaluationParameter("evaluation parameter w must be nonzero")
    kinv = np.linalg.inv(rep.k)
    if gradation == "homogeneous":
        out = EvalRep(rep, w, gradation,
                      w * rep.f, rep.e / w, kinv, rep.e, rep.f, rep.k)
    elif gradation == "principal":
        x = cmath.sqrt(w) if xroot is None else xroot
        if abs(x * x - w) > 1e-12 * max(1.0, abs(w)):
            raise ZeroEvaluationParameter("xroot must square to the evaluation parameter")
        out = EvalRep(rep, w, gradation,
                      x * rep.f, rep.e / x, kinv, x * rep.e, rep.f / x, rep.k)
    else:
        raise ValueError(f"unknown gradation {gradation!r}")
    res = loop_relation_residual(out)
    if res > 1e-9:
        raise HypersurfaceViolation(f"loop-algebra relations violated ({res:.3e})")
    return out


def two_dim_rep(z: complex, ctx: RootContext) -> TwoDimRep:
    if z == 0:
        raise ZeroEvaluationParameter("spectral parameter z must be nonzero")
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    kup = np.diag([ctx.qpow(1), ctx.qpow(-1)]).astype(complex)
    kdn = np.diag([ctx.qpow(-1), ctx.qpow(1)]).astype(complex)
    return TwoDimRep(z, ctx, z * sm, sp / z, kdn, sp, sm, kup)


def coproduct_action(gen: str, repA, repB, opposite: bool = False) -> np.ndarray:
    """Matrix of Delta(gen) (or the opposite coproduct) on repA tensor repB."""
    if gen not in _GEN_NAMES:
        raise ValueError(f"unknown generator {gen!r}")
    Ia = np.eye(repA.dim, dtype=complex)
    Ib = np.eye(repB.dim, dtype=complex)
    a, b = repA.gen(gen), repB.gen(gen)
    if gen.startswith("k"):
        return np.kron(a, b)
    ka, kb = repA.gen("k" + gen[1]), repB.gen("k" + gen[1])
    if gen.startswith("e"):
        if opposite:
            return np.kron(Ia, b) + np.kron(a, kb)
        return np.kron(a, Ib) + np.kron(ka, b)
    # f-type: Delta(f) = f (x) k^-1 + 1 (x) f
    if opposite:
        return np.kron(a, Ib) + np.kron(np.linalg.inv(ka), b)
    return np.kron(a, np.linalg.inv(kb)) + np.kron(Ia, b)


def loop_relation_residual(rep) -> float:
    """Max residual of the Cartan relations and both Serre relations."""
    ctx = rep.rep.ctx if isinstance(rep, EvalRep) else rep.ctx
    res = 0.0
    gens = {n: rep.gen(n) for n in _GEN_NAMES}
    cartan = {(0, 0): 2, (0, 1): -2, (1, 0): -2, (1, 1): 2}
    scale = max(np.linalg.norm(g) for g in gens.values())
    for i in (0, 1):
        ki = gens[f"k{i}"]
        kinv = np.linalg.inv(ki)
        for j in (0, 1):
            aij = cartan[(i, j)]
            res = max(res, np.linalg.norm(ki @ gens[f"e{j}"] @ kinv - ctx.qpow(aij) * gens[f"e{j}"]))
            res = max(res, np.linalg.norm(ki @ gens[f"f{j}"] @ kinv - ctx.qpow(-aij) * gens[f"f{j}"]))
    res = max(res, np.linalg.norm(gens["k0"] @ gens["k1"] - gens["k1"] @ gens["k0"]))
    q3 = q_bracket(3, ctx)
    for sym in ("e", "f"):
        for i, j in ((0, 1), (1, 0)):
            a, b = gens[f"{sym}{i}"], gens[f"{sym}{j}"]
            serre = (a @ a @ a @ b - q3 * a @ a @ b @ a
                     + q3 * a @ b @ a @ a - b @ a @ a @ a)
            res = max(res, np.linalg.norm(serre))
    return res / max(scale, 1.0)


# ---------------------------------------------------------------------------
# quantum coadjoint flows
# ---------------------------------------------------------------------------

def _phi1(u: complex) -> complex:
    """(exp(u) - 1)/u with the removable singularity filled by series."""
    if abs(u) < 1e-6:
        return 1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0
    return (cmath.exp(u) - 1.0) / u


def coadjoint_flow(p: SpecZPoint, gen: str, t: complex) -> SpecZPoint:
    """Finite flow of the e- or f-generator vector field on the hypersurface.

    Preserves x y + zc + 1/zc and the Casimir value exactly; zc moves by an
    exponential factor and the conjugate coordinate by the integrated
    exponential.  Only defined for odd N and away from the discriminant.
    """
    ctx = p.ctx
    if ctx.parity != "odd":
        raise EvenParity("coadjoint flow implemented for odd N")
    if in_discriminant(p):
        raise DiscriminantPoint("the discriminant set is fixed; flow undefined there")
    if gen == "e":
        x = p.x
        zc = cmath.exp(-t * x) * p.zc
        y = p.y - (p.zc * (-t) * _phi1(-t * x) + (1.0 / p.zc) * t * _phi1(t * x))
        out = SpecZPoint(x, y, zc, p.c, p.mu, ctx, chart=None)
    elif gen == "f":
        y = p.y
        zc = cmath.exp(t * y) * p.zc
        x = p.x - (p.zc * t * _phi1(t * y) + (1.0 / p.zc) * (-t) * _phi1(-t * y))
        out = SpecZPoint(x, y, zc, p.c, p.mu, ctx, chart=None)
    else:
        raise ValueError(f"flow generator must be 'e' or 'f', got {gen!r}")
    if out.sz_residual() > _SZ_TOL:
        raise HypersurfaceViolation(f"flow left the hypersurface ({out.sz_residual():.3e})")
    return out


def casimir_combination(p: SpecZPoint) -> complex:
    """The flow invariant x y + zc + 1/zc."""
    return p.x * p.y + p.zc + 1.0 / p.zc
