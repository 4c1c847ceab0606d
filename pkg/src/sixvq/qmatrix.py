"""Assembly of the auxiliary matrices and their functional and symmetry laws.

A Q-matrix is the auxiliary-space trace of an M-fold product of L-operators
evaluated at w = z/mu, where mu is the branch attached to the labelling
point.  The site recursion keeps the bond dimension at N', so nothing larger
than 4^M x N'^2 is ever materialized.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conventions import FEConvention
from .errors import EvenCyclic, LawPreconditionViolated, OddChain
from .intertwiner import build_L, inclusion_shift_params, quotient_shift_params
from .qcore import RootContext
from .reps import (
    RepParams,
    SpecZPoint,
    build_cyclic_rep,
    central_values,
)
from .sixvertex import (
    ChainOperator,
    power_of_sz,
    staggered_sign_ops,
    symmetry_ops,
    trace_mpo,
    transfer_matrix,
)

DEFAULT_CONV = FEConvention("phodd")


@dataclass
class QMatrix:
    op: ChainOperator
    point: SpecZPoint
    z_spec: complex
    w: complex
    conv: FEConvention
    gradation: str
    gross: float = 1.0  # construction-scale bound; reference for exact-zero detection

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    def is_null(self, rel: float = 1e-12) -> bool:
        """True when the whole operator vanishes up to construction-scale noise."""
        return self.op.norm() <= rel * self.gross


def build_Q(params: RepParams, z_spec: complex, M: int,
            conv: FEConvention = DEFAULT_CONV, gradation: str = "homogeneous",
            mu: Optional[complex] = None, role: str = "base",
            base_w: Optional[complex] = None) -> QMatrix:
    """Auxiliary matrix of the point labelled by the chart at spectral value z.

    `role`/`base_w` select the normalization slot when the convention ties
    square-root branches of the shifted operators to a base argument.
    """
    if M < 1:
        raise ValueError("chain length must be >= 1")
    ctx = params.ctx
    if ctx.parity == "even" and not params.nilpotent:
        raise EvenCyclic("even N admits auxiliary matrices only for nilpotent charts")
    rep = build_cyclic_rep(params)
    point = central_values(rep)
    if mu is not None:
        # an explicit branch request (e.g. the q mu / mu q^-1 neighbours of the
        # functional equation) must still solve the chart's Casimir quadratic
        if abs(mu + 1.0 / mu - point.c) > 1e-8 * max(1.0, abs(point.c)):
            raise LawPreconditionViolated(
                f"requested mu {mu} is not a Casimir branch of the chart (c={point.c})")
        point = SpecZPoint(point.x, point.y, point.zc, point.c, mu, ctx, chart=params)
    w = z_spec / point.mu
    rp, rm = conv.rho(w, ctx, role, base_w)
    variant = "odd" if ctx.parity == "odd" else "breve"
    L = build_L(rep, w, variant, rp, rm, source_point=point)
    blocks = L.blocks()
    if gradation == "principal":
        y = cmath.sqrt(z_spec) / cmath.sqrt(point.mu)
        blocks = blocks.copy()
        blocks[0, 1] /= y
        blocks[1, 0] *= y
    elif gradation != "homogeneous":
        raise ValueError(f"unknown gradation {gradation!r}")
    mat = trace_mpo(blocks, M)
    label = f"Q(z={z_spec:.4g})"
    block_scale = max(np.linalg.norm(blocks[i, j]) for i in range(2) for j in range(2))
    gross = 2.0**M * ctx.Nprime * max(block_scale, 1e-30) ** M
    return QMatrix(ChainOperator(M, mat, label), point, z_spec, w, conv, gradation, gross)


def shifted_charts(params: RepParams):
    """Charts of the two fiber neighbours entering the functional equation."""
    point = central_values(build_cyclic_rep(params, unchecked=True))
    return (inclusion_shift_params(params, point.mu),
            quotient_shift_params(params, point.mu),
            point.mu)


def tq_residual(params: RepParams, z_spec: complex, M: int,
                conv: FEConvention = DEFAULT_CONV, rho_r=None) -> float:
    """Relative defect of Q(z) T(z) = phi1^M Q'(z q^2) + phi2^M Q''(z q^-2)."""
    ctx = params.ctx
    q2 = ctx.qpow(2)
    Q = build_Q(params, z_spec, M, conv)
    params_p, params_pp, mu = shifted_charts(params)
    Qp = build_Q(params_p, z_spec * q2, M, conv,
                 mu=mu * ctx.qpow(1), role="prime", base_w=Q.w)
    Qpp = build_Q(params_pp, z_spec / q2, M, conv,
                  mu=mu * ctx.qpow(-1), role="dprime", base_w=Q.w)
    T = transfer_matrix(z_spec, M, ctx, rho_r)
    f1, f2 = conv.phi_pair(z_spec, ctx, rho_r)
    lhs = Q.matrix @ T.matrix
    rhs = f1**M * Qp.matrix + f2**M * Qpp.matrix
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    gross = max(Q.gross, abs(f1) ** M * Qp.gross, abs(f2) ** M * Qpp.gross)
    gross *= max(np.linalg.norm(T.matrix), 1.0)
    if scale <= 1e-12 * gross:
        # every term vanishes at construction scale; the identity is 0 = 0
        return float(np.linalg.norm(lhs - rhs) / gross)
    return float(np.linalg.norm(lhs - rhs) / scale)


def fiber_charts(params: RepParams):
    """Concrete charts for the whole fiber sum, mu advancing by q per step.

    Odd N: iterate the inclusion shift N times around the fiber.  Even N:
    the two-fiber tour of nilpotent charts lam q^l, l in Z_N.
    """
    ctx = params.ctx
    if ctx.parity == "odd":
        charts = [params]
        mu = central_values(build_cyclic_rep(params)).mu
        for _ in range(ctx.N - 1):
            charts.append(inclusion_shift_params(charts[-1], mu))
            mu = mu * ctx.qpow(1)
        return charts
    if not params.nilpotent:
        raise EvenCyclic("even-N fiber sums need nilpotent charts")
    return [RepParams(0.0, 0.0, params.lam * ctx.qpow(ell), ctx) for ell in range(ctx.N)]


def fiber_sum_Q(params: RepParams, s: int, z_spec: complex, M: int,
                conv: FEConvention = DEFAULT_CONV) -> QMatrix:
    """Weighted fiber sum sum_l q^(-s l) Q_{p_l}(z); solves the single-Q equation.

    The result satisfies Q^(s)(z) T(z) = phi1^M q^s Q^(s)(z q^2)
    + phi2^M q^-s Q^(s)(z q^-2); it may be singular or vanish in sectors,
    which callers detect via the spectra helpers.
    """
    ctx = params.ctx
    charts = fiber_charts(params)
    acc = None
    base = None
    for ell, chart in enumerate(charts):
        Ql = build_Q(chart, z_spec, M, conv)
        if base is None:
            base = Ql
        term = ctx.qpow(-s * ell) * Ql.matrix
        acc = term if acc is None else acc + term
    op = ChainOperator(M, acc, f"Qsum(s={s}, z={z_spec:.4g})")
    return QMatrix(op, base.point, z_spec, base.w, conv, "homogeneous")


def baxter_Q(z_spec: complex, M: int, ctx: RootContext) -> ChainOperator:
    """The explicit zero-spin auxiliary matrix, normalized by (z q)^(M/4).

    Elements exp(i gamma/4 * sum_(n<m) (a_n b_m - a_m b_n) + u/4 * sum a_m b_m)
    with z = exp(u)/q; zero outside the S^z = 0 sector.
    """
    if M % 2:
        raise OddChain("the explicit zero-spin formula needs even M")
    u = cmath.log(z_spec * ctx.qpow(1))
    gamma = ctx.gamma
    dim = 2**M
    spins = np.array([[1 if not (state >> (M - 1 - m)) & 1 else -1 for m in range(M)]
                      for state in range(dim)])
    totals = spins.sum(axis=1)
    scale = cmath.exp(u * M / 4.0)
    mat = np.zeros((dim, dim), dtype=complex)
    for a_idx in range(dim):
        if totals[a_idx]:
            continue
        alpha = spins[a_idx]
        for b_idx in range(dim):
            if totals[b_idx]:
                continue
            beta = spins[b_idx]
            cross = 0
            for m in range(M):
                for n in range(m):
                    cross += alpha[n] * beta[m] - alpha[m] * beta[n]
            diag = int(np.dot(alpha, beta))
            mat[b_idx, a_idx] = scale * cmath.exp(0.25j * gamma * cross + 0.25 * u * diag)
    return ChainOperator(M, mat, f"Qbax(z={z_spec:.4g})")


# ---------------------------------------------------------------------------
# symmetry transformation laws
# ---------------------------------------------------------------------------

def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300))


def transformation_check(law: str, params: RepParams, z_spec: complex, M: int,
                         conv: FEConvention = DEFAULT_CONV,
                         t: Optional[complex] = None) -> float:
    """Residual of one of the finite-symmetry transformation laws of Q."""
    ctx = params.ctx
    Q = build_Q(params, z_spec, M, conv)
    sz_op, r_op, s_op = symmetry_ops(M)

    if law == "QSz":
        if t is None:
            raise LawPreconditionViolated("QSz needs the flow time t")
        ez = np.diag(np.exp(t * np.diag(sz_op.matrix)))
        scale_in = cmath.exp(-t * ctx.N)
        mapped = RepParams(params.xi * scale_in, params.zeta / scale_in, params.lam, ctx)
        rhs = build_Q(mapped, z_spec, M, conv).matrix
        return _rel(ez @ Q.matrix @ np.linalg.inv(ez), rhs)

    if law == "SQ":
        mapped = RepParams(-params.xi, -params.zeta, params.lam, ctx)
        rhs = build_Q(mapped, z_spec, M, conv).matrix
        return _rel(s_op.matrix @ Q.matrix @ s_op.matrix, rhs)

    if law == "QR":
        from .reps import reversal_coordinates
        params_r = reversal_coordinates(params)
        mu = Q.point.mu
        Qr = build_Q(params_r, z_spec / mu**2, M, conv)
        D = power_of_sz(Q.w, M)
        rhs = np.linalg.inv(D) @ Qr.matrix @ D
        if ctx.parity == "odd":
            rhs = Q.point.zc**M * rhs
        return _rel(r_op.matrix @ Q.matrix @ r_op.matrix, rhs)

    if law == "QR0":
        if not params.nilpotent:
            raise LawPreconditionViolated("the nilpotent reversal law needs x = y = 0")
        lam = params.lam
        mapped = RepParams(0.0, 0.0, 1.0 / (lam * ctx.qpow(2)), ctx)
        Qr = build_Q(mapped, z_spec * lam**2 * ctx.qpow(2), M, conv)
        rhs = Qr.matrix
        if ctx.parity == "odd":
            rhs = lam ** (ctx.Nprime * M) * rhs
        return _rel(r_op.matrix @ Q.matrix @ r_op.matrix, rhs)

    if law == "Qp":
        x = cmath.sqrt(z_spec)
        Qprin = build_Q(params, z_spec, M, conv, gradation="principal")
        D = power_of_sz(x / cmath.sqrt(Q.point.mu), M)
        rhs = np.linalg.inv(D) @ Q.matrix @ D
        return _rel(Qprin.matrix, rhs)

    if law == "transpose":
        if conv.tag == "phab":
            raise LawPreconditionViolated("the transpose law is stated for rho = (q w, 1)")
        mu = Q.point.mu
        w = Q.w
        Q2 = build_Q(params, mu**2 / (z_spec * ctx.qpow(2)), M, conv)
        D = power_of_sz(-w, M)
        rhs = (-w * ctx.qpow(1)) ** M * np.linalg.inv(D) @ Q2.matrix.T @ D
        return _rel(r_op.matrix @ Q.matrix @ r_op.matrix, rhs)

    if law == "TQS":
        return tqs_residual(params, z_spec, M)

    raise LawPreconditionViolated(f"unknown transformation law {law!r}")


def tqs_residual(params: RepParams, z_spec: complex, M: int) -> float:
    """Functional equation at even primitive order via the sign-twisted transfer matrix.

    For N even with odd N', the value -q is a primitive odd root; the
    auxiliary matrices built there close a functional equation against the
    staggered-sign twist of T(z, q) with plain weight coefficients (even M
    only).  The staggered operators replace the plain sign operator, matching
    the corrected q -> -q transfer identity.
    """
    ctx = params.ctx
    if ctx.parity != "even" or ctx.Nprime % 2 == 0:
        raise LawPreconditionViolated("needs even primitive order with odd N/2")
    if M % 2:
        raise LawPreconditionViolated("the sign-twisted equation needs even M")
    ctxm = ctx.minus_q_context()
    conv = FEConvention("phab")
    pm = RepParams(params.xi, params.zeta, params.lam, ctxm)
    Q = build_Q(pm, z_spec, M, conv)
    pm_p, pm_pp, mu = shifted_charts(pm)
    q2 = ctx.qpow(2)
    Qp = build_Q(pm_p, z_spec * q2, M, conv, mu=mu * ctxm.qpow(1), role="prime", base_w=Q.w)
    Qpp = build_Q(pm_pp, z_spec / q2, M, conv, mu=mu * ctxm.qpow(-1), role="dprime", base_w=Q.w)
    T = transfer_matrix(z_spec, M, ctx)
    ge, go = staggered_sign_ops(M)
    from .sixvertex import boltzmann_weights
    a, b, _, _ = boltzmann_weights(z_spec, ctx.qpow(1))
    lhs = Q.matrix @ ge @ T.matrix @ go
    rhs = b**M * Qp.matrix + a**M * Qpp.matrix
    return _rel(lhs, rhs)


# ---------------------------------------------------------------------------
# commutation
# ---------------------------------------------------------------------------

def commute_predicate(paramsA: RepParams, paramsB: RepParams,
                      zA: complex, zB: complex, M: int,
                      conv: FEConvention = DEFAULT_CONV, tol: float = 1e-9):
    """Central-value commutation test plus the measured commutator.

    Returns (predicate, commutator_residual).  The spectral-parameter
    condition is read as equality of the invariants w^N with w = z/mu; it is
    waived where the matching x- and y-conditions are degenerate.
    """
    ctx = paramsA.ctx
    pA = central_values(build_cyclic_rep(paramsA, unchecked=True))
    pB = central_values(build_cyclic_rep(paramsB, unchecked=True))
    wA, wB = zA / pA.mu, zB / pB.mu
    scale = max(1.0, abs(pA.x), abs(pB.x), abs(pA.y), abs(pB.y))
    cond_x = abs(pA.x * (1 - pB.zc) - pB.x * (1 - pA.zc)) <= tol * scale * max(1.0, abs(pA.zc), abs(pB.zc))
    cond_y = abs(pA.y * (1 - 1 / pB.zc) - pB.y * (1 - 1 / pA.zc)) <= tol * scale * max(1.0, 1 / abs(pA.zc), 1 / abs(pB.zc))
    x_degenerate = (abs(pA.x) < tol and abs(pB.x) < tol) or (
        abs(pA.zc - 1) < tol and abs(pB.zc - 1) < tol)
    y_degenerate = (abs(pA.y) < tol and abs(pB.y) < tol) or (
        abs(pA.zc - 1) < tol and abs(pB.zc - 1) < tol)
    need_w = not (x_degenerate and y_degenerate)
    wn = wA**ctx.N
    cond_w = abs(wn - wB**ctx.N) <= 1e-8 * max(1.0, abs(wn))
    predicate = bool(cond_x and cond_y and (cond_w or not need_w))

    QA = build_Q(paramsA, zA, M, conv)
    QB = build_Q(paramsB, zB, M, conv)
    comm = QA.matrix @ QB.matrix - QB.matrix @ QA.matrix
    denom = max(np.linalg.norm(QA.matrix) * np.linalg.norm(QB.matrix),
                1e-12 * QA.gross * QB.gross, 1e-300)
    return predicate, float(np.linalg.norm(comm) / denom)


def qt_commutator(params: RepParams, z_spec: complex, w_spec: complex, M: int,
                  conv: FEConvention = DEFAULT_CONV) -> float:
    """Relative commutator of Q_p(z) with T(w); vanishes by the exchange relation."""
    Q = build_Q(params, z_spec, M, conv)
    T = transfer_matrix(w_spec, M, params.ctx)
    comm = Q.matrix @ T.matrix - T.matrix @ Q.matrix
    denom = max(np.linalg.norm(Q.matrix) * np.linalg.norm(T.matrix), 1e-300)
    return float(np.linalg.norm(comm) / denom)
