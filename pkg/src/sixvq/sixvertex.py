"""Six-vertex R-matrix, transfer matrix, XXZ Hamiltonian and finite symmetries.

Chain operators are dense 2^M x 2^M arrays.  Basis convention: site 1 is the
most significant qubit, spin-up is bit 0.  Matrix elements follow
O|alpha> = sum_beta O[beta, alpha] |beta>.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import PoleAtZ
from .qcore import RootContext

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_P = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_M = np.array([[0, 0], [1, 0]], dtype=complex)

RhoFn = Callable[[complex, complex], complex]


def _rho_one(z: complex, q: complex) -> complex:
    return 1.0


@dataclass
class ChainOperator:
    M: int
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        dim = 2**self.M
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"operator for M={self.M} must be {dim}x{dim}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def boltzmann_weights(z: complex, q: complex, rho: Optional[RhoFn] = None):
    """Weights (a, b, c, c') of the homogeneous-gauge vertex at spectral z."""
    rho = rho or _rho_one
    den = 1.0 - z * q * q
    if abs(den) < 1e-13 * max(1.0, abs(z)):
        raise PoleAtZ(f"weights have a pole at z={z}")
    r = rho(z, q)
    a = r
    b = r * (1.0 - z) * q / den
    c = r * (1.0 - q * q) / den
    return a, b, c, c * z


def r_matrix(z: complex, ctx: RootContext, rho: Optional[RhoFn] = None,
             gauge: str = "homogeneous", q: Optional[complex] = None) -> np.ndarray:
    """4x4 vertex matrix on (auxiliary x site); principal gauge has c = c'.

    The optional q overrides the context value (used by the q -> -q and
    q -> 1/q symmetry checks, where only the weights change).
    """
    qv = ctx.qpow(1) if q is None else q
    if gauge == "homogeneous":
        a, b, c, cp = boltzmann_weights(z, qv, rho)
    elif gauge == "principal":
        x = cmath.sqrt(z)
        a, b, c, _ = boltzmann_weights(z, qv, rho)
        c = c * x
        cp = c
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    return np.array(
        [
            [a, 0, 0, 0],
            [0, b, c, 0],
            [0, cp, b, 0],
            [0, 0, 0, a],
        ],
        dtype=complex,
    )


def trace_mpo(blocks: np.ndarray, M: int) -> np.ndarray:
    """Trace over the auxiliary loop of a site-homogeneous operator product.

    blocks[beta, alpha] is the D x D auxiliary matrix attached to the site
    transition alpha -> beta; the element (beta_1..beta_M, alpha_1..alpha_M)
    is tr(W[b_M, a_M] ... W[b_1, a_1]).  Cost O(4^M D^3).
    """
    D = blocks.shape[2]
    G = blocks.copy()  # shape (2, 2, D, D) after site 1
    for _ in range(1, M):
        # new site multiplies on the left and appends the least significant bit
        G = np.einsum("uvab,xybc->xuyvac", blocks, G)
        s = G.shape
        G = G.reshape(s[0] * s[1], s[2] * s[3], D, D)
    return np.trace(G, axis1=2, axis2=3)


def _r_blocks(R: np.ndarray) -> np.ndarray:
    """Reshape a 4x4 vertex matrix into site-transition blocks over the auxiliary space."""
    W = np.empty((2, 2, 2, 2), dtype=complex)
    for beta in range(2):
        for alpha in range(2):
            for a in range(2):
                for b in range(2):
                    W[beta, alpha, a, b] = R[2 * a + beta, 2 * b + alpha]
    return W


def transfer_matrix(z: complex, M: int, ctx: RootContext, rho: Optional[RhoFn] = None,
                    q: Optional[complex] = None) -> ChainOperator:
    """Row-to-row transfer matrix: auxiliary trace of R_0M ... R_01."""
    if M < 1:
        raise ValueError("chain length must be >= 1")
    R = r_matrix(z, ctx, rho, q=q)
    return ChainOperator(M, trace_mpo(_r_blocks(R), M), label=f"T(z={z:.4g})")


def site_operator(op: np.ndarray, m: int, M: int) -> np.ndarray:
    """op acting on site m (1-based) of the chain."""
    left = np.eye(2 ** (m - 1), dtype=complex)
    right = np.eye(2 ** (M - m), dtype=complex)
    return np.kron(np.kron(left, op), right)


def hamiltonian(M: int, ctx: RootContext) -> ChainOperator:
    """Periodic XXZ Hamiltonian with anisotropy (q + 1/q)/2."""
    if M < 2:
        raise ValueError("Hamiltonian needs at least two sites")
    delta = (ctx.qpow(1) + ctx.qpow(-1)) / 2.0
    dim = 2**M
    H = np.zeros((dim, dim), dtype=complex)
    for m in range(1, M + 1):
        n = m % M + 1
        for op in (SIGMA_X, SIGMA_Y):
            H += site_operator(op, m, M) @ site_operator(op, n, M)
        H += delta * (site_operator(SIGMA_Z, m, M) @ site_operator(SIGMA_Z, n, M) - np.eye(dim))
    return ChainOperator(M, H, label="H")


def symmetry_ops(M: int):
    """Total spin S^z, spin-reversal R = prod sigma^x, sign S = prod sigma^z."""
    dim = 2**M
    sz = np.zeros((dim, dim), dtype=complex)
    for m in range(1, M + 1):
        sz += site_operator(SIGMA_Z, m, M)
    sz *= 0.5
    r_op = np.eye(1, dtype=complex)
    s_op = np.eye(1, dtype=complex)
    for _ in range(M):
        r_op = np.kron(r_op, SIGMA_X)
        s_op = np.kron(s_op, SIGMA_Z)
    return (
        ChainOperator(M, sz, "Sz"),
        ChainOperator(M, r_op, "R"),
        ChainOperator(M, s_op, "S"),
    )


def sz_values(M: int) -> np.ndarray:
    """S^z eigenvalue of each computational basis state."""
    states = np.arange(2**M)
    downs = np.array([bin(s).count("1") for s in states])
    return (M - 2 * downs) / 2.0


def power_of_sz(base: complex, M: int) -> np.ndarray:
    """Diagonal operator base^(S^z) with the principal branch of base^(1/2)."""
    logb = cmath.log(base)
    return np.diag([cmath.exp(logb * s) for s in sz_values(M)]).astype(complex)


def staggered_sign_ops(M: int):
    """G_even = prod of sigma^z over even sites, G_odd over odd; G_e G_o = S."""
    dim = 2**M
    ge = np.eye(dim, dtype=complex)
    go = np.eye(dim, dtype=complex)
    for m in range(1, M + 1):
        if m % 2 == 0:
            ge = ge @ site_operator(SIGMA_Z, m, M)
        else:
            go = go @ site_operator(SIGMA_Z, m, M)
    return ge, go


def rst_checks(M: int, z: complex, ctx: RootContext, rho: Optional[RhoFn] = None):
    """Residuals of the even-chain q -> 1/q and q -> -q transfer identities.

    The inversion identity is T(z, 1/q) = T(1/z, q).  The sign twist in this
    weight normalization takes the staggered form T(z, -q) = G_e T(z, q) G_o
    with G_e G_o equal to the sign operator; the unstaggered form fails on
    elements carrying an odd number of spin flips per sublattice.
    """
    if M % 2:
        raise ValueError("the symmetry identities require even M")
    q = ctx.qpow(1)
    T_qinv = transfer_matrix(z, M, ctx, rho, q=1.0 / q).matrix
    T_zinv = transfer_matrix(1.0 / z, M, ctx, rho).matrix
    scale1 = max(np.linalg.norm(T_zinv), 1e-30)
    res1 = np.linalg.norm(T_qinv - T_zinv) / scale1
    T_mq = transfer_matrix(z, M, ctx, rho, q=-q).matrix
    T_q = transfer_matrix(z, M, ctx, rho).matrix
    ge, go = staggered_sign_ops(M)
    res2 = np.linalg.norm(T_mq - ge @ T_q @ go) / max(np.linalg.norm(T_q), 1e-30)
    return res1, res2


def partition_function(z: complex, M: int, Mprime: int, ctx: RootContext,
                       rho: Optional[RhoFn] = None) -> complex:
    """Torus partition function tr T(z)^M'."""
    T = transfer_matrix(z, M, ctx, rho).matrix
    return complex(np.trace(np.linalg.matrix_power(T, Mprime)))
