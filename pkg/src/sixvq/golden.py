"""Closed-form reference values for the two desk cases (order 3, chains of 3 and 4).

Everything is expressed through the central values (x, y, zc, c, mu) and the
argument w = z/mu, so the formulas can be checked for arbitrary parameter
draws.  Normalization: the three-chain tables carry the extra overall scale
3^(-1/3) on both rho coefficients; the four-chain tables use rho = (q w, 1).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .conventions import FEConvention
from .qcore import RootContext
from .reps import SpecZPoint
from .sixvertex import boltzmann_weights

M3_SCALE = 3.0 ** (-1.0 / 3.0)
M3_CONVENTION = FEConvention("phodd", scale=M3_SCALE)
M4_CONVENTION = FEConvention("phodd")


def m3_elements(p: SpecZPoint, w: complex) -> dict:
    """Nonvanishing trace monomials of the three-chain auxiliary matrix."""
    q = p.ctx.qpow(1)
    zc, x, y = p.zc, p.x, p.y
    return {
        "trA3": w**3 * zc**2 - zc,
        "trB3": w**3 * y * zc**2,
        "trC3": x * zc,
        "trD3": w**3 * zc - zc**2,
        "trA2D": w * q * zc * (1 - w * q * zc),
        "trABC": w * zc * (1 - w * zc),
        "trACB": w * q * zc * (q - w * zc),
    }


def m3_block_pm(p: SpecZPoint, w: complex) -> np.ndarray:
    el = m3_elements(p, w)
    return np.array([[el["trA3"], el["trB3"]], [el["trC3"], el["trD3"]]])


def m3_eigs_pm(p: SpecZPoint, w: complex):
    """The two eigenvalues on the maximal-spin pair of states."""
    el = m3_elements(p, w)
    disc = cmath.sqrt((el["trA3"] - el["trD3"]) ** 2 + 4 * el["trB3"] * el["trC3"])
    s = el["trA3"] + el["trD3"]
    return (s + disc) / 2.0, (s - disc) / 2.0


def m3_string_zeros(p: SpecZPoint):
    """Zeros of the maximal-spin eigenvalues: two complete 3-strings q^n mu^(+-1)."""
    ctx = p.ctx
    return ([p.mu * ctx.qpow(n) for n in range(3)],
            [ctx.qpow(n) / p.mu for n in range(3)])


def m3_eigs_half(p: SpecZPoint, w: complex):
    """Eigenvalues in the spin +1/2 sector: {0, 3 q w zc, -3 q^2 w^2 zc^2}."""
    q = p.ctx.qpow(1)
    return 0.0, 3 * q * w * p.zc, -3 * q**2 * w**2 * p.zc**2


def m3_transfer_pm(z: complex, ctx: RootContext) -> complex:
    a, b, _, _ = boltzmann_weights(z, ctx.qpow(1))
    return a**3 + b**3


def m3_transfer_half(z: complex, ctx: RootContext):
    a, b, _, _ = boltzmann_weights(z, ctx.qpow(1))
    q = ctx.qpow(1)
    return b**3 * q + a**3 * q**2, b**3 * q**2 + a**3 * q


def m4_elements_szm1(p: SpecZPoint, w: complex) -> dict:
    """Trace monomials of the four-chain auxiliary matrix in the spin -1 sector."""
    q = p.ctx.qpow(1)
    zc, c = p.zc, p.c
    return {
        "trAD3": -9 * w * zc**2 * (w**2 + q),
        "trBCD2": -3 * w * zc**2 * (1 + q * w**2 + 2 * w * q**2 * c),
        "trBDCD": -3 * w * zc**2 * (w**2 + q - w * q**2 * c),
        "trCBD2": -3 * w * zc**2 * (q**2 + q**2 * w**2 + 2 * w * q**2 * c),
    }


def m4_eigs_szm1(p: SpecZPoint, w: complex):
    """Four eigenvalue curves in the spin -1 sector."""
    ctx = p.ctx
    q = ctx.qpow(1)
    zc, c, mu = p.zc, p.c, p.mu
    q1 = -9 * zc**2 * w * (w + q**2 / mu) * (w + q**2 * mu)
    q2 = -15 * zc**2 * w * (w - q**2 / mu) * (w - q**2 * mu)
    root3 = math.sqrt(3.0)
    q3 = -3 * zc**2 * w * (w**2 * (2 - root3) + w * q**2 * c + q * (2 + root3))
    q4 = -3 * zc**2 * w * (w**2 * (2 + root3) + w * q**2 * c + q * (2 - root3))
    return q1, q2, q3, q4


def m4_transfer_szm1(z: complex, ctx: RootContext):
    """Transfer eigenvalues paired with the spin -1 auxiliary curves.

    Ordered so that the k-th entry shares its eigenvector with the k-th
    curve of m4_eigs_szm1 (the two complex pairs swap relative to a naive
    reading of the sign conventions).
    """
    a, b, c, cp = boltzmann_weights(z, ctx.qpow(1))
    base = a**3 * b + a * b**3
    t1 = base + (a**2 + a * b + b**2) * c * cp
    t2 = base - (a**2 - a * b + b**2) * c * cp
    t3 = base + (1j * a**2 - a * b - 1j * b**2) * c * cp
    t4 = base - (1j * a**2 + a * b - 1j * b**2) * c * cp
    return t1, t2, t3, t4


def m4_t1_closed(z: complex, ctx: RootContext) -> complex:
    """The first transfer eigenvalue in its rational closed form.

    The prefactor of the a^4 term is 1/q, as required for the mu-dependent
    factors to cancel out of the functional identity.
    """
    a, b, _, _ = boltzmann_weights(z, ctx.qpow(1))
    q = ctx.qpow(1)
    return b**4 * q * (z + 1) / (z + q**2) + a**4 * (z + q) / (q * (z + q**2))


def tqex1_residual(z: complex, p: SpecZPoint) -> float:
    """Defect of the explicit first-eigenvalue functional identity at one z."""
    ctx = p.ctx
    q = ctx.qpow(1)
    mu = p.mu
    f1, f2 = M4_CONVENTION.phi_pair(z, ctx)
    t1 = m4_t1_closed(z, ctx)
    lhs = z * (z + q**2) * (z + q**2 * mu**2) * t1
    rhs = (f1**4 * (z * q**2) * (z * q**2 + q**2) * (z * q**2 + q**4 * mu**2)
           + f2**4 * (z / q**2) * (z / q**2 + q**2) * (z / q**2 + mu**2))
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def m4_elements_sz0(p: SpecZPoint, w: complex) -> dict:
    """The seven distinct matrix elements in the zero-spin sector."""
    q = p.ctx.qpow(1)
    zc, c = p.zc, p.c
    m2 = 3 * zc**2 * (c * w**3 - q**2 * w**2 + c * q * w)
    return {
        "m1": 3 * zc**2 * (q * w**4 + 4 * q**2 * w**2 + 1),
        "m2": m2,
        "m3": 3 * zc**2 * (c * q * w**3 + 2 * q**2 * w**2 + c * w),
        "m4": 3 * zc**2 * (c * q**2 * w**3 + 2 * q**2 * w**2 + c * q**2 * w),
        "m5": m2,
        "m6": 3 * zc**2 * q**2 * w**2 * (c**2 - 2 - q - 1 / q),
        "m7": 3 * zc**2 * q**2 * w**2 * (c**2 + 2),
    }


M4_SZ0_VALUE_COUNTS = {"m1": 6, "m2": 16, "m3": 4, "m4": 4, "m6": 4, "m7": 2}


def m4_eigs_sz0(p: SpecZPoint, w: complex):
    """Six eigenvalue curves in the zero-spin sector."""
    ctx = p.ctx
    q = ctx.qpow(1)
    zc, c, mu = p.zc, p.c, p.mu
    el = m4_elements_sz0(p, w)
    q1 = 3 * zc**2 * q * (w**2 - q * mu**2) * (w**2 - q / mu**2)
    q2 = 3 * zc**2 * (q * w**4 - q * c * (1 + q) * w**3
                      + (c**2 - 2 - q - q**2) * q**2 * w**2 - c * (1 + q**2) * w + 1)
    q3 = 3 * zc**2 * (q * w**4 + 1j * q * c * (1 - q) * w**3
                      + (6 - c**2 + q + q**2) * q**2 * w**2 + 1j * c * (1 - q**2) * w + 1)
    q4 = 3 * zc**2 * (q * w**4 - 1j * q * c * (1 - q) * w**3
                      + (6 - c**2 + q + q**2) * q**2 * w**2 - 1j * c * (1 - q**2) * w + 1)
    inner = cmath.sqrt(32 * el["m2"] ** 2 + (el["m3"] + el["m4"] + el["m6"] - el["m7"]) ** 2)
    base = 2 * el["m1"] + el["m3"] + el["m4"] + el["m6"] + el["m7"]
    return q1, q2, q3, q4, (base + inner) / 2.0, (base - inner) / 2.0


def baxter_eigs_sz0(z: complex, ctx: RootContext):
    """Eigenvalues of the normalized explicit zero-spin matrix on the four-chain."""
    q = ctx.qpow(1)
    q1 = z**2 * q**2 - 1
    q2 = q**2 * (z**2 - (1 + q) * z + q)
    q3 = q**2 * (z**2 - 1j * (1 - q) * z - q)
    q4 = q**2 * (z**2 + 1j * (1 - q) * z - q)
    inner = z * cmath.sqrt(32 * q**2 + (1 + q**2) ** 2)
    base = 2 * z**2 * q**2 + (1 + q**2) * z + 2
    return q1, q2, q3, q4, (base + inner) / 2.0, (base - inner) / 2.0


def fiber_sum_eigs_sz0(z: complex, p: SpecZPoint):
    """First four eigenvalues of the s = 0 fiber sum in the zero-spin sector."""
    ctx = p.ctx
    q = ctx.qpow(1)
    zc = p.zc
    q1 = -9 * zc**2 * q**2 * (z**2 - q)
    q2 = 9 * zc**2 * q**2 * (z**2 - (1 + q) * z + q)
    q3 = -9 * zc**2 * q**2 * (z**2 + 1j * (1 - q) * z - q)
    q4 = -9 * zc**2 * q**2 * (z**2 - 1j * (1 - q) * z - q)
    return q1, q2, q3, q4
