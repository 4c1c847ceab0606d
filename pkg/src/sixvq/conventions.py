"""Normalization conventions tying the L-operator scale to the functional equation.

A convention fixes the pair (rho_plus, rho_minus) used for each of the three
L-products in the functional equation and therewith the scalar coefficient
functions phi_1, phi_2 multiplying the shifted operators.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .qcore import RootContext
from .sixvertex import boltzmann_weights

_ROLES = ("base", "prime", "dprime")


@dataclass(frozen=True)
class FEConvention:
    """Tag is one of 'phodd', 'phiev', 'phab'.

    phodd / phiev: rho_plus = q * w, rho_minus = 1 (times an optional overall
    scale), giving phi_1 = b q^((N-1)/2), phi_2 = a q^((1-N)/2) for odd N and
    phi_1 = b q^(-1/2), phi_2 = a q^(1/2) for even N.

    phab: rho_pm = q^((1 pm 1)/2) w^(pm 1/2) with the square-root branch of
    the shifted arguments tied to the base one, giving phi_1 = b, phi_2 = a.
    """

    tag: str = "phodd"
    scale: complex = 1.0

    def __post_init__(self):
        if self.tag not in ("phodd", "phiev", "phab"):
            raise ValueError(f"unknown convention tag {self.tag!r}")

    def rho(self, w_arg: complex, ctx: RootContext, role: str = "base",
            base_w: complex | None = None):
        """(rho_plus, rho_minus) for the L-operator playing the given role."""
        if role not in _ROLES:
            raise ValueError(f"unknown role {role!r}")
        if self.tag in ("phodd", "phiev"):
            return (ctx.qpow(1) * w_arg * self.scale, 1.0 * self.scale)
        base = w_arg if base_w is None else base_w
        s = cmath.sqrt(base)
        if role != "base":
            if ctx.N % 2:
                shift = ctx.qpow((1 - ctx.N) // 2 % ctx.N)
            else:
                shift = cmath.sqrt(ctx.qpow(1))
            s = s * shift if role == "prime" else s / shift
        return (ctx.qpow(1) * s * self.scale, self.scale / s)

    def phi_pair(self, z: complex, ctx: RootContext, rho=None):
        """The scalars (phi_1, phi_2) in front of Q'(z q^2) and Q''(z q^-2)."""
        a, b, _, _ = boltzmann_weights(z, ctx.qpow(1), rho)
        if self.tag == "phab":
            return b, a
        if ctx.N % 2:
            half = (ctx.N - 1) // 2
            return b * ctx.qpow(half), a * ctx.qpow(-half)
        sq = cmath.sqrt(ctx.qpow(1))
        return b / sq, a * sq


DEFAULT_CONVENTION = FEConvention("phodd")
