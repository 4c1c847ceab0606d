"""Sector decomposition, joint diagonalization, eigenvalue curves, Bethe roots.

Eigenvalue curves are polynomials in w = z/mu extracted from Rayleigh
quotients over a sample grid; their zeros split into complete strings
(orbits under the parity period closing after N' steps) and isolated Bethe
roots, which are checked against the pairwise Bethe equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import (
    DivisionByZeroCurve,
    EigvecDrift,
    NonCommuting,
    NotBlockDiagonal,
    ZeroCurve,
)
from .conventions import FEConvention
from .qcore import ComplexPoly, RootContext, interpolate, poly_roots
from .sixvertex import ChainOperator, boltzmann_weights


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, ChainOperator) else np.asarray(op, dtype=complex)


@dataclass
class SectorBlock:
    label: str
    indices: Optional[np.ndarray]
    basis: np.ndarray  # columns span the sector
    block: np.ndarray

    @property
    def dim(self) -> int:
        return self.block.shape[0]


def _downs(M: int) -> np.ndarray:
    return np.array([bin(s).count("1") for s in range(2**M)])


def _shift_permutation(M: int) -> np.ndarray:
    """One-site cyclic shift |a_1 .. a_M> -> |a_M a_1 .. a_(M-1)>."""
    dim = 2**M
    P = np.zeros((dim, dim), dtype=complex)
    for state in range(dim):
        last = state & 1
        P[(state >> 1) | (last << (M - 1)), state] = 1.0
    return P


def sector_blocks(op: ChainOperator, grading: str, ctx: Optional[RootContext] = None,
                  tol: float = 1e-12) -> List[SectorBlock]:
    """Split an operator into its invariant sectors under the chosen grading.

    Gradings: 'Sz' (total spin), 'SzModNprime' (spin mod N', needs ctx),
    'momentum' (translation eigenspaces inside each spin sector).  Raises
    NotBlockDiagonal when the operator couples different sectors.
    """
    A = _matrix(op)
    M = op.M
    downs = _downs(M)
    scale = max(np.linalg.norm(A), 1e-300)

    if grading in ("Sz", "SzModNprime"):
        if grading == "Sz":
            keys = (M - 2 * downs) / 2.0
        else:
            if ctx is None:
                raise ValueError("SzModNprime grading needs the root context")
            keys = downs % ctx.Nprime
        blocks = []
        order = sorted(set(keys.tolist()), reverse=(grading == "Sz"))
        for key in order:
            idx = np.nonzero(keys == key)[0]
            basis = np.eye(2**M, dtype=complex)[:, idx]
            blocks.append(SectorBlock(f"{grading}={key:g}", idx, basis, A[np.ix_(idx, idx)]))
        off = A.copy()
        for b in blocks:
            off[np.ix_(b.indices, b.indices)] = 0.0
        if np.linalg.norm(off) > tol * scale:
            raise NotBlockDiagonal(
                f"cross-sector coupling {np.linalg.norm(off) / scale:.3e} under {grading}")
        return blocks

    if grading == "momentum":
        shift = _shift_permutation(M)
        keys = (M - 2 * downs) / 2.0
        blocks = []
        for key in sorted(set(keys.tolist()), reverse=True):
            idx = np.nonzero(keys == key)[0]
            sub_shift = shift[np.ix_(idx, idx)]
            for k in range(M):
                proj = sum(np.exp(-2j * np.pi * k * j / M) * np.linalg.matrix_power(sub_shift, j)
                           for j in range(M)) / M
                u, s, _ = np.linalg.svd(proj)
                cols = u[:, s > 0.5]
                if cols.shape[1] == 0:
                    continue
                basis = np.zeros((2**M, cols.shape[1]), dtype=complex)
                basis[idx] = cols
                blocks.append(SectorBlock(f"Sz={key:g},k={k}", None, basis,
                                          basis.conj().T @ A @ basis))
        total = np.zeros_like(A)
        for b in blocks:
            total = total + b.basis @ b.block @ b.basis.conj().T
        if np.linalg.norm(total - A) > max(tol, 1e-10) * scale:
            raise NotBlockDiagonal("operator is not reducible by momentum sectors")
        return blocks

    raise ValueError(f"unknown grading {grading!r}")


def sector_report(op: ChainOperator, grading: str, ctx: Optional[RootContext] = None,
                  rank_tol: float = 1e-9):
    """Rank and nullity per sector; flags identically-zero and singular blocks."""
    out = []
    for blk in sector_blocks(op, grading, ctx, tol=1e-10):
        svals = np.linalg.svd(blk.block, compute_uv=False) if blk.dim else np.zeros(0)
        top = svals[0] if len(svals) else 0.0
        rank = int(np.sum(svals > rank_tol * max(top, 1e-300))) if top > 0 else 0
        out.append({
            "sector": blk.label,
            "dim": blk.dim,
            "rank": rank,
            "zero": bool(top <= 1e-12 * max(np.linalg.norm(_matrix(op)), 1e-300)),
            "singular": bool(rank < blk.dim),
        })
    return out


# ---------------------------------------------------------------------------
# joint diagonalization of a commuting family
# ---------------------------------------------------------------------------

@dataclass
class JointSpectrum:
    vectors: np.ndarray          # columns
    eigenvalues: np.ndarray      # shape (n_ops, n_vectors)
    residuals: np.ndarray        # same shape, relative
    tol: float


def _refine(vectors: np.ndarray, ops: Sequence[np.ndarray], level: int,
            rng: np.random.Generator) -> np.ndarray:
    """Split a degenerate invariant subspace by the next operators in the list."""
    if level >= len(ops) or vectors.shape[1] <= 1:
        return vectors
    sub = np.linalg.pinv(vectors) @ ops[level] @ vectors
    vals, vecs = np.linalg.eig(sub)
    new = vectors @ vecs
    order = np.lexsort((vals.imag, vals.real))
    vals, new = vals[order], new[:, order]
    scale = max(np.abs(vals).max(), 1.0)
    out = []
    k = 0
    while k < len(vals):
        idx = np.nonzero(np.abs(vals - vals[k]) < 1e-7 * scale)[0]
        group = new[:, idx]
        if len(idx) > 1:
            group = _refine(group, ops, level + 1, rng)
        out.append(group)
        k = idx[-1] + 1
    return np.hstack(out)


def joint_spectrum(ops: Sequence, tol: float = 1e-9, seed: int = 0) -> JointSpectrum:
    """Common eigenbasis of a commuting (generically diagonalizable) family.

    A random linear combination breaks degeneracies wherever any member
    distinguishes them; remaining clusters are refined operator by operator.
    """
    mats = [_matrix(o) for o in ops]
    n = mats[0].shape[0]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            denom = max(np.linalg.norm(mats[i]) * np.linalg.norm(mats[j]), 1e-300)
            if np.linalg.norm(comm) / denom > tol:
                raise NonCommuting(f"operators {i} and {j} do not commute")
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
    combo = sum(c * m / max(np.linalg.norm(m), 1e-300) for c, m in zip(coeffs, mats))
    vals, vecs = np.linalg.eig(combo)
    order = np.lexsort((vals.imag, vals.real))
    vals, vecs = vals[order], vecs[:, order]
    scale = max(np.abs(vals).max(), 1.0)
    groups = []
    k = 0
    while k < n:
        idx = np.nonzero(np.abs(vals - vals[k]) < 1e-8 * scale)[0]
        group = vecs[:, idx]
        if len(idx) > 1:
            group = _refine(group, mats, 0, rng)
        groups.append(group)
        k = idx[-1] + 1
    V = np.hstack(groups)
    V = V / np.linalg.norm(V, axis=0, keepdims=True)

    table = np.zeros((len(mats), n), dtype=complex)
    resid = np.zeros((len(mats), n))
    for i, m in enumerate(mats):
        norm_m = max(np.linalg.norm(m), 1e-300)
        for j in range(n):
            v = V[:, j]
            mv = m @ v
            lam = np.vdot(v, mv) / np.vdot(v, v)
            table[i, j] = lam
            resid[i, j] = np.linalg.norm(mv - lam * v) / norm_m
    return JointSpectrum(V, table, resid, tol)


# ---------------------------------------------------------------------------
# eigenvalue curves
# ---------------------------------------------------------------------------

def eigenvalue_curve(build: Callable[[complex], np.ndarray], eigvec: np.ndarray,
                     z_samples: Sequence[complex], to_var=None, var: str = "w",
                     drift_tol: float = 1e-7, zero_floor: float = 0.0) -> ComplexPoly:
    """Interpolated eigenvalue of a one-parameter operator family on a fixed vector.

    The vector must stay an eigenvector across the sample set; Rayleigh
    residuals above drift_tol raise EigvecDrift.  `to_var` maps the spectral
    sample to the interpolation variable (identity when omitted).
    """
    pairs = []
    v = eigvec / np.linalg.norm(eigvec)
    for z in z_samples:
        A = build(z)
        av = A @ v
        lam = np.vdot(v, av)
        res = np.linalg.norm(av - lam * v)
        scale = max(np.linalg.norm(A), zero_floor, 1e-300)
        if res > drift_tol * scale:
            raise EigvecDrift(f"vector drifts at z={z} (residual {res / scale:.3e})")
        x = to_var(z) if to_var else z
        pairs.append((x, lam))
    return interpolate(pairs, var=var)


def _greedy_assignment(score: np.ndarray) -> np.ndarray:
    """Permutation maximizing the total score greedily (near-permutation inputs)."""
    n = score.shape[0]
    perm = np.full(n, -1, dtype=int)
    work = score.copy()
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        perm[i] = j
        work[i, :] = -np.inf
        work[:, j] = -np.inf
    return perm


def tracked_joint_curves(builders: Sequence[Callable[[complex], np.ndarray]],
                         z_samples: Sequence[complex],
                         to_vars: Sequence[Optional[Callable[[complex], complex]]],
                         var: str = "w", substeps: int = 6, seed: int = 0,
                         tol: float = 1e-9,
                         interpolate_mask: Optional[Sequence[bool]] = None):
    """Eigenvalue curves of a linked commuting family along a spectral path.

    At each path point the family (all builders evaluated there) is jointly
    diagonalized; states are matched across points by eigenvector overlap so
    each analytic branch can be interpolated even though the eigenvectors
    rotate with z.  Returns (curves per builder, recorded eigenvalue tables,
    samples); builders excluded by the mask get None instead of curves.
    """
    samples = list(z_samples)
    path = []
    marks = []
    for i, z in enumerate(samples):
        if i == 0:
            path.append(z)
            marks.append(True)
            continue
        prev = samples[i - 1]
        for s in range(1, substeps):
            path.append(prev + (z - prev) * s / substeps)
            marks.append(False)
        path.append(z)
        marks.append(True)

    prev_v = None
    recorded = []
    for z, is_sample in zip(path, marks):
        js = joint_spectrum([b(z) for b in builders], tol=tol, seed=seed)
        V, table = js.vectors, js.eigenvalues
        if prev_v is not None:
            overlap = np.abs(prev_v.conj().T @ V)
            perm = _greedy_assignment(overlap)
            V, table = V[:, perm], table[:, perm]
        if is_sample:
            recorded.append(table)
        prev_v = V

    n_states = recorded[0].shape[1]
    out = []
    for bi, to_var in enumerate(to_vars):
        if interpolate_mask is not None and not interpolate_mask[bi]:
            out.append(None)
            continue
        family_scale = max(max(abs(tab[bi, s]) for tab in recorded for s in range(n_states)),
                           1e-300)
        curves = []
        for state in range(n_states):
            vals = [tab[bi, state] for tab in recorded]
            if max(abs(v) for v in vals) <= 1e-10 * family_scale:
                # identically-zero branch at family scale: singular eigenvalue
                curves.append(ComplexPoly(np.zeros(0), var))
                continue
            pairs = []
            for z, val in zip(samples, vals):
                x = to_var(z) if to_var else z
                pairs.append((x, val))
            curves.append(interpolate(pairs, var=var))
        out.append(curves)
    return out, recorded, samples


def characteristic_curve(build: Callable[[complex], np.ndarray],
                         z_samples: Sequence[complex], to_var=None,
                         var: str = "w") -> ComplexPoly:
    """Interpolated determinant of a one-parameter block family.

    The determinant is the product of all eigenvalue branches, hence a
    polynomial in the spectral variable even where individual branches are
    only algebraic; its zeros carry the full string content of the block.
    """
    pairs = []
    for z in z_samples:
        x = to_var(z) if to_var else z
        pairs.append((x, complex(np.linalg.det(build(z)))))
    return interpolate(pairs, var=var)


# ---------------------------------------------------------------------------
# string content and Bethe roots
# ---------------------------------------------------------------------------

@dataclass
class BetheAnalysis:
    curve: ComplexPoly
    strings: List[dict] = field(default_factory=list)
    bethe_roots: List[complex] = field(default_factory=list)  # z-values
    roots_at_infinity: int = 0
    residuals: List[float] = field(default_factory=list)
    sector: str = ""
    cancellation_zeros: List[complex] = field(default_factory=list)  # z-values


def _string_orbits(roots: List[complex], period: complex, length: int, rel: float = 1e-6):
    """Greedy decomposition of a root multiset into complete period-orbits."""
    remaining = list(roots)
    strings = []
    progress = True
    while progress:
        progress = False
        for start in list(remaining):
            orbit = [start]
            ok = True
            pool = [r for r in remaining if r is not start]
            cur = start
            for _ in range(length - 1):
                target = cur * period
                match = None
                for r in pool:
                    if abs(r - target) <= rel * max(abs(target), 1e-12):
                        match = r
                        break
                if match is None:
                    ok = False
                    break
                orbit.append(match)
                pool.remove(match)
                cur = match
            if ok and length > 1:
                strings.append(orbit)
                for r in orbit:
                    remaining.remove(r)
                progress = True
                break
    return strings, remaining


def bethe_residual(z_root: complex, all_roots: Sequence[complex], M: int,
                   ctx: RootContext) -> float:
    """Defect of the pairwise Bethe equation at one isolated root.

    (a(z)/b(z))^M must equal prod over the other roots of
    q^-2 (z q^2 - z_l)/(z q^-2 - z_l).
    """
    a, b, _, _ = boltzmann_weights(z_root, ctx.qpow(1))
    lhs = (a / b) ** M
    rhs = 1.0 + 0j
    for other in all_roots:
        if other is z_root:
            continue
        rhs *= ctx.qpow(-2) * (z_root * ctx.qpow(2) - other) / (z_root * ctx.qpow(-2) - other)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def bethe_analysis(curve: ComplexPoly, mu: complex, M: int, ctx: RootContext,
                   sector: str = "", rel: float = 1e-6,
                   curve_prime: Optional[ComplexPoly] = None,
                   curve_dprime: Optional[ComplexPoly] = None) -> BetheAnalysis:
    """Classify the zeros of an eigenvalue curve in w.

    Zeros fall into complete strings (orbits closing under the parity
    period), zeros at w = 0 (roots at infinity), cancellation zeros (where
    the shifted curves entering the functional equation vanish as well, so
    no Bethe equation arises) and genuine isolated Bethe roots, which are
    checked against the pairwise Bethe equations.  Cancellation zeros are
    only detected when the shifted curves are supplied.
    """
    trimmed = curve.trimmed()
    if trimmed.is_zero():
        raise ZeroCurve("identically zero eigenvalue curve")
    coeffs = trimmed.coeffs
    at_infinity = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        at_infinity += 1
        coeffs = coeffs[1:]
    reduced = ComplexPoly(coeffs, curve.var)
    roots = poly_roots(reduced) if reduced.degree >= 1 else []
    period = ctx.qpow(1) if ctx.N % 2 else ctx.qpow(2)
    strings, leftover = _string_orbits(list(roots), period, ctx.Nprime, rel)
    string_info = [{"center": orbit[0], "length": len(orbit),
                    "period": "q" if ctx.N % 2 else "q^2"} for orbit in strings]
    bethe_w, cancel_w = [], []
    for w in leftover:
        cancelled = False
        if curve_prime is not None:
            scale = max(curve_prime.norm(), 1e-300) * max(1.0, abs(w)) ** max(curve_prime.degree, 0)
            cancelled = abs(curve_prime(w * ctx.qpow(1))) <= 1e-6 * scale
        if not cancelled and curve_dprime is not None:
            scale = max(curve_dprime.norm(), 1e-300) * max(1.0, abs(w)) ** max(curve_dprime.degree, 0)
            cancelled = abs(curve_dprime(w * ctx.qpow(-1))) <= 1e-6 * scale
        (cancel_w if cancelled else bethe_w).append(w)
    bethe_z = [w * mu for w in bethe_w]
    residuals = [bethe_residual(zj, bethe_z, M, ctx) for zj in bethe_z]
    return BetheAnalysis(trimmed, string_info, bethe_z, at_infinity, residuals, sector,
                         [w * mu for w in cancel_w])


# ---------------------------------------------------------------------------
# assembling transfer eigenvalues and the zero-spin comparison
# ---------------------------------------------------------------------------

def transfer_eigen_from_q(curve_p: ComplexPoly, curve_prime: ComplexPoly,
                          curve_dprime: ComplexPoly, conv: FEConvention,
                          z: complex, M: int, mu: complex, ctx: RootContext,
                          rho=None) -> complex:
    """Transfer eigenvalue solved from the functional equation at one z."""
    w = z / mu
    denom = curve_p(w)
    if abs(denom) < 1e-10 * max(curve_p.norm(), 1e-300):
        raise DivisionByZeroCurve(f"curve vanishes at w={w}")
    f1, f2 = conv.phi_pair(z, ctx, rho)
    return (f1**M * curve_prime(w * ctx.qpow(1)) + f2**M * curve_dprime(w * ctx.qpow(-1))) / denom


def baxter_comparison(fiber_curves: Sequence[ComplexPoly],
                      baxter_curves: Sequence[ComplexPoly],
                      z_samples: Sequence[complex], tol: float = 1e-8):
    """Match eigenvalue curves of the fiber sum against the zero-spin closed form.

    Curves are matched by nearest monic coefficient vectors; each matched
    pair reports the pointwise ratio over the samples, its mean and variance,
    and whether the ratio is z-independent at the tolerance.
    """
    def monic_vec(c: ComplexPoly, size: int):
        v = np.zeros(size, dtype=complex)
        cc = c.monic().coeffs
        v[:len(cc)] = cc
        return v

    size = max([len(c.coeffs) for c in list(fiber_curves) + list(baxter_curves)] + [1])
    used = set()
    out = []
    for i, fc in enumerate(fiber_curves):
        fv = monic_vec(fc, size)
        best_j, best_d = None, np.inf
        for j, bc in enumerate(baxter_curves):
            if j in used:
                continue
            d = np.linalg.norm(fv - monic_vec(bc, size))
            if d < best_d:
                best_j, best_d = j, d
        used.add(best_j)
        bc = baxter_curves[best_j]
        ratios = np.array([fc(z) / bc(z) for z in z_samples])
        mean = complex(ratios.mean())
        var = float(np.max(np.abs(ratios - mean)))
        out.append({
            "fiber_index": i,
            "baxter_index": best_j,
            "ratio": mean,
            "variance": var,
            "constant": bool(var <= tol * max(1.0, abs(mean))),
            "match_distance": float(best_d),
        })
    return out
