import cmath

import numpy as np
import pytest

from sixvq.errors import (
    DuplicateAbscissa,
    NonPrimitive,
    OrderTooSmall,
    ZeroLambda,
    ZeroPolynomial,
)
from sixvq.qcore import (
    ComplexPoly,
    big_F,
    eig_dense,
    interpolate,
    lambda_bracket,
    make_root_context,
    poly_roots,
    q_bracket,
)


class TestRootContext:
    def test_n3_primitive(self):
        ctx = make_root_context(3, 1)
        assert abs(ctx.q - cmath.exp(2j * cmath.pi / 3)) < 1e-15
        assert ctx.Nprime == 3 and ctx.parity == "odd"

    def test_n4_even(self):
        ctx = make_root_context(4, 1)
        assert ctx.Nprime == 2 and ctx.parity == "even"

    def test_non_primitive(self):
        with pytest.raises(NonPrimitive):
            make_root_context(4, 2)

    def test_order_too_small(self):
        with pytest.raises(OrderTooSmall):
            make_root_context(2, 1)

    def test_power_table_exact(self):
        ctx = make_root_context(7, 3)
        for m in range(-15, 15):
            assert abs(ctx.qpow(m) - ctx.q**m) < 1e-12


class TestBrackets:
    def test_q_bracket_identity(self):
        ctx = make_root_context(5)
        assert abs(q_bracket(1, ctx) - 1) < 1e-15
        assert abs(q_bracket(5, ctx)) < 1e-15

    def test_q_bracket_two_at_three(self):
        ctx = make_root_context(3)
        assert abs(q_bracket(2, ctx) + 1) < 1e-14

    def test_definition_identity(self, rng):
        # [n] (q - 1/q) == q^n - q^-n for every n
        ctx = make_root_context(6)
        for n in range(-8, 9):
            lhs = q_bracket(n, ctx) * ctx.qdiff
            assert abs(lhs - (ctx.qpow(n) - ctx.qpow(-n))) < 1e-13

    def test_lambda_bracket_zeros(self):
        ctx = make_root_context(5)
        for n in (0, 1, 3):
            lam = ctx.qpow(n)
            assert abs(lambda_bracket(lam, n, ctx)) < 1e-13
        assert abs(lambda_bracket(1.0, 0, ctx)) < 1e-15

    def test_lambda_bracket_value(self):
        ctx = make_root_context(3)
        got = lambda_bracket(2.0, 1, ctx)
        want = (2.0 * ctx.qpow(-1) - 0.5 * ctx.qpow(1)) / ctx.qdiff
        assert abs(got - want) < 1e-14

    def test_zero_lambda(self):
        with pytest.raises(ZeroLambda):
            lambda_bracket(0.0, 1, make_root_context(3))


class TestBigF:
    @pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 8])
    def test_mu_identity(self, N, rng):
        ctx = make_root_context(N)
        for _ in range(100):
            mu = (0.5 + 1.5 * rng.random()) * cmath.exp(2j * cmath.pi * rng.random())
            lhs = big_F(mu + 1 / mu, ctx)
            rhs = mu**ctx.Nprime + mu**-ctx.Nprime
            assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))

    def test_odd_at_two(self):
        for N in (3, 5, 7):
            assert abs(big_F(2.0, make_root_context(N)) - 2.0) < 1e-10

    def test_n4_is_quadratic(self):
        ctx = make_root_context(4)
        for x in (0.3 + 1j, 2.0, -1.7j, 0.0):
            assert abs(big_F(x, ctx) - (x * x - 2)) < 1e-13


class TestInterpolate:
    def test_constant(self):
        p = interpolate([(0, 1), (1, 1)])
        assert p.degree == 0 and abs(p.coeffs[0] - 1) < 1e-14

    def test_linear(self):
        p = interpolate([(0, 0), (1, 1), (-1, -1)])
        assert p.degree == 1 and abs(p.coeffs[1] - 1) < 1e-14

    def test_recovers_curve(self):
        zc = 1.7 - 0.3j
        poly = lambda w: w**3 * zc**2 - zc
        xs = [0.3, 1.1 + 0.2j, -0.8, 2.0 - 1.0j]
        p = interpolate([(x, poly(x)) for x in xs], var="w")
        assert abs(p.coeffs[3] - zc**2) < 1e-10
        assert abs(p.coeffs[0] + zc) < 1e-10

    def test_duplicate_abscissa(self):
        with pytest.raises(DuplicateAbscissa):
            interpolate([(1.0, 2.0), (1.0, 3.0)])

    def test_roundtrip_up_to_degree_12(self, rng):
        for deg in (1, 5, 12):
            coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            p = ComplexPoly(coeffs)
            xs = [cmath.exp(2j * cmath.pi * k / (deg + 1)) * 1.1 for k in range(deg + 1)]
            q = interpolate([(x, p(x)) for x in xs])
            assert np.allclose(q.coeffs, coeffs, rtol=1e-9, atol=1e-9)


class TestPolyRoots:
    def test_square(self):
        roots = poly_roots(ComplexPoly([-1, 0, 1]))
        assert np.allclose(sorted(r.real for r in roots), [-1, 1], atol=1e-12)

    def test_cube_string(self):
        ctx = make_root_context(3)
        mu = 0.8 + 0.4j
        roots = poly_roots(ComplexPoly([-mu**3, 0, 0, 1]))
        expect = sorted((mu * ctx.qpow(n) for n in range(3)),
                        key=lambda v: (round(v.real, 9), round(v.imag, 9)))
        for a, b in zip(roots, expect):
            assert abs(a - b) < 1e-10

    def test_random_cubic_back_substitution(self, rng):
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        p = ComplexPoly(coeffs)
        for r in poly_roots(p):
            assert abs(p(r)) < 1e-8 * max(1.0, abs(r) ** 3) * p.norm()

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            poly_roots(ComplexPoly(np.zeros(0)))


class TestEigDense:
    def test_identity(self):
        res = eig_dense(np.eye(3, dtype=complex))
        assert np.allclose(res.eigenvalues, 1.0)

    def test_diag_of_roots(self):
        ctx = make_root_context(3)
        vals = [1.0, ctx.q, ctx.q**2]
        res = eig_dense(np.diag(vals))
        assert np.allclose(sorted(res.eigenvalues, key=lambda v: (v.real, v.imag)),
                           sorted(vals, key=lambda v: (v.real, v.imag)))

    def test_random_residuals(self, rng):
        A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        res = eig_dense(A, tol=1e-9)
        assert np.all(res.residuals <= 1e-9 * np.linalg.norm(A))

    def test_deterministic_order(self, rng):
        A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        r1 = eig_dense(A)
        r2 = eig_dense(A.copy())
        assert np.array_equal(r1.eigenvalues, r2.eigenvalues)
