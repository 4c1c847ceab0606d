import numpy as np
import pytest

from conftest import complex_normal, random_params
from sixvq.conventions import FEConvention
from sixvq.errors import EvenCyclic, NotIsomorphic, PoleInParams
from sixvq.qcore import lambda_bracket, make_root_context, q_bracket
from sixvq.reps import (
    RepParams,
    build_cyclic_rep,
    central_values,
    chart_point,
    coproduct_action,
    evaluation_rep,
    fiber,
    point_chart,
    rep_eta,
    two_dim_rep,
)
from sixvq.intertwiner import (
    bs_bridge,
    build_L,
    exact_sequence,
    existence_criteria,
    find_gauge,
    inclusion_shift_params,
    quotient_shift_params,
    spin_reversal_L_check,
    verify_exact_sequence,
    verify_intertwining,
    verify_ybe,
    r_ybe_residual,
)
from sixvq.sixvertex import SIGMA_X


class TestBuildL:
    def test_odd_blocks_formula(self, params3, ctx3):
        rep = build_cyclic_rep(params3)
        w = 0.8 + 0.3j
        L = build_L(rep, w, "odd")
        q = ctx3.q
        kp = np.linalg.matrix_power(rep.k, 2)
        km = rep.k
        assert np.linalg.norm(L.A - (q * w * kp - km)) < 1e-12
        assert np.linalg.norm(L.B - q * w * ctx3.qdiff * kp @ rep.f) < 1e-12
        assert np.linalg.norm(L.C - ctx3.qdiff * rep.e @ km) < 1e-12
        assert np.linalg.norm(L.D - (q * w * km - kp)) < 1e-12

    def test_rho_ratio_enforced(self, params3):
        rep = build_cyclic_rep(params3)
        with pytest.raises(ValueError):
            build_L(rep, 0.8, "odd", rho_plus=1.0, rho_minus=1.0)

    def test_even_cyclic_blocked(self, ctx4):
        rep = build_cyclic_rep(RepParams(0.4, 0.3, 1.2, ctx4), unchecked=True)
        with pytest.raises(EvenCyclic):
            build_L(rep, 0.8, "breve")
        build_L(rep, 0.8, "breve", unchecked=True)

    def test_block_swap_under_sigma_x(self, params3):
        rep = build_cyclic_rep(params3)
        L = build_L(rep, 0.8 + 0.3j)
        sx = np.kron(np.eye(rep.dim), SIGMA_X)
        swapped = sx @ L.dense() @ sx
        d = rep.dim
        ref = (np.kron(L.D, np.diag([1.0, 0.0])) + np.kron(L.C, np.array([[0, 1], [0, 0]]))
               + np.kron(L.B, np.array([[0, 0], [1, 0]])) + np.kron(L.A, np.diag([0.0, 1.0])))
        assert np.linalg.norm(swapped - ref) == 0.0


class TestIntertwining:
    @pytest.mark.parametrize("variant", ["odd", "breve"])
    def test_cyclic_n3(self, params3, variant, rng):
        rep = build_cyclic_rep(params3)
        w, z = 0.73 + 0.41j, 1.21 - 0.3j
        L = build_L(rep, w / z, variant)
        assert verify_intertwining(L, rep, w, z) < 1e-10

    def test_nilpotent_n4(self, ctx4):
        rep = build_cyclic_rep(RepParams(0, 0, 1.3 + 0.4j, ctx4))
        w, z = 0.73 + 0.41j, 1.21 - 0.3j
        L = build_L(rep, w / z)
        assert verify_intertwining(L, rep, w, z) < 1e-10

    def test_even_cyclic_obstruction(self, ctx4):
        rep = build_cyclic_rep(RepParams(0.5 + 0.2j, 0.7 - 0.1j, 1.3 + 0.4j, ctx4),
                               unchecked=True)
        w, z = 0.73 + 0.41j, 1.21 - 0.3j
        L = build_L(rep, w / z, unchecked=True)
        assert verify_intertwining(L, rep, w, z) > 0.05


class TestYangBaxter:
    def test_cyclic_random(self, ctx3, rng):
        rep = build_cyclic_rep(random_params(ctx3, rng))
        assert verify_ybe(rep, 0.9 + 0.2j, 1.3 - 0.4j) < 1e-9

    def test_nilpotent_even(self, ctx4):
        rep = build_cyclic_rep(RepParams(0, 0, 1.1 - 0.6j, ctx4))
        assert verify_ybe(rep, 0.9 + 0.2j, 1.3 - 0.4j) < 1e-9

    def test_r_matrix_specialization(self, ctx3):
        assert r_ybe_residual(1.3 - 0.4j, 0.9 + 0.2j, ctx3) < 1e-10


class TestGauge:
    def test_identity_for_same_rep(self, params3):
        rep = build_cyclic_rep(params3)
        phi = find_gauge(rep, rep)
        assert np.linalg.norm(phi - np.eye(rep.dim)) < 1e-9

    def test_different_points_rejected(self, ctx3, rng):
        repA = build_cyclic_rep(random_params(ctx3, rng))
        repB = build_cyclic_rep(random_params(ctx3, rng))
        with pytest.raises(NotIsomorphic):
            find_gauge(repA, repB)

    def test_reversal_realizes_omega(self, params3):
        # the reversed chart conjugates into the swap-automorphism composite
        from sixvq.reps import reversal_coordinates
        from sixvq.intertwiner import _omega_rep
        rep = build_cyclic_rep(params3)
        rep_r = build_cyclic_rep(reversal_coordinates(params3))
        phi = find_gauge(rep_r, _omega_rep(rep))
        inv = np.linalg.inv(phi)
        assert np.linalg.norm(phi @ rep_r.e @ inv - rep.f) < 1e-9 * np.linalg.norm(rep.f)


class TestSpinReversalLaw:
    def test_nilpotent(self, ctx3):
        assert spin_reversal_L_check(RepParams(0, 0, 1.7 - 0.3j, ctx3), 0.73 + 0.41j) < 1e-9

    def test_cyclic(self, params3):
        assert spin_reversal_L_check(params3, 0.73 + 0.41j) < 1e-9

    def test_principal_form_has_no_twist(self, params3, ctx3):
        # (1 x sx) Lp(y) (1 x sx) = zc (phi x 1) Lp_rev(y) (phi^-1 x 1)
        from sixvq.reps import reversal_coordinates
        from sixvq.intertwiner import _omega_rep
        rep = build_cyclic_rep(params3)
        pt = central_values(rep)
        params_r = reversal_coordinates(params3)
        rep_r = build_cyclic_rep(params_r)
        phi = find_gauge(rep_r, _omega_rep(rep))
        y = 0.9 + 0.25j
        def principal_dense(rp, yv):
            L = build_L(rp, yv * yv, "odd")
            tw = np.diag([1 / np.sqrt(complex(yv)), np.sqrt(complex(yv))])
            return np.kron(np.eye(rp.dim), tw) @ L.dense() @ np.kron(
                np.eye(rp.dim), np.linalg.inv(tw))
        sx = np.kron(np.eye(rep.dim), SIGMA_X)
        lhs = sx @ principal_dense(rep, y) @ sx
        conj = np.kron(phi, np.eye(2))
        rhs = pt.zc * conj @ principal_dense(rep_r, y) @ np.linalg.inv(conj)
        assert np.linalg.norm(lhs - rhs) < 1e-9 * np.linalg.norm(lhs)


class TestExistenceCriteria:
    def test_fiber_mates(self, params3):
        pts = fiber(chart_point(params3))
        w = 0.8 - 0.2j
        assert existence_criteria(pts[0], pts[1], w, w)

    def test_even_cyclic(self, ctx4):
        p = chart_point(RepParams(0.5, 0.3, 1.2, ctx4))
        assert not existence_criteria(p, p, 0.8, 0.8)

    def test_generic_pair(self, ctx3, rng):
        a = chart_point(random_params(ctx3, rng))
        b = chart_point(random_params(ctx3, rng))
        assert not existence_criteria(a, b, 0.8, 0.8)

    def test_matches_measured_intertwining(self, rng):
        # residual is small exactly when the criteria predict existence
        w, z = 0.73 + 0.41j, 1.21 - 0.3j
        for N in (3, 4):
            ctx = make_root_context(N)
            kinds = (("nilpotent", True),)
            if N % 2:
                kinds += (("semi-cyclic", True), ("semi-cyclic-x", True), ("cyclic", True))
            else:
                kinds += (("cyclic", False),)
            for kind, should_exist in kinds:
                if kind == "cyclic" and N % 2 == 0:
                    params = RepParams(0.5 + 0.2j, 0.7 - 0.1j, 1.3 + 0.4j, ctx)
                else:
                    params = random_params(ctx, rng, kind)
                rep = build_cyclic_rep(params, unchecked=True)
                L = build_L(rep, w / z, unchecked=True)
                res = verify_intertwining(L, rep, w, z)
                pt = central_values(rep)
                zero = chart_point(RepParams(0, 0, 1.0 + 0.0j, ctx)) if False else None
                if should_exist:
                    assert res < 1e-9, (N, kind)
                else:
                    assert res > 1e-3, (N, kind)


class TestBridge:
    def test_invariants_and_match(self, ctx3):
        w = 0.73 + 0.41j
        s0, s1, s2 = 0.8 + 0.1j, 1.2 - 0.4j, 0.5 + 0.9j
        L, gammas, match = bs_bridge(s0, s1, s2, w, ctx3)
        assert match < 1e-10
        assert abs(gammas[1] - w**-3) < 1e-12

    def test_coefficient_values(self, ctx3):
        import cmath
        w = 0.73 + 0.41j
        s1, s2 = 1.2 - 0.4j, 0.5 + 0.9j
        d_plus = cmath.sqrt(ctx3.q) / cmath.sqrt(s1 / s2)
        # rebuilt from the A-block diagonal of the bridge operator
        L, _, _ = bs_bridge(1.0, s1, s2, w, ctx3)
        # A = rho+ t - rho- t^-1 with t = Z / sqrt(s1/s2): top entry at n=0
        rp = cmath.sqrt(ctx3.q) * cmath.sqrt(w)
        rm = 1.0 / rp
        ratio = cmath.sqrt(s1 / s2)
        want = rp / ratio - rm * ratio
        assert abs(L.A[0, 0] - want) < 1e-12
        assert abs(w**0.5 * d_plus / ratio**0 - rp / ratio) < 1e-12


class TestExactSequence:
    def test_inclusion_weight_bookkeeping(self, params3, ctx3):
        z = 0.9 + 0.7j
        seq = exact_sequence(params3, z)
        rep = build_cyclic_rep(params3)
        ev = evaluation_rep(rep, seq.w)
        td = two_dim_rep(z, ctx3)
        k1 = coproduct_action("k1", ev, td)
        lamp = seq.params_prime.lam
        for n in range(ctx3.Nprime):
            col = seq.iota[:, n]
            got = k1 @ col
            assert np.linalg.norm(got - lamp * ctx3.qpow(-2 * n) * col) < 1e-10
        assert abs(lamp - params3.lam / ctx3.q) < 1e-14

    def test_module_maps(self, params3, ctx3):
        z = 0.9 + 0.7j
        seq = exact_sequence(params3, z)
        rep = build_cyclic_rep(params3)
        ev = evaluation_rep(rep, seq.w)
        td = two_dim_rep(z, ctx3)
        rep_p = build_cyclic_rep(seq.params_prime)
        ev_p = evaluation_rep(rep_p, seq.w_prime)
        rep_pp = build_cyclic_rep(seq.params_dprime)
        ev_pp = evaluation_rep(rep_pp, seq.w_dprime)
        for gen in ("e0", "f0", "k0", "e1", "f1", "k1"):
            big = coproduct_action(gen, ev, td)
            assert np.linalg.norm(big @ seq.iota - seq.iota @ ev_p.gen(gen)) < 1e-9
            assert np.linalg.norm(seq.tau @ big - ev_pp.gen(gen) @ seq.tau) < 1e-9

    def test_exactness(self, params3):
        seq = exact_sequence(params3, 0.9 + 0.7j)
        assert np.linalg.norm(seq.tau @ seq.iota) < 1e-12

    def test_semicyclic_alpha_vanishes(self, ctx3, rng):
        params = random_params(ctx3, rng, "semi-cyclic-x")  # zeta = 0
        seq = exact_sequence(params, 0.9 + 0.7j)
        top = seq.iota[0, ctx3.Nprime - 1]  # v_0 (x) up component of the last vector
        assert abs(top) < 1e-14

    def test_semicyclic_quotient_coefficients(self, ctx3, rng):
        params = random_params(ctx3, rng, "semi-cyclic")  # xi = 0
        seq = exact_sequence(params, 0.9 + 0.7j)
        lam = params.lam
        # tau(v_n (x) up) = e_n / gamma_n, so gamma_n = 1 / tau[n, 2n] and
        # gamma_n / gamma_0 = [lam; -1]/[lam; n-1]
        gammas = [1.0 / seq.tau[n, 2 * n] for n in range(ctx3.Nprime)]
        for n in range(1, ctx3.Nprime):
            got = gammas[n] / gammas[0]
            want = lambda_bracket(lam, -1, ctx3) / lambda_bracket(lam, n - 1, ctx3)
            assert abs(got - want) < 1e-9

    def test_eta_identities(self, ctx3, rng):
        for _ in range(5):
            params = random_params(ctx3, rng)
            mu = central_values(build_cyclic_rep(params)).mu
            eta = rep_eta(params)
            eta_p = rep_eta(inclusion_shift_params(params, mu))
            eta_pp = rep_eta(quotient_shift_params(params, mu))
            assert abs(eta_p - eta) < 1e-9 * max(1, abs(eta))
            assert abs(eta_pp - eta) < 1e-9 * max(1, abs(eta))

    def test_argument_and_branch_chain_near_nilpotent(self, ctx3, rng):
        # w' = w q, w'' = w/q always; mu' = q mu, mu'' = mu/q on the
        # continuation branch in the small-coupling regime
        lam = 1.3 + 0.4j
        params = RepParams(0.05 + 0.02j, -0.04 + 0.06j, lam, ctx3)
        mu = central_values(build_cyclic_rep(params)).mu
        seq = exact_sequence(params, 0.9 + 0.7j)
        assert abs(seq.w_prime - seq.w * ctx3.q) < 1e-12
        assert abs(seq.w_dprime - seq.w / ctx3.q) < 1e-12
        mu_p = central_values(build_cyclic_rep(seq.params_prime)).mu
        mu_pp = central_values(build_cyclic_rep(seq.params_dprime)).mu
        assert abs(mu_p - ctx3.q * mu) < 1e-9
        assert abs(mu_pp - mu / ctx3.q) < 1e-9

    @pytest.mark.parametrize("N", [3, 5])
    def test_residuals_random_cyclic(self, N, rng):
        ctx = make_root_context(N)
        for _ in range(3):
            params = random_params(ctx, rng)
            chk = verify_exact_sequence(params, 0.9 + complex_normal(rng, 0.3))
            assert chk.residual1 < 1e-9 and chk.residual2 < 1e-9
            assert abs(chk.phi1 - chk.phi1_formula) < 1e-9
            assert abs(chk.phi2 - chk.phi2_formula) < 1e-9

    def test_default_scalars_n3(self, params3, ctx3):
        z = 0.9 + 0.7j
        chk = verify_exact_sequence(params3, z)
        from sixvq.sixvertex import boltzmann_weights
        a, b, _, _ = boltzmann_weights(z, ctx3.q)
        assert abs(chk.phi1 - b * ctx3.q) < 1e-10
        assert abs(chk.phi2 - a / ctx3.q) < 1e-10

    def test_phab_eliminates_powers(self, params3, ctx3):
        z = 0.9 + 0.7j
        chk = verify_exact_sequence(params3, z, FEConvention("phab"))
        from sixvq.sixvertex import boltzmann_weights
        a, b, _, _ = boltzmann_weights(z, ctx3.q)
        assert abs(chk.phi1 - b) < 1e-10 and abs(chk.phi2 - a) < 1e-10
        assert chk.residual1 < 1e-9 and chk.residual2 < 1e-9

    def test_even_parity_phiev(self, ctx4):
        params = RepParams(0, 0, 1.3 + 0.4j, ctx4)
        chk = verify_exact_sequence(params, 0.9 + 0.7j, FEConvention("phiev"))
        assert chk.residual1 < 1e-9 and chk.residual2 < 1e-9
        assert abs(chk.phi1 - chk.phi1_formula) < 1e-10

    def test_pole_in_params(self, ctx3):
        # mu - q lam = 0 happens when c = q lam + 1/(q lam): engineered draw
        lam = 1.2 + 0.3j
        # choose xi zeta so that mu = q lam: c = q lam + 1/(q lam)
        c_target = ctx3.q * lam + 1 / (ctx3.q * lam)
        prod = (c_target - ctx3.q * lam - ctx3.qpow(-1) / lam) / ctx3.qdiff**2
        params = RepParams(prod / 0.7, 0.7, lam, ctx3)
        mu = ctx3.q * lam
        with pytest.raises(PoleInParams):
            inclusion_shift_params(params, mu)
