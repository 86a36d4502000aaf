import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensengap import (DomainError, SequenceModel, ShapeError, build_discrete,
                       characterize, concave_reversal, diagonal_kernel,
                       entropy_check, erasure_check, from_sequences,
                       geometric_mean_check, main_inequality,
                       marginal_power_mean, parse_phi, power_mean_chain,
                       random_instance, sequence_inequalities,
                       stability_check, stability_params, variational_scan)


class TestMainInequality:
    def test_d1_identity_phi(self, d1_profile, phi_id):
        res = main_inequality(d1_profile, phi_id)
        assert res.lhs == pytest.approx(74.0 / 3.0, rel=1e-15)
        assert res.rhs == pytest.approx(24.0, rel=1e-15)
        assert res.gap == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert res.status == "holds"
        assert res.direction == "ge"

    def test_d1_log_phi(self, d1_profile, phi_log):
        res = main_inequality(d1_profile, phi_log)
        lhs = (5.0 * math.log(5.0) + 7.0 * math.log(7.0)) / 3.0
        assert res.lhs == pytest.approx(lhs, rel=1e-15)
        assert res.rhs == pytest.approx(4.0 * math.log(6.0), rel=1e-15)
        assert res.status == "holds"

    def test_constant_profile_is_equality(self, t1_profile, phi_log):
        res = main_inequality(t1_profile, phi_log)
        assert res.status == "equality"
        assert res.equality_flag

    def test_concave_phi_rejected(self, d1_profile):
        with pytest.raises(ShapeError):
            main_inequality(d1_profile, parse_phi("pow:-0.5"))

    def test_mean_on_domain_boundary_rejected(self):
        from jensengap import PhiSpec
        phi = PhiSpec(family="custom",
                      table=((0.0, 1.0, 2.0), (0.0, 1.0, 4.0)),
                      declared_shape="convex")
        inst = build_discrete((1, 1), (1,), [[0], [0]], (1,))
        profile = characterize(inst)
        assert profile.delta_bar == 0.0  # sits on the closed domain edge
        with pytest.raises(DomainError, match="strictly inside"):
            main_inequality(profile, phi)

    @settings(max_examples=60, deadline=None)
    @given(p=st.integers(2, 10), q=st.integers(1, 8),
           c=st.floats(0.5, 4.0), seed=st.integers(0, 10 ** 6),
           phi_spec=st.sampled_from(["id", "log", "pow:2", "pow:0.5"]))
    def test_holds_on_random_instances(self, p, q, c, seed, phi_spec):
        profile = characterize(random_instance(p, q, c, seed=seed))
        res = main_inequality(profile, parse_phi(phi_spec))
        assert res.holds

    @settings(max_examples=30, deadline=None)
    @given(scale=st.floats(0.1, 10.0), seed=st.integers(0, 10 ** 6))
    def test_log_gap_invariant_under_weight_scaling(self, scale, seed):
        phi = parse_phi("log")
        inst = random_instance(5, 4, 2.0, seed=seed)
        scaled = build_discrete(inst.v_space.masses, inst.e_space.masses,
                                inst.kernel, inst.weights * scale)
        g0 = main_inequality(characterize(inst), phi).gap
        g1 = main_inequality(characterize(scaled), phi).gap
        # lhs and rhs each shift by c*ln(scale); the gap does not move.
        assert abs(g0 - g1) < 1e-10 * max(1.0, abs(g0))

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           seed=st.integers(0, 10 ** 6))
    def test_equality_iff_constant_degrees(self, p, q, seed):
        phi = parse_phi("log")
        profile = characterize(random_instance(p, q, 2.0, seed=seed))
        res = main_inequality(profile, phi)
        if profile.delta_spread < 1e-12:
            assert res.status == "equality"
        elif profile.delta_spread > 1e-3:
            assert res.status == "holds" and not res.equality_flag


class TestStability:
    def test_identity_phi_slack_is_zero(self, d1_profile, phi_id):
        res = stability_check(d1_profile, phi_id)
        # f(t) = t^2 makes the refinement an algebraic identity.
        assert res.bound == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert abs(res.gap) < 1e-12

    def test_log_phi_alpha(self, d1_profile, phi_log):
        params = stability_params(d1_profile, phi_log)
        assert params.alpha == pytest.approx(1.0 / 7.0, rel=1e-15)
        assert params.range == (5.0, 7.0)
        res = stability_check(d1_profile, phi_log, params)
        assert res.gap >= -1e-12
        assert res.bound == pytest.approx(params.variance_term)

    def test_wider_interval_weakens_bound(self, d1_profile, phi_log):
        tight = stability_params(d1_profile, phi_log)
        wide = stability_params(d1_profile, phi_log, m=1.0, M=50.0)
        assert wide.alpha < tight.alpha
        assert wide.variance_term < tight.variance_term

    def test_interval_must_cover_range(self, d1_profile, phi_log):
        from jensengap import InvalidValueError
        with pytest.raises(InvalidValueError):
            stability_params(d1_profile, phi_log, m=5.5, M=7.0)

    @settings(max_examples=50, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           c=st.floats(0.5, 4.0), seed=st.integers(0, 10 ** 6),
           phi_spec=st.sampled_from(["id", "log", "pow:2"]))
    def test_refinement_holds_randomly(self, p, q, c, seed, phi_spec):
        profile = characterize(random_instance(p, q, c, seed=seed))
        res = stability_check(profile, parse_phi(phi_spec))
        assert res.holds
        assert res.bound >= 0.0


class TestConcaveReversal:
    def test_d1_sqrt(self, d1_profile):
        res = concave_reversal(d1_profile, parse_phi("pow:-0.5"))
        assert res.lhs == pytest.approx(
            (math.sqrt(5.0) + math.sqrt(7.0)) / 3.0, rel=1e-15)
        assert res.rhs == pytest.approx(4.0 / math.sqrt(6.0), rel=1e-15)
        assert res.direction == "le"
        assert res.status == "holds"

    def test_convex_phi_rejected(self, d1_profile, phi_log):
        with pytest.raises(ShapeError):
            concave_reversal(d1_profile, phi_log)

    def test_constant_profile_accepted_both_ways(self, t1_profile, phi_log):
        assert main_inequality(t1_profile, phi_log).status == "equality"
        assert concave_reversal(
            t1_profile, parse_phi("pow:-0.5")).status == "equality"


class TestVariationalScan:
    def test_constant_attains_minimum_d1(self, d1_profile, phi_id):
        res = variational_scan(d1_profile, phi_id, trials=300, seed=3)
        assert res.rhs == pytest.approx(24.0, rel=1e-15)
        assert res.lhs >= res.rhs - 1e-12
        assert res.extras["strict_on_nonconstant"]

    def test_log_phi(self, d1_profile, phi_log):
        res = variational_scan(d1_profile, phi_log, trials=300, seed=5)
        assert res.holds

    def test_merely_convex_rejected(self, d1_profile):
        # phi(t) = 1/t gives f(t) = 1, affine, hence not strictly convex.
        with pytest.raises(ShapeError):
            variational_scan(d1_profile, parse_phi("pow:-1"), trials=10)

    def test_single_atom_trivial(self, phi_log):
        profile = characterize(random_instance(1, 3, 2.0, seed=0))
        res = variational_scan(profile, phi_log, trials=10, seed=0)
        assert res.status == "equality"


class TestPowerMeanChain:
    def test_d1_normalized_pair(self, d1_profile):
        results = power_mean_chain(d1_profile, [1, 2])
        (res,) = results
        assert res.check_name == "power-mean[1,2]:normalized"
        # B_1 = 74/3, B_2 = 468/3 = 156
        assert res.rhs == pytest.approx(74.0 / 12.0, rel=1e-14)
        assert res.lhs == pytest.approx(math.sqrt(39.0), rel=1e-14)
        assert res.holds

    def test_d1_paper_literal_fails(self, d1_profile):
        (res,) = power_mean_chain(d1_profile, [1, 2], variant="paper-literal")
        assert res.lhs == pytest.approx(math.sqrt(156.0), rel=1e-14)
        assert res.rhs == pytest.approx(74.0 / 3.0, rel=1e-14)
        assert res.status == "violated"

    def test_t1_paper_literal_fails_even_constant(self, t1_profile):
        # With c = 2 the unnormalized roots B_r^(1/r) = (c^(r+1) s / s)^(1/r)
        # strictly decrease in r, so even a constant profile violates the
        # unnormalized chain.
        (res,) = power_mean_chain(t1_profile, [1, 2], variant="paper-literal")
        assert res.status == "violated"

    def test_t1_normalized_is_equality(self, t1_profile):
        for res in power_mean_chain(t1_profile, [0.5, 1, 2, 3]):
            assert res.status == "equality"

    def test_chain_length(self, d1_profile):
        results = power_mean_chain(d1_profile, [0.5, 1, 2, 3])
        assert [r.check_name for r in results] == [
            "power-mean[0.5,1]:normalized",
            "power-mean[1,2]:normalized",
            "power-mean[2,3]:normalized"]
        assert all(r.holds for r in results)

    def test_unordered_exponents_rejected(self, d1_profile):
        from jensengap import InvalidValueError
        with pytest.raises(InvalidValueError):
            power_mean_chain(d1_profile, [2, 1])
        with pytest.raises(InvalidValueError):
            power_mean_chain(d1_profile, [1])

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           c=st.floats(0.5, 4.0), seed=st.integers(0, 10 ** 6))
    def test_normalized_chain_holds_randomly(self, p, q, c, seed):
        profile = characterize(random_instance(p, q, c, seed=seed))
        for res in power_mean_chain(profile, [0.5, 1, 2, 3]):
            assert res.holds


class TestMarginalPowerMean:
    def test_d1_p2(self, d1_profile):
        res = marginal_power_mean(d1_profile, 2.0)
        assert res.lhs == pytest.approx(math.sqrt(37.0), rel=1e-14)
        assert res.rhs == pytest.approx(6.0, rel=1e-15)
        assert res.holds
        # product form slack: B_1 - c*delta_bar = 74/3 - 24 = 2/3
        assert res.bound == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_p_one_is_equality(self, d1_profile):
        res = marginal_power_mean(d1_profile, 1.0)
        assert res.status == "equality"

    def test_p_below_one_rejected(self, d1_profile):
        from jensengap import InvalidValueError
        with pytest.raises(InvalidValueError):
            marginal_power_mean(d1_profile, 0.5)

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           seed=st.integers(0, 10 ** 6),
           exponent=st.sampled_from([1.5, 2.0, 3.0]))
    def test_holds_randomly(self, p, q, seed, exponent):
        profile = characterize(random_instance(p, q, 2.0, seed=seed))
        res = marginal_power_mean(profile, exponent)
        assert res.holds
        assert res.bound >= -1e-9


class TestEntropy:
    def test_d1_value(self, d1_profile):
        res = entropy_check(d1_profile)
        assert res.lhs == pytest.approx(-0.013953914568419637, rel=1e-14)
        assert res.rhs == 0.0
        assert res.direction == "le"
        assert res.status == "holds"

    def test_constant_profile_zero(self, t1_profile):
        res = entropy_check(t1_profile)
        assert res.status == "equality"
        assert res.lhs == pytest.approx(0.0, abs=1e-15)

    def test_nonpositive_degree_rejected(self):
        inst = build_discrete((1, 1), (1,), [[2], [-1]], (1,))
        profile = characterize(inst, column_tol=math.inf)
        with pytest.raises(DomainError):
            entropy_check(profile)

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           seed=st.integers(0, 10 ** 6))
    def test_strictly_negative_when_nonconstant(self, p, q, seed):
        profile = characterize(random_instance(p, q, 2.0, seed=seed))
        res = entropy_check(profile)
        assert res.holds
        if profile.delta_spread > 1e-3:
            assert res.lhs < 0.0


class TestErasure:
    def test_d1_erase_heavy_edge(self, d1, phi_id):
        res = erasure_check(d1, [False, True], phi_id)
        assert res.check_name == "erasure"
        assert res.lhs == pytest.approx(10.0, rel=1e-15)
        assert res.rhs == pytest.approx(8.0, rel=1e-15)
        assert res.status == "holds"
        assert res.extras["s_restricted"] == 1.0
        assert res.extras["delta_bar_restricted"] == 2.0
        assert res.extras["c_surviving_tau_mass"] == 1.0

    def test_erase_nothing_matches_main(self, d1, d1_profile, phi_log):
        full = main_inequality(d1_profile, phi_log)
        none_erased = erasure_check(d1, [False, False], phi_log)
        assert none_erased.lhs == pytest.approx(full.lhs, rel=1e-15)
        assert none_erased.gap == pytest.approx(full.gap, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(p=st.integers(2, 6), q=st.integers(2, 6),
           seed=st.integers(0, 10 ** 6), data=st.data())
    def test_random_erasures_hold(self, p, q, seed, data):
        inst = random_instance(p, q, 2.0, seed=seed)
        mask = data.draw(st.lists(st.booleans(), min_size=q, max_size=q))
        if all(mask):
            mask[0] = False
        res = erasure_check(inst, mask, parse_phi("id"))
        assert res.holds


class TestGeometricMean:
    def test_d1_value(self, d1_profile):
        res = geometric_mean_check(d1_profile)
        expected = math.exp((5.0 * math.log(5.0) + 7.0 * math.log(7.0)) / 12.0)
        assert res.lhs == pytest.approx(expected, rel=1e-15)
        assert res.lhs == pytest.approx(6.084310349101414, rel=1e-14)
        assert res.rhs == pytest.approx(6.0, rel=1e-15)
        assert res.status == "holds"

    def test_constant_profile_equality_any_c(self, t1_profile):
        res = geometric_mean_check(t1_profile)
        assert res.status == "equality"

    def test_paper_literal_variant_fails_constant_profile(self, t1_profile):
        res = geometric_mean_check(t1_profile, variant="paper-literal")
        # exp((1/s) * c*s*ln(delta_bar)) = delta_bar^c with c = 2 here.
        assert res.lhs == pytest.approx(4.0, rel=1e-14)
        assert res.status != "equality"

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(2, 8), q=st.integers(1, 6),
           c=st.floats(0.5, 4.0), seed=st.integers(0, 10 ** 6))
    def test_dominates_mean_randomly(self, p, q, c, seed):
        profile = characterize(random_instance(p, q, c, seed=seed))
        assert geometric_mean_check(profile).holds


class TestSequenceInequalities:
    def test_worked_pair(self, phi_log):
        model = SequenceModel.from_a_u((1.0, 1.0), (1.0, 2.0))
        first, second = sequence_inequalities(model, phi_log)
        assert first.lhs == pytest.approx(2.0 * math.log(2.0) / 3.0,
                                          rel=1e-15)
        assert first.rhs == pytest.approx(math.log(1.5), rel=1e-15)
        assert first.holds
        assert second.lhs == pytest.approx(math.log(4.0), rel=1e-15)
        assert second.rhs == pytest.approx(3.0 * math.log(1.5), rel=1e-15)
        assert second.holds

    def test_equality_iff_proportional(self, phi_log):
        model = SequenceModel.from_a_u((1.0, 2.0, 3.0), (2.0, 4.0, 6.0))
        first, second = sequence_inequalities(model, phi_log)
        assert first.status == "equality"
        assert second.status == "equality"

    def test_product_form_matches_exponentiated(self, phi_log):
        model = SequenceModel.from_a_u((1.0, 3.0), (2.0, 1.0))
        _, second = sequence_inequalities(model, phi_log)
        u = model.u
        prod_lhs = float(np.prod((u / model.a) ** u))
        assert math.exp(second.lhs) == pytest.approx(prod_lhs, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 10), seed=st.integers(0, 10 ** 6))
    def test_hold_randomly(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(0.2, 3.0, size=n)
        u = rng.uniform(0.2, 3.0, size=n)
        model = SequenceModel.from_a_u(a, u)
        first, second = sequence_inequalities(model, parse_phi("log"))
        assert first.holds and second.holds

    def test_sequence_instance_embedding_agrees(self, phi_log):
        model = SequenceModel.from_a_u((1.0, 2.0), (3.0, 1.0))
        inst = from_sequences(model, diagonal_kernel(model.a))
        profile = characterize(inst)
        res = main_inequality(profile, phi_log)
        first, _ = sequence_inequalities(model, phi_log)
        assert res.lhs == pytest.approx(first.lhs, rel=1e-12)
        assert res.rhs == pytest.approx(first.rhs, rel=1e-12)
