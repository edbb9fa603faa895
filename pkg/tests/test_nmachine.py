import math

import numpy as np
import pytest

from conftest import spearman
from quasihmm import errors
from quasihmm.machine import Machine, same_process
from quasihmm.measures import (
    excess_entropy_half,
    perturbed_coin_excess_half,
    renyi_entropy,
    sns_excess_entropy_half,
)
from quasihmm.nmachine import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    Affine,
    OptimizeOptions,
    SplitSpec,
    assess_split_machine,
    build_split_machine,
    generic_split_spec,
    golden_mean_bad_nmachine,
    golden_mean_bad_split_spec,
    optimize_ideal,
    perturbed_coin_ideal_params,
    perturbed_coin_split_spec,
    sns_ideal_params,
    sns_split_spec,
    trivial_split_spec,
    verify_nmachine_properties,
)
from quasihmm.processes import (
    golden_mean_epsilon,
    perturbed_coin_epsilon,
    sns_g_machine,
    sns_renewal_data,
)

GRID = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9]


def pc_ideal_machine(p, branch=BRANCH_PLUS):
    source = perturbed_coin_epsilon(p)
    q1, q2 = perturbed_coin_ideal_params(p, branch)
    built = build_split_machine(source, perturbed_coin_split_spec(p), {"q1": q1, "q2": q2})
    return source, built, (q1, q2)


def sns_ideal_machine(p, branch=BRANCH_PLUS):
    source = sns_g_machine(p)
    gamma, eta = sns_ideal_params(p, branch=branch)
    built = build_split_machine(source, sns_split_spec(p), {"gamma": gamma, "eta": eta})
    return source, built, (gamma, eta)


class TestAffine:
    def test_constant(self):
        assert Affine(0.25).evaluate({}) == 0.25

    def test_linear_terms(self):
        expr = Affine(1.0, {"a": 2.0, "b": -1.0})
        assert expr.evaluate({"a": 0.5, "b": 3.0}) == pytest.approx(-1.0)


class TestBuildSplitMachine:
    def test_trivial_split_reproduces_source(self):
        source = perturbed_coin_epsilon(0.3)
        built = build_split_machine(source, trivial_split_spec(source), {})
        for x in source.alphabet:
            assert np.allclose(built.matrices[x], source.matrices[x], atol=0)
        assert built.stationary == pytest.approx(source.stationary, abs=1e-12)
        assert built.groups == (0, 1)

    def test_perturbed_coin_stationary_closed_form(self):
        # hand-solved fixed point of the split chain:
        # [ (q2-q1)/(2(p-2q1)), (p-q2-q1)/(2(p-2q1)), 1/2 ]
        p, q1, q2 = 0.3, 0.05, 0.2
        source = perturbed_coin_epsilon(p)
        built = build_split_machine(source, perturbed_coin_split_spec(p), {"q1": q1, "q2": q2})
        expected = [
            (q2 - q1) / (2 * (p - 2 * q1)),
            (p - q2 - q1) / (2 * (p - 2 * q1)),
            0.5,
        ]
        assert built.stationary == pytest.approx(expected, abs=1e-12)

    def test_perturbed_coin_matrices_match_diagram(self):
        p, q1, q2 = 0.3, 0.05, 0.2
        built = build_split_machine(
            perturbed_coin_epsilon(p), perturbed_coin_split_spec(p), {"q1": q1, "q2": q2}
        )
        t0 = np.array(
            [[1 - p + q1, -q1, 0.0], [-q1, 1 - p + q1, 0.0], [q2, p - q2, 0.0]]
        )
        t1 = np.array([[0.0, 0.0, p], [0.0, 0.0, p], [0.0, 0.0, 1 - p]])
        assert np.allclose(built.matrices["0"], t0, atol=1e-15)
        assert np.allclose(built.matrices["1"], t1, atol=1e-15)

    def test_sns_stationary_closed_form(self):
        # hand-solved: 0.5 * [ (g-e)/(2g+p-1), (p+g+e-1)/(2g+p-1), 1 ]
        p, gamma, eta = 0.5, 0.1, -0.2
        built = build_split_machine(
            sns_g_machine(p), sns_split_spec(p), {"gamma": gamma, "eta": eta}
        )
        denom = 2 * gamma + p - 1
        expected = [
            0.5 * (gamma - eta) / denom,
            0.5 * (p + gamma + eta - 1) / denom,
            0.5,
        ]
        assert built.stationary == pytest.approx(expected, abs=1e-12)

    def test_missing_parameters_rejected(self):
        p = 0.3
        with pytest.raises(errors.SpecMismatch):
            build_split_machine(
                perturbed_coin_epsilon(p), perturbed_coin_split_spec(p), {"q1": 0.0}
            )

    def test_wrong_state_count_rejected(self):
        spec = SplitSpec(copy_counts=(2,))
        with pytest.raises(errors.SpecMismatch):
            build_split_machine(perturbed_coin_epsilon(0.3), spec, {})

    def test_degenerate_parameter_point(self):
        # q1 = p/2 splits the chain into two invariant components
        p = 0.3
        with pytest.raises(errors.DegenerateFixedSpace):
            build_split_machine(
                perturbed_coin_epsilon(p),
                perturbed_coin_split_spec(p),
                {"q1": p / 2, "q2": 0.1},
            )

    def test_labels_carry_copy_structure(self):
        _, built, _ = pc_ideal_machine(0.3)
        assert built.states == ("s0.0", "s0.1", "s1")
        assert built.groups == (0, 0, 1)


class TestVerifyProperties:
    @pytest.mark.parametrize("p", [0.2, 0.3, 0.7])
    @pytest.mark.parametrize("branch", [BRANCH_PLUS, BRANCH_MINUS])
    def test_perturbed_coin_identities(self, p, branch):
        source, built, _ = pc_ideal_machine(p, branch)
        report = verify_nmachine_properties(source, built)
        assert report.worst() <= 1e-9

    @pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
    def test_sns_identities(self, p):
        source, built, _ = sns_ideal_machine(p)
        report = verify_nmachine_properties(source, built)
        assert report.worst() <= 1e-9

    def test_golden_mean_identities(self):
        source = golden_mean_epsilon(0.5)
        built = build_split_machine(source, golden_mean_bad_split_spec(0.5), {"q": -0.2})
        report = verify_nmachine_properties(source, built)
        assert report.worst() <= 1e-9

    def test_trivial_split_passes(self):
        source = perturbed_coin_epsilon(0.3)
        built = build_split_machine(source, trivial_split_spec(source), {})
        assert verify_nmachine_properties(source, built).passed()

    def test_corrupted_shares_violate(self):
        # move mass between split copies without keeping the share sum fixed
        source, built, _ = pc_ideal_machine(0.3)
        t0 = np.array(built.matrices["0"])
        t0[2, 0] += 0.05
        broken = Machine(
            alphabet=built.alphabet,
            states=built.states,
            matrices={"0": t0, "1": np.array(built.matrices["1"]) - 0.0},
            stationary=np.array(built.stationary),
            groups=built.groups,
        )
        with pytest.raises(errors.PropertyViolated):
            verify_nmachine_properties(source, broken)

    def test_report_is_attached_to_error(self):
        source, built, _ = pc_ideal_machine(0.3)
        t1 = np.array(built.matrices["1"])
        t1[0, 2] += 0.02
        broken = Machine(
            alphabet=built.alphabet, states=built.states,
            matrices={"0": np.array(built.matrices["0"]), "1": t1},
            stationary=np.array(built.stationary), groups=built.groups,
        )
        with pytest.raises(errors.PropertyViolated) as info:
            verify_nmachine_properties(source, broken)
        assert info.value.report.worst() > 1e-9

    def test_missing_groups_rejected(self):
        source = perturbed_coin_epsilon(0.3)
        with pytest.raises(errors.SpecMismatch):
            verify_nmachine_properties(source, source)


class TestPerturbedCoinIdealParams:
    @pytest.mark.parametrize("p", GRID)
    @pytest.mark.parametrize("branch", [BRANCH_PLUS, BRANCH_MINUS])
    def test_saturation(self, p, branch):
        _, built, params = pc_ideal_machine(p, branch)
        e_half = perturbed_coin_excess_half(p)
        c_n2 = renyi_entropy(built.stationary, 2)
        assert abs(c_n2 - e_half) <= 1e-8

    def test_branches_swap_split_weights(self):
        _, plus, _ = pc_ideal_machine(0.3, BRANCH_PLUS)
        _, minus, _ = pc_ideal_machine(0.3, BRANCH_MINUS)
        assert plus.stationary[0] == pytest.approx(minus.stationary[1], abs=1e-12)
        assert plus.stationary[1] == pytest.approx(minus.stationary[0], abs=1e-12)

    @pytest.mark.parametrize("p", GRID)
    def test_negativity_above_one(self, p):
        _, built, _ = pc_ideal_machine(p)
        assert np.sum(np.abs(built.stationary)) > 1.0 + 1e-6

    def test_q1_is_zero(self):
        q1, _ = perturbed_coin_ideal_params(0.3)
        assert q1 == 0.0

    def test_degenerate_at_half(self):
        with pytest.raises(errors.DegenerateParameter):
            perturbed_coin_ideal_params(0.5)

    def test_generates_source_process(self):
        source, built, _ = pc_ideal_machine(0.3)
        assert same_process(source, built)


class TestSnsIdealParams:
    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("branch", [BRANCH_PLUS, BRANCH_MINUS])
    def test_saturation_against_series_value(self, p, branch):
        _, built, _ = sns_ideal_machine(p, branch)
        e_half, _ = sns_excess_entropy_half(p)
        c_n2 = renyi_entropy(built.stationary, 2)
        assert abs(c_n2 - e_half) <= 1e-5

    def test_coarse_graining_halves(self):
        _, built, _ = sns_ideal_machine(0.5)
        assert built.stationary[0] + built.stationary[1] == pytest.approx(0.5, abs=1e-12)
        assert built.stationary[2] == pytest.approx(0.5, abs=1e-12)

    def test_branches_agree_on_memory(self):
        _, plus, _ = sns_ideal_machine(0.5, BRANCH_PLUS)
        _, minus, _ = sns_ideal_machine(0.5, BRANCH_MINUS)
        h_plus = renyi_entropy(plus.stationary, 2)
        h_minus = renyi_entropy(minus.stationary, 2)
        assert h_plus == pytest.approx(h_minus, abs=1e-12)

    def test_gamma_is_zero(self):
        gamma, _ = sns_ideal_params(0.5)
        assert gamma == 0.0

    def test_negative_radicand_reported(self, monkeypatch):
        import quasihmm.nmachine as nm

        monkeypatch.setattr(nm, "sns_past_future_overlap", lambda p, truncation=None: (0.3, 0.0))
        with pytest.raises(errors.NegativeRadicand):
            sns_ideal_params(0.5)

    def test_coarse_truncation_rejected(self):
        with pytest.raises(errors.TruncationTooCoarse):
            sns_ideal_params(0.5, truncation=4)


class TestGoldenMeanBad:
    def test_stationary_independent_of_parameter(self):
        a = golden_mean_bad_nmachine(0.5, -0.2)
        b = golden_mean_bad_nmachine(0.5, 0.2)
        assert a.machine.stationary == pytest.approx(b.machine.stationary, abs=1e-12)

    def test_stationary_closed_form(self):
        p = 0.5
        result = golden_mean_bad_nmachine(p, -0.3)
        scale = (1 - p) / (2 - p)
        expected = [scale / (2 - 2 * p), scale / (2 - 2 * p), scale]
        assert result.machine.stationary == pytest.approx(expected, abs=1e-12)

    def test_no_memory_advantage(self):
        result = golden_mean_bad_nmachine(0.5, -0.2)
        assert result.c_n2 > result.c_mu2
        assert not result.saturated

    @pytest.mark.parametrize("q", [-0.4, -0.2, 0.3])
    def test_generates_source_process(self, q):
        result = golden_mean_bad_nmachine(0.5, q)
        assert same_process(result.machine, golden_mean_epsilon(0.5))

    def test_negative_parameter_injects_negativity(self):
        result = golden_mean_bad_nmachine(0.5, 0.2)
        # q > 0 puts -q < 0 on the cross edges
        assert not result.machine.classify().classical


class TestUnsaturationGuard:
    @pytest.mark.parametrize("p", GRID)
    def test_perturbed_coin_overshoot_flagged(self, p):
        source = perturbed_coin_epsilon(p)
        q1, q2 = perturbed_coin_ideal_params(p, BRANCH_PLUS)
        built = build_split_machine(
            source, perturbed_coin_split_spec(p), {"q1": q1, "q2": q2 + 0.1}
        )
        e_half = perturbed_coin_excess_half(p)
        result = assess_split_machine(built, {"q1": q1, "q2": q2 + 0.1}, e_half, 1.0)
        assert result.c_n2 < e_half
        assert result.bound_violated
        assert not result.saturated

    def test_sns_overshoot_flagged(self):
        p = 0.5
        gamma, eta = sns_ideal_params(p, branch=BRANCH_PLUS)
        built = build_split_machine(
            sns_g_machine(p), sns_split_spec(p), {"gamma": gamma, "eta": eta + 0.1}
        )
        e_half, _ = sns_excess_entropy_half(p)
        weights = sns_renewal_data(p).stationary_weights()
        c_mu2 = renyi_entropy(weights / weights.sum(), 2)
        result = assess_split_machine(built, {}, e_half, c_mu2)
        assert result.c_n2 < e_half
        assert result.bound_violated


class TestNegativityAdvantageComonotonicity:
    def _pc_curves(self, grid):
        negs, advs = [], []
        for p in grid:
            _, built, _ = pc_ideal_machine(p)
            e_half = perturbed_coin_excess_half(p)
            result = assess_split_machine(built, {}, e_half, 1.0)
            negs.append(result.negativity - 1.0)
            advs.append(result.advantage)
        return negs, advs

    def _sns_curves(self, grid):
        negs, advs = [], []
        for p in grid:
            _, built, _ = sns_ideal_machine(p)
            e_half, _ = sns_excess_entropy_half(p)
            weights = sns_renewal_data(p).stationary_weights()
            c_mu2 = renyi_entropy(weights / weights.sum(), 2)
            result = assess_split_machine(built, {}, e_half, c_mu2)
            negs.append(result.negativity - 1.0)
            advs.append(result.advantage)
        return negs, advs

    def test_perturbed_coin_half_grids(self):
        low = [0.05 * k for k in range(1, 10)]
        high = [0.05 * k for k in range(11, 20)]
        for grid in (low, high):
            negs, advs = self._pc_curves(grid)
            assert spearman(negs, advs) >= 0.99

    def test_sns_half_grids(self):
        low = [0.05 * k for k in range(1, 10)]
        high = [0.05 * k for k in range(11, 20)]
        for grid in (low, high):
            negs, advs = self._sns_curves(grid)
            assert spearman(negs, advs) >= 0.99

    def test_mana_tracks_advantage_the_same_way(self):
        # the logarithmic negativity measure ranks identically
        for grid in ([0.05 * k for k in range(1, 10)], [0.05 * k for k in range(11, 20)]):
            negs, advs = self._pc_curves(grid)
            manas = [2 * math.log2(1.0 + n) for n in negs]
            assert spearman(manas, advs) >= 0.99


class TestOptimizeIdeal:
    def test_perturbed_coin_two_parameter_spec(self):
        p = 0.3
        source = perturbed_coin_epsilon(p)
        e_half = perturbed_coin_excess_half(p)
        result = optimize_ideal(source, perturbed_coin_split_spec(p), e_half)
        assert abs(result.c_n2 - e_half) <= 1e-6
        assert result.saturated

    def test_trivial_spec_returns_source_memory(self):
        source = perturbed_coin_epsilon(0.3)
        result = optimize_ideal(
            source, trivial_split_spec(source), perturbed_coin_excess_half(0.3)
        )
        assert result.c_n2 == pytest.approx(1.0, abs=1e-12)
        assert not result.saturated

    def test_golden_mean_bad_spec_stays_above_bound(self):
        source = golden_mean_epsilon(0.5)
        e_half = excess_entropy_half(source, 12).value
        result = optimize_ideal(source, golden_mean_bad_split_spec(0.5), e_half)
        assert result.c_n2 == pytest.approx(math.log2(3), abs=1e-9)
        assert not result.saturated

    def test_generic_golden_mean_split_reaches_bound(self):
        source = golden_mean_epsilon(0.5)
        e_half = excess_entropy_half(source, 12).value
        spec = generic_split_spec(source, (2, 1))
        result = optimize_ideal(source, spec, e_half)
        assert result.saturated
        assert result.c_n2 < renyi_entropy(source.stationary, 2)

    def test_deterministic_given_seed(self):
        source = golden_mean_epsilon(0.5)
        e_half = excess_entropy_half(source, 12).value
        spec = golden_mean_bad_split_spec(0.5)
        a = optimize_ideal(source, spec, e_half, OptimizeOptions(seed=5))
        b = optimize_ideal(source, spec, e_half, OptimizeOptions(seed=5))
        assert a.parameters == b.parameters

    def test_unreachable_bound_raises(self):
        source = perturbed_coin_epsilon(0.3)
        with pytest.raises(errors.NoFeasiblePoint):
            optimize_ideal(source, perturbed_coin_split_spec(0.3), 10.0)

    def test_parameter_cap(self):
        source = golden_mean_epsilon(0.5)
        spec = generic_split_spec(source, (2, 1))
        with pytest.raises(ValueError):
            optimize_ideal(source, spec, 0.2, OptimizeOptions(max_params=2))
