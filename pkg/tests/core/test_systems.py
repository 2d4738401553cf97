import math

import numpy as np
import pytest

from gsinclusion.core.config import update_config
from gsinclusion.core.conjugate import PowerMinusOne
from gsinclusion.core.data_structures import Kind, RelationVerdict
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.sequences import gevrey_sequence
from gsinclusion.core.systems import (
    BMTGenerated,
    Dilated,
    DilatedWeights,
    ExplicitSequences,
    OmegaWeights,
    ShiftedWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
    check_I,
    check_L,
    check_L_functional,
    check_M,
    check_wI,
    check_wM,
    derived_function_system,
    describe_function_system,
    describe_sequence_system,
    lambda_grid,
    member,
    probe_grid,
    replay_certificate,
    shell_grid,
    system_log_convex,
    system_relation_functions,
    system_relation_sequences,
    tail_trend,
    unit_ball_mesh,
)


def gevrey_system(s: float) -> WeightSequenceSystem:
    return WeightSequenceSystem(Dilated(gevrey_sequence(s)))


def omega_weights(rho: float) -> WeightFunctionSystem:
    return WeightFunctionSystem(OmegaWeights(PowerMinusOne(rho)))


class TestConstruction:
    def test_explicit_members_must_increase(self):
        with pytest.raises(ValueError, match="not monotone"):
            WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(1.0)), (2.0, gevrey_sequence(0.5)))))

    def test_explicit_parameters_sorted(self):
        with pytest.raises(ValueError):
            ExplicitSequences(((2.0, gevrey_sequence(1.0)), (1.0, gevrey_sequence(2.0))))

    def test_generator_dimension(self):
        with pytest.raises(DimensionMismatchError):
            WeightSequenceSystem(Dilated(gevrey_sequence(1.0, dimension=2)), dimension=1)

    def test_members(self):
        system = gevrey_system(1.0)
        assert member(system, 4.0).spec.h == pytest.approx(4.0)
        explicit = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(1.0)), (2.0, gevrey_sequence(2.0)))))
        assert member(explicit, 2.0) == gevrey_sequence(2.0)
        with pytest.raises(ValueError):
            member(explicit, 3.0)

    def test_descriptions(self):
        assert describe_sequence_system(gevrey_system(1.0)) == "dilated(gevrey(s=1,h=1))"
        shifted = WeightFunctionSystem(ShiftedWeights(2.0, omega_weights(0.5)))
        assert describe_function_system(shifted) == "polyshift(k=2,fromomega(pow(rho=0.5)))"


class TestGrids:
    def test_default_grids(self, config):
        system = gevrey_system(1.0)
        assert lambda_grid(system, config) == tuple(2.0**k for k in range(-8, 9))
        assert probe_grid(system, config) == (0.25, 0.5, 1.0, 2.0, 4.0)

    def test_explicit_grids_are_members(self, config):
        system = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(1.0)), (3.0, gevrey_sequence(2.0)))))
        assert lambda_grid(system, config) == (1.0, 3.0)
        assert probe_grid(system, config) == (1.0, 3.0)

    def test_shell_grid(self):
        points, index = shell_grid(1, 1e3, 4)
        assert points.shape == (9, 1)
        assert index.tolist() == [0, 1, 1, 2, 2, 3, 3, 4, 4]
        assert np.max(np.abs(points)) == pytest.approx(1e3)

    def test_unit_ball_mesh(self):
        mesh = unit_ball_mesh(2, 3)
        assert mesh.shape == (5, 2)
        assert np.all(np.linalg.norm(mesh, axis=1) <= 1.0 + 1e-12)

    @pytest.mark.parametrize(
        "values, expected",
        [
            ([1.0, 1.0, 1.0, 1.0], "bounded"),
            ([1.0, 2.0, 3.0, 4.0], "diverging"),
            ([1.0, 2.0, 1.5, 1.7], "undecided"),
            ([1.0, np.nan, 1.0, 1.0], "undecided"),
        ],
    )
    def test_tail_trend(self, values, expected):
        assert tail_trend(np.array(values), 3, 0.01) == expected


class TestSequenceConditions:
    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_dilated_gevrey(self, kind, config):
        system = gevrey_system(1.0)
        assert system_log_convex(system, config).is_witnessed
        L = check_L(system, kind, config)
        assert L.is_witnessed
        assert L.horizon["fast_path"] == "dilated"
        assert check_I(system, kind, config).is_witnessed
        wI = check_wI(system, kind, config)
        assert wI.is_witnessed
        assert wI.witness["H"] == 1.0

    def test_wI_constant_is_associated_function(self, config):
        wI = check_wI(gevrey_system(1.0), Kind.ROUMIEU, config)
        # C_R = exp omega_{M^lambda}(R), with omega_{q!}(2) = log 2
        detail = next(d for d in wI.details if d["lambda"] == 1.0)
        assert detail["log_C@R=2"] == pytest.approx(math.log(2.0))

    def test_omega_generated_L(self, config):
        verdict = check_L(WeightSequenceSystem(BMTGenerated(PowerMinusOne(1.0))), Kind.ROUMIEU, config)
        assert verdict.is_witnessed
        assert verdict.witness["spot_check"] == "witnessed"

    def test_L_functional_replay(self, config):
        system = gevrey_system(1.0)
        replay = check_L_functional(system, Kind.ROUMIEU, config=config)
        assert replay.is_witnessed
        assert replay.witness["max_excess"] <= 0.0

    def test_L_functional_absorbs_rounding_of_large_values(self, config):
        replay = check_L_functional(gevrey_system(0.5), Kind.BEURLING, config=config)
        assert replay.is_witnessed
        assert replay.witness["max_excess"] <= 0.0

    def test_L_functional_without_certificate(self, config):
        verdict = check_L_functional(gevrey_system(1.0), Kind.ROUMIEU, RelationVerdict.inconclusive("none"), config)
        assert not verdict.is_witnessed and not verdict.is_falsified


class TestSequenceRelations:
    def test_gevrey_orders(self, config):
        assert system_relation_sequences(gevrey_system(0.5), gevrey_system(1.0), Kind.ROUMIEU, config).is_witnessed
        assert system_relation_sequences(gevrey_system(1.0), gevrey_system(0.5), Kind.ROUMIEU, config).is_falsified

    def test_identity(self, config):
        verdict = system_relation_sequences(gevrey_system(1.0), gevrey_system(1.0), Kind.BEURLING, config)
        assert verdict.horizon["fast_path"] == "identity"

    def test_omega_generated(self, config):
        M = WeightSequenceSystem(BMTGenerated(PowerMinusOne(0.5)))
        N = WeightSequenceSystem(BMTGenerated(PowerMinusOne(1 / 3)))
        assert system_relation_sequences(M, N, Kind.ROUMIEU, config).is_witnessed
        assert system_relation_sequences(N, M, Kind.ROUMIEU, config).is_falsified

    def test_explicit_search(self, config):
        M = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(0.5)), (2.0, gevrey_sequence(1.0)))))
        N = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(2.0)), (2.0, gevrey_sequence(3.0)))))
        verdict = system_relation_sequences(M, N, Kind.ROUMIEU, config)
        assert verdict.is_witnessed
        assert verdict.witness["probes"] == 2

    def test_explicit_search_falsified(self, config):
        M = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(2.0)), (2.0, gevrey_sequence(3.0)))))
        N = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(0.5)), (2.0, gevrey_sequence(1.0)))))
        assert system_relation_sequences(M, N, Kind.ROUMIEU, config).is_falsified

    def test_dimension_mismatch(self, config):
        two = WeightSequenceSystem(Dilated(gevrey_sequence(1.0, dimension=2)), dimension=2)
        with pytest.raises(DimensionMismatchError):
            system_relation_sequences(gevrey_system(1.0), two, Kind.ROUMIEU, config)


class TestFunctionConditions:
    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_omega_weights(self, kind, config):
        wM = check_wM(omega_weights(0.5), kind, config)
        assert wM.is_witnessed
        assert wM.horizon["fast_path"] == "omega (alpha)"
        assert check_M(omega_weights(0.5), kind, config).is_witnessed

    def test_shifted_weights(self, config):
        shifted = WeightFunctionSystem(ShiftedWeights(2.0, omega_weights(0.5)))
        base = check_wM(omega_weights(0.5), Kind.ROUMIEU, config)
        verdict = check_wM(shifted, Kind.ROUMIEU, config)
        assert verdict.horizon["fast_path"] == "peetre"
        assert verdict.log_constant == pytest.approx(base.log_constant + 2.0 * math.log(2.0))

    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_numeric_wM_on_shells(self, kind, config):
        system = WeightFunctionSystem(DilatedWeights(gevrey_sequence(1.0)))
        verdict = check_wM(system, kind, update_config(config, "systems", {"shell_points": 24}))
        assert verdict.is_witnessed
        assert verdict.witness["probes"] == 5

    @pytest.mark.slow
    def test_derived_system_M(self, config):
        derived = derived_function_system(gevrey_system(1.0))
        assert check_M(derived, Kind.ROUMIEU, update_config(config, "systems", {"shell_points": 16})).is_witnessed

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_derived_omega_system_wM(self, kind, config):
        derived = derived_function_system(WeightSequenceSystem(BMTGenerated(PowerMinusOne(0.5))))
        verdict = check_wM(derived, kind, update_config(config, "systems", {"shell_points": 24}))
        assert verdict.is_witnessed


class TestFunctionRelations:
    def test_omega_weights(self, config):
        assert system_relation_functions(omega_weights(0.5), omega_weights(1 / 3), Kind.ROUMIEU, config).is_witnessed
        assert system_relation_functions(omega_weights(1 / 3), omega_weights(0.5), Kind.ROUMIEU, config).is_falsified

    def test_dilated_weights(self, config):
        W = WeightFunctionSystem(DilatedWeights(gevrey_sequence(0.5)))
        V = WeightFunctionSystem(DilatedWeights(gevrey_sequence(1.0)))
        assert system_relation_functions(W, V, Kind.ROUMIEU, config).is_witnessed
        assert system_relation_functions(V, W, Kind.ROUMIEU, config).is_falsified

    def test_radial_comparison_without_fast_paths(self, config):
        verdict = system_relation_functions(omega_weights(0.5), omega_weights(1 / 3), Kind.ROUMIEU, config, fast_paths=False)
        assert verdict.is_witnessed
        assert "fast_path" not in verdict.horizon

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_derived_systems_agree_with_sequences(self, kind, config):
        M = gevrey_system(2.0)
        N = WeightSequenceSystem(BMTGenerated(PowerMinusOne(0.5)))
        assert system_relation_sequences(M, N, kind, config).is_witnessed
        verdict = system_relation_functions(derived_function_system(M), derived_function_system(N), kind, config)
        assert verdict.is_witnessed
        assert verdict.horizon["existential"] == "2^-8..2^8"


def test_replay_certificate():
    original = RelationVerdict.witnessed({"C": 2.0})
    assert replay_certificate(original, RelationVerdict.witnessed({"C": 3.0}), slack=2.0)
    assert not replay_certificate(original, RelationVerdict.witnessed({"C": 5.0}), slack=2.0)
    assert not replay_certificate(original, RelationVerdict.inconclusive("lost"), slack=2.0)
    assert replay_certificate(RelationVerdict.inconclusive("open"), RelationVerdict.inconclusive("open"), slack=2.0)
