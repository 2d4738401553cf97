import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gsinclusion.core.conjugate import PowerMinusOne
from gsinclusion.core.data_structures import Kind, RelationVerdict, SpaceVariant
from gsinclusion.core.exceptions import DimensionMismatchError, HorizonError
from gsinclusion.core.functions import FromOmega, One, eval_weight
from gsinclusion.core.sequences import gevrey_sequence
from gsinclusion.core.smooth import Gaussian, PolyBump
from gsinclusion.core.spaces import (
    BanachSpaceModel,
    GridSpec,
    SequenceData,
    default_grid,
    describe_model,
    ed_norm,
    lattice_constant,
    log_norm_E,
    lp_norm,
    make_model,
    membership_verdict,
    norm_E,
    order_trend,
    polynomial_multiplier_check,
    probe_characters,
    probe_delta_sequences,
    random_sequence,
    sample_function,
    sandwich_check,
    seminorm,
    sequence_norm,
    synthesized,
    tail_certificate,
    tiling,
    weighted_ed_inclusion_check,
    weighted_ed_norm,
    weighted_L1_embedding_check,
)
from gsinclusion.core.systems import (
    Dilated,
    ExplicitSequences,
    ExplicitWeights,
    OmegaWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
)

SMALL_1D = GridSpec(1, 8.0, 0.25)
SMALL_2D = GridSpec(2, 4.0, 0.5)
GAUSSIAN_GRID = GridSpec(1, 16.0, 2.0**-4)

# (pi/2)^(1/4) = ||exp(-x^2)||_{L^2}
GAUSSIAN_L2 = (math.pi / 2.0) ** 0.25


def single_member_systems(h: float):
    M = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(0.5, h=h)),)))
    W = WeightFunctionSystem(ExplicitWeights(((1.0, One()),)))
    return M, W


def omega_weights(rho: float) -> WeightFunctionSystem:
    return WeightFunctionSystem(OmegaWeights(PowerMinusOne(rho)))


class TestGrids:
    def test_geometry(self):
        grid = default_grid(1)
        assert grid.per_axis == 4096
        assert grid.per_unit == 64
        assert grid.index_of(0.0) == 2048
        assert grid.lattice_aligned
        assert grid.default_radius == 16
        assert default_grid(2).shape == (512, 512)

    @pytest.mark.parametrize("half_width, spacing", [(8.0, 0.3), (8.1, 0.25), (8.0, 0.0)])
    def test_rejects_misaligned_grids(self, half_width, spacing):
        with pytest.raises(ValueError):
            GridSpec(1, half_width, spacing)

    def test_no_default_in_three_dimensions(self):
        with pytest.raises(ValueError):
            default_grid(3)

    def test_models(self):
        assert describe_model(make_model(2)) == "L^2"
        assert describe_model(make_model(0)) == "L^0"
        assert describe_model(make_model((1.0, math.inf))) == "L^(1,inf)"
        assert make_model((1.0, 2.0)).dimension == 2
        with pytest.raises(ValueError):
            BanachSpaceModel(SpaceVariant.MIXED, SMALL_1D)
        with pytest.raises(ValueError):
            BanachSpaceModel(SpaceVariant.LP, SMALL_1D, p=0.5)


class TestNorms:
    def test_lp_norm_ignores_padding(self):
        values = np.array([3.0, -4.0, 1e-300])
        padded = np.concatenate([np.zeros(50), values, np.zeros(7)])
        for p in (1.0, 2.0, 3.0, math.inf):
            assert lp_norm(padded, p) == lp_norm(values, p)
        assert lp_norm(np.zeros(5), 2.0) == 0.0

    @pytest.mark.parametrize(
        "variant, p", [(SpaceVariant.LP, 1.0), (SpaceVariant.LP, 2.0), (SpaceVariant.LP, math.inf), (SpaceVariant.L0, math.inf)]
    )
    def test_ed_is_sequence_norm_exactly(self, rng, variant, p):
        model = BanachSpaceModel(variant, SMALL_1D, p)
        c = random_sequence(rng, 3)
        assert ed_norm(model, c) == sequence_norm(model, c)

    def test_ed_mixed_is_exact(self, rng):
        model = BanachSpaceModel(SpaceVariant.MIXED, SMALL_2D, 1.0, 3.0)
        c = random_sequence(rng, 2, dimension=2)
        assert ed_norm(model, c) == sequence_norm(model, c)

    def test_riemann_sum(self):
        f = sample_function(Gaussian(1.0), default_grid(1))
        model = make_model(2)
        assert norm_E(model, f) == pytest.approx(GAUSSIAN_L2, rel=1e-10)
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(f.samples))
        assert log_norm_E(model, log_abs) == pytest.approx(math.log(norm_E(model, f)), rel=1e-10)

    def test_step_functions_use_cells(self):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 1.0)
        assert norm_E(model, np.ones(SMALL_1D.shape)) == 16.0

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            norm_E(make_model(2), np.ones(10))

    def test_tiling_limits(self, rng):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        with pytest.raises(ValueError):
            tiling(model, random_sequence(rng, 8))
        with pytest.raises(DimensionMismatchError):
            tiling(model, random_sequence(rng, 2, dimension=2))
        with pytest.raises(HorizonError):
            SequenceData.delta((5,), 3)

    def test_weighted_ed_norm_of_delta(self):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        delta = SequenceData.delta((3,), 4)
        weight = FromOmega(PowerMinusOne(0.5), 1.0)
        assert weighted_ed_norm(model, delta, weight) == pytest.approx(eval_weight(weight, 3.0))

    def test_lattice_constant(self):
        assert lattice_constant(1, 0) == pytest.approx(2.0)
        assert lattice_constant(1, 1) == pytest.approx(4.0)

    @settings(max_examples=40, deadline=None)
    @given(
        g=arrays(np.float64, SMALL_1D.shape, elements=st.floats(min_value=-1e3, max_value=1e3)),
        t=arrays(np.float64, SMALL_1D.shape, elements=st.floats(min_value=0.0, max_value=1.0)),
        p=st.sampled_from([1.0, 2.0, 3.5, math.inf]),
    )
    def test_norm_is_solid(self, g, t, p):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, p)
        assert norm_E(model, g * t) <= norm_E(model, g) * (1.0 + 1e-12)


class TestCertificates:
    @pytest.mark.parametrize("variant, p", [(SpaceVariant.LP, 1.0), (SpaceVariant.LP, 2.0), (SpaceVariant.L0, math.inf)])
    def test_sandwich(self, rng, variant, p):
        model = BanachSpaceModel(variant, SMALL_1D, p)
        report = sandwich_check(model, random_sequence(rng, 3))
        assert report.passed

    @pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
    def test_weighted_L1_embedding(self, p):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, p)
        report = weighted_L1_embedding_check(model, samples=10)
        assert report.passed
        assert report.observed <= 1.0

    def test_tail(self):
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        assert tail_certificate(model, sample_function(Gaussian(1.0), GAUSSIAN_GRID)).is_witnessed
        flat = synthesized(GAUSSIAN_GRID, np.ones(GAUSSIAN_GRID.shape))
        assert not tail_certificate(model, flat).is_witnessed


class TestSeminorms:
    @pytest.mark.parametrize(
        "maxima, expected",
        [
            ([-np.inf, -np.inf], "bounded"),
            ([0.0, 1.0, 2.0, 3.0], "diverging"),
            ([3.0, 2.0, 1.0, 0.0], "bounded"),
            ([0.0, 1.0], "undecided"),
            ([0.0, 1.0, 0.5, 0.7], "undecided"),
        ],
    )
    def test_order_trend(self, maxima, expected):
        assert order_trend(np.array(maxima), 6, 0.01) == expected

    def test_gaussian_saturates(self):
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        # ||f^(q)||_2 / (4^q sqrt(q!)) decreases, so the sup sits at q = 0
        value = seminorm(f, gevrey_sequence(0.5, h=4.0), One(), model, alpha_max=24)
        assert value.saturated
        assert value.trend == "bounded"
        assert value.log_value == pytest.approx(math.log(GAUSSIAN_L2), rel=1e-8)

    def test_gaussian_diverges_for_small_h(self):
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        value = seminorm(f, gevrey_sequence(0.5, h=0.5), One(), model, alpha_max=24)
        assert value.trend == "diverging"
        assert not value.saturated

    def test_needs_derivatives(self):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        with pytest.raises(ValueError):
            seminorm(synthesized(SMALL_1D, np.ones(SMALL_1D.shape)), gevrey_sequence(1.0), One(), model)
        with pytest.raises(ValueError):
            seminorm(sample_function(PolyBump(4, 1.0), SMALL_1D), gevrey_sequence(1.0), One(), model, alpha_max=8)
        with pytest.raises(HorizonError):
            seminorm(sample_function(Gaussian(1.0), SMALL_1D), gevrey_sequence(1.0, q_max=10), One(), model, alpha_max=12)


class TestMembership:
    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_gaussian_member(self, kind, config):
        M, W = single_member_systems(4.0)
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        verdict = membership_verdict(f, M, W, kind, model, alpha_max=24, config=config)
        assert verdict.is_witnessed
        assert verdict.witness["log_C"] == pytest.approx(math.log(GAUSSIAN_L2), rel=1e-8)

    @pytest.mark.parametrize("kind", [Kind.BEURLING, Kind.ROUMIEU])
    def test_gaussian_not_member(self, kind, config):
        M, W = single_member_systems(0.5)
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        assert membership_verdict(f, M, W, kind, model, alpha_max=24, config=config).is_falsified

    def test_dimensions_must_agree(self, config):
        M, W = single_member_systems(4.0)
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        with pytest.raises(DimensionMismatchError):
            membership_verdict(f, M, WeightFunctionSystem(OmegaWeights(PowerMinusOne(0.5)), 2), Kind.ROUMIEU, make_model(2))

    @pytest.mark.slow
    def test_polynomial_multipliers(self, config):
        M, W = single_member_systems(4.0)
        f = sample_function(Gaussian(1.0), GAUSSIAN_GRID)
        model = BanachSpaceModel(SpaceVariant.LP, GAUSSIAN_GRID, 2.0)
        report = polynomial_multiplier_check(f, M, W, Kind.ROUMIEU, 1, model, alpha_max=24, config=config)
        assert report.observed == 3.0
        names = [name for name, _ in report.verdicts]
        assert names[-2:] == ["f in weighted space", "f P in space"]
        assert all(v.is_witnessed for _, v in report.verdicts[-2:])


class TestProbes:
    def test_delta_identity(self, config):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        W = omega_weights(0.5)
        verdict = probe_delta_sequences(W, W, Kind.ROUMIEU, model, config)
        assert verdict.is_witnessed
        assert verdict.horizon["agrees"]
        assert verdict.horizon["box_deviation"] <= 1e-12

    def test_delta_probe_agrees_with_relation(self, config):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        verdict = probe_delta_sequences(omega_weights(0.5), omega_weights(1 / 3), Kind.ROUMIEU, model, config)
        assert verdict.is_witnessed
        assert verdict.horizon["agrees"]

    def test_character_identity(self, config):
        M = WeightSequenceSystem(Dilated(gevrey_sequence(1.0)))
        verdict = probe_characters(M, M, Kind.ROUMIEU, make_model(2), alpha_max=16, config=config)
        assert verdict.is_witnessed
        assert verdict.horizon["cell_deviation"] < 1e-9
        assert verdict.horizon["unit_norm"] == 1.0

    def test_character_probe_needs_one_dimension(self, config):
        M = WeightSequenceSystem(Dilated(gevrey_sequence(1.0, dimension=2)), dimension=2)
        with pytest.raises(DimensionMismatchError):
            probe_characters(M, M, Kind.ROUMIEU, make_model(2), config=config)


class TestWeightedInclusion:
    def test_without_certificate(self):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        W = omega_weights(0.5)
        report = weighted_ed_inclusion_check(model, W, W, RelationVerdict.inconclusive("open"))
        assert report.passed
        assert "no certificate" in report.note

    def test_identity_certificate(self):
        model = BanachSpaceModel(SpaceVariant.LP, SMALL_1D, 2.0)
        W = omega_weights(0.5)
        certificate = RelationVerdict.witnessed({"lambda": 1.0, "mu": 1.0, "log_C": 0.0})
        report = weighted_ed_inclusion_check(model, W, W, certificate, samples=5)
        assert report.passed
        assert report.observed == pytest.approx(1.0)
