import math

import numpy as np
import pytest

from gsinclusion.core.conjugate import PowerMinusOne
from gsinclusion.core.data_structures import Kind, SpaceVariant, WindowKind
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.functions import One
from gsinclusion.core.operators import (
    Parametrix1D,
    decay_norm,
    decay_upgrade,
    evaluation,
    evaluation_check,
    interpolating_window,
    make_window,
    multiply,
    parametrix_reproduce,
    partition_window,
    periodization_tail,
    periodize,
    sample_convolution,
    sample_convolution_check,
    synthesis,
    synthesis_bound_check,
    translate,
    upgrade_membership,
    window_invariant_error,
)
from gsinclusion.core.sequences import gevrey_sequence
from gsinclusion.core.smooth import Gaussian, Plateau, Poly, PolyBump, Scaled, Trig, Zero, gaussian
from gsinclusion.core.spaces import (
    BanachSpaceModel,
    GridSpec,
    SequenceData,
    random_sequence,
    sample_function,
    synthesized,
    tiling,
)
from gsinclusion.core.systems import (
    ExplicitSequences,
    ExplicitWeights,
    OmegaWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
)

GRID = GridSpec(1, 8.0, 0.25)
FINE = GridSpec(1, 4.0, 2.0**-6)


@pytest.fixture
def model():
    return BanachSpaceModel(SpaceVariant.LP, GRID, 2.0)


class TestWindows:
    def test_decay_norm(self):
        assert decay_norm(synthesized(GRID, np.ones(GRID.shape))) == pytest.approx(65.0)
        assert decay_norm(Gaussian(1.0), GRID) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            decay_norm(Gaussian(1.0))

    def test_window_dimension(self):
        with pytest.raises(DimensionMismatchError):
            make_window(gaussian(1.0, dimension=2), GRID)

    def test_interpolating_window(self):
        window = interpolating_window(Gaussian(0.5), GRID)
        assert window.kind is WindowKind.INTERPOLATING
        assert window_invariant_error(window) < 1e-10

    def test_interpolating_window_normalizes(self):
        window = interpolating_window(Scaled(Gaussian(0.5), 3.0), GRID)
        origin = window.sample().samples[GRID.index_of(0.0)]
        assert abs(origin - 1.0) < 1e-10

    def test_vanishing_phi_rejected(self):
        with pytest.raises(ValueError, match="vanishes at the origin"):
            interpolating_window(Poly((0.0, 1.0)), GRID)

    def test_partition_of_unity(self):
        window = partition_window(Gaussian(1.0), GRID)
        assert window.kind is WindowKind.PARTITION
        assert window_invariant_error(window) < 1e-8

    def test_generic_has_no_invariant(self):
        with pytest.raises(ValueError):
            window_invariant_error(make_window(Gaussian(1.0), GRID))


class TestLatticeOperators:
    def test_translate_closed_form(self):
        moved = translate(sample_function(Gaussian(1.0), GRID), (1,))
        np.testing.assert_allclose(moved.samples, np.exp(-((GRID.axis - 1.0) ** 2)))

    def test_translate_samples(self, model):
        moved = translate(tiling(model, SequenceData.delta((0,), 4)), (2,))
        np.testing.assert_array_equal(moved.samples, tiling(model, SequenceData.delta((2,), 4)).samples)

    def test_translate_dimension(self):
        with pytest.raises(DimensionMismatchError):
            translate(sample_function(Gaussian(1.0), GRID), (1, 0))

    def test_sample_convolution(self):
        # integral of (1 - t^2)^2 over [-1, 1]
        exact = sample_convolution(sample_function(Poly((1.0,)), GRID), PolyBump(2, 1.0))
        np.testing.assert_allclose(exact.values, 16.0 / 15.0)
        riemann = sample_convolution(synthesized(GRID, np.ones(GRID.shape)), PolyBump(2, 1.0))
        np.testing.assert_allclose(riemann.values, 16.0 / 15.0, rtol=1e-3)

    def test_sample_convolution_stays_in_box(self):
        with pytest.raises(ValueError, match="past the box"):
            sample_convolution(sample_function(Gaussian(1.0), GRID), PolyBump(2, 1.0), radius=8)
        with pytest.raises(ValueError):
            sample_convolution(sample_function(Gaussian(1.0), GRID), Gaussian(1.0))

    def test_sample_convolution_check(self, model):
        assert sample_convolution_check(model, sample_function(Gaussian(1.0), GRID), PolyBump(4, 1.0)).passed

    def test_synthesis_interpolates(self, rng):
        window = interpolating_window(Gaussian(0.5), GRID)
        c = random_sequence(rng, 3, support=2)
        recovered = evaluation(synthesis(c, window), radius=3)
        np.testing.assert_allclose(recovered.values, c.values, atol=1e-10)

    def test_synthesis_bound(self, rng, model):
        window = interpolating_window(Gaussian(0.5), GRID)
        report = synthesis_bound_check(model, random_sequence(rng, 3), window)
        assert report.passed
        assert 0.0 < report.observed <= 1.0

    def test_evaluation_radius(self):
        with pytest.raises(ValueError):
            evaluation(sample_function(Gaussian(1.0), GRID), radius=8)

    def test_evaluation_check(self, model, config):
        V = WeightFunctionSystem(OmegaWeights(PowerMinusOne(0.5)))
        assert evaluation_check(sample_function(Gaussian(4.0), GRID), V, model, config=config).passed
        assert not evaluation_check(sample_function(Gaussian(0.01), GRID), V, model, config=config).passed


class TestPeriodization:
    def test_tail_bound_shrinks(self):
        near = periodization_tail(1.0, 1, 2, terms=1000)
        far = periodization_tail(1.0, 1, 8, terms=1000)
        assert 0.0 < far < near
        assert periodization_tail(2.0, 1, 2, terms=1000) == pytest.approx(2.0 * near)

    def test_partition_window_periodizes_to_one(self):
        window = partition_window(Gaussian(1.0), GRID)
        total = periodize(window, radius=4)
        centre = np.abs(GRID.axis) <= 1.0
        np.testing.assert_allclose(total.samples[centre], 1.0, atol=1e-8)

    def test_periodize_samples_matches_closed_form(self):
        closed = periodize(sample_function(Gaussian(1.0), GRID), radius=2)
        bare = periodize(synthesized(GRID, sample_function(Gaussian(1.0), GRID).samples), radius=2)
        centre = np.abs(GRID.axis) <= 2.0
        np.testing.assert_allclose(bare.samples[centre], closed.samples[centre], atol=1e-12)

    def test_multiply_needs_periodic(self):
        window = make_window(Gaussian(1.0), GRID)
        with pytest.raises(ValueError):
            multiply(window, sample_function(Gaussian(1.0), GRID))
        product = multiply(window, sample_function(Trig(((0, 1.0),)), GRID))
        np.testing.assert_allclose(product.samples, np.exp(-(GRID.axis**2)))


class TestDecayUpgrade:
    def test_normalized_at_origin(self):
        g = decay_upgrade(Gaussian(1.0), GRID)
        assert g.has_derivatives
        assert abs(g.samples[GRID.index_of(0.0)] - 1.0) < 1e-8

    def test_vanishing_convolution(self):
        with pytest.raises(ValueError, match="cannot normalize"):
            decay_upgrade(Zero(), GRID)

    @pytest.mark.slow
    def test_upgrade_is_not_refuted(self, config):
        grid = GridSpec(1, 16.0, 2.0**-4)
        g = decay_upgrade(Gaussian(1.0), grid)
        M = WeightSequenceSystem(ExplicitSequences(((1.0, gevrey_sequence(0.5, h=4.0)),)))
        W = WeightFunctionSystem(ExplicitWeights(((1.0, One()),)))
        assert not upgrade_membership(g, M, W, Kind.ROUMIEU, 0, alpha_max=16, config=config).is_falsified


class TestParametrix:
    @pytest.mark.parametrize(
        "kwargs",
        [{"order": 2}, {"cutoff": Plateau(0.5, 2.0, 3)}, {"cutoff": Plateau(0.5, 1.0, 1)}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            Parametrix1D(**kwargs)

    def test_kernel_pieces(self):
        p = Parametrix1D()
        t = np.array([0.0, 0.25, -0.25, 1.5])
        np.testing.assert_allclose(p.kernel(t), [0.0, 0.125, 0.125, 0.0])
        # chi is flat near the origin, so the remainder vanishes there
        np.testing.assert_allclose(p.remainder(t), 0.0)

    def test_reproduces_bump(self):
        report = parametrix_reproduce(Parametrix1D(), PolyBump(8, 0.5), FINE)
        assert report.max_error < 1e-6
        assert report.spacing == FINE.spacing
        assert report.delta_normalization == pytest.approx(1.0)
        assert report.points == 193

    @pytest.mark.parametrize("f", [PolyBump(2, 0.5), Gaussian(1.0)])
    def test_rejects_unsuitable_functions(self, f):
        with pytest.raises(ValueError):
            parametrix_reproduce(Parametrix1D(), f, FINE)

    def test_one_dimensional_only(self):
        with pytest.raises(DimensionMismatchError):
            parametrix_reproduce(Parametrix1D(), PolyBump(8, 0.5), GridSpec(2, 2.0, 0.25))
