import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gsinclusion.core.smooth import (
    CellAverage,
    Conjugate,
    Convolution,
    Gaussian,
    GaussHermite,
    Plateau,
    Poly,
    PolyBump,
    Product,
    Scaled,
    Shifted,
    SincWindow,
    TensorProduct,
    Trig,
    Zero,
    derivative,
    derivative_table,
    describe_function,
    evaluate,
    gaussian,
    is_periodic,
    power,
    smoothness,
    support_radius,
    times_monomial,
)

POINTS = np.linspace(-2.0, 2.0, 9)


class TestGaussians:
    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    def test_matches_symbolic_derivatives(self, a):
        x = sympy.Symbol("x")
        expression = sympy.exp(-sympy.Rational(a).limit_denominator(100) * x**2)
        table = derivative_table(Gaussian(a), 6, POINTS)
        for q in range(7):
            exact = sympy.lambdify(x, sympy.diff(expression, x, q), "numpy")(POINTS)
            np.testing.assert_allclose(table[q], exact, rtol=1e-10, atol=1e-12)

    def test_gauss_hermite(self):
        f = GaussHermite(1.0, (0.0, 1.0))
        np.testing.assert_allclose(derivative_table(f, 1, POINTS)[1], (1 - 2 * POINTS**2) * np.exp(-(POINTS**2)))

    def test_tensor_gaussian(self):
        f = gaussian(1.0, dimension=2)
        assert isinstance(f, TensorProduct)
        value = derivative(f, (1, 0), np.array([[1.0, 0.0]]))
        assert value[0] == pytest.approx(-2.0 * math.exp(-1.0))

    @settings(max_examples=30, deadline=None)
    @given(shift=st.floats(min_value=-3.0, max_value=3.0), q=st.integers(min_value=0, max_value=5))
    def test_shift_moves_the_table(self, shift, q):
        shifted = derivative_table(Shifted(Gaussian(1.0), shift), q, POINTS)
        np.testing.assert_allclose(shifted, derivative_table(Gaussian(1.0), q, POINTS - shift))


class TestBandLimited:
    def test_real_sinc(self):
        f = SincWindow(-0.5, 0.5)
        values = derivative_table(f, 1, np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(values[0].real, [1.0, 2.0 / math.pi, 0.0], atol=1e-12)
        np.testing.assert_allclose(values[0].imag, 0.0, atol=1e-12)
        assert abs(values[1][0]) < 1e-12

    def test_interpolating_window_vanishes_on_integers(self):
        values = evaluate(SincWindow(), np.arange(-5.0, 6.0))
        expected = np.zeros(11)
        expected[5] = 1.0
        np.testing.assert_allclose(np.abs(values), expected, atol=1e-12)


class TestCompactSupport:
    def test_bump(self):
        f = PolyBump(3, 1.0)
        x = np.array([-1.5, -0.5, 0.0, 0.5, 1.0])
        table = derivative_table(f, 1, x)
        np.testing.assert_allclose(table[0], [0.0, 0.75**3, 1.0, 0.75**3, 0.0])
        np.testing.assert_allclose(table[1], [0.0, 3 * 0.75**2, 0.0, -3 * 0.75**2, 0.0])
        assert smoothness(f) == 2.0
        assert support_radius(f) == 1.0

    def test_plateau(self):
        f = Plateau(0.5, 1.0, 3)
        values = derivative_table(f, 1, np.array([0.0, 0.5, 0.75, -0.75, 1.0, 2.0]))
        np.testing.assert_allclose(values[0], [1.0, 1.0, 0.5, 0.5, 0.0, 0.0], atol=1e-12)
        assert values[1][2] < 0 < values[1][3]

    @pytest.mark.parametrize("eps", [1e-5, 1e-7, 1e-9])
    def test_plateau_is_smooth_at_the_edges(self, eps):
        f = Plateau(0.5, 1.0, 3)
        table = derivative_table(f, 4, np.array([0.5 + eps, 1.0 - eps, 0.5, 1.0]))
        np.testing.assert_allclose(table[0], [1.0, 0.0, 1.0, 0.0], atol=1e-8)
        # derivatives up to the order vanish linearly in the distance to the edge
        assert np.all(np.abs(table[1:4, :2]) <= 2e4 * eps)
        np.testing.assert_array_equal(table[1:, 2:], 0.0)
        # and the next one jumps
        assert np.all(np.abs(table[4, :2]) > 1e3)

    def test_convolution_of_constant(self):
        f = Convolution(Poly((1.0,)), PolyBump(2, 1.0))
        np.testing.assert_allclose(evaluate(f, np.array([0.0, 3.0])), 16.0 / 15.0)
        assert support_radius(f) == math.inf

    def test_cell_average(self):
        f = CellAverage(Poly((0.0, 1.0)))
        table = derivative_table(f, 2, np.array([0.0, 2.0]))
        np.testing.assert_allclose(table[0], [-0.5, 1.5])
        np.testing.assert_allclose(table[1], 1.0)
        np.testing.assert_allclose(table[2], 0.0)


class TestAlgebra:
    def test_leibniz_product(self):
        f = Product(Poly((0.0, 1.0)), Gaussian(1.0))
        expected = derivative_table(GaussHermite(1.0, (0.0, 1.0)), 4, POINTS)
        np.testing.assert_allclose(derivative_table(f, 4, POINTS), expected, atol=1e-12)

    def test_power_and_monomial(self):
        assert evaluate(power(Poly((0.0, 2.0)), 3), np.array([1.0]))[0] == pytest.approx(8.0)
        assert evaluate(times_monomial(Gaussian(1.0), (1,)), np.array([1.0]))[0] == pytest.approx(math.exp(-1.0))
        with pytest.raises(ValueError):
            times_monomial(Gaussian(1.0), (1, 1))

    def test_trig_and_conjugate(self):
        f = Trig(((1, 1.0),))
        x = np.array([0.25])
        assert derivative_table(f, 1, x)[1][0] == pytest.approx(2j * math.pi * 1j)
        assert evaluate(Conjugate(f), x)[0] == pytest.approx(-1j)
        assert is_periodic(Scaled(f, 2.0))
        assert not is_periodic(Gaussian(1.0))

    def test_zero(self):
        assert not derivative_table(Zero(), 3, POINTS).any()

    def test_invalid_orders(self):
        with pytest.raises(ValueError):
            derivative_table(Gaussian(1.0), -1, POINTS)
        with pytest.raises(ValueError):
            derivative(Gaussian(1.0), (1, 0), POINTS)


@pytest.mark.parametrize(
    "f, text",
    [
        (Gaussian(0.5), "gaussian(a=0.5)"),
        (SincWindow(), "sinc"),
        (PolyBump(8, 1.0), "bump(deg=8,r=1)"),
        (Shifted(Gaussian(1.0), 2.0), "shift(gaussian(a=1),2)"),
        (Scaled(Gaussian(1.0), 1 + 2j), "scale(gaussian(a=1),1+2j)"),
        (TensorProduct((Gaussian(1.0), PolyBump(2, 1.0))), "tensor(gaussian(a=1),bump(deg=2,r=1))"),
    ],
)
def test_describe_function(f, text):
    assert describe_function(f) == text
