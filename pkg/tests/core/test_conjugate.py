import math

import numpy as np
import pytest

from gsinclusion.core.conjugate import (
    LogPower,
    PowerMinusOne,
    SampledConvexPhi,
    check_convexity,
    closed_form_phi_star,
    conjugate_table,
    legendre_transform,
    omega_name,
    omega_value,
    phi_samples,
    phi_star,
)


def sampled_square(x_max: float = 10.0, points: int = 2001) -> SampledConvexPhi:
    x = np.linspace(0.0, x_max, points)
    return SampledConvexPhi(tuple(x), tuple(x**2))


class TestFamilies:
    def test_power_minus_one(self):
        omega = PowerMinusOne(0.5)
        np.testing.assert_allclose(omega_value(omega, np.array([0.5, 1.0, 4.0])), [0.0, 0.0, 1.0])
        assert omega_name(omega) == "pow(rho=0.5)"

    def test_log_power(self):
        omega = LogPower(2.0)
        assert omega_value(omega, np.array([math.e**3]))[0] == pytest.approx(9.0)

    @pytest.mark.parametrize("bad", [lambda: PowerMinusOne(0.0), lambda: LogPower(0.5)])
    def test_invalid_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_closed_form_pow(self):
        values, covered = closed_form_phi_star(PowerMinusOne(1.0), np.array([0.5, 1.0, 2.0]))
        np.testing.assert_allclose(values, [0.0, 0.0, 2 * math.log(2) - 1])
        assert covered.all()

    def test_closed_form_logpow_one_is_capped(self):
        values, covered = closed_form_phi_star(LogPower(1.0), np.array([0.5, 2.0]))
        assert covered.tolist() == [True, False]
        assert values[0] == 0.0 and math.isnan(values[1])


class TestSampledPhi:
    def test_rejects_non_convex(self):
        with pytest.raises(ValueError, match="not convex"):
            SampledConvexPhi((0.0, 1.0, 2.0), (0.0, 2.0, 3.0))

    def test_rejects_bad_start(self):
        with pytest.raises(ValueError):
            SampledConvexPhi((0.0, 1.0, 2.0), (1.0, 2.0, 3.0))

    def test_convexity_reports_worst_sample(self):
        convex, index, worst = check_convexity(np.arange(5.0), np.array([0.0, 1.0, 3.0, 4.0, 8.0]))
        assert not convex
        assert index == 2
        assert worst == pytest.approx(-1.0)

    def test_linear_continuation(self):
        omega = SampledConvexPhi((0.0, 1.0, 2.0), (0.0, 1.0, 3.0))
        assert omega_value(omega, np.array([math.e**3]))[0] == pytest.approx(5.0)


class TestLegendre:
    def test_matches_closed_form_pow(self):
        omega = PowerMinusOne(1.0)
        y = np.array([0.5, 2.0, 5.0, 10.0])
        x, phi = phi_samples(omega, float(y.max()))
        values, covered = legendre_transform(x, phi, y)
        expected, _ = closed_form_phi_star(omega, y)
        assert covered.all()
        np.testing.assert_allclose(values, expected, rtol=1e-5, atol=1e-8)

    def test_quadratic_samples_are_exact(self):
        y = np.array([0.0, 1.0, 4.0, 12.0])
        values, covered = phi_star(sampled_square(), y)
        assert covered.all()
        np.testing.assert_allclose(values, y**2 / 4.0, rtol=1e-9, atol=1e-12)

    def test_uncovered_beyond_last_slope(self):
        _, covered = phi_star(sampled_square(), np.array([25.0]))
        assert not covered[0]

    def test_conjugate_table(self):
        x, phi = phi_samples(LogPower(2.0), 10.0)
        table = conjugate_table(x, phi, 10.0, y_points=256)
        assert table.covered.all()
        assert table.y[0] == 0.0
        assert table.max_slope >= 10.0
        np.testing.assert_allclose(table.covered_values, table.covered_y**2 / 4.0, rtol=1e-6, atol=1e-10)

    def test_conjugate_table_marks_uncovered(self):
        omega = sampled_square(x_max=2.0, points=101)
        x, phi = phi_samples(omega, 10.0)
        table = conjugate_table(x, phi, 10.0, y_points=64)
        assert not table.covered.all()
        assert np.isnan(table.values[~table.covered]).all()
        assert table.covered_y.max() <= table.max_slope

    def test_requires_positive_range(self):
        x, phi = phi_samples(LogPower(2.0), 1.0)
        with pytest.raises(ValueError):
            conjugate_table(x, phi, 0.0)
