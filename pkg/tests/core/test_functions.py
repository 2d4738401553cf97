import math

import numpy as np
import pytest

from gsinclusion.core.conjugate import LogPower, PowerMinusOne, SampledConvexPhi
from gsinclusion.core.data_structures import VerdictStatus
from gsinclusion.core.exceptions import HorizonError
from gsinclusion.core.functions import (
    AssocDilate,
    FromOmega,
    One,
    PolyShift,
    PowerExp,
    Product,
    SampledGrowth,
    as_points,
    biconjugate,
    check_bmt_conditions,
    compare_weight_functions,
    describe_weight,
    eval_weight,
    log_weight,
    sequence_from_bmt,
    young_conjugate,
)
from gsinclusion.core.sequences import evaluate, gevrey_sequence, table_sequence


def sampled_square() -> SampledConvexPhi:
    x = np.linspace(0.0, 20.0, 2001)
    return SampledConvexPhi(tuple(x), tuple(x**2))


class TestWeights:
    def test_elementary_weights(self):
        assert eval_weight(One(), 3.0) == 1.0
        assert eval_weight(PowerExp(1.0, 2.0), 2.0) == pytest.approx(math.exp(4.0))
        assert eval_weight(PolyShift(2.0, One()), (1.0, 1.0)) == pytest.approx(3.0)
        assert eval_weight(FromOmega(PowerMinusOne(1.0), lam=2.0), 5.0) == pytest.approx(math.exp(2.0))

    def test_associated_weight(self):
        assert eval_weight(AssocDilate(gevrey_sequence(1.0)), 3.0) == pytest.approx(4.5)
        assert eval_weight(AssocDilate(gevrey_sequence(1.0), lam=2.0), 6.0) == pytest.approx(4.5)

    def test_product_adds_logs(self):
        w = Product((PowerExp(1.0, 1.0), PolyShift(1.0, One())))
        points = as_points([0.0, 2.0])
        evaluation = log_weight(w, points)
        np.testing.assert_allclose(evaluation.log_values, [0.0, 2.0 + 0.5 * math.log(5.0)])
        assert evaluation.saturated.all()

    def test_unsaturated_weight_raises(self):
        short = table_sequence([1.0] + [math.factorial(q) for q in range(1, 11)])
        with pytest.raises(HorizonError):
            eval_weight(AssocDilate(short), 1e6)

    def test_as_points(self):
        assert as_points(2.0).shape == (1, 1)
        assert as_points([1.0, 2.0, 3.0]).shape == (3, 1)
        assert as_points([1.0, 2.0, 3.0], dimension=3).shape == (1, 3)

    def test_describe(self):
        assert describe_weight(PolyShift(2.0, PowerExp(1.0, 0.5))) == "poly(k=2,powexp(a=1,b=0.5))"

    @pytest.mark.parametrize(
        "bad", [lambda: PowerExp(-1.0, 1.0), lambda: PolyShift(-1.0, One()), lambda: FromOmega(LogPower(2.0), lam=0.0)]
    )
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestBMTConditions:
    @pytest.mark.parametrize("omega", [PowerMinusOne(0.5), PowerMinusOne(1.0), LogPower(2.0)])
    def test_families_satisfy_all(self, omega):
        verdicts = check_bmt_conditions(omega)
        assert all(v.is_witnessed for v in verdicts.values())

    def test_log_is_not_a_bmt_weight(self):
        verdicts = check_bmt_conditions(LogPower(1.0))
        assert verdicts["gamma"].is_falsified
        assert verdicts["delta"].is_witnessed

    def test_sampled_square(self):
        verdicts = check_bmt_conditions(sampled_square())
        assert verdicts["alpha"].is_witnessed
        assert verdicts["gamma"].is_witnessed
        assert verdicts["delta"].is_witnessed
        # the doubling ratio peaks at the first grid point above e
        assert 2.5 < verdicts["alpha"].witness["bound"] <= (1.0 + math.log(2.0)) ** 2 + 1e-9

    def test_small_horizon(self):
        with pytest.raises(ValueError):
            check_bmt_conditions(PowerMinusOne(1.0), t_max=3.0)


class TestConjugateAndSequences:
    def test_young_conjugate_round_trip(self):
        table = young_conjugate(LogPower(2.0), 10.0)
        x = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(biconjugate(table, x), x**2, rtol=1e-6)

    def test_sequence_from_pow(self):
        M = sequence_from_bmt(PowerMinusOne(1.0), lam=1.0, q_max=10)
        assert evaluate(M, 2) == pytest.approx(4.0 / math.e)
        assert evaluate(M, 0) == 1.0

    def test_sequence_from_log_is_out_of_range(self):
        with pytest.raises(HorizonError):
            sequence_from_bmt(LogPower(1.0), lam=1.0, q_max=10)


class TestComparison:
    def test_power_family(self):
        assert compare_weight_functions(PowerMinusOne(0.5), PowerMinusOne(1 / 3)).is_witnessed
        assert compare_weight_functions(PowerMinusOne(1 / 3), PowerMinusOne(0.5)).is_falsified

    def test_mixed_families(self):
        assert compare_weight_functions(PowerMinusOne(0.5), LogPower(2.0)).is_witnessed
        assert compare_weight_functions(LogPower(2.0), PowerMinusOne(0.5)).is_falsified

    def test_sampled_against_family(self):
        x = np.linspace(0.0, 20.0, 2001)
        log_t = SampledConvexPhi(tuple(x), tuple(x))
        verdict = compare_weight_functions(LogPower(2.0), log_t)
        assert verdict.is_witnessed
        assert verdict.witness["bound"] <= 1.0

    def test_sampled_growth_without_bmt_conditions(self):
        # log(1 + t) is concave and positive on [0, 1], so no BMT weight
        t = np.concatenate(([0.0], np.geomspace(1e-3, 1e6, 400)))
        sigma = SampledGrowth(tuple(t), tuple(np.log1p(t)))
        verdict = compare_weight_functions(LogPower(2.0), sigma)
        assert verdict.is_witnessed
        assert verdict.witness["bound"] < 1.5
        assert verdict.horizon["T"] <= 1e6

    def test_sampled_growth_rising_ratio(self):
        t = np.linspace(0.0, 1e6, 1001)
        assert not compare_weight_functions(PowerMinusOne(0.5), SampledGrowth(tuple(t), tuple(t))).is_witnessed

    def test_sampled_growth_too_short(self):
        verdict = compare_weight_functions(PowerMinusOne(0.5), SampledGrowth((0.0, 2.0), (0.0, 1.0)))
        assert verdict.status is VerdictStatus.INCONCLUSIVE
        assert "known only up to t = 2" in verdict.note

    @pytest.mark.parametrize(
        "t, values",
        [((0.0,), (0.0,)), ((1.0, 2.0), (0.0, 1.0)), ((0.0, 2.0, 1.0), (0.0, 1.0, 2.0)), ((0.0, 1.0), (1.0, 0.0))],
    )
    def test_sampled_growth_validation(self, t, values):
        with pytest.raises(ValueError):
            SampledGrowth(t, values)
