import pytest

from gsinclusion.core.conjugate import LogPower, PowerMinusOne
from gsinclusion.core.data_structures import (
    FUNCTION_RELATION,
    FUNCTION_SIDE_HYPOTHESES,
    NONTRIVIAL,
    SEQUENCE_RELATION,
    SEQUENCE_SIDE_HYPOTHESES,
    Conclusion,
    Kind,
    RelationVerdict,
)
from gsinclusion.core.decision import (
    VerdictTable,
    compare_functions,
    compare_sequences,
    condition_table,
    decide_inclusion,
    one_sided_conclusions,
    run_checks,
    witness_functions,
)
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.functions import SampledGrowth
from gsinclusion.core.parsing import parse_space
from gsinclusion.core.sequences import gevrey_sequence
from gsinclusion.core.smooth import Gaussian, TensorProduct
from gsinclusion.core.systems import Dilated, OmegaWeights, WeightFunctionSystem, WeightSequenceSystem

WITNESSED = RelationVerdict.witnessed({"C": 1.0})
FALSIFIED = RelationVerdict.falsified({"q": 3})
OPEN = RelationVerdict.inconclusive("horizon reached")


class TestVerdictTable:
    @pytest.mark.parametrize(
        "verdicts, code",
        [
            ((WITNESSED, WITNESSED), 0),
            ((WITNESSED, OPEN), 3),
            ((OPEN, FALSIFIED), 1),
            ((), 0),
        ],
    )
    def test_exit_code(self, verdicts, code):
        table = VerdictTable("subject", tuple((f"row {i}", v) for i, v in enumerate(verdicts)))
        assert table.exit_code == code

    def test_lookup(self):
        table = VerdictTable("subject", (("a", WITNESSED), ("b", FALSIFIED)))
        assert table.verdict("b") is FALSIFIED
        with pytest.raises(KeyError):
            table.verdict("c")
        assert [record["check"] for record in table.to_records()] == ["a", "b"]


@pytest.mark.parametrize("workers", [1, 3])
def test_run_checks_keeps_order(workers):
    tasks = [(f"task {i}", (lambda i=i: RelationVerdict.witnessed({"i": i}))) for i in range(6)]
    rows = run_checks(tasks, workers)
    assert [name for name, _ in rows] == [f"task {i}" for i in range(6)]
    assert [v.witness["i"] for _, v in rows] == list(range(6))


class TestConditionTable:
    def test_sequence_rows(self, config):
        table = condition_table(gevrey_sequence(1.0, q_max=32), Kind.ROUMIEU, config)
        names = [name for name, _ in table.rows]
        assert names == ["log-convex", "divergence", "superadditive", "M log-convex", "M [L]", "M [wI]", "M [I]"]
        assert table.verdict("log-convex").is_witnessed
        assert table.verdict("M [I]").is_witnessed

    def test_parallel_rows_match_serial(self, config):
        serial = condition_table(gevrey_sequence(2.0, q_max=32), Kind.BEURLING, config)
        parallel = condition_table(gevrey_sequence(2.0, q_max=32), Kind.BEURLING, config, workers=4)
        assert [(n, v.status) for n, v in serial.rows] == [(n, v.status) for n, v in parallel.rows]

    def test_omega_rows(self, config):
        table = condition_table(PowerMinusOne(0.5), Kind.ROUMIEU, config)
        names = [name for name, _ in table.rows]
        assert names[:3] == ["(alpha)", "(gamma)", "(delta)"]
        assert all(table.verdict(name).is_witnessed for name in names[:3])
        assert any(name.startswith("M_omega") for name in names)
        assert any(name.startswith("W_omega") for name in names)

    def test_function_system_rows(self, config):
        table = condition_table(WeightFunctionSystem(OmegaWeights(PowerMinusOne(0.5))), Kind.BEURLING, config)
        assert [name for name, _ in table.rows] == ["W [wM]", "W [M]"]
        assert table.exit_code == 0


class TestComparisons:
    def test_sequences(self, config):
        table = compare_sequences(gevrey_sequence(0.5), gevrey_sequence(1.0), config=config)
        assert [name for name, _ in table.rows] == ["M ⊆ N", "M ≼ N"]
        assert table.exit_code == 0
        assert compare_sequences(gevrey_sequence(1.0), gevrey_sequence(0.5), config=config).exit_code == 1

    def test_sequence_systems(self, config):
        M = WeightSequenceSystem(Dilated(gevrey_sequence(0.5)))
        table = compare_sequences(M, gevrey_sequence(1.0), Kind.ROUMIEU, config)
        assert table.verdict(SEQUENCE_RELATION).is_witnessed

    def test_omegas(self, config):
        table = compare_functions(PowerMinusOne(0.5), PowerMinusOne(1 / 3), config=config)
        ((name, verdict),) = table.rows
        assert "= O(" in name
        assert verdict.is_witnessed

    def test_function_systems(self, config):
        W = WeightFunctionSystem(OmegaWeights(PowerMinusOne(1 / 3)))
        table = compare_functions(W, PowerMinusOne(0.5), Kind.ROUMIEU, config)
        assert table.verdict(FUNCTION_RELATION).is_falsified
        two = WeightFunctionSystem(OmegaWeights(PowerMinusOne(0.5)), 2)
        with pytest.raises(DimensionMismatchError):
            compare_functions(W, two, config=config)

    def test_sampled_growth_meets_only_omegas(self, config):
        sigma = SampledGrowth((0.0, 10.0, 1e4), (0.0, 1.0, 1.0))
        ((name, verdict),) = compare_functions(LogPower(2.0), sigma, config=config).rows
        assert name == "growth-table[3] = O(logpow(a=2))"
        assert verdict.is_witnessed
        with pytest.raises(ValueError, match="not a system"):
            compare_functions(WeightFunctionSystem(OmegaWeights(LogPower(2.0))), sigma, config=config)


def test_witness_functions():
    assert witness_functions(1) == (Gaussian(0.5),)
    (tensor,) = witness_functions(3)
    assert tensor == TensorProduct((Gaussian(0.5),) * 3)


class TestOneSided:
    def hypotheses(self, **overrides):
        names = set(FUNCTION_SIDE_HYPOTHESES) | set(SEQUENCE_SIDE_HYPOTHESES) | {NONTRIVIAL}
        return {name: overrides.get(name, WITNESSED) for name in names}

    def test_falsified_function_relation(self):
        relations = {FUNCTION_RELATION: FALSIFIED, SEQUENCE_RELATION: WITNESSED}
        assert dict(one_sided_conclusions(self.hypotheses(), relations)) == {
            "function side": Conclusion.NOT_INCLUDED,
            "sequence side": Conclusion.INCONCLUSIVE,
        }

    def test_trivial_space_refutes_nothing(self):
        relations = {FUNCTION_RELATION: FALSIFIED, SEQUENCE_RELATION: FALSIFIED}
        sides = dict(one_sided_conclusions(self.hypotheses(**{NONTRIVIAL: OPEN}), relations))
        assert set(sides.values()) == {Conclusion.INCONCLUSIVE}


class TestDecideInclusion:
    def test_kinds_must_match(self, config):
        a = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))", Kind.ROUMIEU)
        b = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))", Kind.BEURLING)
        with pytest.raises(ValueError, match="different kinds"):
            decide_inclusion(a, b, config)

    def test_models_must_match(self, config):
        a = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))", p=2.0)
        b = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))", p=1.0)
        with pytest.raises(ValueError, match="E-models"):
            decide_inclusion(a, b, config)

    def test_dimensions_must_match(self, config):
        a = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))")
        b = parse_space("gs(M=gevrey(s=1,n=2),A=gevrey(s=1,n=2))")
        with pytest.raises(DimensionMismatchError):
            decide_inclusion(a, b, config)

    @pytest.mark.slow
    @pytest.mark.parametrize("s, t, expected", [(0.5, 1.0, Conclusion.INCLUDED), (1.0, 0.5, Conclusion.NOT_INCLUDED)])
    def test_gevrey(self, config, s, t, expected):
        a = parse_space(f"gs(M=gevrey(s={s}),A=gevrey(s={s}))")
        b = parse_space(f"gs(M=gevrey(s={t}),A=gevrey(s={t}))")
        certificate = decide_inclusion(a, b, config, alpha_max=32, workers=4)
        assert certificate.conclusion is expected
        assert certificate.conclusion.exit_code == (0 if expected is Conclusion.INCLUDED else 1)
        assert certificate.verdict(NONTRIVIAL).is_witnessed

    @pytest.mark.slow
    @pytest.mark.parametrize("rho, sigma, expected", [(0.5, 1 / 3, Conclusion.INCLUDED), (1 / 3, 0.5, Conclusion.NOT_INCLUDED)])
    def test_bmt(self, config, rho, sigma, expected):
        a = parse_space(f"bmt(omega=pow(rho={rho}),eta=pow(rho={rho}))")
        b = parse_space(f"bmt(omega=pow(rho={sigma}),eta=pow(rho={sigma}))")
        certificate = decide_inclusion(a, b, config, alpha_max=32, cross_check=False)
        assert certificate.conclusion is expected
        assert certificate.cross_checks == ()

    @pytest.mark.slow
    def test_cross_checks_agree(self, config):
        a = parse_space("gs(M=gevrey(s=0.5),A=gevrey(s=0.5))")
        b = parse_space("gs(M=gevrey(s=1),A=gevrey(s=1))")
        certificate = decide_inclusion(a, b, config, alpha_max=32)
        names = [name for name, _ in certificate.cross_checks]
        assert names == ["delta probes W ⊆ V", "witness in target"]
        assert not any(v.is_falsified for _, v in certificate.cross_checks)
