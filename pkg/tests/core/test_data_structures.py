import math

import pytest

from gsinclusion.core.data_structures import (
    FUNCTION_RELATION,
    INCLUDED_HYPOTHESES,
    LARGEST_REPORTED_LOG_C,
    NONTRIVIAL,
    SEQUENCE_RELATION,
    SEQUENCE_SIDE_HYPOTHESES,
    CheckReport,
    Conclusion,
    DecisionCertificate,
    Kind,
    MultiIndex,
    RelationVerdict,
    combine_verdicts,
    constant_bundle,
    format_bundle,
)


def witnessed() -> RelationVerdict:
    return RelationVerdict.witnessed({"C": 1.0})


def falsified() -> RelationVerdict:
    return RelationVerdict.falsified({"order": 3})


def certificate(conclusion: Conclusion, hypotheses: dict, relations: dict) -> DecisionCertificate:
    return DecisionCertificate(
        kind=Kind.ROUMIEU,
        space_a="A",
        space_b="B",
        model="L^2",
        hypotheses=tuple(hypotheses.items()),
        relations=tuple(relations.items()),
        conclusion=conclusion,
    )


class TestMultiIndex:
    def test_order_and_dimension(self):
        alpha = MultiIndex((2, 0, 3))
        assert alpha.order == 5
        assert alpha.dimension == 3
        assert str(alpha) == "(2,0,3)"

    def test_along(self):
        assert MultiIndex.along(4, 1, 3) == MultiIndex((0, 4, 0))

    def test_addition(self):
        assert MultiIndex((1, 2)) + MultiIndex((3, 0)) == MultiIndex((4, 2))
        with pytest.raises(ValueError):
            MultiIndex((1,)) + MultiIndex((1, 1))

    @pytest.mark.parametrize("components", [(), (-1,), (1.5,)])
    def test_rejects_invalid(self, components):
        with pytest.raises(ValueError):
            MultiIndex(components)


class TestRelationVerdict:
    def test_witness_required(self):
        with pytest.raises(ValueError):
            RelationVerdict.witnessed({})

    def test_counterexample_required(self):
        with pytest.raises(ValueError):
            RelationVerdict.falsified({})

    def test_log_constant(self):
        assert RelationVerdict.witnessed({"C": math.e}).log_constant == pytest.approx(1.0)
        assert RelationVerdict.witnessed({"log_C": 2.5, "C": 1.0}).log_constant == 2.5
        assert RelationVerdict.witnessed({"H": 2.0}).log_constant == -math.inf

    def test_constant_bundle(self):
        assert constant_bundle(math.log(3.0)) == {"C": pytest.approx(3.0), "log_C": math.log(3.0)}
        assert constant_bundle(LARGEST_REPORTED_LOG_C) == {
            "C": math.exp(LARGEST_REPORTED_LOG_C),
            "log_C": LARGEST_REPORTED_LOG_C,
        }
        assert constant_bundle(1e4) == {"log_C": 1e4}

    def test_record_rendering(self):
        record = RelationVerdict.witnessed({"C": 2.0, "exact": True}, {"q_max": 64}).to_record("M ⊆ N")
        assert record == {
            "check": "M ⊆ N",
            "status": "witnessed",
            "witness": "C=2.0;exact=true",
            "counterexample": "",
            "horizon": "q_max=64",
            "note": "",
        }

    def test_format_bundle_non_finite(self):
        assert format_bundle({"a": math.inf, "b": -math.inf, "c": math.nan}) == "a=inf;b=-inf;c=nan"


class TestCombineVerdicts:
    def test_falsified_wins(self):
        combined = combine_verdicts([witnessed(), RelationVerdict.inconclusive("open"), falsified()])
        assert combined.is_falsified
        assert combined.counterexample == {"order": 3}

    def test_worst_constant_kept(self):
        combined = combine_verdicts([RelationVerdict.witnessed({"C": 2.0}), RelationVerdict.witnessed({"C": 5.0})])
        assert combined.witness == {"C": 5.0}

    def test_inconclusive(self):
        combined = combine_verdicts([witnessed(), RelationVerdict.inconclusive("open")])
        assert not combined.is_witnessed and not combined.is_falsified
        assert combined.note == "open"

    def test_empty(self):
        with pytest.raises(ValueError):
            combine_verdicts([])


class TestDecisionCertificate:
    def test_included_needs_every_hypothesis(self):
        hypotheses = {name: witnessed() for name in INCLUDED_HYPOTHESES}
        relations = {SEQUENCE_RELATION: witnessed(), FUNCTION_RELATION: witnessed()}
        assert certificate(Conclusion.INCLUDED, hypotheses, relations).conclusion is Conclusion.INCLUDED

        hypotheses[INCLUDED_HYPOTHESES[0]] = RelationVerdict.inconclusive("open")
        with pytest.raises(ValueError):
            certificate(Conclusion.INCLUDED, hypotheses, relations)

    def test_not_included_needs_nontriviality(self):
        hypotheses = {name: witnessed() for name in SEQUENCE_SIDE_HYPOTHESES}
        relations = {SEQUENCE_RELATION: falsified()}
        with pytest.raises(ValueError):
            certificate(Conclusion.NOT_INCLUDED, hypotheses, relations)

        hypotheses[NONTRIVIAL] = witnessed()
        assert certificate(Conclusion.NOT_INCLUDED, hypotheses, relations).conclusion is Conclusion.NOT_INCLUDED

    def test_not_included_needs_side_hypotheses(self):
        hypotheses = {name: witnessed() for name in SEQUENCE_SIDE_HYPOTHESES}
        hypotheses[NONTRIVIAL] = witnessed()
        hypotheses[SEQUENCE_SIDE_HYPOTHESES[-1]] = RelationVerdict.inconclusive("open")
        with pytest.raises(ValueError):
            certificate(Conclusion.NOT_INCLUDED, hypotheses, {SEQUENCE_RELATION: falsified()})

    def test_inconclusive_is_always_allowed(self):
        cert = certificate(Conclusion.INCONCLUSIVE, {}, {SEQUENCE_RELATION: falsified()})
        assert cert.conclusion.exit_code == 3

    def test_records_end_with_conclusion(self):
        cert = certificate(Conclusion.INCONCLUSIVE, {NONTRIVIAL: witnessed()}, {SEQUENCE_RELATION: falsified()})
        records = cert.to_records()
        assert [r["check"] for r in records] == [NONTRIVIAL, SEQUENCE_RELATION, "conclusion"]
        assert records[-1]["status"] == "inconclusive"
        assert cert.verdict(SEQUENCE_RELATION).is_falsified
        with pytest.raises(KeyError):
            cert.verdict("missing")


def test_exit_codes():
    assert Conclusion.INCLUDED.exit_code == 0
    assert Conclusion.NOT_INCLUDED.exit_code == 1
    assert Conclusion.INCONCLUSIVE.exit_code == 3


def test_check_report_records():
    report = CheckReport("bound", passed=False, observed=2.0, bound=1.0, note="exceeded", verdicts=(("inner", falsified()),))
    records = report.to_records()
    assert records[0]["check"] == "bound: inner"
    assert records[-1]["status"] == "failed"
    assert records[-1]["witness"] == "observed=2.0;bound=1.0"
    assert report.to_suite_record("bounds")["suite"] == "bounds"
