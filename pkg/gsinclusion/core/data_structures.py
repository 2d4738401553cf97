"""
Core data structures for gsinclusion.
"""

from typing import NamedTuple, Dict, Optional, List, Tuple, Union, TypedDict
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

JSON_VALUE = Union[str, int, float, bool, None, "JsonDict", "JsonList"]
JsonDict = Dict[str, JSON_VALUE]
JsonList = List[JSON_VALUE]

Scalar = Union[float, int, str, bool]
Bundle = Dict[str, Scalar]


class Kind(Enum):
    """Projective (Beurling) or inductive (Roumieu) reading of a weight system."""

    BEURLING = "beurling"
    ROUMIEU = "roumieu"

    @property
    def brackets(self) -> Tuple[str, str]:
        return ("(", ")") if self is Kind.BEURLING else ("{", "}")


class VerdictStatus(Enum):
    """Finite-horizon outcome of a quantified condition."""

    WITNESSED = "witnessed"
    FALSIFIED = "falsified"
    INCONCLUSIVE = "inconclusive"


class Conclusion(Enum):
    """Outcome of an inclusion decision."""

    INCLUDED = "included"
    NOT_INCLUDED = "not_included"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {Conclusion.INCLUDED: 0, Conclusion.NOT_INCLUDED: 1, Conclusion.INCONCLUSIVE: 3}[self]


class SpaceVariant(Enum):
    """Discrete models of solid translation-invariant Banach function spaces."""

    LP = "lp"
    L0 = "l0"
    MIXED = "mixed"


class WindowKind(Enum):
    INTERPOLATING = "interpolating"
    PARTITION = "partition"
    GENERIC = "generic"


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index alpha in N^n."""

    components: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.components) < 1:
            raise ValueError("multi-index needs at least one component")
        if any(int(c) != c or c < 0 for c in self.components):
            raise ValueError(f"multi-index components must be non-negative integers, got {self.components}")

    @property
    def order(self) -> int:
        return int(sum(self.components))

    @property
    def dimension(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, dimension: int = 1) -> "MultiIndex":
        return cls((0,) * dimension)

    @classmethod
    def along(cls, order: int, axis: int = 0, dimension: int = 1) -> "MultiIndex":
        """Multi-index order*e_axis."""
        components = [0] * dimension
        components[axis] = order
        return cls(tuple(components))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if other.dimension != self.dimension:
            raise ValueError("cannot add multi-indices of different dimension")
        return MultiIndex(tuple(a + b for a, b in zip(self.components, other.components)))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.components) + ")"


def format_scalar(value: Scalar) -> str:
    """Render a bundle value with a stable textual form."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


LARGEST_REPORTED_LOG_C = 700.0


def constant_bundle(log_c: float) -> Bundle:
    """C and log C of a witness; C is left out once exp(log C) would overflow."""
    if log_c > LARGEST_REPORTED_LOG_C:
        return {"log_C": float(log_c)}
    return {"C": math.exp(log_c), "log_C": float(log_c)}


def format_bundle(bundle: Bundle) -> str:
    """Flatten a parameter bundle into a `key=value;key=value` string."""
    return ";".join(f"{key}={format_scalar(value)}" for key, value in bundle.items())


class VerdictRecord(TypedDict):
    check: str
    status: str
    witness: str
    counterexample: str
    horizon: str
    note: str


@dataclass(frozen=True, eq=False)
class RelationVerdict:
    """
    Three-valued verdict of an asymptotic condition or relation.

    Witnessed verdicts carry the constants that re-verify on every probed
    point, Falsified verdicts carry the failing input, Inconclusive verdicts
    carry neither. `horizon` records the search bounds and `details` the
    per-probe certificates behind a quantified verdict.
    """

    status: VerdictStatus
    witness: Bundle = field(default_factory=dict)
    counterexample: Bundle = field(default_factory=dict)
    horizon: Bundle = field(default_factory=dict)
    note: str = ""
    details: Tuple[Bundle, ...] = ()

    def __post_init__(self) -> None:
        if self.status is VerdictStatus.WITNESSED and (not self.witness or self.counterexample):
            raise ValueError("a witnessed verdict needs a witness and no counterexample")
        if self.status is VerdictStatus.FALSIFIED and (not self.counterexample or self.witness):
            raise ValueError("a falsified verdict needs a counterexample and no witness")
        if self.status is VerdictStatus.INCONCLUSIVE and (self.witness or self.counterexample):
            raise ValueError("an inconclusive verdict carries neither witness nor counterexample")

    @classmethod
    def witnessed(
        cls, witness: Bundle, horizon: Optional[Bundle] = None, note: str = "", details: Tuple[Bundle, ...] = ()
    ) -> "RelationVerdict":
        return cls(VerdictStatus.WITNESSED, witness=dict(witness), horizon=dict(horizon or {}), note=note, details=details)

    @classmethod
    def falsified(
        cls, counterexample: Bundle, horizon: Optional[Bundle] = None, note: str = "", details: Tuple[Bundle, ...] = ()
    ) -> "RelationVerdict":
        return cls(
            VerdictStatus.FALSIFIED,
            counterexample=dict(counterexample),
            horizon=dict(horizon or {}),
            note=note,
            details=details,
        )

    @classmethod
    def inconclusive(
        cls, note: str, horizon: Optional[Bundle] = None, details: Tuple[Bundle, ...] = ()
    ) -> "RelationVerdict":
        return cls(VerdictStatus.INCONCLUSIVE, horizon=dict(horizon or {}), note=note, details=details)

    @property
    def is_witnessed(self) -> bool:
        return self.status is VerdictStatus.WITNESSED

    @property
    def is_falsified(self) -> bool:
        return self.status is VerdictStatus.FALSIFIED

    @property
    def log_constant(self) -> float:
        """log C of a witness, -inf when the witness has no constant."""
        if "log_C" in self.witness:
            return float(self.witness["log_C"])
        if "C" in self.witness:
            return math.log(float(self.witness["C"]))
        return float("-inf")

    def to_record(self, check: str) -> VerdictRecord:
        return {
            "check": check,
            "status": self.status.value,
            "witness": format_bundle(self.witness),
            "counterexample": format_bundle(self.counterexample),
            "horizon": format_bundle(self.horizon),
            "note": self.note,
        }


def combine_verdicts(verdicts: List[RelationVerdict], note: str = "") -> RelationVerdict:
    """
    Conjunction of verdicts: Falsified if any is, Witnessed if all are.

    The first Falsified counterexample or the worst witness constant is kept.
    """
    if not verdicts:
        raise ValueError("cannot combine an empty list of verdicts")
    for verdict in verdicts:
        if verdict.is_falsified:
            return verdict
    if all(v.is_witnessed for v in verdicts):
        worst = max(verdicts, key=lambda v: v.log_constant)
        return RelationVerdict.witnessed(worst.witness, worst.horizon, note or worst.note)
    first = next(v for v in verdicts if not v.is_witnessed)
    return RelationVerdict.inconclusive(note or first.note, first.horizon)


@dataclass(frozen=True)
class AssociatedFunctionValue:
    """Value of omega_M(x) with the maximizing multi-index and saturation flag."""

    value: float
    attained_at: MultiIndex
    saturated: bool

    def __post_init__(self) -> None:
        if not self.value >= 0.0:
            raise ValueError(f"associated function value must be non-negative, got {self.value}")


# Hypothesis names of the inclusion decision
LOG_CONVEX_M = "M log-convex"
L_M = "M [L]"
WI_M = "M [wI]"
I_M = "M [I]"
LOG_CONVEX_N = "N log-convex"
L_N = "N [L]"
WI_N = "N [wI]"
M_W = "W [M]"
WM_W = "W [wM]"
WM_V = "V [wM]"
NONTRIVIAL = "nontriviality"

SEQUENCE_RELATION = "M [⊆] N"
FUNCTION_RELATION = "W [⊆] V"

FUNCTION_SIDE_HYPOTHESES = (L_M, WI_M, L_N, M_W, WM_V)
SEQUENCE_SIDE_HYPOTHESES = (LOG_CONVEX_M, L_M, I_M, LOG_CONVEX_N, L_N, WI_N, WM_W, WM_V)
INCLUDED_HYPOTHESES = (LOG_CONVEX_M, L_M, WI_M, I_M, LOG_CONVEX_N, L_N, WI_N, M_W, WM_W, WM_V)


@dataclass(frozen=True, eq=False)
class DecisionCertificate:
    """
    Outcome of an inclusion decision between two spaces.

    The conclusion is gated structurally: Included needs every structural
    hypothesis and both relations witnessed; NotIncluded needs nontriviality
    and a falsified relation whose one-sided hypotheses are all witnessed.
    """

    kind: Kind
    space_a: str
    space_b: str
    model: str
    hypotheses: Tuple[Tuple[str, RelationVerdict], ...]
    relations: Tuple[Tuple[str, RelationVerdict], ...]
    conclusion: Conclusion
    one_sided: Tuple[Tuple[str, Conclusion], ...] = ()
    cross_checks: Tuple[Tuple[str, RelationVerdict], ...] = ()
    notes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        hypotheses = dict(self.hypotheses)
        relations = dict(self.relations)

        def witnessed(names: Tuple[str, ...]) -> bool:
            return all(name in hypotheses and hypotheses[name].is_witnessed for name in names)

        if self.conclusion is Conclusion.INCLUDED:
            if not witnessed(INCLUDED_HYPOTHESES) or not all(v.is_witnessed for v in relations.values()):
                raise ValueError("Included requires witnessed hypotheses and witnessed relations")
        if self.conclusion is Conclusion.NOT_INCLUDED:
            function_side = relations.get(FUNCTION_RELATION)
            sequence_side = relations.get(SEQUENCE_RELATION)
            refuted = (
                function_side is not None and function_side.is_falsified and witnessed(FUNCTION_SIDE_HYPOTHESES)
            ) or (sequence_side is not None and sequence_side.is_falsified and witnessed(SEQUENCE_SIDE_HYPOTHESES))
            if not witnessed((NONTRIVIAL,)) or not refuted:
                raise ValueError("NotIncluded requires nontriviality and a falsified relation with its hypotheses")

    def verdict(self, name: str) -> RelationVerdict:
        for key, value in self.hypotheses + self.relations + self.cross_checks:
            if key == name:
                return value
        raise KeyError(name)

    def to_records(self) -> List[VerdictRecord]:
        records = [verdict.to_record(name) for name, verdict in self.hypotheses]
        records += [verdict.to_record(name) for name, verdict in self.relations]
        records += [verdict.to_record(f"cross-check {name}") for name, verdict in self.cross_checks]
        for name, conclusion in self.one_sided:
            records.append(
                {
                    "check": f"{name} conclusion",
                    "status": conclusion.value,
                    "witness": "",
                    "counterexample": "",
                    "horizon": "",
                    "note": "",
                }
            )
        records.append(
            {
                "check": "conclusion",
                "status": self.conclusion.value,
                "witness": "",
                "counterexample": "",
                "horizon": "",
                "note": f"{self.space_a} vs {self.space_b}; kind={self.kind.value}; model={self.model}",
            }
        )
        return records


class SuiteRecord(TypedDict):
    suite: str
    check: str
    passed: bool
    observed: float
    bound: float
    note: str


@dataclass(frozen=True, eq=False)
class CheckReport:
    """Outcome of a quantitative identity, bound or implication check."""

    name: str
    passed: bool
    observed: float = 0.0
    bound: float = 0.0
    note: str = ""
    verdicts: Tuple[Tuple[str, RelationVerdict], ...] = ()

    def to_records(self) -> List[VerdictRecord]:
        records = [verdict.to_record(f"{self.name}: {check}") for check, verdict in self.verdicts]
        records.append(
            {
                "check": self.name,
                "status": "passed" if self.passed else "failed",
                "witness": format_bundle({"observed": self.observed, "bound": self.bound}),
                "counterexample": "",
                "horizon": "",
                "note": self.note,
            }
        )
        return records

    def to_suite_record(self, suite: str) -> SuiteRecord:
        return {
            "suite": suite,
            "check": self.name,
            "passed": self.passed,
            "observed": self.observed,
            "bound": self.bound,
            "note": self.note,
        }


class HandlerConfig(TypedDict, total=False):
    type: str
    level: int
    formatter: logging.Formatter
    path: Path


class LoggerConfig(TypedDict, total=False):
    name: str
    level: int
    handlers: List[HandlerConfig]
    log_directory: Path
    run_label: str


@dataclass(frozen=True)
class SequenceConfig:
    """Horizons and tolerances of weight sequence checks."""

    q_max: int = 64
    tail_window: int = 8  # orders used for tail trends
    tolerance: float = 1e-6  # relative
    h_exponent_min: int = -6
    h_exponent_max: int = 20
    divergence_margin: float = 1e-2


@dataclass(frozen=True)
class FunctionConfig:
    """Grids of weight function checks."""

    t_max: float = 1e8
    points_per_decade: int = 64
    x_points: int = 4096
    gamma_threshold: float = 10.0


@dataclass(frozen=True)
class SystemConfig:
    """Parameter grids of weight system checks."""

    lambda_exponent_min: int = -8
    lambda_exponent_max: int = 8
    probe_exponent_min: int = -2
    probe_exponent_max: int = 2
    r_exponent_max: int = 10
    shell_radius: float = 1e3
    shell_points: int = 48
    ball_points: int = 9
    probe_radius: float = 1e8  # lattice and relation probes
    weight_q_max: int = 1024  # horizon of sequence-derived weights
    replay_slack: float = 2.0


@dataclass(frozen=True)
class SpaceConfig:
    """Grid defaults of the discrete space models."""

    half_width_1d: int = 32
    spacing_exponent_1d: int = 6
    half_width_2d: int = 16
    spacing_exponent_2d: int = 4
    saturation_window: int = 6
    tail_tolerance: float = 1e-8
    alpha_max: int = 64


@dataclass(frozen=True)
class AdvancedConfig:
    """Seed of the random checks and the logging level."""

    debug_mode: bool = False
    log_level: str = "INFO"
    seed: int = 42


class ApplicationConfig(NamedTuple):
    """Every configuration section; passed explicitly to the checks that read horizons or grids."""

    sequences: SequenceConfig
    functions: FunctionConfig
    systems: SystemConfig
    spaces: SpaceConfig
    advanced: AdvancedConfig
    config_version: str = "1.0"


class ConfigDict(TypedDict):
    sequences: Dict[str, JSON_VALUE]
    functions: Dict[str, JSON_VALUE]
    systems: Dict[str, JSON_VALUE]
    spaces: Dict[str, JSON_VALUE]
    advanced: Dict[str, JSON_VALUE]
    config_version: str
