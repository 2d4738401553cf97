"""
Condition tables and inclusion decisions between Gelfand-Shilov type spaces.

An inclusion E^[M]_[W] into E^[N]_[V] is decided through its characterization
by the relations M [subseteq] N and W [subseteq] V. The characterization needs
structural hypotheses on both sides, and its converse direction needs a
nontrivial source space. Every conclusion is gated on witnessed hypotheses;
anything short of that is reported as inconclusive, with the failing
hypothesis named.
"""

from dataclasses import dataclass
from multiprocessing.pool import ThreadPool
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from gsinclusion.core.config import create_default_config
from gsinclusion.core.conjugate import BMTWeightFunction, omega_name
from gsinclusion.core.data_structures import (
    FUNCTION_RELATION,
    FUNCTION_SIDE_HYPOTHESES,
    I_M,
    INCLUDED_HYPOTHESES,
    L_M,
    L_N,
    LOG_CONVEX_M,
    LOG_CONVEX_N,
    M_W,
    NONTRIVIAL,
    SEQUENCE_RELATION,
    SEQUENCE_SIDE_HYPOTHESES,
    WI_M,
    WI_N,
    WM_V,
    WM_W,
    ApplicationConfig,
    Conclusion,
    DecisionCertificate,
    Kind,
    RelationVerdict,
    VerdictRecord,
)
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.functions import (
    GrowthFunction,
    SampledGrowth,
    check_bmt_conditions,
    compare_weight_functions,
    growth_name,
)
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.operators import decay_upgrade
from gsinclusion.core.parsing import SpaceSpec, format_function_system, format_sequence_system, format_space
from gsinclusion.core.sequences import (
    WeightSequence,
    check_divergence,
    check_log_convex,
    describe_sequence,
    relation_preceq,
    relation_subseteq,
    superadditivity_check,
)
from gsinclusion.core.smooth import Gaussian, SmoothFunction, TensorProduct, describe_function
from gsinclusion.core.spaces import (
    BanachSpaceModel,
    GridFunction,
    describe_model,
    make_model,
    membership_verdict,
    probe_delta_sequences,
    sample_function,
)
from gsinclusion.core.systems import (
    BMTGenerated,
    Dilated,
    OmegaWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
    check_I,
    check_L,
    check_M,
    check_wI,
    check_wM,
    derived_function_system,
    system_log_convex,
    system_relation_functions,
    system_relation_sequences,
)

logger = get_module_logger(__name__)

DEFAULT_CONFIG = create_default_config()

Task = Tuple[str, Callable[[], RelationVerdict]]
Subject = Union[SpaceSpec, WeightSequence, WeightSequenceSystem, WeightFunctionSystem, BMTWeightFunction]


@dataclass(frozen=True, eq=False)
class VerdictTable:
    """Named verdicts about one subject, in a stable order."""

    subject: str
    rows: Tuple[Tuple[str, RelationVerdict], ...]

    def verdict(self, name: str) -> RelationVerdict:
        for key, value in self.rows:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def exit_code(self) -> int:
        """1 if any row is falsified, 3 if any is inconclusive, else 0."""
        if any(v.is_falsified for _, v in self.rows):
            return 1
        if not all(v.is_witnessed for _, v in self.rows):
            return 3
        return 0

    def to_records(self) -> List[VerdictRecord]:
        return [verdict.to_record(name) for name, verdict in self.rows]


def run_checks(tasks: Sequence[Task], workers: int = 1) -> Tuple[Tuple[str, RelationVerdict], ...]:
    """Evaluate independent checks, in parallel when workers > 1; results keep task order."""
    if workers > 1 and len(tasks) > 1:
        with ThreadPool(min(workers, len(tasks))) as pool:
            verdicts = pool.map(lambda task: task[1](), tasks)
    else:
        verdicts = [check() for _, check in tasks]
    return tuple((name, verdict) for (name, _), verdict in zip(tasks, verdicts))


def _sequence_system_tasks(
    system: WeightSequenceSystem, kind: Kind, config: ApplicationConfig, prefix: str = "M"
) -> List[Task]:
    return [
        (f"{prefix} log-convex", lambda: system_log_convex(system, config)),
        (f"{prefix} [L]", lambda: check_L(system, kind, config)),
        (f"{prefix} [wI]", lambda: check_wI(system, kind, config)),
        (f"{prefix} [I]", lambda: check_I(system, kind, config)),
    ]


def _function_system_tasks(
    system: WeightFunctionSystem, kind: Kind, config: ApplicationConfig, prefix: str = "W"
) -> List[Task]:
    return [
        (f"{prefix} [wM]", lambda: check_wM(system, kind, config)),
        (f"{prefix} [M]", lambda: check_M(system, kind, config)),
    ]


def _omega_tasks(omega: BMTWeightFunction, config: ApplicationConfig) -> List[Task]:
    conditions: Dict[str, RelationVerdict] = {}

    def condition(name: str) -> Callable[[], RelationVerdict]:
        def run() -> RelationVerdict:
            if not conditions:
                conditions.update(check_bmt_conditions(omega, config=config.functions, tail_window=config.sequences.tail_window))
            return conditions[name]

        return run

    return [(f"({name})", condition(name)) for name in ("alpha", "gamma", "delta")]


def describe_subject(subject: Subject) -> str:
    if isinstance(subject, SpaceSpec):
        return format_space(subject)
    if isinstance(subject, WeightSequence):
        return describe_sequence(subject)
    if isinstance(subject, WeightSequenceSystem):
        return format_sequence_system(subject)
    if isinstance(subject, WeightFunctionSystem):
        return format_function_system(subject)
    return omega_name(subject)


def condition_table(
    subject: Subject, kind: Kind = Kind.ROUMIEU, config: ApplicationConfig = DEFAULT_CONFIG, workers: int = 1
) -> VerdictTable:
    """
    Verdicts of the structural conditions applicable to a parsed spec.

    A single sequence reports its own properties followed by the conditions
    of the system it dilates; a BMT weight function reports (alpha), (gamma),
    (delta) followed by the conditions of the systems it generates; a space
    reports both of its systems.
    """
    tasks: List[Task] = []
    if isinstance(subject, SpaceSpec):
        tasks += _sequence_system_tasks(subject.sequences, kind, config)
        tasks += _function_system_tasks(subject.weights, kind, config)
    elif isinstance(subject, WeightSequence):
        M = subject
        tasks += [
            ("log-convex", lambda: check_log_convex(M, config=config.sequences)),
            ("divergence", lambda: check_divergence(M, config=config.sequences)),
            ("superadditive", lambda: superadditivity_check(M, config=config.sequences)),
        ]
        tasks += _sequence_system_tasks(WeightSequenceSystem(Dilated(M), M.dimension, M.q_max), kind, config)
    elif isinstance(subject, WeightSequenceSystem):
        tasks += _sequence_system_tasks(subject, kind, config)
        tasks += _function_system_tasks(derived_function_system(subject), kind, config, prefix="W_M")
    elif isinstance(subject, WeightFunctionSystem):
        tasks += _function_system_tasks(subject, kind, config)
    else:
        tasks += _omega_tasks(subject, config)
        tasks += _sequence_system_tasks(
            WeightSequenceSystem(BMTGenerated(subject), 1, config.sequences.q_max), kind, config, prefix="M_omega"
        )
        tasks += _function_system_tasks(WeightFunctionSystem(OmegaWeights(subject), 1), kind, config, prefix="W_omega")
    rows = run_checks(tasks, workers)
    table = VerdictTable(describe_subject(subject), rows)
    logger.info(f"conditions of {table.subject}: " + ", ".join(f"{name}={v.status.value}" for name, v in rows))
    return table


def compare_sequences(
    M: Union[WeightSequence, WeightSequenceSystem],
    N: Union[WeightSequence, WeightSequenceSystem],
    kind: Kind = Kind.ROUMIEU,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> VerdictTable:
    """M subseteq N and M preceq N for sequences, M [subseteq] N for systems."""
    if isinstance(M, WeightSequence) and isinstance(N, WeightSequence):
        rows: Tuple[Tuple[str, RelationVerdict], ...] = (
            ("M ⊆ N", relation_subseteq(M, N, config=config.sequences)),
            ("M ≼ N", relation_preceq(M, N, config=config.sequences)),
        )
        subject = f"{describe_sequence(M)} vs {describe_sequence(N)}"
    else:
        M_system = _as_sequence_system(M)
        N_system = _as_sequence_system(N)
        rows = ((SEQUENCE_RELATION, system_relation_sequences(M_system, N_system, kind, config)),)
        subject = f"{format_sequence_system(M_system)} vs {format_sequence_system(N_system)}"
    return VerdictTable(subject, rows)


def _as_sequence_system(M: Union[WeightSequence, WeightSequenceSystem]) -> WeightSequenceSystem:
    if isinstance(M, WeightSequence):
        return WeightSequenceSystem(Dilated(M), M.dimension, M.q_max)
    return M


def compare_functions(
    omega: Union[BMTWeightFunction, WeightFunctionSystem],
    sigma: Union[GrowthFunction, WeightFunctionSystem],
    kind: Kind = Kind.ROUMIEU,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> VerdictTable:
    """
    sigma = O(omega) for weight functions, W [subseteq] V for weight function systems.

    A sampled growth sigma has no weight function system, so it only meets a
    BMT omega.
    """
    if isinstance(omega, WeightFunctionSystem) or isinstance(sigma, WeightFunctionSystem):
        if isinstance(sigma, SampledGrowth):
            raise ValueError(f"{growth_name(sigma)} compares against a BMT weight function, not a system")
        W = omega if isinstance(omega, WeightFunctionSystem) else WeightFunctionSystem(OmegaWeights(omega), 1)
        V = sigma if isinstance(sigma, WeightFunctionSystem) else WeightFunctionSystem(OmegaWeights(sigma), 1)
        if W.dimension != V.dimension:
            raise DimensionMismatchError(W.dimension, V.dimension)
        return VerdictTable(
            f"{format_function_system(W)} vs {format_function_system(V)}",
            ((FUNCTION_RELATION, system_relation_functions(W, V, kind, config)),),
        )
    verdict = compare_weight_functions(omega, sigma, config=config.functions, tail_window=config.sequences.tail_window)
    row = f"{growth_name(sigma)} = O({omega_name(omega)})"
    return VerdictTable(f"{omega_name(omega)} vs {growth_name(sigma)}", ((row, verdict),))


def witness_functions(dimension: int) -> Tuple[SmoothFunction, ...]:
    """Nontriviality witnesses: the standard Gaussian, as a tensor product beyond one dimension."""
    gaussian = Gaussian(0.5)
    if dimension == 1:
        return (gaussian,)
    return (TensorProduct(tuple(gaussian for _ in range(dimension))),)


def _candidates(witness: SmoothFunction, model: BanachSpaceModel) -> Iterator[GridFunction]:
    yield sample_function(witness, model.grid)
    try:
        yield decay_upgrade(witness, model.grid)
    except ValueError as e:
        logger.debug(f"decay upgrade unavailable: {e}")


def witness_membership(
    space: SpaceSpec, model: BanachSpaceModel, alpha_max: Optional[int] = None, config: ApplicationConfig = DEFAULT_CONFIG
) -> Tuple[RelationVerdict, Optional[GridFunction]]:
    """
    Evidence that the space is not {0}: a witness function with a witnessed
    membership, returned with that function. Each witness is tried as it is,
    then through its decay upgrade.
    """
    attempts = []
    for witness in witness_functions(space.dimension):
        for f in _candidates(witness, model):
            verdict = membership_verdict(f, space.sequences, space.weights, space.kind, model, alpha_max, config)
            attempts.append(verdict)
            if verdict.is_witnessed:
                label = describe_function(f.provenance) if f.provenance is not None else f.label
                return RelationVerdict.witnessed({**verdict.witness, "witness": label}, verdict.horizon), f
    notes = "; ".join(v.note for v in attempts if v.note)
    return RelationVerdict.inconclusive(f"no witness function attained membership ({notes})", attempts[-1].horizon), None


def nontriviality(
    space: SpaceSpec, model: BanachSpaceModel, alpha_max: Optional[int] = None, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    return witness_membership(space, model, alpha_max, config)[0]


def _check_compatible(a: SpaceSpec, b: SpaceSpec) -> None:
    if a.kind is not b.kind:
        raise ValueError(f"spaces of different kinds: {a.kind.value} and {b.kind.value}")
    if a.p != b.p:
        raise ValueError(f"spaces over different E-models: p={a.p} and p={b.p}")
    if a.dimension != b.dimension:
        raise DimensionMismatchError(a.dimension, b.dimension)


def one_sided_conclusions(
    hypotheses: Dict[str, RelationVerdict], relations: Dict[str, RelationVerdict]
) -> Tuple[Tuple[str, Conclusion], ...]:
    """
    Each relation on its own refutes the inclusion when it is falsified, its
    hypotheses are witnessed and the source space is nontrivial.
    """

    def side(relation: str, needed: Tuple[str, ...]) -> Conclusion:
        if relations[relation].is_falsified and all(hypotheses[name].is_witnessed for name in needed + (NONTRIVIAL,)):
            return Conclusion.NOT_INCLUDED
        return Conclusion.INCONCLUSIVE

    return (
        ("function side", side(FUNCTION_RELATION, FUNCTION_SIDE_HYPOTHESES)),
        ("sequence side", side(SEQUENCE_RELATION, SEQUENCE_SIDE_HYPOTHESES)),
    )


def decide_inclusion(
    a: SpaceSpec,
    b: SpaceSpec,
    config: ApplicationConfig = DEFAULT_CONFIG,
    alpha_max: Optional[int] = None,
    workers: int = 1,
    cross_check: bool = True,
) -> DecisionCertificate:
    """
    Decide whether space a is contained in space b.

    Raises:
        ValueError: the spaces differ in kind or E-model
        DimensionMismatchError: the spaces live in different dimensions
    """
    _check_compatible(a, b)
    kind = a.kind
    model = make_model(a.p, a.dimension, config)
    if model.grid.dimension != a.dimension:
        raise DimensionMismatchError(model.grid.dimension, a.dimension, "E-model dimension")
    label_a, label_b = format_space(a), format_space(b)
    logger.info(f"deciding {label_a} ⊆ {label_b} ({kind.value}, {describe_model(model)})")

    witnesses: Dict[str, Tuple[RelationVerdict, Optional[GridFunction]]] = {}
    tasks: List[Task] = [
        (LOG_CONVEX_M, lambda: system_log_convex(a.sequences, config)),
        (L_M, lambda: check_L(a.sequences, kind, config)),
        (WI_M, lambda: check_wI(a.sequences, kind, config)),
        (I_M, lambda: check_I(a.sequences, kind, config)),
        (LOG_CONVEX_N, lambda: system_log_convex(b.sequences, config)),
        (L_N, lambda: check_L(b.sequences, kind, config)),
        (WI_N, lambda: check_wI(b.sequences, kind, config)),
        (M_W, lambda: check_M(a.weights, kind, config)),
        (WM_W, lambda: check_wM(a.weights, kind, config)),
        (WM_V, lambda: check_wM(b.weights, kind, config)),
        (NONTRIVIAL, lambda: witnesses.setdefault("a", witness_membership(a, model, alpha_max, config))[0]),
    ]
    relation_tasks: List[Task] = [
        (SEQUENCE_RELATION, lambda: system_relation_sequences(a.sequences, b.sequences, kind, config)),
        (FUNCTION_RELATION, lambda: system_relation_functions(a.weights, b.weights, kind, config)),
    ]
    results = run_checks(tasks + relation_tasks, workers)
    hypotheses = results[: len(tasks)]
    relations = results[len(tasks) :]
    hypothesis_map = dict(hypotheses)
    relation_map = dict(relations)
    one_sided = one_sided_conclusions(hypothesis_map, relation_map)

    notes: List[str] = []
    failing = [name for name in INCLUDED_HYPOTHESES if not hypothesis_map[name].is_witnessed]
    if not failing and all(v.is_witnessed for _, v in relations):
        conclusion = Conclusion.INCLUDED
    elif any(c is Conclusion.NOT_INCLUDED for _, c in one_sided):
        conclusion = Conclusion.NOT_INCLUDED
    else:
        conclusion = Conclusion.INCONCLUSIVE
        if failing:
            notes.append("hypotheses not witnessed: " + ", ".join(failing))
        undecided = [name for name, v in relations if not v.is_witnessed]
        if undecided and not failing:
            notes.append("relations not decided: " + ", ".join(undecided))
        if any(v.is_falsified for _, v in relations) and not hypothesis_map[NONTRIVIAL].is_witnessed:
            notes.append("a relation fails but the source space is not shown to be nontrivial")

    cross_checks: List[Tuple[str, RelationVerdict]] = []
    if cross_check:
        cross_checks.append(("delta probes W ⊆ V", probe_delta_sequences(a.weights, b.weights, kind, model, config)))
        witness = witnesses["a"][1]
        if conclusion is Conclusion.INCLUDED and witness is not None:
            # an included space keeps every member of the source space
            target = membership_verdict(witness, b.sequences, b.weights, kind, model, alpha_max, config)
            cross_checks.append(("witness in target", target))
            if target.is_falsified:
                logger.warning(f"witness of {label_a} is not a member of {label_b} although the inclusion was certified")
                conclusion = Conclusion.INCONCLUSIVE
                notes.append("membership cross-check contradicts the inclusion")

    certificate = DecisionCertificate(
        kind=kind,
        space_a=label_a,
        space_b=label_b,
        model=describe_model(model),
        hypotheses=hypotheses,
        relations=relations,
        conclusion=conclusion,
        one_sided=one_sided,
        cross_checks=tuple(cross_checks),
        notes=tuple(notes),
    )
    logger.info(f"conclusion {conclusion.value}: {label_a} ⊆ {label_b}")
    return certificate
