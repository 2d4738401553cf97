"""
Verification suites.

Each suite runs a family of operator identities, norm bounds or verdict
consistency checks on shipped example families and returns a SuiteResult.
Everything random is drawn from one numpy Generator seeded per suite, so a
run is reproducible from the seed alone.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Sequence, Tuple, TypeVar

import numpy as np

from gsinclusion.core.config import create_default_config, update_config
from gsinclusion.core.conjugate import LogPower, PowerMinusOne
from gsinclusion.core.data_structures import (
    ApplicationConfig,
    CheckReport,
    Conclusion,
    Kind,
    SpaceVariant,
    SuiteRecord,
    VerdictRecord,
)
from gsinclusion.core.decision import decide_inclusion
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.operators import (
    Parametrix1D,
    evaluation,
    interpolating_window,
    multiply,
    parametrix_reproduce,
    partition_window,
    periodize,
    sample_convolution_check,
    synthesis,
    synthesis_bound_check,
    window_invariant_error,
)
from gsinclusion.core.parsing import SpaceSpec
from gsinclusion.core.sequences import gevrey_sequence
from gsinclusion.core.smooth import Gaussian, PolyBump, Trig
from gsinclusion.core.spaces import (
    BanachSpaceModel,
    GridSpec,
    default_grid,
    ed_norm,
    lp_norm,
    mixed_lp_norm,
    probe_characters,
    probe_delta_sequences,
    random_sequence,
    sample_function,
    sandwich_check,
    weighted_ed_inclusion_check,
    weighted_L1_embedding_check,
)
from gsinclusion.core.systems import (
    BMTGenerated,
    Dilated,
    DilatedWeights,
    OmegaWeights,
    SequenceWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
    check_I,
    check_M,
    check_wI,
    check_wM,
    derived_inclusion_check,
    moderate_growth_check,
    replay_certificate,
    system_relation_functions,
)

logger = get_module_logger(__name__)

DEFAULT_CONFIG = create_default_config()

T = TypeVar("T")

SUITES = ("norms", "reconstruction", "parametrix", "probes", "bounds", "hierarchy", "certificates")

GEVREY_ORDERS = (0.5, 1.0, 2.0)
BMT_EXPONENTS = (1.0 / 3.0, 0.5, 1.0)


@dataclass(frozen=True, eq=False)
class SuiteResult:
    name: str
    reports: Tuple[CheckReport, ...]
    seed: int

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def failures(self) -> List[CheckReport]:
        return [report for report in self.reports if not report.passed]

    def to_records(self) -> List[VerdictRecord]:
        records: List[VerdictRecord] = []
        for report in self.reports:
            for record in report.to_records():
                records.append({**record, "check": f"{self.name}: {record['check']}"})  # type: ignore[misc]
        return records

    def to_suite_records(self) -> List[SuiteRecord]:
        return [report.to_suite_record(self.name) for report in self.reports]


# --- shipped example families


def shipped_sequence_systems(q_max: int = 64) -> Dict[str, WeightSequenceSystem]:
    systems = {
        f"dilated gevrey s={s:g}": WeightSequenceSystem(Dilated(gevrey_sequence(s, q_max=q_max)), 1, q_max)
        for s in GEVREY_ORDERS
    }
    systems["M_omega pow(rho=0.5)"] = WeightSequenceSystem(BMTGenerated(PowerMinusOne(0.5)), 1, q_max)
    systems["M_omega logpow(a=2)"] = WeightSequenceSystem(BMTGenerated(LogPower(2.0)), 1, q_max)
    return systems


def shipped_function_systems(q_max: int = 64) -> Dict[str, WeightFunctionSystem]:
    systems = {
        f"dilated gevrey s={s:g}": WeightFunctionSystem(DilatedWeights(gevrey_sequence(s, q_max=q_max)))
        for s in GEVREY_ORDERS
    }
    systems["W_omega pow(rho=0.5)"] = WeightFunctionSystem(OmegaWeights(PowerMinusOne(0.5)))
    systems["W_M dilated gevrey s=1"] = WeightFunctionSystem(
        SequenceWeights(WeightSequenceSystem(Dilated(gevrey_sequence(1.0, q_max=q_max)), 1, q_max))
    )
    return systems


def gevrey_space(s: float, kind: Kind, p: float = 2.0, q_max: int = 64) -> SpaceSpec:
    """S^[s]_[s],p: dilated Gevrey systems on both sides."""
    M = gevrey_sequence(s, q_max=q_max)
    return SpaceSpec(kind, WeightSequenceSystem(Dilated(M), 1, q_max), WeightFunctionSystem(DilatedWeights(M)), p)


def bmt_space(rho: float, kind: Kind, p: float = 2.0, q_max: int = 64) -> SpaceSpec:
    """S^[omega]_[omega],p for omega = pow(rho)."""
    omega = PowerMinusOne(rho)
    return SpaceSpec(kind, WeightSequenceSystem(BMTGenerated(omega), 1, q_max), WeightFunctionSystem(OmegaWeights(omega)), p)


# --- suites


def norms_suite(rng: np.random.Generator, config: ApplicationConfig, instances: int = 1000) -> List[CheckReport]:
    """E_d = l^p bit for bit, the l^1 >= E_d >= l^inf sandwich and the weighted L^1 embedding."""
    grid = default_grid(1, config.spaces)
    radius = grid.default_radius
    reports = []
    for p in (1.0, 2.0, math.inf):
        model = BanachSpaceModel(SpaceVariant.LP, grid, p)
        mismatches = 0
        for _ in range(instances):
            c = random_sequence(rng, radius, support=int(rng.integers(0, radius + 1)))
            if ed_norm(model, c) != lp_norm(c.values, p):
                mismatches += 1
        reports.append(
            CheckReport(
                name=f"E_d = l^{p:g}",
                passed=mismatches == 0,
                observed=float(mismatches),
                bound=0.0,
                note=f"{instances} sequences, bitwise",
            )
        )
    models = [BanachSpaceModel(SpaceVariant.LP, grid, p) for p in (1.0, 2.0, math.inf)]
    models.append(BanachSpaceModel(SpaceVariant.L0, grid, math.inf))
    for model in models:
        sandwiches = [sandwich_check(model, random_sequence(rng, radius, support=4)) for _ in range(10)]
        worst = max(sandwiches, key=lambda r: r.observed / r.bound if r.bound else 0.0)
        reports.append(
            CheckReport(worst.name, all(r.passed for r in sandwiches), worst.observed, worst.bound, worst.note)
        )

    mixed = BanachSpaceModel(SpaceVariant.MIXED, default_grid(2, config.spaces), 2.0, 1.0)
    mismatches = 0
    for _ in range(max(1, instances // 100)):
        c = random_sequence(rng, mixed.grid.default_radius, dimension=2, support=3)
        if ed_norm(mixed, c) != mixed_lp_norm(c.values, 2.0, 1.0):
            mismatches += 1
    reports.append(CheckReport("E_d = l^(2,1)", mismatches == 0, float(mismatches), 0.0, "mixed model on Z^2"))

    for model in models[:3]:
        reports.append(weighted_L1_embedding_check(model, samples=20, seed=int(rng.integers(2**31)), config=config))
    return reports


def reconstruction_suite(rng: np.random.Generator, config: ApplicationConfig, instances: int = 20) -> List[CheckReport]:
    """c = S(R_psi(c)) with the interpolating window, f = Pi(L_psi(f)) with the partition window."""
    reports = []
    radius = 64
    wide = GridSpec(1, 2.0 * radius, 2.0**-2)
    window = interpolating_window(Gaussian(0.5), wide)
    worst = 0.0
    for _ in range(instances):
        c = random_sequence(rng, radius, support=7)
        recovered = evaluation(synthesis(c, window, wide), radius)
        worst = max(worst, float(np.max(np.abs(recovered.values - c.values))))
    reports.append(
        CheckReport(
            name="c = S(R_psi(c))",
            passed=worst <= 1e-8,
            observed=worst,
            bound=1e-8,
            note=f"J={radius}, |supp c| <= 15, lattice error {window_invariant_error(window):.3g}",
        )
    )

    grid = default_grid(1, config.spaces)
    partition = partition_window(Gaussian(0.5), grid)
    inner = np.abs(grid.axis) <= grid.default_radius / 2
    worst = 0.0
    for degree in range(9):
        terms = tuple((k, complex(rng.standard_normal(), rng.standard_normal())) for k in range(-degree, degree + 1))
        f = sample_function(Trig(terms), grid)
        recovered = periodize(multiply(partition, f))
        worst = max(worst, float(np.max(np.abs(recovered.samples[inner] - f.samples[inner]))))
    reports.append(
        CheckReport(
            name="f = Pi(L_psi(f))",
            passed=worst <= 1e-6,
            observed=worst,
            bound=1e-6,
            note=f"trigonometric degree <= 8, cell error {window_invariant_error(partition):.3g}",
        )
    )
    return reports


def parametrix_suite(rng: np.random.Generator, config: ApplicationConfig) -> List[CheckReport]:
    """f = f'' * (chi F_1) - f * phi_1 for the degree-8 bump, with convergence under grid refinement."""
    parametrix = Parametrix1D()
    bump = PolyBump(8, 1.0)
    coarse = parametrix_reproduce(parametrix, bump, GridSpec(1, 4.0, 2.0**-6))
    fine = parametrix_reproduce(parametrix, bump, GridSpec(1, 4.0, 2.0**-7))
    ratio = coarse.max_error / fine.max_error if fine.max_error > 0 else math.inf
    return [
        CheckReport("parametrix identity", coarse.max_error <= 1e-6, coarse.max_error, 1e-6, f"h=2^-6, {coarse.points} points"),
        CheckReport("parametrix convergence", ratio >= 3.0, ratio, 3.0, f"error {fine.max_error:.3g} at h=2^-7"),
        CheckReport(
            "discrete delta normalization",
            abs(coarse.delta_normalization - 1.0) <= 1e-12,
            coarse.delta_normalization,
            1.0,
            "second difference of F_1 at 0",
        ),
    ]


def _agreement(name: str, verdict_horizon: dict, status: str) -> CheckReport:
    agrees = bool(verdict_horizon.get("agrees", True))
    return CheckReport(
        name=name,
        passed=agrees,
        note=f"probe {status}, relation {verdict_horizon.get('cross_check', 'n/a')}",
    )


def probes_suite(
    rng: np.random.Generator, config: ApplicationConfig, kinds: Sequence[Kind] = (Kind.ROUMIEU, Kind.BEURLING)
) -> List[CheckReport]:
    """Delta and character probes never contradict the system relations on the shipped pairs."""
    model = BanachSpaceModel(SpaceVariant.LP, default_grid(1, config.spaces), 2.0)
    functions = shipped_function_systems(config.sequences.q_max)
    sequences = shipped_sequence_systems(config.sequences.q_max)
    reports = []
    for kind in kinds:
        for (name_w, W), (name_v, V) in _pairs(functions):
            probe = probe_delta_sequences(W, V, kind, model, config)
            reports.append(_agreement(f"delta probe {name_w} / {name_v} ({kind.value})", probe.horizon, probe.status.value))
        for (name_m, M), (name_n, N) in _pairs(sequences):
            probe = probe_characters(M, N, kind, model, config=config)
            reports.append(_agreement(f"character probe {name_m} / {name_n} ({kind.value})", probe.horizon, probe.status.value))
    return reports


def _pairs(systems: Mapping[str, T]) -> List[Tuple[Tuple[str, T], Tuple[str, T]]]:
    """Each system with itself and with its successor."""
    items = list(systems.items())
    return [(a, b) for i, a in enumerate(items) for b in items[i : i + 2]]


def bounds_suite(rng: np.random.Generator, config: ApplicationConfig, instances: int = 1000) -> List[CheckReport]:
    """||R_psi(c)||_E against C_0 C ||c||_{E_d} ||psi||_{<.>^2}, sampling domination, weighted E_d inclusion."""
    grid = GridSpec(1, 16.0, 2.0**-3)
    reports = []
    for p in (1.0, 2.0, math.inf):
        model = BanachSpaceModel(SpaceVariant.LP, grid, p)
        windows = [interpolating_window(Gaussian(a), grid) for a in (0.25, 0.5, 1.0, 2.0)]
        worst = 0.0
        failed = 0
        for i in range(instances // 3 + 1):
            c = random_sequence(rng, grid.default_radius, support=int(rng.integers(0, grid.default_radius + 1)))
            report = synthesis_bound_check(model, c, windows[i % len(windows)])
            worst = max(worst, report.observed)
            failed += not report.passed
        reports.append(CheckReport(f"synthesis bound L^{p:g}", failed == 0, worst, 1.0, f"{instances // 3 + 1} instances"))

    model = BanachSpaceModel(SpaceVariant.LP, default_grid(1, config.spaces), 2.0)
    f = sample_function(Gaussian(0.5), model.grid)
    reports.append(sample_convolution_check(model, f, PolyBump(8, 1.0)))

    gevrey = shipped_function_systems(config.sequences.q_max)
    W, V = gevrey["dilated gevrey s=0.5"], gevrey["dilated gevrey s=1"]
    certificate = system_relation_functions(W, V, Kind.ROUMIEU, config)
    reports.append(weighted_ed_inclusion_check(model, W, V, certificate, samples=5, seed=int(rng.integers(2**31)), config=config))
    return reports


def hierarchy_suite(
    rng: np.random.Generator, config: ApplicationConfig, kinds: Sequence[Kind] = (Kind.ROUMIEU, Kind.BEURLING)
) -> List[CheckReport]:
    """[I] implies [wI], [M] implies [wM], and the derived-system consistency checks."""
    reports: List[CheckReport] = []
    sequences = shipped_sequence_systems(config.sequences.q_max)
    functions = shipped_function_systems(config.sequences.q_max)
    for kind in kinds:
        for name, M in sequences.items():
            strong, weak = check_I(M, kind, config), check_wI(M, kind, config)
            reports.append(
                CheckReport(
                    f"[I] => [wI] on {name} ({kind.value})",
                    not strong.is_witnessed or weak.is_witnessed,
                    note=f"[I] {strong.status.value}, [wI] {weak.status.value}",
                    verdicts=(("[I]", strong), ("[wI]", weak)),
                )
            )
            reports.append(moderate_growth_check(M, kind, config))
        for name, W in functions.items():
            strong, weak = check_M(W, kind, config), check_wM(W, kind, config)
            reports.append(
                CheckReport(
                    f"[M] => [wM] on {name} ({kind.value})",
                    not strong.is_witnessed or weak.is_witnessed,
                    note=f"[M] {strong.status.value}, [wM] {weak.status.value}",
                    verdicts=(("[M]", strong), ("[wM]", weak)),
                )
            )
        gevrey = [sequences[f"dilated gevrey s={s:g}"] for s in GEVREY_ORDERS]
        for M, N in zip(gevrey, gevrey[1:]):
            reports.append(derived_inclusion_check(M, N, kind, config))
            reports.append(derived_inclusion_check(N, M, kind, config))
    return reports


def certificates_suite(
    rng: np.random.Generator,
    config: ApplicationConfig,
    kinds: Sequence[Kind] = (Kind.ROUMIEU,),
    exponents: Sequence[float] = (2.0,),
) -> List[CheckReport]:
    """
    Gevrey and BMT decisions against their known answers, the identity
    decision, and certificate replay on a longer horizon.
    """
    reports = []
    for kind in kinds:
        for p in exponents:
            for s in GEVREY_ORDERS:
                for t in GEVREY_ORDERS:
                    certificate = decide_inclusion(gevrey_space(s, kind, p), gevrey_space(t, kind, p), config)
                    expected = Conclusion.INCLUDED if s <= t else Conclusion.NOT_INCLUDED
                    reports.append(_expect(f"S^{s:g} vs S^{t:g} ({kind.value}, p={p:g})", certificate.conclusion, expected))
            for rho in BMT_EXPONENTS:
                for sigma in BMT_EXPONENTS:
                    certificate = decide_inclusion(bmt_space(rho, kind, p), bmt_space(sigma, kind, p), config)
                    expected = Conclusion.INCLUDED if sigma <= rho else Conclusion.NOT_INCLUDED
                    name = f"pow({rho:g}) vs pow({sigma:g}) ({kind.value}, p={p:g})"
                    reports.append(_expect(name, certificate.conclusion, expected))

    space = gevrey_space(1.0, Kind.ROUMIEU)
    identity = decide_inclusion(space, space, config)
    constants = [v.log_constant for _, v in identity.relations]
    reports.append(
        CheckReport(
            "space vs itself",
            identity.conclusion is Conclusion.INCLUDED and all(c == 0.0 for c in constants),
            note=f"{identity.conclusion.value}; log C = {constants}",
        )
    )

    W = WeightFunctionSystem(DilatedWeights(gevrey_sequence(0.5)))
    V = WeightFunctionSystem(DilatedWeights(gevrey_sequence(1.0)))
    original = system_relation_functions(W, V, Kind.ROUMIEU, config)
    refined_config = update_config(config, "systems", {"shell_points": 2 * config.systems.shell_points})
    refined = system_relation_functions(W, V, Kind.ROUMIEU, refined_config)
    reports.append(
        CheckReport(
            "certificate replay",
            replay_certificate(original, refined, config.systems.replay_slack),
            observed=refined.log_constant,
            bound=original.log_constant + math.log(config.systems.replay_slack),
            note=f"{original.status.value} -> {refined.status.value}",
        )
    )
    return reports


def _expect(name: str, got: Conclusion, expected: Conclusion) -> CheckReport:
    return CheckReport(name, got is expected, note=f"got {got.value}, expected {expected.value}")


_RUNNERS: Dict[str, Callable[[np.random.Generator, ApplicationConfig], List[CheckReport]]] = {
    "norms": norms_suite,
    "reconstruction": reconstruction_suite,
    "parametrix": parametrix_suite,
    "probes": probes_suite,
    "bounds": bounds_suite,
    "hierarchy": hierarchy_suite,
    "certificates": certificates_suite,
}


def run_suite(name: str, seed: int = 42, config: ApplicationConfig = DEFAULT_CONFIG) -> SuiteResult:
    """
    Run one suite.

    Raises:
        ValueError: unknown suite name
    """
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite '{name}', expected one of {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    logger.info(f"running suite {name} (seed {seed})")
    result = SuiteResult(name, tuple(_RUNNERS[name](rng, config)), seed)
    for failure in result.failures:
        logger.warning(f"{name}: {failure.name} failed ({failure.note})")
    logger.info(f"suite {name}: {len(result.reports) - len(result.failures)}/{len(result.reports)} passed")
    return result


def run_suites(selector: str = "all", seed: int = 42, config: ApplicationConfig = DEFAULT_CONFIG) -> List[SuiteResult]:
    """`all` or a comma-separated list of suite names, run in the listed order."""
    names = list(SUITES) if selector == "all" else [name.strip() for name in selector.split(",") if name.strip()]
    unknown = [name for name in names if name not in _RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite(s) {', '.join(unknown)}, expected 'all' or any of {', '.join(SUITES)}")
    return [run_suite(name, seed, config) for name in names]
