"""
Weight sequence systems, weight function systems and their conditions.

A sequence system {M^lambda} grows with lambda, a function system {w^lambda}
decays with lambda. Quantified conditions are realized over finite grids:
universal parameters run over the probe grid (every member for explicit
systems), existential parameters are scanned over the lambda grid starting
from the end the quantifier favors, smallest first in the Beurling case and
largest first in the Roumieu case. The first success is the certificate.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from gsinclusion.core.config import create_default_config
from gsinclusion.core.conjugate import BMTWeightFunction, omega_name, omega_value
from gsinclusion.core.data_structures import (
    ApplicationConfig,
    Bundle,
    CheckReport,
    Kind,
    RelationVerdict,
    combine_verdicts,
    constant_bundle,
    format_bundle,
)
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.functions import (
    AssocDilate,
    FromOmega,
    PolyShift,
    WeightFunction,
    check_bmt_conditions,
    compare_weight_functions,
    describe_weight,
    log_weight,
)
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.sequences import (
    FromBMT,
    Scaled,
    Tensor,
    WeightSequence,
    associated_function_values,
    check_log_convex,
    describe_sequence,
    dilate,
    extend_horizon,
    log_profile,
    log_values_at,
    multi_indices_of_order,
    relation_preceq,
    relation_subseteq,
)

logger = get_module_logger(__name__)

DEFAULT_CONFIG = create_default_config()

# increments below this fraction of the tail scale count as flat
FLAT_TOLERANCE = 1e-9
# rounding of omega evaluations, relative to the magnitudes compared
ROUNDING_SLACK = 1e-13


@dataclass(frozen=True)
class Dilated:
    """M^lambda_alpha = lambda^{|alpha|} M_alpha."""

    generator: WeightSequence


@dataclass(frozen=True)
class BMTGenerated:
    """M^lambda = M^lambda_omega."""

    omega: BMTWeightFunction


@dataclass(frozen=True)
class ExplicitSequences:
    """Finitely many members (lambda, M^lambda), sorted by lambda."""

    members: Tuple[Tuple[float, WeightSequence], ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("an explicit system needs at least one member")
        lams = [lam for lam, _ in self.members]
        if any(not lam > 0 for lam in lams):
            raise ValueError("system parameters must be positive")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("system parameters must be strictly increasing")


SequenceSystemSpec = Union[Dilated, BMTGenerated, ExplicitSequences]


def _log_table(M: WeightSequence, top: int) -> np.ndarray:
    """log M_alpha over all |alpha| <= top, ordered by order."""
    if M.isotropic:
        return np.asarray(log_profile(M, top))
    return np.concatenate([log_values_at(M, multi_indices_of_order(M.dimension, q), top) for q in range(top + 1)])


@dataclass(frozen=True)
class WeightSequenceSystem:
    """A family {M^lambda} of weight sequences, non-decreasing in lambda."""

    spec: SequenceSystemSpec
    dimension: int = 1
    q_max: int = 64

    def __post_init__(self) -> None:
        spec = self.spec
        if isinstance(spec, Dilated) and spec.generator.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, spec.generator.dimension, "generator")
        if isinstance(spec, ExplicitSequences):
            for _, M in spec.members:
                if M.dimension != self.dimension:
                    raise DimensionMismatchError(self.dimension, M.dimension, "member")
            for (lam, lower), (mu, upper) in zip(spec.members, spec.members[1:]):
                top = min(lower.q_max, upper.q_max)
                excess = _log_table(lower, top) - _log_table(upper, top)
                if np.max(excess) > 1e-12 * max(1.0, float(np.max(np.abs(_log_table(upper, top))))):
                    raise ValueError(f"system is not monotone: M^{lam:g} exceeds M^{mu:g}")

    def __str__(self) -> str:
        return describe_sequence_system(self)


def describe_sequence_system(system: WeightSequenceSystem) -> str:
    spec = system.spec
    if isinstance(spec, Dilated):
        return f"dilated({describe_sequence(spec.generator)})"
    if isinstance(spec, BMTGenerated):
        return f"frombmt({omega_name(spec.omega)})"
    return "explicit:[" + ",".join(f"({lam:g},{describe_sequence(M)})" for lam, M in spec.members) + "]"


@dataclass(frozen=True)
class DilatedWeights:
    """W_A = {exp omega_A(x / lambda)}."""

    generator: WeightSequence


@dataclass(frozen=True)
class OmegaWeights:
    """W_omega = {exp(omega(|x|) / lambda)}."""

    omega: BMTWeightFunction


@dataclass(frozen=True)
class SequenceWeights:
    """W_M = {exp omega_{M^lambda}} of a sequence system."""

    system: WeightSequenceSystem


@dataclass(frozen=True)
class ShiftedWeights:
    """W_k = {<x>^k w^lambda}."""

    k: float
    base: "WeightFunctionSystem"

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"polynomial shift must be non-negative, got {self.k}")


@dataclass(frozen=True)
class ExplicitWeights:
    """Finitely many members (lambda, w^lambda), sorted by lambda."""

    members: Tuple[Tuple[float, WeightFunction], ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("an explicit system needs at least one member")
        lams = [lam for lam, _ in self.members]
        if any(not lam > 0 for lam in lams):
            raise ValueError("system parameters must be positive")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("system parameters must be strictly increasing")


FunctionSystemSpec = Union[DilatedWeights, OmegaWeights, SequenceWeights, ShiftedWeights, ExplicitWeights]


@dataclass(frozen=True)
class WeightFunctionSystem:
    """A family {w^lambda} of weight functions, non-increasing in lambda."""

    spec: FunctionSystemSpec
    dimension: int = 1

    def __post_init__(self) -> None:
        spec = self.spec
        if isinstance(spec, DilatedWeights) and spec.generator.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, spec.generator.dimension, "generator")
        if isinstance(spec, SequenceWeights) and spec.system.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, spec.system.dimension, "sequence system")
        if isinstance(spec, ShiftedWeights) and spec.base.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, spec.base.dimension, "base system")
        if isinstance(spec, ExplicitWeights) and len(spec.members) > 1:
            points, _ = shell_grid(self.dimension, 1e3, 24)
            previous = None
            for lam, w in spec.members:
                current = log_weight(w, points)
                if previous is not None:
                    excess = current.log_values - previous[1]
                    if np.max(excess) > 1e-12 * max(1.0, float(np.max(np.abs(current.log_values)))):
                        raise ValueError(f"system is not monotone: w^{lam:g} exceeds w^{previous[0]:g}")
                previous = (lam, current.log_values)

    def __str__(self) -> str:
        return describe_function_system(self)


def describe_function_system(system: WeightFunctionSystem) -> str:
    spec = system.spec
    if isinstance(spec, DilatedWeights):
        return f"dilated({describe_sequence(spec.generator)})"
    if isinstance(spec, OmegaWeights):
        return f"fromomega({omega_name(spec.omega)})"
    if isinstance(spec, SequenceWeights):
        return f"assoc({describe_sequence_system(spec.system)})"
    if isinstance(spec, ShiftedWeights):
        return f"polyshift(k={spec.k:g},{describe_function_system(spec.base)})"
    return "explicit:[" + ",".join(f"({lam:g},{describe_weight(w)})" for lam, w in spec.members) + "]"


AnySystem = Union[WeightSequenceSystem, WeightFunctionSystem]


def _grid(low: int, high: int) -> Tuple[float, ...]:
    return tuple(2.0**k for k in range(low, high + 1))


def _explicit_members(system: AnySystem) -> Optional[Tuple[float, ...]]:
    spec = system.spec
    if isinstance(spec, (ExplicitSequences, ExplicitWeights)):
        return tuple(lam for lam, _ in spec.members)
    if isinstance(spec, ShiftedWeights):
        return _explicit_members(spec.base)
    if isinstance(spec, SequenceWeights):
        return _explicit_members(spec.system)
    return None


def lambda_grid(system: AnySystem, config: ApplicationConfig = DEFAULT_CONFIG) -> Tuple[float, ...]:
    """Parameters searched by existential quantifiers."""
    members = _explicit_members(system)
    if members is not None:
        return members
    return _grid(config.systems.lambda_exponent_min, config.systems.lambda_exponent_max)


def probe_grid(system: AnySystem, config: ApplicationConfig = DEFAULT_CONFIG) -> Tuple[float, ...]:
    """Parameters probed by universal quantifiers."""
    members = _explicit_members(system)
    if members is not None:
        return members
    return _grid(config.systems.probe_exponent_min, config.systems.probe_exponent_max)


def r_grid(config: ApplicationConfig = DEFAULT_CONFIG) -> Tuple[float, ...]:
    """The finite stand-in for "for all R > 0"; R < 1 is implied by R = 1."""
    return _grid(0, config.systems.r_exponent_max)


def _grid_label(grid: Sequence[float]) -> str:
    exponents = [math.log2(g) for g in grid]
    if all(float(e).is_integer() for e in exponents) and len(grid) > 2:
        return f"2^{int(exponents[0])}..2^{int(exponents[-1])}"
    return ",".join(f"{g:g}" for g in grid)


def _lookup(members: Sequence[Tuple[float, object]], lam: float) -> object:
    for key, value in members:
        if math.isclose(key, lam, rel_tol=1e-12):
            return value
    raise ValueError(f"lambda={lam:g} is not a member of the explicit system")


def member(system: WeightSequenceSystem, lam: float) -> WeightSequence:
    """The weight sequence M^lambda."""
    spec = system.spec
    if isinstance(spec, Dilated):
        return dilate(spec.generator, lam)
    if isinstance(spec, BMTGenerated):
        return WeightSequence(FromBMT(spec.omega, lam), system.dimension, system.q_max)
    return _lookup(spec.members, lam)  # type: ignore[return-value]


def function_member(
    system: WeightFunctionSystem, lam: float, config: ApplicationConfig = DEFAULT_CONFIG
) -> WeightFunction:
    """The weight function w^lambda; sequence-derived weights use the weight horizon."""
    spec = system.spec
    horizon = config.systems.weight_q_max
    if isinstance(spec, DilatedWeights):
        return AssocDilate(extend_horizon(spec.generator, horizon), lam)
    if isinstance(spec, OmegaWeights):
        return FromOmega(spec.omega, lam)
    if isinstance(spec, SequenceWeights):
        return AssocDilate(extend_horizon(member(spec.system, lam), horizon), 1.0)
    if isinstance(spec, ShiftedWeights):
        return PolyShift(spec.k, function_member(spec.base, lam, config))
    return _lookup(spec.members, lam)  # type: ignore[return-value]


def derived_function_system(system: WeightSequenceSystem) -> WeightFunctionSystem:
    """W_M = {exp omega_{M^lambda}}."""
    return WeightFunctionSystem(SequenceWeights(system), system.dimension)


def dilated_generator(system: AnySystem) -> Optional[WeightSequence]:
    """Generator A when the system is M_A or W_A."""
    spec = system.spec
    if isinstance(spec, Dilated):
        return spec.generator
    if isinstance(spec, DilatedWeights):
        return spec.generator
    if isinstance(spec, SequenceWeights):
        return dilated_generator(spec.system)
    return None


def bmt_generator(system: AnySystem) -> Optional[BMTWeightFunction]:
    """omega when the system is M_omega, W_omega or W_{M_omega}."""
    spec = system.spec
    if isinstance(spec, (BMTGenerated, OmegaWeights)):
        return spec.omega
    if isinstance(spec, SequenceWeights):
        return bmt_generator(spec.system)
    return None


# Grids of points


def _directions(dimension: int) -> np.ndarray:
    if dimension == 1:
        return np.array([[1.0], [-1.0]])
    if dimension == 2:
        angles = np.arange(8) * np.pi / 4.0
        return np.column_stack((np.cos(angles), np.sin(angles)))
    eye = np.eye(dimension)
    diagonal = np.ones((1, dimension)) / math.sqrt(dimension)
    return np.vstack((eye, -eye, diagonal, -diagonal))


def shell_grid(dimension: int, radius: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points on geometric shells up to `radius` with their shell index.

    Index 0 is the origin; shell k has radius geomspace(...)[k - 1] and one
    point per direction.
    """
    radii = np.geomspace(min(1e-2, radius / 10.0), radius, count)
    directions = _directions(dimension)
    shells = (radii[:, None, None] * directions[None, :, :]).reshape(-1, dimension)
    points = np.vstack((np.zeros((1, dimension)), shells))
    index = np.concatenate(([0], np.repeat(np.arange(1, count + 1), directions.shape[0])))
    return points, index


def unit_ball_mesh(dimension: int, points_per_axis: int) -> np.ndarray:
    """Tensor mesh of [-1, 1]^n restricted to the closed unit ball."""
    axis = np.linspace(-1.0, 1.0, points_per_axis)
    mesh = np.stack(np.meshgrid(*([axis] * dimension), indexing="ij"), axis=-1).reshape(-1, dimension)
    return mesh[np.linalg.norm(mesh, axis=1) <= 1.0 + 1e-12]


def radial_grid(dimension: int, radius: float, points_per_decade: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Points along the axis directions (and the diagonal for n >= 2) on [1, radius]."""
    decades = max(1, int(round(math.log10(radius))))
    radii = np.geomspace(1.0, radius, decades * points_per_decade + 1)
    directions = [np.eye(dimension)[0]]
    if dimension > 1:
        directions.append(np.ones(dimension) / math.sqrt(dimension))
    points = np.vstack([radii[:, None] * d[None, :] for d in directions])
    index = np.tile(np.arange(radii.size), len(directions))
    return points, index


def _shell_maxima(values: np.ndarray, index: np.ndarray, saturated: np.ndarray, shells: int) -> np.ndarray:
    """Maximum per shell; shells touching an unsaturated value become NaN."""
    maxima = np.full(shells, -np.inf)
    np.maximum.at(maxima, index, np.where(saturated, values, -np.inf))
    incomplete = np.zeros(shells, dtype=bool)
    np.logical_or.at(incomplete, index, ~saturated)
    maxima[incomplete] = np.nan
    return maxima


def tail_trend(maxima: np.ndarray, window: int, margin: float) -> str:
    """
    Trend of the last window + 1 entries.

    Returns:
        "bounded" when the tail does not increase, "diverging" when it strictly
        increases by more than margin overall, "undecided" otherwise
    """
    tail = maxima[-window - 1 :]
    if tail.size < 2 or not np.all(np.isfinite(tail)):
        return "undecided"
    steps = np.diff(tail)
    scale = max(1.0, float(np.max(np.abs(tail))))
    if np.all(steps <= FLAT_TOLERANCE * scale):
        return "bounded"
    if np.all(steps > 0) and tail[-1] - tail[0] > margin:
        return "diverging"
    return "undecided"


def _log_c(bundle: Bundle) -> float:
    if "log_C" in bundle:
        return float(bundle["log_C"])
    if "C" in bundle:
        return math.log(float(bundle["C"]))
    return 0.0


Params = Dict[str, float]


def _search(
    outer: Sequence[Params],
    inner: Sequence[Params],
    test: Callable[[Params], RelationVerdict],
    horizon: Bundle,
    what: str,
) -> RelationVerdict:
    """
    Realize "for every outer parameter there is an inner one".

    Falsified only when every inner candidate of some outer parameter is
    falsified; Witnessed when every outer parameter found a candidate.
    """
    details: List[Bundle] = []
    undecided: Optional[Params] = None
    for fixed in outer:
        refuted: List[Tuple[Params, RelationVerdict]] = []
        found = False
        for choice in inner:
            params = {**fixed, **choice}
            verdict = test(params)
            if verdict.is_witnessed:
                details.append({**params, **verdict.witness})
                found = True
                break
            if verdict.is_falsified:
                refuted.append((params, verdict))
        if found:
            continue
        if refuted and len(refuted) == len(inner):
            params, verdict = refuted[-1]
            logger.debug(f"{what} falsified at {format_bundle(fixed)}")
            return RelationVerdict.falsified(
                {**fixed, **verdict.counterexample}, horizon, note=f"{what}: every candidate fails", details=tuple(details)
            )
        if undecided is None:
            undecided = fixed
    if undecided is not None:
        return RelationVerdict.inconclusive(
            f"{what}: no candidate certified for {format_bundle(undecided)}", horizon, tuple(details)
        )
    worst = max(details, key=_log_c)
    return RelationVerdict.witnessed({**worst, "probes": len(details)}, horizon, details=tuple(details))


def _quantifiers(
    system: AnySystem, kind: Kind, config: ApplicationConfig, outer_names: Sequence[str], inner_names: Sequence[str]
) -> Tuple[List[Params], List[Params], Bundle]:
    """
    Outer (universal) and inner (existential) parameter lists.

    Beurling: outer runs over lambda, inner over mu (and nu = mu) ascending.
    Roumieu: outer runs over mu (and nu), inner over lambda descending.
    """
    probes = probe_grid(system, config)
    candidates = lambda_grid(system, config)
    if kind is Kind.ROUMIEU:
        candidates = tuple(reversed(candidates))
    outer = [{name: p for name in outer_names} for p in probes]
    if len(outer_names) == 2:
        outer = [{outer_names[0]: a, outer_names[1]: b} for a in probes for b in probes]
    inner = [{name: c for name in inner_names} for c in candidates]
    horizon: Bundle = {
        "kind": kind.value,
        "universal": _grid_label(probes),
        "existential": _grid_label(candidates if kind is Kind.BEURLING else tuple(reversed(candidates))),
    }
    return outer, inner, horizon


def _relation_quantifiers(
    left: AnySystem, right: AnySystem, kind: Kind, config: ApplicationConfig
) -> Tuple[List[Params], List[Params], Bundle]:
    """
    Parameters of "left [subseteq] right".

    Beurling: every lambda of `right` needs some mu of `left`.
    Roumieu: every mu of `left` needs some lambda of `right`.
    Existential candidates cover the whole lambda grid.
    """
    if kind is Kind.BEURLING:
        probes, candidates = probe_grid(right, config), lambda_grid(left, config)
        outer = [{"lambda": p} for p in probes]
        inner = [{"mu": c} for c in candidates]
    else:
        probes, candidates = probe_grid(left, config), lambda_grid(right, config)
        outer = [{"mu": p} for p in probes]
        inner = [{"lambda": c} for c in reversed(candidates)]
    horizon: Bundle = {"kind": kind.value, "universal": _grid_label(probes), "existential": _grid_label(candidates)}
    return outer, inner, horizon


def _saturated_prefix(maxima: np.ndarray) -> np.ndarray:
    """Shell maxima up to the first shell with unsaturated points."""
    missing = np.flatnonzero(np.isnan(maxima))
    return maxima if missing.size == 0 else maxima[: missing[0]]


def _roles(kind: Kind, pair: bool = False) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    small = ("mu", "nu") if pair else ("mu",)
    if kind is Kind.BEURLING:
        return ("lambda",), small
    return small, ("lambda",)


def _with_r(outer: List[Params], config: ApplicationConfig) -> List[Params]:
    return [{"R": R, **fixed} for R in r_grid(config) for fixed in outer]


def system_log_convex(system: WeightSequenceSystem, config: ApplicationConfig = DEFAULT_CONFIG) -> RelationVerdict:
    """Log-convexity of every probed member (of the generator for dilated systems)."""
    spec = system.spec
    if isinstance(spec, Dilated):
        return check_log_convex(spec.generator, config=config.sequences)
    lams = probe_grid(system, config)
    return combine_verdicts([check_log_convex(member(system, lam), config=config.sequences) for lam in lams])


def _isotropic_log_convex(system: WeightSequenceSystem, config: ApplicationConfig) -> bool:
    spec = system.spec
    if isinstance(spec, Dilated):
        return spec.generator.isotropic and check_log_convex(spec.generator, config=config.sequences).is_witnessed
    members = [member(system, lam) for lam in probe_grid(system, config)]
    return all(M.isotropic for M in members) and system_log_convex(system, config).is_witnessed


def check_L(
    system: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    Condition [L]: R^{|alpha|} M^mu_alpha <= C M^lambda_alpha.

    Dilated systems take mu = lambda / R (lambda = R mu); omega-generated
    systems satisfy [L] and are spot-checked at R = 2.
    """
    outer_names, inner_names = _roles(kind)
    outer, inner, horizon = _quantifiers(system, kind, config, outer_names, inner_names)
    horizon["R"] = _grid_label(r_grid(config))
    spec = system.spec

    if isinstance(spec, Dilated):
        rule = "mu = lambda/R" if kind is Kind.BEURLING else "lambda = R*mu"
        details = []
        for fixed in _with_r(outer, config):
            R = fixed["R"]
            params = dict(fixed)
            if kind is Kind.BEURLING:
                params["mu"] = params["lambda"] / R
            else:
                params["lambda"] = params["mu"] * R
            details.append({**params, "C": 1.0, "log_C": 0.0})
        return RelationVerdict.witnessed(
            {"C": 1.0, "log_C": 0.0, "rule": rule}, {**horizon, "fast_path": "dilated"}, details=tuple(details)
        )

    def test(p: Params) -> RelationVerdict:
        return relation_subseteq(dilate(member(system, p["mu"]), p["R"]), member(system, p["lambda"]), config=config.sequences)

    if isinstance(spec, BMTGenerated):
        spot = _search([{"R": 2.0, outer_names[0]: 1.0}], inner, test, horizon, "[L] spot check")
        if spot.is_falsified:
            return RelationVerdict.inconclusive("omega-generated system fails the [L] spot check", horizon, spot.details)
        witness: Bundle = {"source": "omega-generated", "spot_check": spot.status.value}
        if spot.is_witnessed:
            witness.update({key: spot.witness[key] for key in ("C", "log_C", "mu", "lambda") if key in spot.witness})
        return RelationVerdict.witnessed(witness, {**horizon, "fast_path": "bmt"}, details=spot.details)

    verdict = _search(_with_r(outer, config), inner, test, horizon, "[L]")
    logger.info(f"[L] of {describe_sequence_system(system)} ({kind.value}): {verdict.status.value}")
    return verdict


def _coordinate_profiles(M: WeightSequence, top: int) -> Optional[List[np.ndarray]]:
    """Order profiles per coordinate factor; a single profile for isotropic M."""
    if M.isotropic:
        return [np.asarray(log_profile(M, top))]
    spec = M.spec
    if isinstance(spec, Tensor):
        return [np.asarray(log_profile(f, top)) for f in spec.factors]
    if isinstance(spec, Scaled):
        base = _coordinate_profiles(spec.base, top)
        if base is None:
            return None
        q = np.arange(top + 1)
        return [p + q * math.log(spec.factor) for p in base]
    return None


def _pair_order_maxima(left_a: np.ndarray, left_b: np.ndarray, right: np.ndarray) -> np.ndarray:
    """max over a + b = q of left_a[a] + left_b[b] - right[a + b]."""
    top = right.size - 1
    a = np.arange(top + 1)
    total = a[:, None] + a[None, :]
    valid = total <= top
    grid = left_a[:, None] + left_b[None, :] - right[np.minimum(total, top)]
    maxima = np.full(top + 1, -np.inf)
    np.maximum.at(maxima, total[valid], grid[valid])
    return maxima


def _pair_members(
    system: WeightSequenceSystem, params: Params, names: Sequence[str]
) -> Optional[Tuple[int, List[List[np.ndarray]]]]:
    members = [member(system, params[name]) for name in names]
    top = min(M.q_max for M in members)
    profiles = [_coordinate_profiles(M, top) for M in members]
    if any(p is None for p in profiles) or len({len(p) for p in profiles}) != 1:  # type: ignore[arg-type]
        return None
    return top, profiles  # type: ignore[return-value]


def _h_grid(config: ApplicationConfig) -> Tuple[float, ...]:
    return _grid(config.sequences.h_exponent_min, config.sequences.h_exponent_max)


def _superadditive_test(
    system: WeightSequenceSystem,
    config: ApplicationConfig,
    left_names: Tuple[str, str],
    with_r: bool,
) -> Callable[[Params], RelationVerdict]:
    """
    Numeric test of M^mu_alpha X_beta <= C H^{|alpha+beta|} M^lambda_{alpha+beta}.

    X is M^nu for [I] and R^{|beta|} for [wI] (all R on the grid at once).
    Tensor members are checked factor-wise; H runs upward over its grid.
    """
    window = config.sequences.tail_window
    margin = config.sequences.divergence_margin
    names = ("lambda",) + left_names[:1] + (() if with_r else left_names[1:])

    def test(p: Params) -> RelationVerdict:
        loaded = _pair_members(system, p, names)
        if loaded is None:
            return RelationVerdict.inconclusive("members have no common coordinate structure")
        top, profiles = loaded
        right_profiles, mu_profiles = profiles[0], profiles[1]
        q = np.arange(top + 1)
        Rs = r_grid(config) if with_r else (1.0,)
        last_maxima = None
        for H in _h_grid(config):
            per_r: Dict[float, float] = {}
            bounded = True
            for R in Rs:
                log_c = 0.0
                for i, right in enumerate(right_profiles):
                    second = q * math.log(R) if with_r else profiles[2][i]
                    maxima = _pair_order_maxima(mu_profiles[i], second, right + q * math.log(H))
                    last_maxima = maxima
                    if tail_trend(maxima, min(window, top - 1), margin) != "bounded":
                        bounded = False
                        break
                    log_c += float(np.max(maxima))
                if not bounded:
                    break
                per_r[R] = log_c
            if bounded:
                worst = max(per_r.values())
                witness: Bundle = {"H": H, **constant_bundle(worst)}
                if with_r:
                    witness.update({f"log_C@R={R:g}": value for R, value in per_r.items()})
                return RelationVerdict.witnessed(witness)
        if last_maxima is not None and tail_trend(last_maxima, min(window, top - 1), margin) == "diverging":
            return RelationVerdict.falsified({"order": top, "log_excess": float(last_maxima[-1])})
        return RelationVerdict.inconclusive("no H on the grid bounds the order maxima")

    return test


def check_wI(
    system: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    Condition [wI]: M^mu_alpha R^{|beta|} <= C H^{|alpha+beta|} M^lambda_{alpha+beta}.

    "For all R" runs over the finite R grid. Systems of isotropic log-convex
    members take mu = lambda, H = 1 and C_R = exp omega_{M^lambda}(R), which
    follows from M_alpha M_beta <= M_{alpha+beta}.
    """
    outer_names, inner_names = _roles(kind)
    outer, inner, horizon = _quantifiers(system, kind, config, outer_names, inner_names)
    horizon["R"] = _grid_label(r_grid(config))

    if _isotropic_log_convex(system, config):
        details = []
        Rs = np.array(r_grid(config))
        for fixed in outer:
            lam = fixed[outer_names[0]]
            M = member(system, lam)
            points = np.zeros((Rs.size, system.dimension))
            points[:, 0] = Rs
            values, saturated = associated_function_values(extend_horizon(M, config.systems.weight_q_max), points)
            if not np.all(saturated):
                details = []
                break
            per_r = {f"log_C@R={R:g}": float(v) for R, v in zip(Rs, values)}
            details.append({"lambda": lam, "mu": lam, "H": 1.0, **constant_bundle(float(np.max(values))), **per_r})
        if details:
            worst = max(details, key=_log_c)
            return RelationVerdict.witnessed(
                {**worst, "probes": len(details)}, {**horizon, "fast_path": "isotropic log-convex"}, details=tuple(details)
            )

    verdict = _search(outer, inner, _superadditive_test(system, config, ("mu", "mu"), True), horizon, "[wI]")
    logger.info(f"[wI] of {describe_sequence_system(system)} ({kind.value}): {verdict.status.value}")
    return verdict


def check_I(
    system: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    Condition [I]: M^mu_alpha M^nu_beta <= C H^{|alpha+beta|} M^lambda_{alpha+beta}.

    Systems of isotropic log-convex sequences satisfy it with mu = nu = lambda
    (lambda = max(mu, nu)) and C = H = 1.
    """
    outer_names, inner_names = _roles(kind, pair=True)
    outer, inner, horizon = _quantifiers(system, kind, config, outer_names, inner_names)

    if _isotropic_log_convex(system, config):
        details = []
        for fixed in outer:
            if kind is Kind.BEURLING:
                lam = fixed["lambda"]
                details.append({"lambda": lam, "mu": lam, "nu": lam, "H": 1.0, "C": 1.0, "log_C": 0.0})
            else:
                details.append({**fixed, "lambda": max(fixed["mu"], fixed["nu"]), "H": 1.0, "C": 1.0, "log_C": 0.0})
        return RelationVerdict.witnessed(
            {"C": 1.0, "log_C": 0.0, "H": 1.0, "rule": "M_alpha M_beta <= M_{alpha+beta}"},
            {**horizon, "fast_path": "isotropic log-convex"},
            details=tuple(details),
        )

    verdict = _search(outer, inner, _superadditive_test(system, config, ("mu", "nu"), False), horizon, "[I]")
    logger.info(f"[I] of {describe_sequence_system(system)} ({kind.value}): {verdict.status.value}")
    return verdict


class _WeightSampler:
    """log w^lambda on fixed point sets, cached per (lambda, set)."""

    def __init__(self, system: WeightFunctionSystem, config: ApplicationConfig, points: Dict[str, np.ndarray]):
        self.system = system
        self.config = config
        self.points = points
        self._cache: Dict[Tuple[float, str], Tuple[np.ndarray, np.ndarray]] = {}

    def __call__(self, lam: float, name: str) -> Tuple[np.ndarray, np.ndarray]:
        key = (lam, name)
        if key not in self._cache:
            w = function_member(self.system, lam, self.config)
            evaluation = log_weight(w, self.points[name], self.config.sequences)
            self._cache[key] = (evaluation.log_values, evaluation.saturated)
        return self._cache[key]


def _alpha_bound(omega: BMTWeightFunction, config: ApplicationConfig) -> Optional[float]:
    alpha = check_bmt_conditions(omega, config=config.functions, tail_window=config.sequences.tail_window)["alpha"]
    return float(alpha.witness["bound"]) if alpha.is_witnessed else None


def _omega_moderate_growth(
    system: WeightFunctionSystem, kind: Kind, config: ApplicationConfig, outer: List[Params], horizon: Bundle, pair: bool
) -> Optional[RelationVerdict]:
    """
    [wM]/[M] of W_omega from (alpha): omega(2t) <= K omega(t) + omega(2e) gives
    mu = nu = lambda / K and C = exp(omega(2e) / lambda).
    """
    omega = system.spec.omega  # type: ignore[union-attr]
    K = _alpha_bound(omega, config)
    if K is None:
        return None
    shift = float(omega_value(omega, np.array([2.0 * math.e]))[0])
    details = []
    for fixed in outer:
        if kind is Kind.BEURLING:
            lam = fixed["lambda"]
            small = {"mu": lam / K, **({"nu": lam / K} if pair else {})}
            details.append({"lambda": lam, **small, **constant_bundle(shift / lam)})
        else:
            lam = K * max(fixed.values())
            details.append({**fixed, "lambda": lam, **constant_bundle(shift / lam)})
    worst = max(details, key=_log_c)
    return RelationVerdict.witnessed(
        {**worst, "K": K, "probes": len(details)}, {**horizon, "fast_path": "omega (alpha)"}, details=tuple(details)
    )


def _shifted_moderate_growth(
    system: WeightFunctionSystem, base: RelationVerdict, k: float, pair: bool
) -> RelationVerdict:
    """<x+y>^k <= 2^{k/2} <x>^k <y>^k and <y> <= 2^{1/2} on the unit ball."""
    extra = 0.5 * k * math.log(2.0) if pair else k * math.log(2.0)
    details = tuple({**d, **constant_bundle(_log_c(d) + extra)} for d in base.details)
    witness = {**base.witness, **constant_bundle(base.log_constant + extra)}
    return RelationVerdict.witnessed(witness, {**base.horizon, "fast_path": "peetre"}, note=base.note, details=details)


def check_wM(
    system: WeightFunctionSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    Condition [wM]: w^lambda(x + y) <= C w^mu(x) for |y| <= 1.

    x runs over geometric shells up to the shell radius, y over a unit-ball
    mesh. Witnessed when the per-shell maxima of log w^lambda(x+y) - log w^mu(x)
    stop growing, Falsified when they grow over the tail for every candidate.
    """
    outer_names, inner_names = _roles(kind)
    outer, inner, horizon = _quantifiers(system, kind, config, outer_names, inner_names)
    spec = system.spec
    if isinstance(spec, OmegaWeights):
        fast = _omega_moderate_growth(system, kind, config, outer, horizon, pair=False)
        if fast is not None:
            return fast
    if isinstance(spec, ShiftedWeights):
        base = check_wM(spec.base, kind, config)
        if base.is_witnessed:
            return _shifted_moderate_growth(system, base, spec.k, pair=False)

    x, index = shell_grid(system.dimension, config.systems.shell_radius, config.systems.shell_points)
    y = unit_ball_mesh(system.dimension, config.systems.ball_points)
    sums = (x[:, None, :] + y[None, :, :]).reshape(-1, system.dimension)
    sampler = _WeightSampler(system, config, {"x": x, "x+y": sums})
    shells = config.systems.shell_points + 1
    horizon = {**horizon, "shell_radius": config.systems.shell_radius, "shells": config.systems.shell_points}

    def test(p: Params) -> RelationVerdict:
        left, left_ok = sampler(p["lambda"], "x+y")
        right, right_ok = sampler(p["mu"], "x")
        diff = left.reshape(x.shape[0], y.shape[0]) - right[:, None]
        ok = left_ok.reshape(x.shape[0], y.shape[0]).all(axis=1) & right_ok
        per_point = diff.max(axis=1)
        maxima = _saturated_prefix(_shell_maxima(per_point, index, ok, shells))
        trend = tail_trend(maxima, config.sequences.tail_window, config.sequences.divergence_margin)
        if trend == "bounded":
            return RelationVerdict.witnessed(constant_bundle(float(np.nanmax(maxima))))
        if trend == "diverging":
            i = int(np.argmax(np.where(ok, per_point, -np.inf)))
            j = int(np.argmax(diff[i]))
            return RelationVerdict.falsified(
                {"x_norm": float(np.linalg.norm(x[i])), "y_norm": float(np.linalg.norm(y[j])), "log_ratio": float(diff[i, j])}
            )
        return RelationVerdict.inconclusive("shell maxima neither flat nor diverging")

    verdict = _search(outer, inner, test, horizon, "[wM]")
    logger.info(f"[wM] of {describe_function_system(system)} ({kind.value}): {verdict.status.value}")
    return verdict


def check_M(
    system: WeightFunctionSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    Condition [M]: w^lambda(x + y) <= C w^mu(x) w^nu(y).

    Evaluated on the full product of the shell grid with itself; a pair
    belongs to the outer of its two shells.
    """
    outer_names, inner_names = _roles(kind, pair=True)
    outer, inner, horizon = _quantifiers(system, kind, config, outer_names, inner_names)
    spec = system.spec
    if isinstance(spec, OmegaWeights):
        fast = _omega_moderate_growth(system, kind, config, outer, horizon, pair=True)
        if fast is not None:
            return fast
    if isinstance(spec, ShiftedWeights):
        base = check_M(spec.base, kind, config)
        if base.is_witnessed:
            return _shifted_moderate_growth(system, base, spec.k, pair=True)

    x, index = shell_grid(system.dimension, config.systems.shell_radius, config.systems.shell_points)
    sums = (x[:, None, :] + x[None, :, :]).reshape(-1, system.dimension)
    sampler = _WeightSampler(system, config, {"x": x, "x+y": sums})
    pair_index = np.maximum(index[:, None], index[None, :]).ravel()
    shells = config.systems.shell_points + 1
    horizon = {**horizon, "shell_radius": config.systems.shell_radius, "shells": config.systems.shell_points}

    def test(p: Params) -> RelationVerdict:
        left, left_ok = sampler(p["lambda"], "x+y")
        mu_values, mu_ok = sampler(p["mu"], "x")
        nu_values, nu_ok = sampler(p["nu"], "x")
        diff = left - (mu_values[:, None] + nu_values[None, :]).ravel()
        ok = left_ok & (mu_ok[:, None] & nu_ok[None, :]).ravel()
        maxima = _saturated_prefix(_shell_maxima(diff, pair_index, ok, shells))
        trend = tail_trend(maxima, config.sequences.tail_window, config.sequences.divergence_margin)
        if trend == "bounded":
            return RelationVerdict.witnessed(constant_bundle(float(np.nanmax(maxima))))
        if trend == "diverging":
            flat = int(np.argmax(np.where(ok, diff, -np.inf)))
            i, j = divmod(flat, x.shape[0])
            return RelationVerdict.falsified(
                {"x_norm": float(np.linalg.norm(x[i])), "y_norm": float(np.linalg.norm(x[j])), "log_ratio": float(diff[flat])}
            )
        return RelationVerdict.inconclusive("shell maxima neither flat nor diverging")

    verdict = _search(outer, inner, test, horizon, "[M]")
    logger.info(f"[M] of {describe_function_system(system)} ({kind.value}): {verdict.status.value}")
    return verdict


def _identity(horizon: Bundle) -> RelationVerdict:
    return RelationVerdict.witnessed({"C": 1.0, "log_C": 0.0, "rule": "mu = lambda"}, {**horizon, "fast_path": "identity"})


def system_relation_sequences(
    M: WeightSequenceSystem, N: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """
    M [subseteq] N: for every lambda some mu with M^mu subseteq N^lambda
    (for every mu some lambda).

    M_A [subseteq] M_B reduces to A preceq B; M_omega [subseteq] M_eta to
    eta = O(omega).
    """
    if M.dimension != N.dimension:
        raise DimensionMismatchError(M.dimension, N.dimension)
    outer, inner, horizon = _relation_quantifiers(M, N, kind, config)
    if M == N:
        return _identity(horizon)

    gen_m, gen_n = dilated_generator(M), dilated_generator(N)
    if gen_m is not None and gen_n is not None:
        base = relation_preceq(gen_m, gen_n, config=config.sequences)
        fast = {**horizon, **base.horizon, "fast_path": "dilated: A preceq B"}
        if base.is_witnessed:
            rule = "mu = lambda/H" if kind is Kind.BEURLING else "lambda = H*mu"
            return RelationVerdict.witnessed({**base.witness, "rule": rule}, fast, base.note)
        if base.is_falsified:
            return RelationVerdict.falsified(base.counterexample, fast, base.note)
        return RelationVerdict.inconclusive(base.note, fast)

    omega_m, omega_n = bmt_generator(M), bmt_generator(N)
    if omega_m is not None and omega_n is not None:
        base = compare_weight_functions(omega_m, omega_n, config=config.functions, tail_window=config.sequences.tail_window)
        fast = {**horizon, **base.horizon, "fast_path": "omega-generated: eta = O(omega)"}
        if base.is_witnessed:
            return RelationVerdict.witnessed(base.witness, fast, base.note)
        if base.is_falsified:
            return RelationVerdict.falsified(base.counterexample, fast, base.note)
        return RelationVerdict.inconclusive(base.note, fast)

    def test(p: Params) -> RelationVerdict:
        return relation_subseteq(member(M, p["mu"]), member(N, p["lambda"]), config=config.sequences)

    verdict = _search(outer, inner, test, horizon, "M [subseteq] N")
    logger.info(f"{describe_sequence_system(M)} [subseteq] {describe_sequence_system(N)}: {verdict.status.value}")
    return verdict


def _radial_test(
    W: WeightFunctionSystem, V: WeightFunctionSystem, config: ApplicationConfig, points: np.ndarray, index: np.ndarray
) -> Callable[[Params], RelationVerdict]:
    """log v^lambda - log w^mu along rays; saturated tails only."""
    sampler_w = _WeightSampler(W, config, {"r": points})
    sampler_v = _WeightSampler(V, config, {"r": points})
    shells = int(index.max()) + 1

    def test(p: Params) -> RelationVerdict:
        v, v_ok = sampler_v(p["lambda"], "r")
        w, w_ok = sampler_w(p["mu"], "r")
        diff = v - w
        ok = v_ok & w_ok
        maxima = _saturated_prefix(_shell_maxima(diff, index, ok, shells))
        trend = tail_trend(maxima, config.sequences.tail_window, config.sequences.divergence_margin)
        if trend == "bounded":
            return RelationVerdict.witnessed(constant_bundle(float(np.nanmax(maxima))))
        if trend == "diverging":
            i = int(np.argmax(np.where(ok, diff, -np.inf)))
            return RelationVerdict.falsified({"x_norm": float(np.linalg.norm(points[i])), "log_ratio": float(diff[i])})
        return RelationVerdict.inconclusive("ratio neither flat nor diverging along the rays")

    return test


def radial_relation(
    W: WeightFunctionSystem,
    V: WeightFunctionSystem,
    kind: Kind,
    points: np.ndarray,
    index: np.ndarray,
    config: ApplicationConfig = DEFAULT_CONFIG,
    what: str = "W [subseteq] V",
) -> RelationVerdict:
    """
    v^lambda = O(w^mu) tested at the given points, grouped by `index`.

    Existential parameters run over the whole lambda grid, as in
    `system_relation_functions`.
    """
    outer, inner, horizon = _relation_quantifiers(W, V, kind, config)
    horizon.update({"radius": float(np.max(np.linalg.norm(points, axis=1))), "points": int(points.shape[0])})
    return _search(outer, inner, _radial_test(W, V, config, points, index), horizon, what)


def system_relation_functions(
    W: WeightFunctionSystem,
    V: WeightFunctionSystem,
    kind: Kind,
    config: ApplicationConfig = DEFAULT_CONFIG,
    fast_paths: bool = True,
) -> RelationVerdict:
    """
    W [subseteq] V: for every lambda some mu with v^lambda = O(w^mu)
    (for every mu some lambda).

    W_omega [subseteq] W_eta iff eta = O(omega); for log-convex generators
    W_A [subseteq] W_B follows from A preceq B and fails with it. Other pairs
    are compared along rays up to the probe radius.
    """
    if W.dimension != V.dimension:
        raise DimensionMismatchError(W.dimension, V.dimension)
    _, _, horizon = _relation_quantifiers(W, V, kind, config)
    if fast_paths and W == V:
        return _identity(horizon)

    if fast_paths:
        omega_w, omega_v = bmt_generator(W), bmt_generator(V)
        if omega_w is not None and omega_v is not None and type(W.spec) is type(V.spec):
            base = compare_weight_functions(omega_w, omega_v, config=config.functions, tail_window=config.sequences.tail_window)
            fast = {**horizon, **base.horizon, "fast_path": "eta = O(omega)"}
            if base.is_witnessed:
                K = max(float(base.witness.get("bound", 1.0)), 1e-300)
                rule = "mu = lambda/K" if kind is Kind.BEURLING else "lambda = K*mu"
                return RelationVerdict.witnessed({**base.witness, "K": K, "rule": rule}, fast, base.note)
            if base.is_falsified:
                return RelationVerdict.falsified(base.counterexample, fast, base.note)

        gen_w, gen_v = dilated_generator(W), dilated_generator(V)
        if gen_w is not None and gen_v is not None:
            base = relation_preceq(gen_w, gen_v, config=config.sequences)
            fast = {**horizon, **base.horizon, "fast_path": "log-convex generators: A preceq B"}
            if base.is_witnessed:
                return RelationVerdict.witnessed(base.witness, fast, base.note)
            if (
                base.is_falsified
                and check_log_convex(gen_w, config=config.sequences).is_witnessed
                and check_log_convex(gen_v, config=config.sequences).is_witnessed
            ):
                return RelationVerdict.falsified(base.counterexample, fast, base.note)

    points, index = radial_grid(W.dimension, config.systems.probe_radius)
    verdict = radial_relation(W, V, kind, points, index, config)
    logger.info(f"{describe_function_system(W)} [subseteq] {describe_function_system(V)}: {verdict.status.value}")
    return verdict


def replay_certificate(original: RelationVerdict, refined: RelationVerdict, slack: float) -> bool:
    """
    A witnessed certificate must stay witnessed on a finer grid, with log C
    degrading by at most log(slack).
    """
    if not original.is_witnessed:
        return True
    if not refined.is_witnessed:
        return False
    return refined.log_constant <= original.log_constant + math.log(slack) + 1e-12


def _omega_at(M: WeightSequence, points: np.ndarray, config: ApplicationConfig) -> Tuple[np.ndarray, np.ndarray]:
    return associated_function_values(extend_horizon(M, config.systems.weight_q_max), points, config=config.sequences)


def _excess_over_slack(
    left: np.ndarray, right: np.ndarray, log_c: float, config: ApplicationConfig
) -> np.ndarray:
    """left - right - log C beyond the tolerance plus the rounding of values of that size."""
    slack = math.log1p(config.sequences.tolerance) + ROUNDING_SLACK * (np.abs(left) + np.abs(right))
    return left - right - log_c - slack


def check_L_functional(
    system: WeightSequenceSystem,
    kind: Kind,
    certificate: Optional[RelationVerdict] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> RelationVerdict:
    """
    exp omega_{M^lambda}(R x) <= C exp omega_{M^mu}(x) on the shells, with
    (R, lambda, mu, C) replayed from an [L] certificate.
    """
    certificate = check_L(system, kind, config) if certificate is None else certificate
    horizon: Bundle = {"kind": kind.value, "shell_radius": config.systems.shell_radius}
    if not certificate.is_witnessed or not certificate.details:
        return RelationVerdict.inconclusive("no [L] certificate to replay", horizon)
    x, _ = shell_grid(system.dimension, config.systems.shell_radius, config.systems.shell_points)
    worst = -np.inf
    checked = 0
    for detail in certificate.details:
        R = float(detail["R"])
        left, left_ok = _omega_at(member(system, float(detail["lambda"])), R * x, config)
        right, right_ok = _omega_at(member(system, float(detail["mu"])), x, config)
        ok = left_ok & right_ok
        if not np.any(ok):
            continue
        excess = _excess_over_slack(left[ok], right[ok], _log_c(detail), config)
        checked += int(np.count_nonzero(ok))
        if np.max(excess) > 0.0:
            i = int(np.argmax(excess))
            return RelationVerdict.falsified(
                {
                    "R": R,
                    "lambda": float(detail["lambda"]),
                    "x_norm": float(np.linalg.norm(x[ok][i])),
                    "excess": float(excess[i]),
                },
                horizon,
            )
        worst = max(worst, float(np.max(excess)))
    if checked == 0:
        return RelationVerdict.inconclusive("no saturated shell points", horizon)
    return RelationVerdict.witnessed({"max_excess": worst, "points": checked}, horizon)


def _implication(premise: RelationVerdict, conclusion: RelationVerdict) -> Tuple[bool, str]:
    if not premise.is_witnessed or conclusion.is_witnessed:
        return True, ""
    if conclusion.is_falsified:
        return False, "contradiction"
    return False, "horizon artifact"


def derived_inclusion_check(
    M: WeightSequenceSystem, N: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> CheckReport:
    """
    M [subseteq] N implies W_M [subseteq] W_N, with the converse for
    log-convex systems.

    The function side is evaluated numerically along rays so the two sides
    are decided independently.
    """
    sequences = system_relation_sequences(M, N, kind, config)
    functions = system_relation_functions(
        derived_function_system(M), derived_function_system(N), kind, config, fast_paths=False
    )
    convex_m = system_log_convex(M, config)
    convex_n = system_log_convex(N, config)
    passed, issue = _implication(sequences, functions)
    notes = [f"forward: {issue}"] if issue else []
    log_convex = convex_m.is_witnessed and convex_n.is_witnessed
    if log_convex:
        converse_ok, converse_issue = _implication(functions, sequences)
        if converse_issue:
            notes.append(f"converse: {converse_issue}")
        passed = passed and converse_ok
    else:
        notes.append("converse not asserted: log-convexity not witnessed")
    if not passed:
        logger.warning(f"sequence/function relation mismatch: {'; '.join(notes)}")
    return CheckReport(
        name="inclusion of derived systems",
        passed=passed,
        note="; ".join(notes),
        verdicts=(
            ("M [subseteq] N", sequences),
            ("W_M [subseteq] W_N", functions),
            ("M log-convex", convex_m),
            ("N log-convex", convex_n),
        ),
    )


def _moderate_growth_inequality(
    system: WeightSequenceSystem, certificate: RelationVerdict, config: ApplicationConfig, pair: bool
) -> Tuple[float, int, int]:
    """
    Worst excess of the quantitative moderate growth inequality over samples.

    pair: omega_{M^lambda}(x+y) <= log C + omega_{M^mu}(2Hx) + omega_{M^nu}(2Hy);
    otherwise, for |y| <= 1, omega_{M^lambda}(x+y) <= log C_{R=2H} + omega_{M^mu}(2Hx).

    Returns:
        Tuple of (worst excess, checked points, certificates used)
    """
    n = system.dimension
    x, _ = shell_grid(n, config.systems.shell_radius, config.systems.shell_points // 2)
    y = x if pair else unit_ball_mesh(n, config.systems.ball_points)
    sums = (x[:, None, :] + y[None, :, :]).reshape(-1, n)
    worst = -np.inf
    checked = 0
    used = 0
    for detail in certificate.details:
        H = float(detail.get("H", 1.0))
        if pair:
            log_c = _log_c(detail)
        else:
            key = f"log_C@R={2.0 * H:g}"
            if key not in detail:
                continue
            log_c = float(detail[key])
        left, left_ok = _omega_at(member(system, float(detail["lambda"])), sums, config)
        first, first_ok = _omega_at(member(system, float(detail["mu"])), 2.0 * H * x, config)
        right = first[:, None]
        ok = left_ok.reshape(x.shape[0], y.shape[0]) & first_ok[:, None]
        if pair:
            second, second_ok = _omega_at(member(system, float(detail["nu"])), 2.0 * H * y, config)
            right = right + second[None, :]
            ok &= second_ok[None, :]
        excess = _excess_over_slack(left.reshape(x.shape[0], y.shape[0]), right, log_c, config)
        if np.any(ok):
            worst = max(worst, float(np.max(excess[ok])))
            checked += int(np.count_nonzero(ok))
            used += 1
    return worst, checked, used


def moderate_growth_check(
    system: WeightSequenceSystem, kind: Kind, config: ApplicationConfig = DEFAULT_CONFIG
) -> CheckReport:
    """
    [L] with [I] gives [M] for W_M and [L] with [wI] gives [wM].

    Replays the (C, H) certificates through the inequality behind the
    implication on sampled (x, y), then confirms the condition on W_M.
    """
    L = check_L(system, kind, config)
    I = check_I(system, kind, config)
    wI = check_wI(system, kind, config)
    derived = derived_function_system(system)
    verdicts: List[Tuple[str, RelationVerdict]] = [("M [L]", L), ("M [I]", I), ("M [wI]", wI)]
    notes: List[str] = []
    worst = -np.inf
    passed = True

    if L.is_witnessed:
        functional = check_L_functional(system, kind, L, config)
        verdicts.append(("exp omega_{M^lambda}(R x) <= C exp omega_{M^mu}(x)", functional))
        if functional.is_falsified:
            notes.append(f"[L] functional form fails at {format_bundle(functional.counterexample)}")
            passed = False

    for pair, premise, name, check in ((True, I, "W_M [M]", check_M), (False, wI, "W_M [wM]", check_wM)):
        if not (L.is_witnessed and premise.is_witnessed):
            notes.append(f"{name}: premises not witnessed")
            continue
        excess, checked, used = _moderate_growth_inequality(system, premise, config, pair)
        if used == 0:
            notes.append(f"{name}: no certificate usable on saturated points")
            passed = False
            continue
        worst = max(worst, excess)
        if excess > 0.0:
            notes.append(f"{name}: inequality fails by {excess:.3g} beyond tolerance")
            passed = False
        conclusion = check(derived, kind, config)
        verdicts.append((name, conclusion))
        if not conclusion.is_witnessed:
            notes.append(f"{name}: {'contradiction' if conclusion.is_falsified else 'horizon artifact'}")
            passed = False
        logger.debug(f"{name}: {checked} points from {used} certificates, worst excess {excess:.3g}")

    return CheckReport(
        name="moderate growth of derived systems",
        passed=passed,
        observed=float(worst) if np.isfinite(worst) else 0.0,
        bound=0.0,
        note="; ".join(notes),
        verdicts=tuple(verdicts),
    )
