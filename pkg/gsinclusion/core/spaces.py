"""
Discrete models of solid translation-invariant Banach function spaces.

Functions live on a uniform box grid with half-open cells, sampled at the
left cell ends, so integer translates and unit-cell indicators are
lattice-exact. Norms of functions that are constant on unit cells are
computed from the cell values; every other norm is a Riemann sum. All
l^p sums go through `lp_norm`, a correctly rounded sum that does not depend
on summation order or on zero entries, which makes the E_d = l^p identity
exact to the last bit.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from gsinclusion.core.config import create_default_config
from gsinclusion.core.data_structures import (
    ApplicationConfig,
    Bundle,
    CheckReport,
    Kind,
    RelationVerdict,
    SpaceConfig,
    SpaceVariant,
    combine_verdicts,
    constant_bundle,
)
from gsinclusion.core.exceptions import DimensionMismatchError, HorizonError
from gsinclusion.core.functions import WeightFunction, log_weight
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.sequences import WeightSequence, associated_function_values, log_values_at, multi_indices_of_order
from gsinclusion.core.smooth import (
    SmoothFunction,
    Trig,
    describe_function,
    dimension_of,
    evaluate,
    is_periodic,
    partial_derivative,
    smoothness,
    tensor_tables,
    times_monomial,
)
from gsinclusion.core.systems import (
    ShiftedWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
    check_L,
    check_wI,
    derived_function_system,
    function_member,
    lambda_grid,
    member,
    probe_grid,
    radial_relation,
    system_log_convex,
    system_relation_functions,
    system_relation_sequences,
)

logger = get_module_logger(__name__)

DEFAULT_CONFIG = create_default_config()


def _is_integral(value: float) -> bool:
    return math.isclose(value, round(value), rel_tol=0.0, abs_tol=1e-9)


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform grid on the box [-T, T)^n with spacing h.

    Samples sit at the left ends of the cells [x, x + h)^n. T/h and 1/h must
    be integers so that integer translates map the grid onto itself.
    """

    dimension: int = 1
    half_width: float = 32.0
    spacing: float = 2.0**-6

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if not self.spacing > 0:
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")
        if not self.half_width > 0:
            raise ValueError(f"box half-width must be positive, got {self.half_width}")
        if not _is_integral(self.half_width / self.spacing):
            raise ValueError("T/h must be an integer")
        if not _is_integral(1.0 / self.spacing):
            raise ValueError("1/h must be an integer")

    @property
    def per_axis(self) -> int:
        return int(round(2.0 * self.half_width / self.spacing))

    @property
    def per_unit(self) -> int:
        return int(round(1.0 / self.spacing))

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.per_axis,) * self.dimension

    @property
    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.per_axis)

    @property
    def lattice_aligned(self) -> bool:
        """Unit cells tile the box."""
        return _is_integral(self.half_width)

    @property
    def default_radius(self) -> int:
        """Truncation radius J = T/2 of sequence supports."""
        return int(self.half_width) // 2

    def points(self) -> np.ndarray:
        return _grid_points(self)

    def index_of(self, x: float) -> int:
        """Axis index of a grid coordinate."""
        return int(round((x + self.half_width) / self.spacing))


@lru_cache(maxsize=8)
def _grid_points(grid: GridSpec) -> np.ndarray:
    mesh = np.meshgrid(*([grid.axis] * grid.dimension), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    points.setflags(write=False)
    return points


def default_grid(dimension: int = 1, config: SpaceConfig = SpaceConfig()) -> GridSpec:
    """n = 1: T = 32, h = 2^-6; n = 2: T = 16, h = 2^-4."""
    if dimension == 1:
        return GridSpec(1, float(config.half_width_1d), 2.0**-config.spacing_exponent_1d)
    if dimension == 2:
        return GridSpec(2, float(config.half_width_2d), 2.0**-config.spacing_exponent_2d)
    raise ValueError(f"no default grid for dimension {dimension}")


@dataclass(frozen=True)
class BanachSpaceModel:
    """
    L^p, L^0 or mixed L^(p1,p2) on a grid.

    The mixed model lives on R^2 (n = 1 in each variable): the inner norm runs
    over the first coordinate with exponent p, the outer over the second with p2.
    """

    variant: SpaceVariant
    grid: GridSpec
    p: float = 2.0
    p2: float = 2.0

    def __post_init__(self) -> None:
        for exponent in (self.p, self.p2):
            if not exponent >= 1:
                raise ValueError(f"exponent must lie in [1, inf], got {exponent}")
        if self.variant is SpaceVariant.MIXED and self.grid.dimension != 2:
            raise ValueError("the mixed-norm model needs a two-dimensional grid")

    @property
    def dimension(self) -> int:
        return self.grid.dimension


def describe_model(model: BanachSpaceModel) -> str:
    def exponent(p: float) -> str:
        return "inf" if math.isinf(p) else f"{p:g}"

    if model.variant is SpaceVariant.L0:
        return "L^0"
    if model.variant is SpaceVariant.MIXED:
        return f"L^({exponent(model.p)},{exponent(model.p2)})"
    return f"L^{exponent(model.p)}"


def make_model(
    p: Union[float, Tuple[float, float]], dimension: int = 1, config: ApplicationConfig = DEFAULT_CONFIG
) -> BanachSpaceModel:
    """Model from an exponent: 0 is L^0, a pair is the mixed model on R^2."""
    if isinstance(p, tuple):
        return BanachSpaceModel(SpaceVariant.MIXED, default_grid(2, config.spaces), p[0], p[1])
    if p == 0:
        return BanachSpaceModel(SpaceVariant.L0, default_grid(dimension, config.spaces), math.inf)
    return BanachSpaceModel(SpaceVariant.LP, default_grid(dimension, config.spaces), float(p))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on a grid, with the closed form behind them when there is one."""

    grid: GridSpec
    samples: np.ndarray
    provenance: Optional[SmoothFunction] = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.samples.shape != self.grid.shape:
            raise ValueError(f"samples of shape {self.samples.shape} do not fit grid {self.grid.shape}")
        if self.provenance is not None and dimension_of(self.provenance) != self.grid.dimension:
            raise DimensionMismatchError(self.grid.dimension, dimension_of(self.provenance), "function")

    @property
    def has_derivatives(self) -> bool:
        return self.provenance is not None

    @property
    def periodic(self) -> bool:
        return self.provenance is not None and is_periodic(self.provenance)

    def __str__(self) -> str:
        if self.label:
            return self.label
        return describe_function(self.provenance) if self.provenance is not None else "synthesized"


def sample_function(f: SmoothFunction, grid: GridSpec) -> GridFunction:
    """Exact samples of a closed-form function."""
    values = evaluate(f, grid.points()).reshape(grid.shape)
    return GridFunction(grid, values, f)


def synthesized(grid: GridSpec, samples: np.ndarray, label: str = "synthesized") -> GridFunction:
    """Samples without a derivative provider."""
    return GridFunction(grid, np.asarray(samples), None, label)


@dataclass(frozen=True, eq=False)
class SequenceData:
    """Finitely supported c_j on the lattice Z^n cut to |j|_inf <= J."""

    values: np.ndarray
    radius: int

    def __post_init__(self) -> None:
        side = 2 * self.radius + 1
        if self.radius < 0 or any(s != side for s in self.values.shape):
            raise ValueError(f"sequence values must have shape ({side},)^n, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sequence values must be finite")

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @classmethod
    def delta(cls, k: Sequence[int], radius: int) -> "SequenceData":
        """delta_k, the unit sequence at k."""
        k = tuple(int(v) for v in k)
        if max(abs(v) for v in k) > radius:
            raise HorizonError(f"delta at {k} lies outside the truncation radius {radius}")
        values = np.zeros((2 * radius + 1,) * len(k))
        values[tuple(v + radius for v in k)] = 1.0
        return cls(values, radius)

    def lattice_points(self) -> np.ndarray:
        axis = np.arange(-self.radius, self.radius + 1)
        mesh = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def at(self, j: Sequence[int]) -> complex:
        return self.values[tuple(int(v) + self.radius for v in j)]


def random_sequence(rng: np.random.Generator, radius: int, dimension: int = 1, support: Optional[int] = None) -> SequenceData:
    """Random complex c with support inside |j|_inf <= support (default: radius)."""
    support = radius if support is None else support
    side = 2 * support + 1
    core = rng.standard_normal((side,) * dimension) + 1j * rng.standard_normal((side,) * dimension)
    core *= rng.random((side,) * dimension) < 0.7
    values = np.zeros((2 * radius + 1,) * dimension, dtype=complex)
    window = tuple(slice(radius - support, radius + support + 1) for _ in range(dimension))
    values[window] = core
    return SequenceData(values, radius)


def lp_norm(values: np.ndarray, p: float) -> float:
    """
    l^p norm of |values| with a correctly rounded sum.

    Zero entries are dropped before summing, so padding never changes a bit.
    """
    a = np.abs(np.asarray(values)).ravel()
    a = a[a != 0]
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(a))
    if p == 1:
        return math.fsum(a)
    return math.fsum(a**p) ** (1.0 / p)


def mixed_lp_norm(values: np.ndarray, p_inner: float, p_outer: float) -> float:
    """l^(p1,p2): inner norm along the first axis, outer along the second."""
    inner = [lp_norm(values[:, j], p_inner) for j in range(values.shape[1])]
    return lp_norm(np.array(inner), p_outer)


def sequence_norm(model: BanachSpaceModel, c: SequenceData) -> float:
    """The l^p, c_0 or l^(p1,p2) norm that E_d reduces to for the model."""
    if model.variant is SpaceVariant.L0:
        return lp_norm(c.values, math.inf)
    if model.variant is SpaceVariant.MIXED:
        return mixed_lp_norm(c.values, model.p, model.p2)
    return lp_norm(c.values, model.p)


def _cell_values(samples: np.ndarray, grid: GridSpec) -> Optional[np.ndarray]:
    """Values on unit cells when the samples are constant on each of them."""
    if not grid.lattice_aligned:
        return None
    cells = int(round(2 * grid.half_width))
    k = grid.per_unit
    blocked = samples.reshape(sum(((cells, k) for _ in range(grid.dimension)), ()))
    first = blocked[(slice(None), slice(0, 1)) * grid.dimension]
    if not np.array_equal(blocked, np.broadcast_to(first, blocked.shape)):
        return None
    return first.reshape((cells,) * grid.dimension)


def _riemann(values: np.ndarray, p: float, h: float, dimensions: int) -> float:
    scale = 1.0 if math.isinf(p) else h ** (dimensions / p)
    return scale * lp_norm(values, p)


def norm_E(model: BanachSpaceModel, f: Union[GridFunction, np.ndarray]) -> float:
    """
    ||f||_E on the grid.

    L^p: Riemann sum with weight h^{n/p}, exact for unit-cell step functions;
    L^0: sup norm (see `tail_certificate` for the vanishing-tail proxy);
    mixed: nested Riemann sums.
    """
    samples = f.samples if isinstance(f, GridFunction) else np.asarray(f)
    grid = model.grid
    if samples.shape != grid.shape:
        raise ValueError(f"samples of shape {samples.shape} do not fit grid {grid.shape}")
    if model.variant is SpaceVariant.L0:
        return lp_norm(samples, math.inf)
    cells = _cell_values(samples, grid)
    if model.variant is SpaceVariant.MIXED:
        if cells is not None:
            return mixed_lp_norm(cells, model.p, model.p2)
        inner = [_riemann(samples[:, j], model.p, grid.spacing, 1) for j in range(samples.shape[1])]
        return _riemann(np.array(inner), model.p2, grid.spacing, 1)
    if cells is not None:
        return lp_norm(cells, model.p)
    return _riemann(samples, model.p, grid.spacing, grid.dimension)


def log_norm_E(model: BanachSpaceModel, log_abs: np.ndarray) -> float:
    """log ||f||_E from log |f| on the grid, free of overflow."""
    h = model.grid.spacing

    def reduce(values: np.ndarray, p: float, dimensions: int, axis: Optional[int] = None) -> np.ndarray:
        if math.isinf(p):
            return np.max(values, axis=axis)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (logsumexp(p * values, axis=axis) + dimensions * math.log(h)) / p

    if model.variant is SpaceVariant.L0:
        return float(np.max(log_abs))
    if model.variant is SpaceVariant.MIXED:
        return float(reduce(reduce(log_abs, model.p, 1, axis=0), model.p2, 1))
    return float(reduce(log_abs.ravel(), model.p, model.dimension))


def tiling(model: BanachSpaceModel, c: SequenceData) -> GridFunction:
    """sum_j |c_j| T_j 1_{[0,1)^n} on the grid."""
    grid = model.grid
    if c.dimension != grid.dimension:
        raise DimensionMismatchError(grid.dimension, c.dimension, "sequence")
    if not grid.lattice_aligned or c.radius > grid.half_width - 1:
        box = f"[-{grid.half_width:g}, {grid.half_width:g})"
        raise ValueError(f"truncation radius {c.radius} is not lattice-aligned with the box {box}")
    cells = int(round(2 * grid.half_width))
    offset = int(round(grid.half_width)) - c.radius
    cell_values = np.zeros((cells,) * grid.dimension)
    window = tuple(slice(offset, offset + 2 * c.radius + 1) for _ in range(grid.dimension))
    cell_values[window] = np.abs(c.values)
    samples = cell_values
    for axis in range(grid.dimension):
        samples = np.repeat(samples, grid.per_unit, axis=axis)
    return synthesized(grid, samples, "tiling")


def ed_norm(model: BanachSpaceModel, c: SequenceData) -> float:
    """||c||_{E_d} = || sum_j |c_j| T_j 1_{[0,1)^n} ||_E."""
    return norm_E(model, tiling(model, c))


def _log_weights(w: WeightFunction, points: np.ndarray, config: ApplicationConfig) -> np.ndarray:
    evaluation = log_weight(w, points, config.sequences)
    if not np.all(evaluation.saturated):
        raise HorizonError("weight is not saturated on the lattice points")
    return evaluation.log_values


def weighted_ed_norm(
    model: BanachSpaceModel, c: SequenceData, w: WeightFunction, config: ApplicationConfig = DEFAULT_CONFIG
) -> float:
    """||c||_{E_{d,w}} = ||(c_j w(j))_j||_{E_d}."""
    log_w = _log_weights(w, c.lattice_points().astype(float), config).reshape(c.values.shape)
    with np.errstate(over="ignore"):
        weighted = c.values * np.exp(log_w)
    return ed_norm(model, SequenceData(weighted, c.radius))


def lattice_constant(dimension: int, radius: int) -> float:
    """(n + 1)^{(n+1)/2} sum over |k|_inf <= J of <k>^{-(n+1)}."""
    axis = np.arange(-radius, radius + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    squares = sum(m**2 for m in mesh)
    return (dimension + 1) ** ((dimension + 1) / 2.0) * math.fsum(((1.0 + squares) ** (-(dimension + 1) / 2.0)).ravel())


class SeminormValue(NamedTuple):
    """
    sup over |alpha| <= alpha_max of ||f^(alpha) w||_E / M_alpha, in log form.

    order_maxima holds the per-order log maxima, tail_ratio the log of the
    outer-shell sup relative to the overall sup, trend the classification of
    the last window of order maxima.
    """

    log_value: float
    saturated: bool
    order_maxima: np.ndarray
    tail_ratio: float
    trend: str

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf


def order_trend(maxima: np.ndarray, window: int, margin: float) -> str:
    """
    Trend of per-order log maxima over the last `window` increments.

    "diverging": every increment exceeds margin, or the increments keep
    growing by more than margin; "bounded": every increment is negative;
    "undecided" otherwise.
    """
    if np.all(np.isneginf(maxima)):
        return "bounded"
    tail = maxima[-window - 1 :]
    if tail.size < 3 or not np.all(np.isfinite(tail)):
        return "undecided"
    steps = np.diff(tail)
    if np.all(steps > margin):
        return "diverging"
    if np.all(np.diff(steps) > 0) and steps[-1] - steps[0] > margin:
        return "diverging"
    if np.all(steps < 0):
        return "bounded"
    return "undecided"


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _seminorm_core(
    f: SmoothFunction,
    grid: GridSpec,
    model: BanachSpaceModel,
    M: WeightSequence,
    log_w: np.ndarray,
    mask: Optional[np.ndarray],
    alpha_max: int,
    config: ApplicationConfig,
) -> Tuple[np.ndarray, float]:
    """Per-order log maxima and the worst log tail ratio."""
    if alpha_max > M.q_max:
        raise HorizonError(f"alpha_max={alpha_max} exceeds the sequence horizon q_max={M.q_max}")
    if alpha_max > smoothness(f):
        raise ValueError(f"{describe_function(f)} has only {smoothness(f):g} continuous derivatives")
    points = grid.points()
    tables = tensor_tables(f, alpha_max, points)
    shell = np.max(np.abs(points), axis=1) >= grid.half_width - 1.0
    maxima = np.full(alpha_max + 1, -np.inf)
    tail_ratio = -np.inf
    for q in range(alpha_max + 1):
        alphas = multi_indices_of_order(grid.dimension, q)
        log_m = log_values_at(M, alphas, alpha_max)
        for alpha, log_m_alpha in zip(alphas, log_m):
            values = _log_abs(partial_derivative(tables, tuple(alpha))) + log_w
            if mask is not None:
                values = np.where(mask, values, -np.inf)
            top = float(np.max(values))
            if np.isfinite(top):
                tail_ratio = max(tail_ratio, float(np.max(values[shell])) - top)
            maxima[q] = max(maxima[q], log_norm_E(model, values.reshape(grid.shape)) - float(log_m_alpha))
    return maxima, tail_ratio


def seminorm(
    f: GridFunction,
    M: WeightSequence,
    w: WeightFunction,
    model: BanachSpaceModel,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> SeminormValue:
    """
    ||f||_{E,M,w} = sup_alpha ||f^(alpha) w||_E / M_alpha over |alpha| <= alpha_max.

    Saturated when the per-order maxima decrease over the saturation window,
    the outer shell of the box carries less than the tail tolerance and every
    weight value is saturated.

    Raises:
        ValueError: f has no derivative provider
    """
    if f.provenance is None:
        raise ValueError(f"{f} has no derivative provider")
    top = config.spaces.alpha_max if alpha_max is None else alpha_max
    evaluation = log_weight(w, f.grid.points(), config.sequences)
    maxima, tail_ratio = _seminorm_core(f.provenance, f.grid, model, M, evaluation.log_values, None, top, config)
    trend = order_trend(maxima, config.spaces.saturation_window, config.sequences.divergence_margin)
    quiet_tail = not tail_ratio > math.log(config.spaces.tail_tolerance)
    saturated = trend == "bounded" and quiet_tail and bool(np.all(evaluation.saturated))
    log_value = float(np.max(maxima))
    logger.debug(f"seminorm of {f}: log value {log_value:.4g}, trend {trend}, tail {tail_ratio:.3g}")
    return SeminormValue(log_value, saturated, maxima, tail_ratio, trend)


def periodic_seminorm(
    f: GridFunction,
    M: WeightSequence,
    model: BanachSpaceModel,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> SeminormValue:
    """sup_alpha ||f^(alpha) 1_{[0,1)^n}||_E / M_alpha for a periodic f."""
    if f.provenance is None or not f.periodic:
        raise ValueError(f"{f} is not a periodic function with derivatives")
    top = config.spaces.alpha_max if alpha_max is None else alpha_max
    points = f.grid.points()
    cell = np.all((points >= 0.0) & (points < 1.0), axis=1)
    maxima, _ = _seminorm_core(f.provenance, f.grid, model, M, np.zeros(points.shape[0]), cell, top, config)
    trend = order_trend(maxima, config.spaces.saturation_window, config.sequences.divergence_margin)
    return SeminormValue(float(np.max(maxima)), trend == "bounded", maxima, -np.inf, trend)


def membership_verdict(
    f: GridFunction,
    M: WeightSequenceSystem,
    W: WeightFunctionSystem,
    kind: Kind,
    model: BanachSpaceModel,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> RelationVerdict:
    """
    f in E^[M]_[W]: the seminorm with (M^lambda, w^lambda) is finite for some
    lambda (Roumieu, largest first) or for every probed lambda (Beurling).

    Falsified-at-horizon means the per-order maxima diverge: on every lambda
    of the grid (Roumieu) or on some probed lambda (Beurling).
    """
    if M.dimension != W.dimension or M.dimension != f.grid.dimension:
        raise DimensionMismatchError(M.dimension, W.dimension)
    top = config.spaces.alpha_max if alpha_max is None else alpha_max
    grid = lambda_grid(M, config) if kind is Kind.ROUMIEU else probe_grid(M, config)
    horizon: Bundle = {
        "kind": kind.value,
        "lambdas": f"{min(grid):g}..{max(grid):g}",
        "alpha_max": top,
        "model": describe_model(model),
    }
    if kind is Kind.ROUMIEU:
        grid = tuple(reversed(grid))

    values = []
    for lam in grid:
        value = seminorm(f, member(M, lam), function_member(W, lam, config), model, top, config)
        values.append((lam, value))
        if kind is Kind.ROUMIEU and value.saturated:
            return RelationVerdict.witnessed({"lambda": lam, **constant_bundle(value.log_value)}, horizon)
        if kind is Kind.BEURLING and value.trend == "diverging":
            return RelationVerdict.falsified(_divergence(lam, value), horizon, note="diverging at the horizon")

    if kind is Kind.BEURLING and all(v.saturated for _, v in values):
        lam, worst = max(values, key=lambda item: item[1].log_value)
        return RelationVerdict.witnessed({"lambda": lam, **constant_bundle(worst.log_value), "probes": len(values)}, horizon)
    if kind is Kind.ROUMIEU and all(v.trend == "diverging" for _, v in values):
        lam, value = values[0]
        return RelationVerdict.falsified(_divergence(lam, value), horizon, note="diverging on every lambda")
    return RelationVerdict.inconclusive("seminorms neither saturated nor diverging", horizon)


def _divergence(lam: float, value: SeminormValue) -> Bundle:
    steps = np.diff(value.order_maxima)
    return {"lambda": lam, "order": int(value.order_maxima.size - 1), "log_increment": float(steps[-1])}


def tail_certificate(
    model: BanachSpaceModel, f: Union[GridFunction, np.ndarray], config: ApplicationConfig = DEFAULT_CONFIG
) -> RelationVerdict:
    """Vanishing-tail proxy: sup on the outer unit shell relative to the overall sup."""
    samples = np.abs(f.samples if isinstance(f, GridFunction) else np.asarray(f)).ravel()
    points = model.grid.points()
    shell = np.max(np.abs(points), axis=1) >= model.grid.half_width - 1.0
    top = float(np.max(samples))
    horizon = {"shell": f"|x| >= {model.grid.half_width - 1.0:g}", "tolerance": config.spaces.tail_tolerance}
    ratio = float(np.max(samples[shell])) / top if top > 0 else 0.0
    if ratio <= config.spaces.tail_tolerance:
        return RelationVerdict.witnessed({"tail_ratio": ratio}, horizon)
    return RelationVerdict.inconclusive(f"outer shell carries {ratio:.3g} of the sup", horizon)


def sandwich_check(model: BanachSpaceModel, c: SequenceData) -> CheckReport:
    """l^1(c) >= ||c||_{E_d} / ||1_{[0,1)^n}||_E >= l^inf(c) / C_0 with C_0 = 1."""
    unit = ed_norm(model, SequenceData.delta((0,) * c.dimension, c.radius))
    normalized = ed_norm(model, c) / unit
    l1 = lp_norm(c.values, 1.0)
    linf = lp_norm(c.values, math.inf)
    slack = 1e-12
    passed = normalized <= l1 * (1 + slack) and linf <= normalized * (1 + slack)
    return CheckReport(
        name="l1 >= E_d >= l_inf",
        passed=passed,
        observed=normalized,
        bound=l1,
        note=f"l_inf={linf:.6g}; model={describe_model(model)}",
    )


def weighted_L1_embedding_check(
    model: BanachSpaceModel, samples: int = 100, seed: int = 42, config: ApplicationConfig = DEFAULT_CONFIG
) -> CheckReport:
    """
    ||f <x>^{-(n+1)}||_{L^1} <= C C_0 (n+1)^{(n+1)/2} sum_j <j>^{-(n+1)} ||f||_E.

    C and C_0 are 1 for the shipped models (the unit cell has measure 1).
    The lattice sum runs over the box. Random +-1 and Gaussian samples are
    drawn along with the unit-cell indicator.
    """
    grid = model.grid
    n = grid.dimension
    rng = np.random.default_rng(seed)
    points = grid.points()
    decay = ((1.0 + np.sum(points**2, axis=1)) ** (-(n + 1) / 2.0)).reshape(grid.shape)
    constant = lattice_constant(n, int(grid.half_width))
    indicator = np.all((points >= 0.0) & (points < 1.0), axis=1).reshape(grid.shape).astype(float)
    candidates: List[np.ndarray] = [indicator]
    for i in range(samples):
        if i % 2 == 0:
            candidates.append(rng.choice([-1.0, 1.0], size=grid.shape))
        else:
            candidates.append(rng.standard_normal(grid.shape))
    worst = 0.0
    for f in candidates:
        lhs = grid.spacing**n * math.fsum(np.abs(f * decay).ravel())
        rhs = constant * norm_E(model, f)
        worst = max(worst, lhs / rhs)
    logger.info(f"weighted L1 embedding on {describe_model(model)}: worst ratio {worst:.4g}")
    return CheckReport(
        name="weighted L1 embedding",
        passed=worst <= 1.0,
        observed=worst,
        bound=1.0,
        note=f"{len(candidates)} functions; constant {constant:.6g}",
    )


def probe_delta_sequences(
    W: WeightFunctionSystem,
    V: WeightFunctionSystem,
    kind: Kind,
    model: BanachSpaceModel,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> RelationVerdict:
    """
    E_{d,[W]} subseteq E_{d,[V]} tested on the unit sequences delta_k.

    ||delta_k||_{E_{d,w}} = w(k) ||delta_0||_{E_d}, so the inclusion forces
    v^lambda(k) <= C w^mu(k) at lattice points. Inside the box the weighted
    norms are computed directly; beyond it the translation identity carries
    the lattice rays out to the probe radius. The verdict is cross-checked
    against the system relation.
    """
    if W.dimension != V.dimension or W.dimension != model.dimension:
        raise DimensionMismatchError(W.dimension, V.dimension)
    radius = model.grid.default_radius
    unit = ed_norm(model, SequenceData.delta((0,) * W.dimension, radius))
    deviation = 0.0
    lam = probe_grid(V, config)[len(probe_grid(V, config)) // 2]
    v = function_member(V, lam, config)
    for k in range(radius + 1):
        index = (k,) + (0,) * (W.dimension - 1)
        direct = weighted_ed_norm(model, SequenceData.delta(index, radius), v, config)
        predicted = unit * math.exp(float(_log_weights(v, np.array([index], dtype=float), config)[0]))
        deviation = max(deviation, abs(direct - predicted) / predicted)
    if deviation > 1e-12:
        logger.warning(f"delta probe: weighted norms deviate from w(k)||delta_0|| by {deviation:.3g}")

    if W == V:
        probe = RelationVerdict.witnessed(
            {"C": 1.0, "log_C": 0.0, "rule": "mu = lambda"}, {"kind": kind.value, "fast_path": "identity"}
        )
    else:
        points, index = lattice_rays(W.dimension, config.systems.probe_radius)
        probe = radial_relation(W, V, kind, points, index, config, what="delta probe")
    cross = system_relation_functions(W, V, kind, config)
    return _with_cross_check(probe, cross, {"box_deviation": deviation, "unit_norm": unit})


def _with_cross_check(probe: RelationVerdict, cross: RelationVerdict, extra: Bundle) -> RelationVerdict:
    agrees = not (
        (probe.is_witnessed and cross.is_falsified) or (probe.is_falsified and cross.is_witnessed)
    )
    if not agrees:
        logger.warning(f"probe {probe.status.value} disagrees with relation {cross.status.value}")
    horizon = {**probe.horizon, **extra, "cross_check": cross.status.value, "agrees": agrees}
    return replace(probe, horizon=horizon)


def lattice_rays(dimension: int, radius: float, points_per_decade: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Integer points k e_1 (and k(1,...,1) for n >= 2) with 1 <= |k| <= radius, grouped by |k|."""
    decades = max(1, int(round(math.log10(radius))))
    ks = np.unique(np.round(np.geomspace(1.0, radius / math.sqrt(dimension), decades * points_per_decade + 1)))
    rays = [np.eye(dimension)[0]]
    if dimension > 1:
        rays.append(np.ones(dimension))
    points = np.vstack([ks[:, None] * ray[None, :] for ray in rays])
    index = np.tile(np.arange(ks.size), len(rays))
    return points, index


def probe_characters(
    M: WeightSequenceSystem,
    N: WeightSequenceSystem,
    kind: Kind,
    model: BanachSpaceModel,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> RelationVerdict:
    """
    E^[M]_per subseteq E^[N]_per tested on the characters exp(2 pi i k x).

    ||f_k||_{E^M_per} = ||1_{[0,1)^n}||_E exp omega_M(2 pi k), so the inclusion
    forces exp omega_{N^lambda}(2 pi k) <= C exp omega_{M^mu}(2 pi k). A
    failure refutes M [subseteq] N; a success proves it only for log-convex
    systems.
    """
    if M.dimension != N.dimension or M.dimension != 1 or model.dimension != 1:
        raise DimensionMismatchError(1, M.dimension, "character probe dimension")
    top = config.spaces.alpha_max if alpha_max is None else alpha_max

    unit = norm_E(model, np.where((model.grid.axis >= 0.0) & (model.grid.axis < 1.0), 1.0, 0.0))
    reference = member(N, probe_grid(N, config)[len(probe_grid(N, config)) // 2])
    deviation = 0.0
    for k in (1, 2):
        character = sample_function(Trig(((k, 1.0),)), model.grid)
        computed = periodic_seminorm(character, reference, model, top, config).log_value
        omega, _ = associated_function_values(reference, np.array([2.0 * math.pi * k]), q_max=top)
        deviation = max(deviation, abs(computed - (math.log(unit) + float(omega[0]))))

    if M == N:
        probe = RelationVerdict.witnessed(
            {**constant_bundle(0.0), "rule": "mu = lambda"}, {"kind": kind.value, "fast_path": "identity"}
        )
    else:
        radius = config.systems.probe_radius
        ks, index = lattice_rays(1, radius / (2.0 * math.pi))
        W_M, W_N = derived_function_system(M), derived_function_system(N)
        raw = radial_relation(W_M, W_N, kind, 2.0 * math.pi * ks, index, config, what="character probe")
        convex = system_log_convex(M, config).is_witnessed and system_log_convex(N, config).is_witnessed
        if raw.is_witnessed and not convex:
            note = "characters bounded but log-convexity is not witnessed"
            probe = RelationVerdict.inconclusive(note, raw.horizon, raw.details)
        else:
            probe = raw
    cross = system_relation_sequences(M, N, kind, config)
    return _with_cross_check(probe, cross, {"cell_deviation": deviation, "unit_norm": unit})


def weighted_ed_inclusion_check(
    model: BanachSpaceModel,
    W: WeightFunctionSystem,
    V: WeightFunctionSystem,
    certificate: RelationVerdict,
    samples: int = 20,
    seed: int = 42,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """||c||_{E_{d,v^lambda}} <= C ||c||_{E_{d,w^mu}} for the certified (lambda, mu, C), up to the replay slack."""
    if not certificate.is_witnessed:
        return CheckReport(name="weighted E_d inclusion", passed=True, note=f"no certificate ({certificate.status.value})")
    details = certificate.details or (certificate.witness,)
    usable = [d for d in details if "lambda" in d and "mu" in d]
    rng = np.random.default_rng(seed)
    radius = model.grid.default_radius
    worst = 0.0
    for detail in usable:
        v = function_member(V, float(detail["lambda"]), config)
        w = function_member(W, float(detail["mu"]), config)
        log_c = float(detail.get("log_C", 0.0))
        for _ in range(samples):
            c = random_sequence(rng, radius, W.dimension)
            rhs = weighted_ed_norm(model, c, w, config)
            if rhs > 0:
                worst = max(worst, weighted_ed_norm(model, c, v, config) / (math.exp(log_c) * rhs))
    slack = config.systems.replay_slack
    return CheckReport(
        name="weighted E_d inclusion",
        passed=worst <= slack,
        observed=worst,
        bound=slack,
        note=f"{len(usable)} certified pairs x {samples} sequences",
    )


def polynomial_multiplier_check(
    f: GridFunction,
    M: WeightSequenceSystem,
    W: WeightFunctionSystem,
    kind: Kind,
    k: int,
    model: BanachSpaceModel,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """
    f in E^[M]_[W_{2k}] iff f P in E^[M]_[W] for every polynomial P of degree <= 2k.

    The right side runs over the monomial basis; the check passes when both
    sides agree on being witnessed.
    """
    if f.provenance is None:
        raise ValueError(f"{f} has no derivative provider")
    premises = [("M [L]", check_L(M, kind, config)), ("M [wI]", check_wI(M, kind, config))]
    shifted = WeightFunctionSystem(ShiftedWeights(2.0 * k, W), W.dimension)
    left = membership_verdict(f, M, shifted, kind, model, alpha_max, config)
    n = f.grid.dimension
    products = []
    for degree in range(2 * k + 1):
        for beta in multi_indices_of_order(n, degree):
            product = sample_function(times_monomial(f.provenance, tuple(beta)), f.grid)
            products.append(membership_verdict(product, M, W, kind, model, alpha_max, config))
    right = combine_verdicts(products)
    agree = left.is_witnessed == right.is_witnessed
    certified = all(v.is_witnessed for _, v in premises)
    note = "" if certified else "premises [L], [wI] not witnessed"
    return CheckReport(
        name=f"polynomial multipliers (k={k})",
        passed=agree and certified,
        observed=float(len(products)),
        note=note or ("sides agree" if agree else "sides disagree"),
        verdicts=tuple(premises) + (("f in weighted space", left), ("f P in space", right)),
    )
