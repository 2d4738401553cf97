"""
Weight functions w >= 1 and BMT weight function conditions.

Weights are evaluated in log space; weights built from associated functions
carry the saturation flag of the underlying sup.
"""

import math
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from gsinclusion.core.conjugate import (
    BMTWeightFunction,
    ConjugateTable,
    LogPower,
    PowerMinusOne,
    SampledConvexPhi,
    check_convexity,
    conjugate_table,
    legendre_transform,
    omega_name,
    omega_value,
    phi_domain,
    phi_samples,
    phi_star,
)
from gsinclusion.core.data_structures import FunctionConfig, RelationVerdict, SequenceConfig
from gsinclusion.core.exceptions import HorizonError
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.sequences import (
    DEFAULT_SEQUENCE_CONFIG,
    FromBMT,
    WeightSequence,
    associated_function_values,
    describe_sequence,
)

logger = get_module_logger(__name__)

DEFAULT_FUNCTION_CONFIG = FunctionConfig()

ALPHA_START = math.e


@dataclass(frozen=True)
class One:
    """w = 1."""


@dataclass(frozen=True)
class PowerExp:
    """w(x) = exp(a |x|^b)."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a < 0 or not self.b > 0:
            raise ValueError(f"PowerExp needs a >= 0 and b > 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class FromOmega:
    """w(x) = exp(omega(|x|) / lam)."""

    omega: BMTWeightFunction
    lam: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class PolyShift:
    """w(x) = <x>^k base(x) with <x> = (1 + |x|^2)^{1/2}."""

    k: float
    base: "WeightFunction"

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"polynomial shift must be non-negative, got {self.k}")


@dataclass(frozen=True)
class AssocDilate:
    """w(x) = exp omega_M(x / lam)."""

    sequence: WeightSequence
    lam: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class Product:
    """Pointwise product of weights."""

    factors: Tuple["WeightFunction", ...]


WeightFunction = Union[One, PowerExp, FromOmega, PolyShift, AssocDilate, Product]


class WeightEvaluation(NamedTuple):
    """log w at a batch of points with the saturation mask."""

    log_values: np.ndarray
    saturated: np.ndarray


def describe_weight(w: WeightFunction) -> str:
    if isinstance(w, One):
        return "one"
    if isinstance(w, PowerExp):
        return f"powexp(a={w.a:g},b={w.b:g})"
    if isinstance(w, FromOmega):
        return f"omega({omega_name(w.omega)},lambda={w.lam:g})"
    if isinstance(w, PolyShift):
        return f"poly(k={w.k:g},{describe_weight(w.base)})"
    if isinstance(w, AssocDilate):
        return f"assoc({describe_sequence(w.sequence)},lambda={w.lam:g})"
    return "product(" + ",".join(describe_weight(f) for f in w.factors) + ")"


def as_points(points: Union[float, Sequence[float], np.ndarray], dimension: Optional[int] = None) -> np.ndarray:
    """
    Normalize input to an (N, n) array.

    A 1-d array is N points on the line unless `dimension` says otherwise,
    in which case it is a single point.
    """
    array = np.asarray(points, dtype=float)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        if dimension is not None and dimension > 1:
            return array.reshape(1, -1)
        return array.reshape(-1, 1)
    return array


def log_weight(
    w: WeightFunction, points: np.ndarray, config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG
) -> WeightEvaluation:
    """
    log w at points of shape (N, n).

    Returns:
        WeightEvaluation; saturated is False where an associated-function sup
        had not stabilized inside its horizon
    """
    pts = as_points(points)
    norms = np.linalg.norm(pts, axis=1)
    n_points = pts.shape[0]
    if isinstance(w, One):
        return WeightEvaluation(np.zeros(n_points), np.ones(n_points, dtype=bool))
    if isinstance(w, PowerExp):
        return WeightEvaluation(w.a * np.power(norms, w.b), np.ones(n_points, dtype=bool))
    if isinstance(w, FromOmega):
        return WeightEvaluation(omega_value(w.omega, norms) / w.lam, np.ones(n_points, dtype=bool))
    if isinstance(w, PolyShift):
        base = log_weight(w.base, pts, config)
        return WeightEvaluation(0.5 * w.k * np.log1p(norms**2) + base.log_values, base.saturated)
    if isinstance(w, AssocDilate):
        values, saturated = associated_function_values(w.sequence, pts / w.lam, config=config)
        return WeightEvaluation(values, saturated)
    log_values = np.zeros(n_points)
    saturated = np.ones(n_points, dtype=bool)
    for factor in w.factors:
        part = log_weight(factor, pts, config)
        log_values += part.log_values
        saturated &= part.saturated
    return WeightEvaluation(log_values, saturated)


def eval_weight(w: WeightFunction, x: Union[float, Sequence[float], np.ndarray]) -> float:
    """
    w(x) at a single point.

    Raises:
        HorizonError: the value depends on an unsaturated associated function
    """
    point = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    evaluation = log_weight(w, point)
    if not evaluation.saturated[0]:
        raise HorizonError(f"{describe_weight(w)} is not saturated at x={point[0].tolist()}")
    return math.exp(float(evaluation.log_values[0]))


def _t_grid(t_max: float, config: FunctionConfig) -> np.ndarray:
    decades = math.log10(t_max)
    return np.geomspace(1.0, t_max, max(2, int(round(decades * config.points_per_decade)) + 1))


def _horizon_for(omega: BMTWeightFunction, t_max: float) -> float:
    # sampled phi is known up to its last abscissa; (alpha) evaluates at 2t
    return min(t_max, math.exp(phi_domain(omega)) / 2.0) if math.isfinite(phi_domain(omega)) else t_max


def _non_increasing(values: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(values))))
    return bool(np.all(np.diff(values) <= tol * scale))


def check_bmt_conditions(
    omega: BMTWeightFunction,
    t_max: Optional[float] = None,
    config: FunctionConfig = DEFAULT_FUNCTION_CONFIG,
    tail_window: int = DEFAULT_SEQUENCE_CONFIG.tail_window,
) -> Dict[str, RelationVerdict]:
    """
    Verdicts of the conditions (alpha), (gamma), (delta) of a BMT weight function.

    (alpha): omega(2t)/omega(t) bounded on [e, T] with a non-increasing tail;
    (gamma): omega(t)/log t above the threshold and growing over the tail;
    (delta): discrete convexity of phi on its grid.

    Args:
        omega: BMT weight function
        t_max: Horizon T, defaults to the configured horizon
        config: Function configuration
        tail_window: Number of trailing grid points used for trends

    Returns:
        Mapping "alpha", "gamma", "delta" to verdicts

    Raises:
        ValueError: the horizon leaves fewer grid points than the tail window needs
    """
    horizon_t = _horizon_for(omega, config.t_max if t_max is None else t_max)
    t = _t_grid(horizon_t, config)
    t = t[t >= ALPHA_START]
    if t.size < tail_window + 2:
        raise ValueError(f"horizon T={horizon_t:g} too small for a tail window of {tail_window}")
    horizon = {"T": float(t[-1]), "points": int(t.size), "tail_window": tail_window}

    omega_t = omega_value(omega, t)
    ratio = omega_value(omega, 2.0 * t) / omega_t
    alpha_witness = {"bound": float(np.max(ratio)), "tail_ratio": float(ratio[-1])}
    if isinstance(omega, (PowerMinusOne, LogPower)):
        alpha = RelationVerdict.witnessed(alpha_witness, {**horizon, "fast_path": "family"})
    elif _non_increasing(ratio[-tail_window - 1 :]):
        alpha = RelationVerdict.witnessed(alpha_witness, horizon)
    else:
        alpha = RelationVerdict.inconclusive("doubling ratio still rising at the horizon", horizon)

    growth = omega_t / np.log(t)
    if isinstance(omega, PowerMinusOne) or (isinstance(omega, LogPower) and omega.a > 1):
        gamma = RelationVerdict.witnessed({"ratio_at_horizon": float(growth[-1])}, {**horizon, "fast_path": "family"})
    elif isinstance(omega, LogPower):
        gamma = RelationVerdict.falsified(
            {"reason": "omega(t)/log t = 1", "t": float(t[-1]), "ratio": float(growth[-1])},
            {**horizon, "fast_path": "family"},
        )
    elif growth[-1] >= config.gamma_threshold and np.all(np.diff(growth[-tail_window - 1 :]) > 0):
        gamma = RelationVerdict.witnessed({"ratio_at_horizon": float(growth[-1])}, horizon)
    else:
        gamma = RelationVerdict.inconclusive("omega(t)/log t below threshold or not growing", horizon)

    if isinstance(omega, SampledConvexPhi):
        x = np.asarray(omega.x)
        phi = np.asarray(omega.phi)
    else:
        x = np.linspace(0.0, math.log(horizon_t), config.x_points)
        phi = omega_value(omega, np.exp(x))
    convex, index, worst = check_convexity(x, phi)
    delta_horizon = {"x_max": float(x[-1]), "points": int(x.size)}
    if convex:
        delta = RelationVerdict.witnessed({"min_slope_increment": worst}, delta_horizon)
    else:
        delta = RelationVerdict.falsified({"x": float(x[index]), "slope_increment": worst}, delta_horizon)

    logger.info(
        f"BMT conditions of {omega_name(omega)}: alpha={alpha.status.value}, "
        f"gamma={gamma.status.value}, delta={delta.status.value}"
    )
    return {"alpha": alpha, "gamma": gamma, "delta": delta}


def young_conjugate(
    omega: BMTWeightFunction, y_max: float, config: FunctionConfig = DEFAULT_FUNCTION_CONFIG
) -> ConjugateTable:
    """
    phi* tabulated by the Legendre engine from samples of phi.

    The phi grid is sized so its last slope exceeds y_max; entries beyond the
    attainable slope range are marked uncovered.
    """
    x, phi = phi_samples(omega, y_max, config.x_points)
    table = conjugate_table(x, phi, y_max)
    logger.debug(f"young conjugate of {omega_name(omega)} up to y={y_max:g}, max slope {table.max_slope:.4g}")
    return table


def biconjugate(table: ConjugateTable, x: np.ndarray) -> np.ndarray:
    """phi** at the given x from the covered part of a conjugate table."""
    values, _ = legendre_transform(table.covered_y, table.covered_values, np.asarray(x, dtype=float))
    return values


def sequence_from_bmt(
    omega: BMTWeightFunction, lam: float, q_max: int = 64, dimension: int = 1
) -> WeightSequence:
    """
    The weight sequence M^lambda_omega, exp(phi*(lambda |alpha|) / lambda).

    Raises:
        HorizonError: the slope range of phi does not reach lambda * q_max
    """
    _, covered = phi_star(omega, np.array([lam * q_max]))
    if not covered[0]:
        raise HorizonError(f"slope range of {omega_name(omega)} does not cover lambda*q_max = {lam * q_max:g}")
    return WeightSequence(FromBMT(omega, lam), dimension, q_max)


@dataclass(frozen=True)
class SampledGrowth:
    """
    Non-decreasing continuous eta on [0, t_n] given by samples (t_i, eta_i).

    Linear between samples and unknown beyond t_n. Only the right-hand side
    of `compare_weight_functions` takes one; no BMT condition is assumed.
    """

    t: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.t) != len(self.values) or len(self.t) < 2:
            raise ValueError("sampled growth needs at least two (t, value) pairs")
        t = np.asarray(self.t, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if t[0] != 0.0:
            raise ValueError("sampled growth must start at t = 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(np.diff(values) < 0):
            raise ValueError("growth values must be finite and non-decreasing")


GrowthFunction = Union[BMTWeightFunction, SampledGrowth]


def growth_name(sigma: GrowthFunction) -> str:
    if isinstance(sigma, SampledGrowth):
        return f"growth-table[{len(sigma.t)}]"
    return omega_name(sigma)


def growth_value(sigma: GrowthFunction, t: np.ndarray) -> np.ndarray:
    if isinstance(sigma, SampledGrowth):
        return np.interp(np.abs(np.asarray(t, dtype=float)), sigma.t, sigma.values)
    return omega_value(sigma, t)


def _growth_horizon(sigma: GrowthFunction, t_max: float) -> float:
    if isinstance(sigma, SampledGrowth):
        return min(t_max, sigma.t[-1])
    return _horizon_for(sigma, t_max)


def _family_comparison(omega: BMTWeightFunction, sigma: GrowthFunction) -> Optional[bool]:
    """sigma = O(omega) for the canonical families, None when undecided."""
    if isinstance(omega, PowerMinusOne) and isinstance(sigma, PowerMinusOne):
        return sigma.rho <= omega.rho
    if isinstance(omega, LogPower) and isinstance(sigma, LogPower):
        return sigma.a <= omega.a
    if isinstance(omega, PowerMinusOne) and isinstance(sigma, LogPower):
        return True
    if isinstance(omega, LogPower) and isinstance(sigma, PowerMinusOne):
        return False
    return None


def compare_weight_functions(
    omega: BMTWeightFunction,
    sigma: GrowthFunction,
    t_max: Optional[float] = None,
    config: FunctionConfig = DEFAULT_FUNCTION_CONFIG,
    tail_window: int = DEFAULT_SEQUENCE_CONFIG.tail_window,
) -> RelationVerdict:
    """
    sigma(t) = O(omega(t)) as t -> infinity.

    omega is a BMT weight function; sigma is one too or any non-decreasing
    continuous `SampledGrowth`. The bound is sup sigma/omega over the
    geometric grid on [e, T]; power and log-power families are decided by
    their exponents.
    """
    requested = config.t_max if t_max is None else t_max
    horizon_t = min(_horizon_for(omega, requested), _growth_horizon(sigma, requested))
    t = _t_grid(horizon_t, config) if horizon_t > ALPHA_START else np.empty(0)
    t = t[t >= ALPHA_START]
    if t.size <= tail_window:
        return RelationVerdict.inconclusive(
            f"{growth_name(sigma)} is known only up to t = {horizon_t:g}", {"T": horizon_t, "tail_window": tail_window}
        )
    ratio = growth_value(sigma, t) / omega_value(omega, t)
    horizon = {"T": float(t[-1]), "points": int(t.size), "tail_window": tail_window}
    decided = _family_comparison(omega, sigma)
    if decided is True:
        return RelationVerdict.witnessed({"bound": float(np.max(ratio))}, {**horizon, "fast_path": "family"})
    if decided is False:
        return RelationVerdict.falsified(
            {"reason": f"{growth_name(sigma)} outgrows {omega_name(omega)}", "t": float(t[-1]), "ratio": float(ratio[-1])},
            {**horizon, "fast_path": "family"},
        )
    if _non_increasing(ratio[-tail_window - 1 :]):
        return RelationVerdict.witnessed({"bound": float(np.max(ratio))}, horizon)
    return RelationVerdict.inconclusive("ratio sigma/omega still rising at the horizon", horizon)
