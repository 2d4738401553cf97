"""
Weight sequences and their associated functions.

A weight sequence M = (M_alpha) is stored through log M_alpha. Isotropic
sequences depend on |alpha| only and are described by their order profile
log M_q; tensor sequences multiply one-dimensional factors coordinate-wise.
"""

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from gsinclusion.core.conjugate import BMTWeightFunction, omega_name, phi_star
from gsinclusion.core.data_structures import (
    AssociatedFunctionValue,
    MultiIndex,
    RelationVerdict,
    SequenceConfig,
    constant_bundle,
)
from gsinclusion.core.exceptions import DimensionMismatchError, HorizonError
from gsinclusion.core.logging_config import get_module_logger

logger = get_module_logger(__name__)

DEFAULT_SEQUENCE_CONFIG = SequenceConfig()

# q* is capped here; larger orders are never needed at double precision
_MAX_EXACT_ORDER = 1e15


@dataclass(frozen=True)
class GevreyIso:
    """M_alpha = h^{|alpha|} (|alpha|!)^s."""

    s: float
    h: float = 1.0

    def __post_init__(self) -> None:
        if not self.s > 0 or not self.h > 0:
            raise ValueError(f"Gevrey parameters must be positive, got s={self.s}, h={self.h}")


@dataclass(frozen=True)
class Table:
    """Isotropic order profile log M_q, q = 0..len-1."""

    log_values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.log_values) < 2:
            raise ValueError("a table needs at least M_0 and M_1")
        if not all(math.isfinite(v) for v in self.log_values):
            raise ValueError("table entries must be positive and finite")
        if abs(self.log_values[0]) > 1e-12:
            raise ValueError(f"weight sequences are normalized by M_0 = 1, got M_0 = {math.exp(self.log_values[0])}")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Table":
        if any(not v > 0 for v in values):
            raise ValueError("table entries must be positive")
        return cls(tuple(float(np.log(v)) for v in values))


@dataclass(frozen=True)
class Tensor:
    """M_alpha = prod_i M^(i)_{alpha_i} for one-dimensional factors."""

    factors: Tuple["WeightSequence", ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a tensor sequence needs at least one factor")
        if any(f.dimension != 1 for f in self.factors):
            raise ValueError("tensor factors must be one-dimensional")


@dataclass(frozen=True)
class FromBMT:
    """M^lambda_omega: log M_q = phi*(lambda q) / lambda."""

    omega: BMTWeightFunction
    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class Scaled:
    """Dilation factor^{|alpha|} M_alpha of a base sequence."""

    base: "WeightSequence"
    factor: float

    def __post_init__(self) -> None:
        if not self.factor > 0:
            raise ValueError(f"dilation factor must be positive, got {self.factor}")


SequenceSpec = Union[GevreyIso, Table, Tensor, FromBMT, Scaled]


@dataclass(frozen=True)
class WeightSequence:
    """A weight sequence on N^n with its evaluation horizon q_max."""

    spec: SequenceSpec
    dimension: int = 1
    q_max: int = 64

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if self.q_max < 1:
            raise ValueError("q_max must be at least 1")
        if isinstance(self.spec, Tensor) and len(self.spec.factors) != self.dimension:
            raise DimensionMismatchError(self.dimension, len(self.spec.factors), "tensor factor count")
        if isinstance(self.spec, Table) and self.q_max > len(self.spec.log_values) - 1:
            raise HorizonError(f"table of length {len(self.spec.log_values)} cannot serve q_max={self.q_max}")
        if isinstance(self.spec, Scaled) and self.spec.base.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, self.spec.base.dimension)

    @property
    def isotropic(self) -> bool:
        if isinstance(self.spec, Tensor):
            return False
        if isinstance(self.spec, Scaled):
            return self.spec.base.isotropic
        return True

    def __str__(self) -> str:
        return describe_sequence(self)


def describe_sequence(M: WeightSequence) -> str:
    spec = M.spec
    if isinstance(spec, GevreyIso):
        return f"gevrey(s={spec.s:g},h={spec.h:g})"
    if isinstance(spec, Table):
        return f"table[{len(spec.log_values)}]"
    if isinstance(spec, Tensor):
        return "tensor(" + ",".join(describe_sequence(f) for f in spec.factors) + ")"
    if isinstance(spec, FromBMT):
        return f"bmt({omega_name(spec.omega)},lambda={spec.lam:g})"
    return f"{spec.factor:g}^q*{describe_sequence(spec.base)}"


def gevrey_sequence(s: float, h: float = 1.0, dimension: int = 1, q_max: int = 64) -> WeightSequence:
    return WeightSequence(GevreyIso(s, h), dimension, q_max)


def table_sequence(values: Sequence[float], dimension: int = 1, log_values: bool = False) -> WeightSequence:
    """Isotropic sequence from M_0..M_Q (or their logs); the horizon is Q."""
    table = Table(tuple(float(v) for v in values)) if log_values else Table.from_values(values)
    return WeightSequence(table, dimension, len(table.log_values) - 1)


def tensor_sequence(*factors: WeightSequence) -> WeightSequence:
    return WeightSequence(Tensor(tuple(factors)), len(factors), min(f.q_max for f in factors))


def dilate(M: WeightSequence, lam: float) -> WeightSequence:
    """lam^{|alpha|} M_alpha."""
    if lam == 1:
        return M
    if isinstance(M.spec, GevreyIso):
        return WeightSequence(GevreyIso(M.spec.s, M.spec.h * lam), M.dimension, M.q_max)
    if isinstance(M.spec, Scaled):
        return WeightSequence(Scaled(M.spec.base, M.spec.factor * lam), M.dimension, M.q_max)
    return WeightSequence(Scaled(M, lam), M.dimension, M.q_max)


def extend_horizon(M: WeightSequence, q_max: int) -> WeightSequence:
    """Same sequence with horizon q_max; tables keep their own length as the cap."""
    spec = M.spec
    if isinstance(spec, Table):
        return replace(M, q_max=min(q_max, len(spec.log_values) - 1))
    if isinstance(spec, Tensor):
        factors = tuple(extend_horizon(f, q_max) for f in spec.factors)
        return WeightSequence(Tensor(factors), M.dimension, min(f.q_max for f in factors))
    if isinstance(spec, Scaled):
        base = extend_horizon(spec.base, q_max)
        return WeightSequence(Scaled(base, spec.factor), M.dimension, base.q_max)
    return replace(M, q_max=q_max)


def as_gevrey(M: WeightSequence) -> Optional[GevreyIso]:
    """Gevrey parameters of an isotropic Gevrey sequence or one of its dilations."""
    spec = M.spec
    if isinstance(spec, GevreyIso):
        return spec
    if isinstance(spec, Scaled):
        base = as_gevrey(spec.base)
        if base is not None:
            return GevreyIso(base.s, base.h * spec.factor)
    return None


@lru_cache(maxsize=1024)
def _cached_profile(spec: SequenceSpec, q_max: int) -> np.ndarray:
    q = np.arange(q_max + 1, dtype=float)
    if isinstance(spec, GevreyIso):
        profile = q * math.log(spec.h) + spec.s * gammaln(q + 1.0)
    elif isinstance(spec, Table):
        if q_max > len(spec.log_values) - 1:
            raise HorizonError(f"table of length {len(spec.log_values)} does not reach order {q_max}")
        profile = np.array(spec.log_values[: q_max + 1], dtype=float)
    elif isinstance(spec, FromBMT):
        values, covered = phi_star(spec.omega, spec.lam * q)
        if not np.all(covered):
            first = int(np.argmin(covered))
            raise HorizonError(
                f"slope range of {omega_name(spec.omega)} does not cover lambda*q = {spec.lam * first:g}"
            )
        profile = values / spec.lam
        profile[0] = 0.0
    elif isinstance(spec, Scaled):
        if not spec.base.isotropic:
            raise ValueError("a dilated tensor sequence has no isotropic profile")
        profile = _cached_profile(spec.base.spec, q_max) + q * math.log(spec.factor)
    else:
        raise ValueError("tensor sequences have no isotropic profile")
    profile.setflags(write=False)
    return profile


def log_profile(M: WeightSequence, q_max: Optional[int] = None) -> np.ndarray:
    """
    Order profile log M_q for q = 0..q_max of an isotropic sequence.

    Args:
        M: Isotropic weight sequence
        q_max: Last order, defaults to the horizon of M

    Returns:
        Read-only array of length q_max + 1
    """
    if not M.isotropic:
        raise ValueError("anisotropic sequences have no order profile")
    return _cached_profile(M.spec, M.q_max if q_max is None else q_max)


def _as_multi_index(alpha: Union[MultiIndex, Sequence[int], int]) -> MultiIndex:
    if isinstance(alpha, MultiIndex):
        return alpha
    if isinstance(alpha, (int, np.integer)):
        return MultiIndex((int(alpha),))
    return MultiIndex(tuple(int(a) for a in alpha))


def log_values_at(M: WeightSequence, alphas: np.ndarray, q_max: Optional[int] = None) -> np.ndarray:
    """
    Vectorized log M_alpha for rows of an integer array of shape (k, n).
    """
    alphas = np.asarray(alphas, dtype=int)
    horizon = M.q_max if q_max is None else q_max
    orders = alphas.sum(axis=1)
    spec = M.spec
    if isinstance(spec, Tensor):
        total = np.zeros(alphas.shape[0])
        for i, factor in enumerate(spec.factors):
            total += log_values_at(factor, alphas[:, [i]], horizon)
        return total
    if isinstance(spec, Scaled) and not spec.base.isotropic:
        return orders * math.log(spec.factor) + log_values_at(spec.base, alphas, horizon)
    profile = log_profile(M, max(horizon, int(orders.max(initial=0))))
    return profile[orders]


def log_evaluate(M: WeightSequence, alpha: Union[MultiIndex, Sequence[int], int]) -> float:
    """
    log M_alpha.

    Raises:
        DimensionMismatchError: alpha has the wrong dimension
        HorizonError: |alpha| exceeds the horizon of M
    """
    index = _as_multi_index(alpha)
    if index.dimension != M.dimension:
        raise DimensionMismatchError(M.dimension, index.dimension)
    if index.order > M.q_max:
        raise HorizonError(f"|alpha| = {index.order} exceeds the horizon q_max = {M.q_max}")
    return float(log_values_at(M, np.array([index.components]))[0])


def evaluate(M: WeightSequence, alpha: Union[MultiIndex, Sequence[int], int]) -> float:
    """M_alpha."""
    return math.exp(log_evaluate(M, alpha))


def multi_indices_of_order(dimension: int, order: int) -> np.ndarray:
    """All alpha in N^n with |alpha| = order, as rows."""
    if dimension == 1:
        return np.array([[order]])
    rows = []
    for bars in itertools.combinations(range(order + dimension - 1), dimension - 1):
        edges = (-1,) + bars + (order + dimension - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(dimension)])
    return np.array(rows, dtype=int)


def _gevrey_omega(
    gevrey: GevreyIso, log_t: np.ndarray, q_max: Optional[int], window: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact sup over q of q log t - log M_q via the maximizing order."""
    log_ratio = log_t - math.log(gevrey.h)
    with np.errstate(over="ignore"):
        r = np.exp(np.minimum(log_ratio / gevrey.s, math.log(_MAX_EXACT_ORDER)))
    q_star = np.where(r > 1.0, np.ceil(r) - 1.0, 0.0)
    if q_max is None:
        q_eff = q_star
        saturated = np.ones(log_t.shape, dtype=bool)
    else:
        q_eff = np.minimum(q_star, float(q_max))
        saturated = q_star <= q_max - window
    with np.errstate(invalid="ignore"):
        values = q_eff * log_ratio - gevrey.s * gammaln(q_eff + 1.0)
    values = np.where(q_eff == 0, 0.0, np.maximum(values, 0.0))
    return values, q_eff.astype(np.int64), saturated


def _profile_omega(
    profile: np.ndarray, log_t: np.ndarray, window: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    sup over q <= Q of q log t - profile_q by direct enumeration.

    omega_M(0) = 0 exactly, so the origin is always saturated.
    """
    top = profile.size - 1
    q = np.arange(top + 1, dtype=float)
    k = min(window, top)
    values = np.empty(log_t.shape)
    orders = np.empty(log_t.shape, dtype=np.int64)
    saturated = np.empty(log_t.shape, dtype=bool)
    chunk = max(1, 2_000_000 // (top + 1))
    for start in range(0, log_t.size, chunk):
        lt = log_t[start : start + chunk, None]
        with np.errstate(invalid="ignore"):
            g = q[None, :] * lt - profile[None, :]
        g[:, 0] = 0.0
        g = np.where(np.isneginf(lt) & (q[None, :] > 0), -np.inf, g)
        best = np.argmax(g, axis=1)
        rows = np.arange(g.shape[0])
        values[start : start + chunk] = g[rows, best]
        orders[start : start + chunk] = best
        with np.errstate(invalid="ignore"):
            falling = np.all(np.diff(g[:, top - k :], axis=1) < 0, axis=1)
        saturated[start : start + chunk] = falling | np.isneginf(lt[:, 0])
    return np.maximum(values, 0.0), orders, saturated


def _omega(
    M: WeightSequence, abs_points: np.ndarray, q_max: Optional[int], window: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Values, maximizing multi-indices (rows) and saturation of omega_M."""
    spec = M.spec
    n_points = abs_points.shape[0]
    if isinstance(spec, Tensor):
        values = np.zeros(n_points)
        orders = np.zeros((n_points, M.dimension), dtype=np.int64)
        saturated = np.ones(n_points, dtype=bool)
        for i, factor in enumerate(spec.factors):
            v, o, s = _omega(factor, abs_points[:, [i]], q_max, window)
            values += v
            orders[:, i] = o[:, 0]
            saturated &= s
        return values, orders, saturated
    gevrey = as_gevrey(M)
    if isinstance(spec, Scaled) and gevrey is None:
        return _omega(spec.base, abs_points / spec.factor, q_max, window)

    axis = np.argmax(abs_points, axis=1)
    t = abs_points[np.arange(n_points), axis]
    with np.errstate(divide="ignore"):
        log_t = np.log(t)
    if gevrey is not None:
        values, q, saturated = _gevrey_omega(gevrey, log_t, q_max, window)
    else:
        values, q, saturated = _profile_omega(log_profile(M, M.q_max if q_max is None else q_max), log_t, window)
    orders = np.zeros((n_points, M.dimension), dtype=np.int64)
    orders[np.arange(n_points), axis] = q
    return values, orders, saturated


def associated_function_values(
    M: WeightSequence,
    points: np.ndarray,
    q_max: Optional[int] = None,
    config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    omega_M at many points.

    Gevrey sequences (and their dilations) use the exact maximizing order
    unless an explicit q_max is given; every other sequence is evaluated up
    to q_max, defaulting to its own horizon.

    Args:
        M: Weight sequence
        points: Array of shape (N, n), or (N,) when n = 1
        q_max: Order horizon of the sup
        config: Sequence configuration (tail window)

    Returns:
        Tuple of (values, saturated)
    """
    pts = np.abs(np.asarray(points, dtype=float))
    if pts.ndim == 1:
        pts = pts[:, None] if M.dimension == 1 else pts[None, :]
    if pts.shape[1] != M.dimension:
        raise DimensionMismatchError(M.dimension, pts.shape[1])
    values, _, saturated = _omega(M, pts, q_max, config.tail_window)
    return values, saturated


def associated_function(
    M: WeightSequence,
    x: Union[float, Sequence[float], np.ndarray],
    q_max: Optional[int] = None,
    config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG,
) -> AssociatedFunctionValue:
    """
    omega_M(x) = sup_alpha log(|x^alpha| / M_alpha) at a single point.

    Returns:
        AssociatedFunctionValue with the maximizing multi-index; saturated is
        False when the sup was still growing at the horizon.
    """
    point = np.atleast_1d(np.abs(np.asarray(x, dtype=float)))
    if point.size != M.dimension:
        raise DimensionMismatchError(M.dimension, point.size)
    values, orders, saturated = _omega(M, point[None, :], q_max, config.tail_window)
    return AssociatedFunctionValue(
        value=float(values[0]),
        attained_at=MultiIndex(tuple(int(o) for o in orders[0])),
        saturated=bool(saturated[0]),
    )


def _lower_hull(profile: np.ndarray) -> np.ndarray:
    """Vertices of the lower convex hull of (q, profile_q), monotone chain."""
    hull: list[int] = []
    for i in range(profile.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (b - a) * (profile[i] - profile[a]) - (profile[b] - profile[a]) * (i - a)
            if cross > 0:
                break
            hull.pop()
        hull.append(i)
    return np.array(hull, dtype=int)


def log_convex_minorant(M: WeightSequence, q_max: Optional[int] = None) -> WeightSequence:
    """
    Largest log-convex minorant of an isotropic sequence up to q_max.

    Hull vertices keep their original values, so log-convex input comes back
    unchanged.
    """
    if not M.isotropic:
        raise ValueError("log-convex regularization of anisotropic sequences is not supported")
    top = M.q_max if q_max is None else q_max
    profile = log_profile(M, top)
    hull = _lower_hull(profile)
    envelope = np.interp(np.arange(top + 1), hull, profile[hull])
    envelope[hull] = profile[hull]
    logger.debug(f"log-convex minorant of {describe_sequence(M)}: {hull.size} hull vertices up to order {top}")
    return WeightSequence(Table(tuple(float(v) for v in envelope)), M.dimension, top)


def recover_from_associated(M: WeightSequence, q_max: Optional[int] = None) -> np.ndarray:
    """
    log sup_t t^q / exp omega_M(t) for q = 0..q_max.

    omega_M is piecewise linear in log t with breakpoints at the hull slopes,
    so the sup over t is attained at one of them.
    """
    top = M.q_max if q_max is None else q_max
    profile = log_profile(M, top)
    hull = _lower_hull(profile)
    candidates = np.unique(np.concatenate((np.diff(profile[hull]) / np.diff(hull), np.diff(profile))))
    q = np.arange(top + 1, dtype=float)
    omega = np.max(q[None, :] * candidates[:, None] - profile[None, :], axis=1)
    omega = np.maximum(omega, 0.0)
    recovered = np.max(q[:, None] * candidates[None, :] - omega[None, :], axis=1)
    recovered[0] = 0.0
    return recovered


def check_log_convex(
    M: WeightSequence,
    q_max: Optional[int] = None,
    tol: Optional[float] = None,
    config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG,
) -> RelationVerdict:
    """
    Log-convexity through the round trip M_q = sup_t t^q / exp omega_M(t).

    The round trip is checked up to q_max - K, with K the tail window; for
    isotropic sequences the ratio test M_q^2 <= M_{q-1} M_{q+1} runs on all
    orders first.

    Raises:
        ValueError: q_max - K < 2
    """
    top = M.q_max if q_max is None else q_max
    tol = config.tolerance if tol is None else tol
    checked = top - config.tail_window
    if checked < 2:
        raise ValueError(f"degenerate horizon: q_max={top} leaves {checked} orders after the tail window")
    horizon = {"q_max": top, "round_trip_order": checked, "tolerance": tol}

    spec = M.spec
    if isinstance(spec, Scaled) and not spec.base.isotropic:
        return check_log_convex(spec.base, top, tol, config)
    if isinstance(spec, Tensor):
        worst = 0.0
        for i, factor in enumerate(spec.factors):
            verdict = check_log_convex(factor, top, tol, config)
            if not verdict.is_witnessed:
                if verdict.is_falsified:
                    order = int(verdict.counterexample.get("order", 0))
                    alpha = MultiIndex.along(order, i, M.dimension)
                    return RelationVerdict.falsified({"alpha": str(alpha), "factor": i}, horizon)
                return verdict
            worst = max(worst, float(verdict.witness["max_relative_error"]))
        return RelationVerdict.witnessed({"max_relative_error": worst}, horizon, note="factor-wise round trip")

    profile = log_profile(M, top)
    excess = 2.0 * profile[1:-1] - profile[:-2] - profile[2:]
    violations = np.nonzero(excess > math.log1p(tol))[0]
    if violations.size:
        order = int(violations[0]) + 1
        logger.debug(f"ratio test fails for {describe_sequence(M)} at order {order}")
        return RelationVerdict.falsified({"order": order, "log_excess": float(excess[order - 1])}, horizon)

    recovered = recover_from_associated(M, top)
    errors = np.abs(np.expm1(recovered[: checked + 1] - profile[: checked + 1]))
    worst_order = int(np.argmax(errors))
    if errors[worst_order] > tol:
        return RelationVerdict.falsified(
            {"order": worst_order, "relative_error": float(errors[worst_order])}, horizon, note="round trip"
        )
    return RelationVerdict.witnessed({"max_relative_error": float(errors[worst_order])}, horizon)


def superadditivity_check(
    M: WeightSequence, q_max: Optional[int] = None, config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG
) -> RelationVerdict:
    """M_alpha M_beta <= M_{alpha+beta} on all orders with |alpha + beta| <= q_max."""
    top = M.q_max if q_max is None else q_max
    horizon = {"q_max": top}
    if isinstance(M.spec, Tensor):
        verdicts = [superadditivity_check(f, top, config) for f in M.spec.factors]
        failed = next((v for v in verdicts if not v.is_witnessed), None)
        if failed is not None:
            return failed
        return RelationVerdict.witnessed({"C": 1.0, "log_C": 0.0}, horizon, note="factor-wise")
    profile = log_profile(M, top)
    p = np.arange(top + 1)
    total = p[:, None] + p[None, :]
    valid = total <= top
    excess = np.where(valid, profile[:, None] + profile[None, :] - profile[np.minimum(total, top)], -np.inf)
    a, b = np.unravel_index(int(np.argmax(excess)), excess.shape)
    if excess[a, b] > math.log1p(config.tolerance):
        return RelationVerdict.falsified({"alpha": int(a), "beta": int(b), "log_excess": float(excess[a, b])}, horizon)
    return RelationVerdict.witnessed({"C": 1.0, "log_C": 0.0, "max_log_excess": float(excess[a, b])}, horizon)


def check_divergence(
    M: WeightSequence, q_max: Optional[int] = None, config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG
) -> RelationVerdict:
    """Trend surrogate of M_alpha^{1/|alpha|} -> infinity: the order-wise minimum root grows over the tail."""
    top = M.q_max if q_max is None else q_max
    roots = np.array([np.min(log_values_at(M, multi_indices_of_order(M.dimension, q), top)) / q for q in range(1, top + 1)])
    tail = roots[-config.tail_window - 1 :]
    horizon = {"q_max": top, "tail_window": config.tail_window}
    if np.all(np.diff(tail) > 0):
        return RelationVerdict.witnessed({"log_root_at_horizon": float(roots[-1])}, horizon)
    return RelationVerdict.inconclusive("order-wise roots not increasing at the horizon", horizon)


def _order_maxima(M: WeightSequence, N: WeightSequence, top: int) -> np.ndarray:
    """max over |alpha| = q of log M_alpha - log N_alpha, for q = 0..top."""
    if M.isotropic and N.isotropic:
        return np.asarray(log_profile(M, top) - log_profile(N, top))
    maxima = np.empty(top + 1)
    for q in range(top + 1):
        alphas = multi_indices_of_order(M.dimension, q)
        maxima[q] = np.max(log_values_at(M, alphas, top) - log_values_at(N, alphas, top))
    return maxima


def _bounded_tail(values: np.ndarray, window: int) -> bool:
    tail = values[-window - 1 :]
    scale = max(1.0, float(np.max(np.abs(tail))))
    return bool(np.all(np.diff(tail) <= 1e-12 * scale))


def _check_dimensions(M: WeightSequence, N: WeightSequence) -> None:
    if M.dimension != N.dimension:
        raise DimensionMismatchError(M.dimension, N.dimension)


def relation_subseteq(
    M: WeightSequence,
    N: WeightSequence,
    q_max: Optional[int] = None,
    config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG,
) -> RelationVerdict:
    """
    M subseteq N: exists C with M_alpha <= C N_alpha.

    Gevrey pairs are decided from (s, h); other pairs are Witnessed when the
    order-wise maxima of M/N stop growing over the tail window, Inconclusive
    otherwise.
    """
    _check_dimensions(M, N)
    top = min(M.q_max, N.q_max) if q_max is None else q_max
    gm, gn = as_gevrey(M), as_gevrey(N)
    if gm is not None and gn is not None:
        fast = {"fast_path": "gevrey"}
        if math.isclose(gm.s, gn.s, rel_tol=1e-12):
            if gm.h <= gn.h * (1 + 1e-12):
                return RelationVerdict.witnessed(constant_bundle(0.0), fast)
            return RelationVerdict.falsified(
                {"reason": "(h_M/h_N)^q unbounded", "h_M": gm.h, "h_N": gn.h}, fast
            )
        if gm.s > gn.s:
            return RelationVerdict.falsified({"reason": "q!^(s_M-s_N) unbounded", "s_M": gm.s, "s_N": gn.s}, fast)
        # concave in q: the sup sits at the last positive increment
        ratio = gm.h / gn.h
        r = ratio ** (1.0 / (gn.s - gm.s)) if ratio > 1 else 0.0
        q_star = math.ceil(r) - 1 if r > 1 else 0
        log_c = q_star * math.log(ratio) - (gn.s - gm.s) * float(gammaln(q_star + 1.0))
        return RelationVerdict.witnessed({**constant_bundle(max(log_c, 0.0)), "order": q_star}, fast)

    maxima = _order_maxima(M, N, top)
    window = min(config.tail_window, top)
    horizon = {"q_max": top, "tail_window": window}
    if _bounded_tail(maxima, window):
        worst = int(np.argmax(maxima))
        return RelationVerdict.witnessed({**constant_bundle(float(maxima[worst])), "order": worst}, horizon)
    return RelationVerdict.inconclusive("ratio M/N still rising at the horizon", horizon)


def _gevrey_failing_order(gm: GevreyIso, gn: GevreyIso, log_h_max: float) -> int:
    """First q with (M_q/N_q)^{1/q} > H_max for s_M > s_N."""

    def root(q: int) -> float:
        return math.log(gm.h / gn.h) + (gm.s - gn.s) * float(gammaln(q + 1.0)) / q

    high = 1
    while root(high) <= log_h_max and high < 2**40:
        high *= 2
    low = max(1, high // 2)
    while low < high:
        mid = (low + high) // 2
        if root(mid) > log_h_max:
            high = mid
        else:
            low = mid + 1
    return high


def relation_preceq(
    M: WeightSequence,
    N: WeightSequence,
    q_max: Optional[int] = None,
    config: SequenceConfig = DEFAULT_SEQUENCE_CONFIG,
) -> RelationVerdict:
    """
    M preceq N: exist C, H with M_alpha <= C H^{|alpha|} N_alpha.

    H is searched upward over {2^k}; the first H for which the dilated
    subseteq relation is witnessed is returned. Falsified needs a Gevrey fast
    path or a divergence certificate: (M_q/N_q)^{1/q} growing over the tail
    window by more than the configured margin.
    """
    _check_dimensions(M, N)
    top = min(M.q_max, N.q_max) if q_max is None else q_max
    log_h_max = config.h_exponent_max * math.log(2.0)
    gm, gn = as_gevrey(M), as_gevrey(N)
    if gm is not None and gn is not None:
        fast = {"fast_path": "gevrey"}
        if gm.s < gn.s or math.isclose(gm.s, gn.s, rel_tol=1e-12):
            return RelationVerdict.witnessed({"C": 1.0, "log_C": 0.0, "H": gm.h / gn.h}, fast)
        order = _gevrey_failing_order(gm, gn, log_h_max)
        return RelationVerdict.falsified(
            {
                "reason": "q!^(s_M-s_N) outgrows every H^q",
                "s_M": gm.s,
                "s_N": gn.s,
                "order": order,
                "H_max": 2.0**config.h_exponent_max,
            },
            fast,
        )

    maxima = _order_maxima(M, N, top)
    q = np.arange(top + 1, dtype=float)
    window = min(config.tail_window, top - 1)
    horizon = {
        "q_max": top,
        "tail_window": window,
        "H_grid": f"2^{config.h_exponent_min}..2^{config.h_exponent_max}",
    }
    for k in range(config.h_exponent_min, config.h_exponent_max + 1):
        adjusted = maxima - q * k * math.log(2.0)
        if _bounded_tail(adjusted, window):
            logger.debug(f"preceq witnessed with H=2^{k}")
            return RelationVerdict.witnessed({**constant_bundle(float(np.max(adjusted))), "H": 2.0**k}, horizon)

    roots = maxima[1:] / q[1:]
    tail = roots[-window - 1 :]
    if np.all(np.diff(tail) > 0) and tail[-1] - tail[0] > config.divergence_margin:
        return RelationVerdict.falsified(
            {"order": top, "log_root": float(roots[-1]), "H_max": 2.0 ** config.h_exponent_max},
            horizon,
            note="(M_q/N_q)^(1/q) diverging",
        )
    return RelationVerdict.inconclusive("no H on the grid bounds the ratio", horizon)
