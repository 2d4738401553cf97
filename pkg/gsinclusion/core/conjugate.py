"""
BMT weight functions and the Legendre transform engine.

A BMT weight function omega is stored through phi(x) = omega(e^x), which is
convex, non-decreasing and vanishes at 0. The Young conjugate
phi*(y) = sup_{x >= 0} (y x - phi(x)) is computed from samples of phi with a
monotone slope scan, refined by a local quadratic fit.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from gsinclusion.core.logging_config import get_module_logger

logger = get_module_logger(__name__)

CONVEXITY_TOLERANCE = 1e-9
DEFAULT_X_POINTS = 4096


@dataclass(frozen=True)
class PowerMinusOne:
    """omega(t) = max(0, t^rho - 1), phi(x) = e^{rho x} - 1."""

    rho: float

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")


@dataclass(frozen=True)
class LogPower:
    """omega(t) = max(0, log t)^a, phi(x) = x^a."""

    a: float

    def __post_init__(self) -> None:
        if not self.a >= 1:
            raise ValueError(f"log-power exponent must be at least 1, got {self.a}")


@dataclass(frozen=True)
class SampledConvexPhi:
    """phi given by samples (x_i, phi_i), linearly interpolated in between."""

    x: Tuple[float, ...]
    phi: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.x) != len(self.phi) or len(self.x) < 3:
            raise ValueError("sampled phi needs at least three (x, phi) pairs")
        x = np.asarray(self.x, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if x[0] != 0.0 or phi[0] != 0.0:
            raise ValueError("sampled phi must start at (0, 0)")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        if np.any(phi < 0) or np.any(np.diff(phi) < 0):
            raise ValueError("phi must be non-negative and non-decreasing")
        convex, index, worst = check_convexity(x, phi)
        if not convex:
            raise ValueError(f"phi is not convex at sample {index} (slope drop {worst:.3g})")


BMTWeightFunction = Union[PowerMinusOne, LogPower, SampledConvexPhi]


def check_convexity(x: np.ndarray, phi: np.ndarray, tol: float = CONVEXITY_TOLERANCE) -> Tuple[bool, int, float]:
    """
    Discrete convexity of samples through their consecutive slopes.

    Args:
        x: Increasing abscissae
        phi: Sample values
        tol: Allowed slope decrease, relative to the slope scale

    Returns:
        Tuple of (is_convex, index of the worst sample, worst slope increment)
    """
    slopes = np.diff(phi) / np.diff(x)
    increments = np.diff(slopes)
    if increments.size == 0:
        return True, 0, 0.0
    scale = max(1.0, float(np.max(np.abs(slopes))))
    worst = int(np.argmin(increments))
    return bool(increments[worst] >= -tol * scale), worst + 1, float(increments[worst])


def omega_name(omega: BMTWeightFunction) -> str:
    if isinstance(omega, PowerMinusOne):
        return f"pow(rho={omega.rho:g})"
    if isinstance(omega, LogPower):
        return f"logpow(a={omega.a:g})"
    return f"phi-table[{len(omega.x)}]"


def phi_domain(omega: BMTWeightFunction) -> float:
    """Largest x where phi is known."""
    if isinstance(omega, SampledConvexPhi):
        return float(omega.x[-1])
    return math.inf


def phi_value(omega: BMTWeightFunction, x: np.ndarray) -> np.ndarray:
    """phi(x) = omega(e^x) for x >= 0."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    if isinstance(omega, PowerMinusOne):
        return np.expm1(omega.rho * x)
    if isinstance(omega, LogPower):
        return np.power(x, omega.a)
    xs = np.asarray(omega.x)
    ps = np.asarray(omega.phi)
    values = np.interp(x, xs, ps)
    # linear continuation with the last slope
    beyond = x > xs[-1]
    if np.any(beyond):
        slope = (ps[-1] - ps[-2]) / (xs[-1] - xs[-2])
        values = np.where(beyond, ps[-1] + slope * (x - xs[-1]), values)
    return values


def omega_value(omega: BMTWeightFunction, t: np.ndarray) -> np.ndarray:
    """omega(t), vanishing on [0, 1]."""
    t = np.abs(np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        log_t = np.log(t)
    out = np.zeros_like(t)
    mask = t > 1.0
    if isinstance(omega, PowerMinusOne):
        out[mask] = np.expm1(omega.rho * log_t[mask])
        return out
    out[mask] = phi_value(omega, log_t[mask])
    return out


def _slope_cap(required_slope: float) -> float:
    """Round the required slope up to a power of two so grids are shared."""
    return float(2.0 ** math.ceil(math.log2(max(required_slope, 1.0))))


def _x_max(omega: BMTWeightFunction, slope: float) -> float:
    if isinstance(omega, PowerMinusOne):
        x_star = math.log(max(slope / omega.rho, 1.0)) / omega.rho
        return 1.1 * x_star + 1.0
    if isinstance(omega, LogPower):
        if omega.a == 1:
            # constant slope 1, larger slopes are never attained
            return 64.0
        x_star = (slope / omega.a) ** (1.0 / (omega.a - 1.0))
        return 1.1 * x_star + 1.0
    return float(omega.x[-1])


@lru_cache(maxsize=128)
def _cached_phi_samples(
    omega: BMTWeightFunction, slope_cap: float, points: int
) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(omega, SampledConvexPhi):
        x = np.asarray(omega.x, dtype=float)
        phi = np.asarray(omega.phi, dtype=float)
    else:
        x = np.linspace(0.0, _x_max(omega, slope_cap), points)
        phi = phi_value(omega, x)
    x.setflags(write=False)
    phi.setflags(write=False)
    logger.debug(f"phi samples for {omega_name(omega)}: {x.size} points on [0, {x[-1]:.4g}]")
    return x, phi


def phi_samples(
    omega: BMTWeightFunction, required_slope: float, points: int = DEFAULT_X_POINTS
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples of phi on a uniform grid whose last slope covers `required_slope`.

    Sampled phi keeps its own grid, so coverage is not guaranteed there.
    """
    return _cached_phi_samples(omega, _slope_cap(required_slope), points)


def legendre_transform(x: np.ndarray, phi: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    sup_i (y x_i - phi_i) with local quadratic refinement.

    For each query slope the maximizing vertex is located through the sorted
    chord slopes; the sup of the parabola through the vertex and its two
    neighbours, restricted to the bracketing interval, then refines the value.

    Args:
        x: Increasing abscissae
        phi: Convex samples
        y: Query slopes

    Returns:
        Tuple of (values, covered) where covered marks slopes not exceeding
        the last chord slope. Uncovered entries hold the vertex lower bound.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    slopes = np.diff(phi) / np.diff(x)
    n = x.size
    idx = np.searchsorted(slopes, y, side="left")
    covered = idx < slopes.size
    vertex = np.minimum(idx, n - 1)
    values = y * x[vertex] - phi[vertex]

    # parabola through i0, i0+1, i0+2 around the vertex
    i0 = np.clip(vertex - 1, 0, n - 3)
    x0, x1, x2 = x[i0], x[i0 + 1], x[i0 + 2]
    f0, f1, f2 = phi[i0], phi[i0 + 1], phi[i0 + 2]
    d1 = (f1 - f0) / (x1 - x0)
    d2 = ((f2 - f1) / (x2 - x1) - d1) / (x2 - x0)
    lo = x[np.maximum(vertex - 1, 0)]
    hi = x[np.minimum(vertex + 1, n - 1)]
    with np.errstate(divide="ignore", invalid="ignore"):
        x_star = np.where(d2 > 0, 0.5 * ((y - d1) / d2 + x0 + x1), x[vertex])
    x_star = np.clip(np.nan_to_num(x_star, nan=0.0), lo, hi)
    parabola = f0 + d1 * (x_star - x0) + d2 * (x_star - x0) * (x_star - x1)
    refined = y * x_star - parabola
    values = np.where(covered, np.maximum(values, refined), values)
    return values, covered


@dataclass(frozen=True, eq=False)
class ConjugateTable:
    """phi* on a y-grid; entries beyond the covered slope range are NaN."""

    y: np.ndarray
    values: np.ndarray
    covered: np.ndarray
    max_slope: float

    @property
    def covered_y(self) -> np.ndarray:
        return self.y[self.covered]

    @property
    def covered_values(self) -> np.ndarray:
        return self.values[self.covered]


def conjugate_table(x: np.ndarray, phi: np.ndarray, y_max: float, y_points: int = 2048) -> ConjugateTable:
    """
    Tabulate phi* on {0} and a geometric y-grid up to y_max.

    Args:
        x: Abscissae of the phi samples
        phi: Convex samples of phi
        y_max: Largest requested slope
        y_points: Number of geometric grid points

    Returns:
        ConjugateTable with coverage flags
    """
    if not y_max > 0:
        raise ValueError(f"y_max must be positive, got {y_max}")
    y = np.concatenate(([0.0], np.geomspace(y_max * 1e-6, y_max, y_points)))
    values, covered = legendre_transform(x, phi, y)
    values = np.where(covered, values, np.nan)
    slopes = np.diff(phi) / np.diff(x)
    for array in (y, values, covered):
        array.setflags(write=False)
    if not np.all(covered):
        logger.warning(f"conjugate requested up to y={y_max:.4g} beyond the covered slope {slopes[-1]:.4g}")
    return ConjugateTable(y=y, values=values, covered=covered, max_slope=float(slopes[-1]))


def closed_form_phi_star(omega: BMTWeightFunction, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact conjugates of the canonical families.

    pow(rho): (y/rho) log(y/rho) - y/rho + 1 for y >= rho, else 0.
    logpow(a > 1): (1 - 1/a) y (y/a)^{1/(a-1)}.
    logpow(1): 0 up to slope 1, infinite (uncovered) beyond.
    """
    y = np.asarray(y, dtype=float)
    if isinstance(omega, PowerMinusOne):
        u = np.maximum(y / omega.rho, 1.0)
        return u * np.log(u) - u + 1.0, np.ones(y.shape, dtype=bool)
    if isinstance(omega, LogPower):
        if omega.a == 1:
            covered = y <= 1.0
            return np.where(covered, 0.0, np.nan), covered
        return (1.0 - 1.0 / omega.a) * y * np.power(y / omega.a, 1.0 / (omega.a - 1.0)), np.ones(y.shape, dtype=bool)
    raise TypeError(f"no closed-form conjugate for {omega_name(omega)}")


def phi_star(
    omega: BMTWeightFunction, y: np.ndarray, points: int = DEFAULT_X_POINTS
) -> Tuple[np.ndarray, np.ndarray]:
    """
    phi*(y) for a BMT weight function at arbitrary slopes.

    Canonical families use their exact conjugates, sampled phi goes through
    the Legendre engine.

    Returns:
        Tuple of (values, covered)
    """
    y = np.asarray(y, dtype=float)
    if not isinstance(omega, SampledConvexPhi):
        return closed_form_phi_star(omega, y)
    required = float(np.max(y)) if y.size else 1.0
    x, phi = phi_samples(omega, required, points)
    values, covered = legendre_transform(x, phi, y)
    # phi(0) = 0 and phi >= 0 force phi*(0) = 0
    values = np.where(y == 0.0, 0.0, values)
    return values, covered
