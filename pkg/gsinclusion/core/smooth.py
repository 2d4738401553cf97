"""
Closed-form test functions with exact derivatives.

Every function here knows its derivatives pointwise: Gaussians through the
Hermite recursion, polynomial bumps and plateaus through polynomial
calculus, band-limited windows through Gauss-Legendre quadrature of their
Fourier integral, products through the Leibniz rule. Nothing is
differentiated numerically.

One-dimensional functions return derivative tables of shape (q + 1, N);
n-dimensional functions are tensor products of one-dimensional factors.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import beta, comb, roots_legendre

from gsinclusion.core.logging_config import get_module_logger

logger = get_module_logger(__name__)

# points per chunk when a convolution is evaluated
CONVOLUTION_CHUNK = 256


@dataclass(frozen=True)
class Zero:
    """f = 0."""


@dataclass(frozen=True)
class Gaussian:
    """f(x) = exp(-a x^2)."""

    a: float = 1.0

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError(f"Gaussian rate must be positive, got {self.a}")


@dataclass(frozen=True)
class GaussHermite:
    """f(x) = P(x) exp(-a x^2) with P given by ascending coefficients."""

    a: float
    coefficients: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError(f"Gaussian rate must be positive, got {self.a}")
        if not self.coefficients:
            raise ValueError("polynomial factor needs at least one coefficient")


@dataclass(frozen=True)
class SincWindow:
    """
    f(x) = integral over [low, high] of exp(2 pi i xi x) d xi.

    The default interval [-1, 0] gives exp(-pi i x) sin(pi x) / (pi x), the
    interpolating factor vanishing at every non-zero integer; [-1/2, 1/2]
    gives the real sinc.
    """

    low: float = -1.0
    high: float = 0.0

    def __post_init__(self) -> None:
        if not self.high > self.low:
            raise ValueError("frequency interval must be non-empty")


@dataclass(frozen=True)
class PolyBump:
    """f(x) = (1 - (x/r)^2)^degree on |x| < r, zero outside."""

    degree: int = 8
    radius: float = 1.0

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError(f"bump degree must be at least 1, got {self.degree}")
        if not self.radius > 0:
            raise ValueError(f"bump radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Plateau:
    """
    Cutoff equal to 1 on |x| <= inner and 0 on |x| >= outer.

    The transition is the polynomial smoothstep whose derivative is
    t^k (1 - t)^k / B(k + 1, k + 1), so the cutoff is C^k.
    """

    inner: float = 0.5
    outer: float = 1.0
    order: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.inner < self.outer:
            raise ValueError("plateau needs 0 < inner < outer")
        if self.order < 1:
            raise ValueError("plateau order must be at least 1")


@dataclass(frozen=True)
class Poly:
    """f(x) = sum_k c_k x^k, ascending coefficients."""

    coefficients: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("polynomial needs at least one coefficient")


@dataclass(frozen=True)
class Trig:
    """Periodic f(x) = sum_k c_k exp(2 pi i k x)."""

    terms: Tuple[Tuple[int, complex], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("trigonometric polynomial needs at least one term")


@dataclass(frozen=True)
class Shifted:
    """f(x - shift)."""

    base: "Smooth1D"
    shift: float


@dataclass(frozen=True)
class Scaled:
    """factor * f(x)."""

    base: "Smooth1D"
    factor: complex


@dataclass(frozen=True)
class Product:
    """f(x) g(x), differentiated with the Leibniz rule."""

    left: "Smooth1D"
    right: "Smooth1D"


@dataclass(frozen=True)
class Convolution:
    """(f * k)(x) with a compactly supported bump kernel k."""

    base: "Smooth1D"
    kernel: PolyBump
    panels: int = 8
    nodes: int = 48


@dataclass(frozen=True)
class CellAverage:
    """
    f(x) = integral over [0, 1] of base(x - t) dt.

    Derivatives of order q >= 1 are base^(q-1)(x) - base^(q-1)(x - 1); the
    value itself is a Gauss-Legendre rule on the unit cell.
    """

    base: "Smooth1D"
    nodes: int = 32


@dataclass(frozen=True)
class Conjugate:
    """Complex conjugate of base."""

    base: "Smooth1D"


Smooth1D = Union[
    Zero,
    Gaussian,
    GaussHermite,
    SincWindow,
    PolyBump,
    Plateau,
    Poly,
    Trig,
    Shifted,
    Scaled,
    Product,
    Convolution,
    CellAverage,
    Conjugate,
]


@dataclass(frozen=True)
class TensorProduct:
    """f(x) = f_1(x_1) ... f_n(x_n)."""

    factors: Tuple[Smooth1D, ...]

    def __post_init__(self) -> None:
        if len(self.factors) < 2:
            raise ValueError("a tensor product needs at least two factors")


SmoothFunction = Union[Smooth1D, TensorProduct]


def dimension_of(f: SmoothFunction) -> int:
    return len(f.factors) if isinstance(f, TensorProduct) else 1


def gaussian(a: float = 1.0, dimension: int = 1) -> SmoothFunction:
    """exp(-a |x|^2) in n dimensions."""
    if dimension == 1:
        return Gaussian(a)
    return TensorProduct(tuple(Gaussian(a) for _ in range(dimension)))


def power(f: Smooth1D, m: int) -> Smooth1D:
    """f^m as a chain of Leibniz products."""
    if m < 1:
        raise ValueError(f"power must be at least 1, got {m}")
    result = f
    for _ in range(m - 1):
        result = Product(result, f)
    return result


def times_monomial(f: SmoothFunction, beta: Sequence[int]) -> SmoothFunction:
    """x^beta f(x); tensor products are multiplied factor-wise."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != dimension_of(f):
        raise ValueError(f"monomial {beta} does not match dimension {dimension_of(f)}")

    def factor(g: Smooth1D, k: int) -> Smooth1D:
        return g if k == 0 else Product(g, Poly((0.0,) * k + (1.0,)))

    if isinstance(f, TensorProduct):
        return TensorProduct(tuple(factor(g, k) for g, k in zip(f.factors, beta)))
    return factor(f, beta[0])


def describe_function(f: SmoothFunction) -> str:
    """Canonical text form, read back by the spec parser."""
    if isinstance(f, Zero):
        return "zero"
    if isinstance(f, Gaussian):
        return f"gaussian(a={f.a:g})"
    if isinstance(f, GaussHermite):
        return f"hermite(a={f.a:g},coef=[{','.join(f'{c:g}' for c in f.coefficients)}])"
    if isinstance(f, SincWindow):
        if (f.low, f.high) == (-1.0, 0.0):
            return "sinc"
        return f"sinc(low={f.low:g},high={f.high:g})"
    if isinstance(f, PolyBump):
        return f"bump(deg={f.degree},r={f.radius:g})"
    if isinstance(f, Plateau):
        return f"plateau(inner={f.inner:g},outer={f.outer:g},order={f.order})"
    if isinstance(f, Poly):
        return f"poly(coef=[{','.join(f'{c:g}' for c in f.coefficients)}])"
    if isinstance(f, Trig):
        return "trig:[" + ",".join(f"({k},{_complex_text(c)})" for k, c in f.terms) + "]"
    if isinstance(f, Shifted):
        return f"shift({describe_function(f.base)},{f.shift:g})"
    if isinstance(f, Scaled):
        return f"scale({describe_function(f.base)},{_complex_text(f.factor)})"
    if isinstance(f, Product):
        return f"{describe_function(f.left)}*{describe_function(f.right)}"
    if isinstance(f, Convolution):
        return f"conv({describe_function(f.base)},{describe_function(f.kernel)})"
    if isinstance(f, CellAverage):
        return f"cellavg({describe_function(f.base)})"
    if isinstance(f, Conjugate):
        return f"conj({describe_function(f.base)})"
    return "tensor(" + ",".join(describe_function(g) for g in f.factors) + ")"


def _complex_text(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:g}"
    return f"{c.real:g}{c.imag:+g}j"


def smoothness(f: SmoothFunction) -> float:
    """Number of continuous derivatives (inf for analytic functions)."""
    if isinstance(f, PolyBump):
        return float(f.degree - 1)
    if isinstance(f, Plateau):
        return float(f.order)
    if isinstance(f, (Shifted, Scaled)):
        return smoothness(f.base)
    if isinstance(f, Product):
        return min(smoothness(f.left), smoothness(f.right))
    if isinstance(f, Convolution):
        return smoothness(f.base) + smoothness(f.kernel) + 1.0
    if isinstance(f, CellAverage):
        return smoothness(f.base) + 1.0
    if isinstance(f, Conjugate):
        return smoothness(f.base)
    if isinstance(f, TensorProduct):
        return min(smoothness(g) for g in f.factors)
    return math.inf


def support_radius(f: SmoothFunction) -> float:
    """Radius of a ball containing the support (inf when not compact)."""
    if isinstance(f, Zero):
        return 0.0
    if isinstance(f, PolyBump):
        return f.radius
    if isinstance(f, Plateau):
        return f.outer
    if isinstance(f, Shifted):
        return support_radius(f.base) + abs(f.shift)
    if isinstance(f, Scaled):
        return support_radius(f.base)
    if isinstance(f, Product):
        return min(support_radius(f.left), support_radius(f.right))
    if isinstance(f, Convolution):
        return support_radius(f.base) + f.kernel.radius
    if isinstance(f, CellAverage):
        return support_radius(f.base) + 1.0
    if isinstance(f, Conjugate):
        return support_radius(f.base)
    if isinstance(f, TensorProduct):
        return math.sqrt(sum(support_radius(g) ** 2 for g in f.factors))
    return math.inf


def is_periodic(f: SmoothFunction) -> bool:
    if isinstance(f, Trig):
        return True
    if isinstance(f, (Scaled, Shifted, CellAverage, Conjugate)):
        return is_periodic(f.base)
    if isinstance(f, Product):
        return is_periodic(f.left) and is_periodic(f.right)
    if isinstance(f, TensorProduct):
        return all(is_periodic(g) for g in f.factors)
    return False


def _gaussian_table(a: float, q_top: int, x: np.ndarray) -> np.ndarray:
    """d^q exp(-a x^2) = (-sqrt a)^q H_q(sqrt a x) exp(-a x^2)."""
    root = math.sqrt(a)
    u = root * x
    table = np.empty((q_top + 1, x.size))
    table[0] = np.exp(-(u**2))
    if q_top >= 1:
        table[1] = 2.0 * u * table[0]
    for q in range(1, q_top):
        table[q + 1] = 2.0 * u * table[q] - 2.0 * q * table[q - 1]
    signs = (-root) ** np.arange(q_top + 1)
    return table * signs[:, None]


def _polynomial_table(p: Polynomial, q_top: int, x: np.ndarray) -> np.ndarray:
    table = np.zeros((q_top + 1, x.size))
    derivative = p
    for q in range(q_top + 1):
        if derivative.degree() == 0 and derivative.coef[0] == 0:
            break
        table[q] = derivative(x)
        derivative = derivative.deriv()
    return table


def _leibniz(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Derivative table of a product from the tables of its factors."""
    q_top = left.shape[0] - 1
    dtype = np.result_type(left, right)
    table = np.zeros(left.shape, dtype=dtype)
    for q in range(q_top + 1):
        for k in range(q + 1):
            table[q] += comb(q, k) * left[k] * right[q - k]
    return table


@lru_cache(maxsize=64)
def _legendre(count: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(count)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _band_limited_table(f: SincWindow, q_top: int, x: np.ndarray) -> np.ndarray:
    """Gauss-Legendre rule on the frequency interval, sized to resolve the oscillation."""
    width = f.high - f.low
    extent = float(np.max(np.abs(x))) if x.size else 0.0
    count = int(math.pi * extent * width) + q_top + 48
    nodes, weights = _legendre(count)
    xi = f.low + 0.5 * width * (nodes + 1.0)
    w = 0.5 * width * weights
    phase = np.exp(2j * np.pi * np.outer(x, xi))
    factor = 2j * np.pi * xi
    table = np.empty((q_top + 1, x.size), dtype=complex)
    moment = w.astype(complex)
    for q in range(q_top + 1):
        table[q] = phase @ moment
        moment = moment * factor
    return table


def _bump_table(f: PolyBump, q_top: int, x: np.ndarray) -> np.ndarray:
    inside = np.abs(x) < f.radius
    p = Polynomial([1.0, 0.0, -1.0 / f.radius**2]) ** f.degree
    table = np.zeros((q_top + 1, x.size))
    table[:, inside] = _polynomial_table(p, q_top, x[inside])
    return table


@lru_cache(maxsize=16)
def _smoothstep(order: int) -> Polynomial:
    slope = Polynomial([0.0, 1.0]) ** order * Polynomial([1.0, -1.0]) ** order / beta(order + 1, order + 1)
    return slope.integ(lbnd=0.0)


def _plateau_table(f: Plateau, q_top: int, x: np.ndarray) -> np.ndarray:
    table = np.zeros((q_top + 1, x.size))
    ax = np.abs(x)
    table[0, ax <= f.inner] = 1.0
    ramp = (ax > f.inner) & (ax < f.outer)
    if np.any(ramp):
        width = f.outer - f.inner
        t = (f.outer - ax[ramp]) / width
        chain = -np.sign(x[ramp]) / width
        step = _polynomial_table(_smoothstep(f.order), q_top, t)
        table[:, ramp] = step * chain[None, :] ** np.arange(q_top + 1)[:, None]
    return table


def _trig_table(f: Trig, q_top: int, x: np.ndarray) -> np.ndarray:
    table = np.zeros((q_top + 1, x.size), dtype=complex)
    for k, c in f.terms:
        wave = complex(c) * np.exp(2j * np.pi * k * x)
        factor = 2j * np.pi * k
        for q in range(q_top + 1):
            table[q] += factor**q * wave
    return table


def _convolution_table(f: Convolution, q_top: int, x: np.ndarray) -> np.ndarray:
    """Composite Gauss-Legendre quadrature of f^(q)(x - t) k(t) over the kernel support."""
    nodes, weights = _legendre(f.nodes)
    edges = np.linspace(-f.kernel.radius, f.kernel.radius, f.panels + 1)
    half = 0.5 * np.diff(edges)
    t = ((edges[:-1] + half)[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel() * _bump_table(f.kernel, 0, t)[0]
    pieces = []
    for start in range(0, x.size, CONVOLUTION_CHUNK):
        chunk = x[start : start + CONVOLUTION_CHUNK]
        shifted = (chunk[:, None] - t[None, :]).ravel()
        base = derivative_table(f.base, q_top, shifted).reshape(q_top + 1, chunk.size, t.size)
        pieces.append(base @ w)
    if not pieces:
        return np.zeros((q_top + 1, 0))
    return np.concatenate(pieces, axis=1)


def _cell_average_table(f: CellAverage, q_top: int, x: np.ndarray) -> np.ndarray:
    nodes, weights = _legendre(f.nodes)
    t = 0.5 * (nodes + 1.0)
    value = derivative_table(f.base, 0, (x[:, None] - t[None, :]).ravel())[0].reshape(x.size, t.size) @ (0.5 * weights)
    table = np.zeros((q_top + 1, x.size), dtype=value.dtype)
    table[0] = value
    if q_top >= 1:
        upper = derivative_table(f.base, q_top - 1, x)
        lower = derivative_table(f.base, q_top - 1, x - 1.0)
        table = table.astype(np.result_type(table, upper))
        table[1:] = upper - lower
    return table


def derivative_table(f: Smooth1D, q_top: int, x: np.ndarray) -> np.ndarray:
    """
    f, f', ..., f^(q_top) at the points x.

    Args:
        f: One-dimensional function
        q_top: Highest derivative order
        x: Points, any shape (flattened)

    Returns:
        Array of shape (q_top + 1, x.size), complex for complex-valued f
    """
    x = np.asarray(x, dtype=float).ravel()
    if q_top < 0:
        raise ValueError(f"derivative order must be non-negative, got {q_top}")
    if isinstance(f, Zero):
        return np.zeros((q_top + 1, x.size))
    if isinstance(f, Gaussian):
        return _gaussian_table(f.a, q_top, x)
    if isinstance(f, GaussHermite):
        return _leibniz(_polynomial_table(Polynomial(f.coefficients), q_top, x), _gaussian_table(f.a, q_top, x))
    if isinstance(f, SincWindow):
        return _band_limited_table(f, q_top, x)
    if isinstance(f, PolyBump):
        return _bump_table(f, q_top, x)
    if isinstance(f, Plateau):
        return _plateau_table(f, q_top, x)
    if isinstance(f, Poly):
        return _polynomial_table(Polynomial(f.coefficients), q_top, x)
    if isinstance(f, Trig):
        return _trig_table(f, q_top, x)
    if isinstance(f, Shifted):
        return derivative_table(f.base, q_top, x - f.shift)
    if isinstance(f, Scaled):
        table = derivative_table(f.base, q_top, x)
        factor = complex(f.factor)
        return table * (factor.real if factor.imag == 0 else factor)
    if isinstance(f, Product):
        return _leibniz(derivative_table(f.left, q_top, x), derivative_table(f.right, q_top, x))
    if isinstance(f, Convolution):
        return _convolution_table(f, q_top, x)
    if isinstance(f, CellAverage):
        return _cell_average_table(f, q_top, x)
    if isinstance(f, Conjugate):
        return np.conj(derivative_table(f.base, q_top, x))
    raise TypeError(f"{describe_function(f)} is not one-dimensional")


def tensor_tables(f: SmoothFunction, q_top: int, points: np.ndarray) -> List[np.ndarray]:
    """Per-coordinate derivative tables at points of shape (N, n)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = dimension_of(f)
    if pts.shape[1] != n:
        raise ValueError(f"points have dimension {pts.shape[1]}, function has {n}")
    factors: Sequence[Smooth1D] = f.factors if isinstance(f, TensorProduct) else (f,)
    return [derivative_table(g, q_top, pts[:, i]) for i, g in enumerate(factors)]


def partial_derivative(tables: List[np.ndarray], alpha: Sequence[int]) -> np.ndarray:
    """d^alpha f from precomputed tensor tables."""
    result = tables[0][alpha[0]]
    for table, order in zip(tables[1:], alpha[1:]):
        result = result * table[order]
    return result


def evaluate(f: SmoothFunction, points: np.ndarray) -> np.ndarray:
    """f at points of shape (N, n) (or (N,) in one dimension)."""
    return partial_derivative(tensor_tables(f, 0, points), (0,) * dimension_of(f))


def derivative(f: SmoothFunction, alpha: Sequence[int], points: np.ndarray) -> np.ndarray:
    """d^alpha f at points."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dimension_of(f):
        raise ValueError(f"multi-index {alpha} does not match dimension {dimension_of(f)}")
    if sum(alpha) > smoothness(f):
        logger.debug(f"{describe_function(f)}: order {sum(alpha)} exceeds smoothness, values are a.e.")
    return partial_derivative(tensor_tables(f, max(alpha), points), alpha)
