"""
Sampling, synthesis, evaluation, periodization and multiplication operators,
the interpolating and partition windows, the decay upgrade and the
one-dimensional parametrix.

Windows are kept in closed form so that their lattice translates are exact
anywhere; grid functions without a closed form are translated by index
shifts. Convolutions are direct quadratures.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad

from gsinclusion.core.config import create_default_config
from gsinclusion.core.data_structures import (
    ApplicationConfig,
    CheckReport,
    Kind,
    RelationVerdict,
    SpaceVariant,
    WindowKind,
)
from gsinclusion.core.exceptions import DimensionMismatchError
from gsinclusion.core.logging_config import get_module_logger
from gsinclusion.core.smooth import (
    CellAverage,
    Conjugate,
    Convolution,
    Plateau,
    PolyBump,
    Product,
    Scaled,
    Shifted,
    SincWindow,
    Smooth1D,
    SmoothFunction,
    TensorProduct,
    derivative_table,
    describe_function,
    dimension_of,
    evaluate,
    is_periodic,
    power,
    smoothness,
    support_radius,
)
from gsinclusion.core.spaces import (
    BanachSpaceModel,
    GridFunction,
    GridSpec,
    SequenceData,
    describe_model,
    ed_norm,
    lattice_constant,
    membership_verdict,
    norm_E,
    sample_function,
    synthesized,
    weighted_ed_norm,
)
from gsinclusion.core.systems import (
    ShiftedWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
    function_member,
    probe_grid,
)

logger = get_module_logger(__name__)

DEFAULT_CONFIG = create_default_config()

# Gauss-Legendre nodes per grid cell of the parametrix quadrature
PARAMETRIX_NODES = 3


def _factors(f: SmoothFunction) -> Sequence[Smooth1D]:
    return f.factors if isinstance(f, TensorProduct) else (f,)


def _assemble(factors: Sequence[Smooth1D]) -> SmoothFunction:
    return factors[0] if len(factors) == 1 else TensorProduct(tuple(factors))


def decay_norm(f: Union[SmoothFunction, GridFunction], grid: Optional[GridSpec] = None) -> float:
    """||f||_{<.>^{n+1}} = sup |f(x)| <x>^{n+1} over the grid."""
    if isinstance(f, GridFunction):
        grid, samples = f.grid, np.abs(f.samples).ravel()
    else:
        if grid is None:
            raise ValueError("a grid is needed to certify the decay of a closed-form function")
        samples = np.abs(evaluate(f, grid.points()))
    points = grid.points()
    n = grid.dimension
    return float(np.max(samples * (1.0 + np.sum(points**2, axis=1)) ** ((n + 1) / 2.0)))


@dataclass(frozen=True, eq=False)
class Window:
    """A closed-form window with its decay certificate on a grid."""

    function: SmoothFunction
    kind: WindowKind
    decay: float
    grid: GridSpec

    def __post_init__(self) -> None:
        if not (math.isfinite(self.decay) and self.decay >= 0):
            raise ValueError(f"window {describe_function(self.function)} has no finite decay certificate")
        if dimension_of(self.function) != self.grid.dimension:
            raise DimensionMismatchError(self.grid.dimension, dimension_of(self.function), "window")

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def sample(self, grid: Optional[GridSpec] = None) -> GridFunction:
        return sample_function(self.function, grid or self.grid)


def make_window(f: SmoothFunction, grid: GridSpec, kind: WindowKind = WindowKind.GENERIC) -> Window:
    if dimension_of(f) != grid.dimension:
        raise DimensionMismatchError(grid.dimension, dimension_of(f), "window")
    return Window(f, kind, decay_norm(f, grid), grid)


def _shifted(f: SmoothFunction, shift: Sequence[float]) -> SmoothFunction:
    return _assemble([g if s == 0 else Shifted(g, float(s)) for g, s in zip(_factors(f), shift)])


def translate(f: GridFunction, shift: Sequence[int]) -> GridFunction:
    """
    T_k f = f(. - k) for an integer vector k.

    Closed forms are shifted exactly; bare samples move by k / h grid cells
    with zeros entering from the box edge.
    """
    shift = tuple(int(s) for s in shift)
    grid = f.grid
    if len(shift) != grid.dimension:
        raise DimensionMismatchError(grid.dimension, len(shift), "shift")
    if f.provenance is not None:
        return sample_function(_shifted(f.provenance, shift), grid)
    samples = f.samples
    for axis, s in enumerate(shift):
        cells = s * grid.per_unit
        samples = np.roll(samples, cells, axis=axis)
        edge = [slice(None)] * grid.dimension
        edge[axis] = slice(0, cells) if cells >= 0 else slice(cells, None)
        samples[tuple(edge)] = 0
    return synthesized(grid, samples, f"shift({f},{shift})")


def _lattice(radius: int, dimension: int) -> np.ndarray:
    axis = np.arange(-radius, radius + 1)
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _bump_factors(chi: SmoothFunction, dimension: int) -> Sequence[PolyBump]:
    factors = _factors(chi)
    if len(factors) != dimension or not all(isinstance(g, PolyBump) for g in factors):
        raise ValueError(f"sampling kernel must be a {dimension}-fold product of bumps")
    return factors  # type: ignore[return-value]


def sample_convolution(f: GridFunction, chi: SmoothFunction, radius: Optional[int] = None) -> SequenceData:
    """
    S_chi(f) = ((f * chi)(j))_j for |j|_inf <= J.

    Closed forms are convolved by Gauss-Legendre quadrature over the kernel
    support; bare samples by a Riemann sum on the grid.

    Raises:
        ValueError: the kernel support around the lattice leaves the box
    """
    grid = f.grid
    n = grid.dimension
    radius = grid.default_radius if radius is None else radius
    bumps = _bump_factors(chi, n)
    reach = radius + max(b.radius for b in bumps)
    if reach > grid.half_width:
        raise ValueError(f"kernel support around |j| <= {radius} reaches {reach:g}, past the box half-width {grid.half_width:g}")
    lattice = _lattice(radius, n).astype(float)
    if f.provenance is not None:
        convolved = _assemble([Convolution(g, b) for g, b in zip(_factors(f.provenance), bumps)])
        values = evaluate(convolved, lattice)
    else:
        points = grid.points()
        flat = f.samples.ravel()
        values = np.array([grid.spacing**n * np.sum(flat * evaluate(chi, j[None, :] - points)) for j in lattice])
    return SequenceData(values.reshape((2 * radius + 1,) * n), radius)


def _moving_sum(values: np.ndarray, half_width: int, spacing: float) -> np.ndarray:
    """h * sum of values within half_width cells along every axis."""
    kernel = np.ones(2 * half_width + 1) * spacing
    result = values
    for axis in range(values.ndim):
        result = np.apply_along_axis(lambda row: np.convolve(row, kernel, mode="same"), axis, result)
    return result


def sample_convolution_check(
    model: BanachSpaceModel, f: GridFunction, chi: SmoothFunction, radius: Optional[int] = None
) -> CheckReport:
    """||S_chi(f)||_{E_d} <= ||chi||_inf || |f| * psi ||_E with psi = 1 on supp chi + [0,1]^n."""
    c = sample_convolution(f, chi, radius)
    grid = model.grid
    reach = max(b.radius for b in _bump_factors(chi, grid.dimension)) + 1.0
    envelope = _moving_sum(np.abs(f.samples), int(math.ceil(reach * grid.per_unit)), grid.spacing)
    sup_chi = float(np.max(np.abs(evaluate(chi, grid.points()))))
    left = ed_norm(model, c)
    right = sup_chi * norm_E(model, envelope)
    return CheckReport(
        name="sampling domination",
        passed=left <= right * (1 + 1e-12),
        observed=left,
        bound=right,
        note=f"{describe_model(model)}; J={c.radius}",
    )


def synthesis(c: SequenceData, window: Window, grid: Optional[GridSpec] = None) -> GridFunction:
    """R_psi(c) = sum_{|j| <= J} c_j T_j psi on the grid."""
    grid = grid or window.grid
    if c.dimension != window.dimension:
        raise DimensionMismatchError(window.dimension, c.dimension, "sequence")
    points = grid.points()
    total = np.zeros(points.shape[0], dtype=complex)
    for j, value in zip(c.lattice_points(), c.values.ravel()):
        if value != 0:
            total += value * evaluate(window.function, points - j[None, :])
    if np.all(total.imag == 0):
        total = total.real
    return synthesized(grid, total.reshape(grid.shape), "synthesis")


def synthesis_bound_check(model: BanachSpaceModel, c: SequenceData, window: Window) -> CheckReport:
    """
    ||R_psi(c)||_E <= C_0 C ||c||_{E_d} ||psi||_{<.>^{n+1}}.

    C_0 = 1 in the shipped models; C is the lattice constant over twice the
    box, which dominates every lattice sum seen from inside the box.
    """
    n = model.dimension
    constant = lattice_constant(n, int(2 * model.grid.half_width))
    observed = norm_E(model, synthesis(c, window, model.grid))
    predicted = constant * ed_norm(model, c) * window.decay
    ratio = observed / predicted if predicted > 0 else 0.0
    return CheckReport(
        name="synthesis norm bound",
        passed=ratio <= 1.0,
        observed=ratio,
        bound=1.0,
        note=f"{describe_model(model)}; C={constant:.6g}; decay={window.decay:.6g}",
    )


def evaluation(f: GridFunction, radius: Optional[int] = None) -> SequenceData:
    """S(f) = (f(j))_{|j| <= J}, read off the lattice-aligned grid."""
    grid = f.grid
    radius = grid.default_radius if radius is None else radius
    if not grid.lattice_aligned or radius > grid.half_width - 1:
        raise ValueError(f"lattice radius {radius} is not covered by the grid")
    index = [grid.index_of(j) for j in range(-radius, radius + 1)]
    return SequenceData(f.samples[np.ix_(*([index] * grid.dimension))], radius)


def evaluation_check(
    f: GridFunction,
    V: WeightFunctionSystem,
    model: BanachSpaceModel,
    radius: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> CheckReport:
    """
    ||S(f)||_{E_{d,v^lambda}} on the probe grid of V.

    Passes when the outermost lattice shell carries no more than the tail
    tolerance of each weighted norm, so the truncation stands for the
    infinite sequence.
    """
    c = evaluation(f, radius)
    lattice = c.lattice_points()
    outer = (np.max(np.abs(lattice), axis=1) == c.radius).reshape(c.values.shape)
    shell = SequenceData(np.where(outer, c.values, 0), c.radius)
    worst = 0.0
    norms = []
    for lam in probe_grid(V, config):
        v = function_member(V, lam, config)
        total = weighted_ed_norm(model, c, v, config)
        norms.append(total)
        if total > 0:
            worst = max(worst, weighted_ed_norm(model, shell, v, config) / total)
    tolerance = config.spaces.tail_tolerance
    return CheckReport(
        name="weighted lattice samples",
        passed=all(math.isfinite(x) for x in norms) and worst <= tolerance,
        observed=worst,
        bound=tolerance,
        note="norms " + ",".join(f"{x:.4g}" for x in norms),
    )


def periodization_tail(decay: float, dimension: int, radius: int, terms: int = 10**6) -> float:
    """Bound on sum over |j|_inf > J of |f(x - j)| for x in the unit cell."""
    m = np.arange(radius + 1, radius + terms + 1, dtype=float)
    counts = (2 * m + 1) ** dimension - (2 * m - 1) ** dimension
    body = math.fsum(counts * (1.0 + (m - 1.0) ** 2) ** (-(dimension + 1) / 2.0))
    remainder = 2 * dimension * 3 ** (dimension - 1) / (m[-1] - 1.0)
    return decay * (body + remainder)


def periodize(f: Union[Window, GridFunction], radius: Optional[int] = None, grid: Optional[GridSpec] = None) -> GridFunction:
    """Pi(f) = sum_{|j|_inf <= J} T_j f."""
    if isinstance(f, Window):
        grid = grid or f.grid
        provenance: Optional[SmoothFunction] = f.function
    else:
        grid = grid or f.grid
        provenance = f.provenance
    radius = grid.default_radius if radius is None else radius
    points = grid.points()
    total = np.zeros(points.shape[0], dtype=complex)
    for j in _lattice(radius, grid.dimension):
        if provenance is not None:
            total += evaluate(provenance, points - j[None, :])
        else:
            total += translate(f, j).samples.ravel()  # type: ignore[arg-type]
    if np.all(total.imag == 0):
        total = total.real
    return synthesized(grid, total.reshape(grid.shape), "periodized")


def multiply(window: Window, f: GridFunction) -> GridFunction:
    """L_psi(f) = psi f for a periodic f; derivatives by the Leibniz rule."""
    if f.provenance is None or not is_periodic(f.provenance):
        raise ValueError(f"{f} is not a periodic function with derivatives")
    if dimension_of(f.provenance) != window.dimension:
        raise DimensionMismatchError(window.dimension, dimension_of(f.provenance), "function")
    product = _assemble([Product(w, g) for w, g in zip(_factors(window.function), _factors(f.provenance))])
    return sample_function(product, f.grid)


def multiplication_check(
    window: Window,
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
    psi in S^[M]_[W_{k+n+1}],inf implies psi f in E^[M]_[W_k] for periodic f.

    Fails only when the hypothesis is witnessed and the product is falsified.
    """
    n = window.dimension
    sup_model = BanachSpaceModel(SpaceVariant.LP, window.grid, math.inf)
    hypothesis = membership_verdict(
        window.sample(), M, WeightFunctionSystem(ShiftedWeights(float(k + n + 1), W), n), kind, sup_model, alpha_max, config
    )
    product = multiply(window, f)
    conclusion = membership_verdict(
        product, M, WeightFunctionSystem(ShiftedWeights(float(k), W), n), kind, model, alpha_max, config
    )
    passed = not (hypothesis.is_witnessed and conclusion.is_falsified)
    return CheckReport(
        name=f"periodic multiplier (k={k})",
        passed=passed,
        note=f"hypothesis {hypothesis.status.value}, product {conclusion.status.value}",
        verdicts=(("window in S_inf", hypothesis), ("product in E", conclusion)),
    )


def _normalized_at_origin(phi: SmoothFunction) -> SmoothFunction:
    value = complex(evaluate(phi, np.zeros((1, dimension_of(phi))))[0])
    if value == 0:
        raise ValueError(f"{describe_function(phi)} vanishes at the origin")
    if value == 1:
        return phi
    factors = list(_factors(phi))
    factors[0] = Scaled(factors[0], 1.0 / value)
    return _assemble(factors)


def interpolating_window(phi: SmoothFunction, grid: GridSpec) -> Window:
    """
    psi = phi chi with chi(x) = prod_i exp(-pi i x_i) sin(pi x_i) / (pi x_i).

    phi is rescaled to phi(0) = 1 first, so psi(j) = delta_{j,0}.
    """
    phi = _normalized_at_origin(phi)
    psi = _assemble([Product(g, SincWindow()) for g in _factors(phi)])
    window = make_window(psi, grid, WindowKind.INTERPOLATING)
    logger.debug(f"interpolating window {describe_function(psi)}: lattice error {window_invariant_error(window):.3g}")
    return window


def _mass(g: Smooth1D) -> float:
    """integral of |g|^2 over R."""
    radius = support_radius(g)
    low, high = (-radius, radius) if math.isfinite(radius) else (-math.inf, math.inf)
    value, _ = quad(lambda x: float(np.abs(derivative_table(g, 0, np.array([x]))[0, 0]) ** 2), low, high, limit=200)
    return value


def partition_window(phi: SmoothFunction, grid: GridSpec) -> Window:
    """
    psi = phi_0 * 1_{[0,1]^n} with phi_0 = |phi|^2 / || |phi|^2 ||_{L^1}.

    Factor-wise for tensor products, so sum_j T_j psi = 1.
    """
    factors = []
    for g in _factors(phi):
        mass = _mass(g)
        if not mass > 0:
            raise ValueError(f"{describe_function(phi)} vanishes identically")
        factors.append(CellAverage(Scaled(Product(g, Conjugate(g)), 1.0 / mass)))
    window = make_window(_assemble(factors), grid, WindowKind.PARTITION)
    logger.debug(f"partition window: cell error {window_invariant_error(window):.3g}")
    return window


def window_invariant_error(window: Window, radius: Optional[int] = None) -> float:
    """
    max |psi(j) - delta_{j,0}| over the box lattice (interpolating windows),
    max |sum_j T_j psi - 1| over the unit cell (partition windows).
    """
    grid = window.grid
    radius = grid.default_radius if radius is None else radius
    if window.kind is WindowKind.INTERPOLATING:
        lattice = _lattice(int(grid.half_width) - 1, grid.dimension).astype(float)
        values = evaluate(window.function, lattice)
        target = np.all(lattice == 0, axis=1).astype(float)
        return float(np.max(np.abs(values - target)))
    if window.kind is WindowKind.PARTITION:
        points = grid.points()
        cell = points[np.all((points >= 0.0) & (points < 1.0), axis=1)]
        total = np.zeros(cell.shape[0], dtype=complex)
        for j in _lattice(radius, grid.dimension):
            total += evaluate(window.function, cell - j[None, :])
        return float(np.max(np.abs(total - 1.0)))
    raise ValueError("generic windows carry no lattice invariant")


def decay_upgrade(f: SmoothFunction, grid: GridSpec, cutoff: PolyBump = PolyBump(8, 1.0), order: int = 2) -> GridFunction:
    """
    g = (f * psi) chi_hat with g(0) = 1.

    psi is the bump cutoff rescaled so that (f * psi)(0) = 1; chi is the
    order-m B-spline of unit mass, whose transform is sinc^m in closed form.

    Raises:
        ValueError: (f * psi)(0) = 0
    """
    factors = []
    for g in _factors(f):
        convolved = Convolution(g, cutoff)
        value = complex(derivative_table(convolved, 0, np.zeros(1))[0, 0])
        if abs(value) == 0:
            raise ValueError(f"cannot normalize: {describe_function(g)} * cutoff vanishes at 0")
        factors.append(Product(Scaled(convolved, 1.0 / value), power(SincWindow(-0.5, 0.5), order)))
    upgraded = _assemble(factors)
    origin = complex(evaluate(upgraded, np.zeros((1, dimension_of(upgraded))))[0])
    if abs(origin - 1.0) > 1e-8:
        logger.warning(f"decay upgrade: g(0) = {origin:.12g}")
    return sample_function(upgraded, grid)


def upgrade_membership(
    g: GridFunction,
    M: WeightSequenceSystem,
    W: WeightFunctionSystem,
    kind: Kind,
    k: int,
    alpha_max: Optional[int] = None,
    config: ApplicationConfig = DEFAULT_CONFIG,
) -> RelationVerdict:
    """g in S^[M]_[W_k],inf at the horizon."""
    sup_model = BanachSpaceModel(SpaceVariant.LP, g.grid, math.inf)
    shifted = WeightFunctionSystem(ShiftedWeights(float(k), W), W.dimension)
    return membership_verdict(g, M, shifted, kind, sup_model, alpha_max, config)


@dataclass(frozen=True)
class Parametrix1D:
    """
    Kernel pair with (chi F_l)'' = delta + phi_l on the line.

    F_1(x) = |x| / 2; chi is a C^k plateau equal to 1 near 0, so
    phi_1 = chi'' F_1 + 2 chi' F_1' vanishes near 0 and is continuous.
    """

    order: int = 1
    cutoff: Plateau = Plateau(0.5, 1.0, 3)

    def __post_init__(self) -> None:
        if self.order != 1:
            raise ValueError("only the order-1 parametrix is implemented")
        if self.cutoff.outer > 1.0:
            raise ValueError("cutoff must be supported in the unit ball")
        if self.cutoff.order < 2 * self.order:
            raise ValueError(f"cutoff needs {2 * self.order} continuous derivatives")

    def fundamental(self, t: np.ndarray) -> np.ndarray:
        return np.abs(t) / 2.0

    def kernel(self, t: np.ndarray) -> np.ndarray:
        return derivative_table(self.cutoff, 0, t)[0] * self.fundamental(t)

    def remainder(self, t: np.ndarray) -> np.ndarray:
        table = derivative_table(self.cutoff, 2, t)
        return table[2] * self.fundamental(t) + table[1] * np.sign(t)


class ParametrixReport(NamedTuple):
    max_error: float
    spacing: float
    delta_normalization: float
    points: int


def parametrix_reproduce(p: Parametrix1D, f: Smooth1D, grid: GridSpec, nodes: int = PARAMETRIX_NODES) -> ParametrixReport:
    """
    f = f'' * (chi F_1) - f * phi_1 at grid points near supp f.

    Both convolutions run over grid cells of [-1, 1] with a Gauss-Legendre
    rule per cell; kinks of the integrands sit on cell edges.
    """
    if grid.dimension != 1:
        raise DimensionMismatchError(1, grid.dimension, "parametrix dimension")
    if smoothness(f) < 2 * p.order:
        raise ValueError(f"{describe_function(f)} needs {2 * p.order} continuous derivatives")
    reach = support_radius(f)
    if not math.isfinite(reach):
        raise ValueError(f"{describe_function(f)} is not compactly supported")
    h = grid.spacing
    x = grid.axis[np.abs(grid.axis) <= reach + 1.0]

    legendre_nodes, legendre_weights = np.polynomial.legendre.leggauss(nodes)
    edges = np.arange(-1.0, 1.0, h)
    t = (edges[:, None] + 0.5 * h * (legendre_nodes[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * h * legendre_weights, edges.size)
    kernel_weights = w * p.kernel(t)
    remainder_weights = w * p.remainder(t)

    table = derivative_table(f, 2, (x[:, None] - t[None, :]).ravel()).reshape(3, x.size, t.size)
    reproduced = table[2] @ kernel_weights - table[0] @ remainder_weights
    exact = derivative_table(f, 0, x)[0]
    error = float(np.max(np.abs(reproduced - exact)))

    step = np.array([-h, 0.0, h])
    second = (p.fundamental(step[2:]) - 2 * p.fundamental(step[1:2]) + p.fundamental(step[:1])) / h**2
    logger.info(f"parametrix at h={h:g}: max error {error:.3g} on {x.size} points")
    return ParametrixReport(error, h, float(second[0] * h), int(x.size))
