"""
Spec grammars: sequences, BMT weight functions, systems, weights, test
functions and spaces.

Text is first read into a small syntax tree (calls with positional and keyword
arguments, `name:[...]` lists, tuples, `*` products, numbers) and then built
into typed objects. Every error carries the line and column of the offending
token. `format_*` functions print the canonical form, which parses back to an
equal object.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, TypeVar, Union

import numpy as np
import sympy as sp

from gsinclusion.core.conjugate import BMTWeightFunction, LogPower, PowerMinusOne, SampledConvexPhi
from gsinclusion.core.data_structures import Kind
from gsinclusion.core.config import SpecEntry
from gsinclusion.core.exceptions import SpecParseError
from gsinclusion.core.functions import (
    AssocDilate,
    FromOmega,
    GrowthFunction,
    One,
    PolyShift,
    PowerExp,
    SampledGrowth,
    WeightFunction,
)
from gsinclusion.core.functions import Product as WeightProduct
from gsinclusion.core.sequences import FromBMT, GevreyIso, Scaled, Table, Tensor, WeightSequence
from gsinclusion.core.smooth import (
    CellAverage,
    Conjugate,
    Convolution,
    GaussHermite,
    Gaussian,
    Plateau,
    Poly,
    PolyBump,
    Product,
    Shifted,
    SincWindow,
    Smooth1D,
    SmoothFunction,
    TensorProduct,
    Trig,
    Zero,
)
from gsinclusion.core.smooth import Scaled as ScaledFunction
from gsinclusion.core.systems import (
    BMTGenerated,
    Dilated,
    DilatedWeights,
    ExplicitSequences,
    ExplicitWeights,
    OmegaWeights,
    SequenceWeights,
    ShiftedWeights,
    WeightFunctionSystem,
    WeightSequenceSystem,
)

DEFAULT_Q_MAX = 64

T = TypeVar("T")

_NUMBER = re.compile(
    r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
    r"(?:/\d+|[-+](?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?j|j)?"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*")
_SYMBOLS = "()[],=:*"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "symbol", "end"
    text: str
    column: int


@dataclass(frozen=True)
class Number:
    text: str
    column: int


@dataclass(frozen=True)
class Call:
    """name(args)[:items]; `called` distinguishes `sinc` from `sinc()`."""

    name: str
    args: Tuple["Tree", ...]
    kwargs: Tuple[Tuple[str, "Tree"], ...]
    items: Optional[Tuple["Tree", ...]]
    called: bool
    column: int


@dataclass(frozen=True)
class Group:
    """A tuple `(a, b)`, a list `[a, b]` or a product `a*b`."""

    kind: str  # "tuple", "list", "product"
    members: Tuple["Tree", ...]
    column: int


Tree = Union[Number, Call, Group]


class _Parser:
    def __init__(self, text: str, line: int = 1):
        self.text = text
        self.line = line
        self.tokens = self._tokenize()
        self.position = 0

    def error(self, message: str, column: int) -> SpecParseError:
        return SpecParseError(message, self.line, column, self.text)

    def _tokenize(self) -> List[Token]:
        tokens = []
        i = 0
        while i < len(self.text):
            char = self.text[i]
            if char.isspace():
                i += 1
                continue
            previous = tokens[-1] if tokens else None
            number_allowed = previous is None or previous.kind == "symbol"
            match = _NUMBER.match(self.text, i) if number_allowed else None
            if match and (char.isdigit() or char in "+-."):
                tokens.append(Token("number", match.group(), i + 1))
                i = match.end()
                continue
            match = _IDENT.match(self.text, i)
            if match:
                tokens.append(Token("ident", match.group(), i + 1))
                i = match.end()
                continue
            if char in _SYMBOLS:
                tokens.append(Token("symbol", char, i + 1))
                i += 1
                continue
            raise self.error(f"unexpected character '{char}'", i + 1)
        tokens.append(Token("end", "", len(self.text) + 1))
        return tokens

    def peek(self) -> Token:
        return self.tokens[self.position]

    def take(self) -> Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, symbol: str) -> Token:
        token = self.take()
        if token.kind != "symbol" or token.text != symbol:
            found = token.text or "end of input"
            raise self.error(f"expected '{symbol}', found '{found}'", token.column)
        return token

    def at(self, symbol: str) -> bool:
        token = self.peek()
        return token.kind == "symbol" and token.text == symbol

    def parse(self) -> Tree:
        tree = self.product()
        token = self.peek()
        if token.kind != "end":
            raise self.error(f"unexpected '{token.text}' after the spec", token.column)
        return tree

    def product(self) -> Tree:
        first = self.atom()
        factors = [first]
        while self.at("*"):
            self.take()
            factors.append(self.atom())
        if len(factors) == 1:
            return first
        return Group("product", tuple(factors), _column(first))

    def sequence_of(self, close: str) -> Tuple[Tree, ...]:
        members: List[Tree] = []
        if self.at(close):
            self.take()
            return ()
        while True:
            members.append(self.product())
            if self.at(","):
                self.take()
                continue
            self.expect(close)
            return tuple(members)

    def atom(self) -> Tree:
        token = self.take()
        if token.kind == "number":
            return Number(token.text, token.column)
        if token.kind == "symbol" and token.text == "(":
            members = self.sequence_of(")")
            if len(members) == 1:
                return members[0]
            return Group("tuple", members, token.column)
        if token.kind == "symbol" and token.text == "[":
            return Group("list", self.sequence_of("]"), token.column)
        if token.kind != "ident":
            raise self.error(f"expected a name or a number, found '{token.text or 'end of input'}'", token.column)
        args: List[Tree] = []
        kwargs: List[Tuple[str, Tree]] = []
        called = False
        if self.at("("):
            called = True
            self.take()
            if self.at(")"):
                self.take()
            else:
                while True:
                    lookahead = self.tokens[self.position + 1]
                    if self.peek().kind == "ident" and lookahead.kind == "symbol" and lookahead.text == "=":
                        key = self.take()
                        self.take()
                        if any(k == key.text for k, _ in kwargs):
                            raise self.error(f"duplicate argument '{key.text}'", key.column)
                        kwargs.append((key.text, self.product()))
                    else:
                        args.append(self.product())
                    if self.at(","):
                        self.take()
                        continue
                    self.expect(")")
                    break
        items = None
        if self.at(":"):
            self.take()
            opening = self.expect("[")
            items = self.sequence_of("]")
            if not items:
                raise self.error("empty list", opening.column)
        return Call(token.text, tuple(args), tuple(kwargs), items, called, token.column)


def _column(tree: Tree) -> int:
    return tree.column


def _tree(text: str, line: int) -> Tuple[_Parser, Tree]:
    parser = _Parser(text, line)
    return parser, parser.parse()


class _Builder:
    """Typed construction with positions for diagnostics."""

    def __init__(self, parser: _Parser, q_max: int = DEFAULT_Q_MAX, dimension: int = 1):
        self.parser = parser
        self.q_max = q_max
        self.dimension = dimension

    def error(self, message: str, tree: Tree) -> SpecParseError:
        return self.parser.error(message, _column(tree))

    def call(self, tree: Tree, what: str) -> Call:
        if not isinstance(tree, Call):
            raise self.error(f"expected {what}", tree)
        return tree

    def check_signature(self, call: Call, positional: int, keys: Tuple[str, ...], items: bool = False) -> None:
        if len(call.args) != positional:
            raise self.error(f"{call.name} takes {positional} positional argument(s), got {len(call.args)}", call)
        for key, value in call.kwargs:
            if key not in keys:
                raise self.error(f"{call.name} has no argument '{key}'", value)
        if (call.items is not None) != items:
            raise self.error(f"{call.name} {'needs' if items else 'takes no'} ':[...]' list", call)

    def kwarg(self, call: Call, key: str) -> Optional[Tree]:
        for k, value in call.kwargs:
            if k == key:
                return value
        return None

    def real(self, tree: Optional[Tree], default: Optional[float] = None, what: str = "number") -> float:
        if tree is None:
            if default is None:
                raise self.parser.error(f"missing {what}", len(self.parser.text) + 1)
            return default
        if isinstance(tree, Call) and tree.name == "inf" and not tree.called:
            return math.inf
        if not isinstance(tree, Number):
            raise self.error(f"expected a {what}", tree)
        try:
            if "/" in tree.text:
                numerator, denominator = tree.text.split("/")
                return float(sp.Rational(int(numerator), int(denominator)))
            return float(tree.text)
        except (ValueError, ZeroDivisionError, TypeError) as e:
            raise self.error(f"invalid {what} '{tree.text}'", tree) from e

    def integer(self, tree: Optional[Tree], default: Optional[int] = None, what: str = "integer") -> int:
        value = self.real(tree, None if default is None else float(default), what)
        if not float(value).is_integer():
            raise self.error(f"expected an integer {what}", tree)  # type: ignore[arg-type]
        return int(value)

    def complex_value(self, tree: Tree) -> complex:
        if not isinstance(tree, Number):
            raise self.error("expected a number", tree)
        try:
            if "/" in tree.text:
                return complex(self.real(tree))
            return complex(tree.text)
        except ValueError as e:
            raise self.error(f"invalid number '{tree.text}'", tree) from e

    def reals(self, tree: Optional[Tree], what: str) -> Tuple[float, ...]:
        if not isinstance(tree, Group) or tree.kind != "list" or not tree.members:
            raise self.parser.error(f"expected a list of {what}", _column(tree) if tree is not None else 1)
        return tuple(self.real(member, what=what) for member in tree.members)

    def pair(self, tree: Tree) -> Tuple[Tree, Tree]:
        if not isinstance(tree, Group) or tree.kind != "tuple" or len(tree.members) != 2:
            raise self.error("expected a pair '(a, b)'", tree)
        return tree.members[0], tree.members[1]

    def construct(self, build: Callable[[], object], tree: Tree) -> object:
        """Turns construction-time ValueErrors into positioned parse errors."""
        try:
            return build()
        except SpecParseError:
            raise
        except ValueError as e:
            raise self.error(str(e), tree) from e

    # --- BMT weight functions

    def omega(self, tree: Tree) -> BMTWeightFunction:
        call = self.call(tree, "a weight function pow(...), logpow(...) or phi-table:[...]")
        if call.name == "pow":
            self.check_signature(call, 0, ("rho",))
            return self.construct(  # type: ignore[return-value]
                lambda: PowerMinusOne(self.real(self.kwarg(call, "rho"), what="rho")), call
            )
        if call.name == "logpow":
            self.check_signature(call, 0, ("a",))
            return self.construct(  # type: ignore[return-value]
                lambda: LogPower(self.real(self.kwarg(call, "a"), what="a")), call
            )
        if call.name == "phi-table":
            self.check_signature(call, 0, (), items=True)
            pairs = [self.pair(item) for item in call.items or ()]
            x = tuple(self.real(a) for a, _ in pairs)
            phi = tuple(self.real(b) for _, b in pairs)
            return self.construct(lambda: SampledConvexPhi(x, phi), call)  # type: ignore[return-value]
        raise self.error(f"unknown weight function '{call.name}'", call)

    def growth(self, tree: Tree) -> GrowthFunction:
        if isinstance(tree, Call) and tree.name == "growth-table":
            self.check_signature(tree, 0, (), items=True)
            pairs = [self.pair(item) for item in tree.items or ()]
            t = tuple(self.real(a) for a, _ in pairs)
            values = tuple(self.real(b) for _, b in pairs)
            return self.construct(lambda: SampledGrowth(t, values), tree)  # type: ignore[return-value]
        return self.omega(tree)

    # --- weight sequences

    def sequence(self, tree: Tree) -> WeightSequence:
        call = self.call(tree, "a weight sequence")
        q_max = self.integer(self.kwarg(call, "qmax"), self.q_max, "qmax")
        n = self.integer(self.kwarg(call, "n"), self.dimension, "n")
        if call.name == "gevrey":
            self.check_signature(call, 0, ("s", "h", "n", "qmax"))
            spec: object = self.construct(
                lambda: GevreyIso(self.real(self.kwarg(call, "s"), what="s"), self.real(self.kwarg(call, "h"), 1.0)), call
            )
        elif call.name in ("table", "logtable"):
            self.check_signature(call, 0, ("n", "qmax"), items=True)
            values = tuple(self.real(item) for item in call.items or ())
            if call.name == "table":
                spec = self.construct(lambda: Table.from_values(values), call)
            else:
                spec = self.construct(lambda: Table(values), call)
            q_max = self.integer(self.kwarg(call, "qmax"), len(values) - 1, "qmax")
        elif call.name == "tensor":
            self.check_signature(call, len(call.args), ("qmax",))
            factors = tuple(self.sequence(arg) for arg in call.args)
            n = len(factors)
            spec = self.construct(lambda: Tensor(factors), call)
        elif call.name == "bmt":
            self.check_signature(call, 1, ("lambda", "n", "qmax"))
            omega = self.omega(call.args[0])
            spec = self.construct(lambda: FromBMT(omega, self.real(self.kwarg(call, "lambda"), 1.0)), call)
        elif call.name == "dilate":
            self.check_signature(call, 1, ("lambda", "qmax"))
            base = self.sequence(call.args[0])
            n = base.dimension
            spec = self.construct(lambda: Scaled(base, self.real(self.kwarg(call, "lambda"), what="lambda")), call)
        else:
            raise self.error(f"unknown weight sequence '{call.name}'", call)
        return self.construct(lambda: WeightSequence(spec, n, q_max), call)  # type: ignore[arg-type,return-value]

    # --- systems

    def sequence_system(self, tree: Tree) -> WeightSequenceSystem:
        call = self.call(tree, "a weight sequence system")
        q_max = self.integer(self.kwarg(call, "qmax"), self.q_max, "qmax")
        if call.name == "dilated":
            self.check_signature(call, 1, ("qmax",))
            generator = self.sequence(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: WeightSequenceSystem(Dilated(generator), generator.dimension, q_max), call
            )
        if call.name == "frombmt":
            self.check_signature(call, 1, ("n", "qmax"))
            omega = self.omega(call.args[0])
            n = self.integer(self.kwarg(call, "n"), self.dimension, "n")
            return self.construct(lambda: WeightSequenceSystem(BMTGenerated(omega), n, q_max), call)  # type: ignore[return-value]
        if call.name == "explicit":
            self.check_signature(call, 0, ("qmax",), items=True)
            members = []
            for item in call.items or ():
                lam, member = self.pair(item)
                members.append((self.real(lam, what="lambda"), self.sequence(member)))
            spec = self.construct(lambda: ExplicitSequences(tuple(members)), call)
            n = members[0][1].dimension
            return self.construct(lambda: WeightSequenceSystem(spec, n, q_max), call)  # type: ignore[arg-type,return-value]
        raise self.error(f"unknown weight sequence system '{call.name}'", call)

    def function_system(self, tree: Tree) -> WeightFunctionSystem:
        call = self.call(tree, "a weight function system")
        n = self.integer(self.kwarg(call, "n"), self.dimension, "n")
        if call.name == "dilated":
            self.check_signature(call, 1, ())
            generator = self.sequence(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: WeightFunctionSystem(DilatedWeights(generator), generator.dimension), call
            )
        if call.name == "fromomega":
            self.check_signature(call, 1, ("n",))
            omega = self.omega(call.args[0])
            return self.construct(lambda: WeightFunctionSystem(OmegaWeights(omega), n), call)  # type: ignore[return-value]
        if call.name == "assoc":
            self.check_signature(call, 1, ())
            system = self.sequence_system(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: WeightFunctionSystem(SequenceWeights(system), system.dimension), call
            )
        if call.name == "polyshift":
            self.check_signature(call, 1, ("k",))
            base = self.function_system(call.args[0])
            k = self.real(self.kwarg(call, "k"), what="k")
            return self.construct(  # type: ignore[return-value]
                lambda: WeightFunctionSystem(ShiftedWeights(k, base), base.dimension), call
            )
        if call.name == "explicit":
            self.check_signature(call, 0, ("n",), items=True)
            members = []
            for item in call.items or ():
                lam, member = self.pair(item)
                members.append((self.real(lam, what="lambda"), self.weight(member)))
            return self.construct(  # type: ignore[return-value]
                lambda: WeightFunctionSystem(ExplicitWeights(tuple(members)), n), call
            )
        raise self.error(f"unknown weight function system '{call.name}'", call)

    # --- weights

    def weight(self, tree: Tree) -> WeightFunction:
        if isinstance(tree, Group) and tree.kind == "product":
            return WeightProduct(tuple(self.weight(member) for member in tree.members))
        call = self.call(tree, "a weight")
        if call.name == "one":
            self.check_signature(call, 0, ())
            return One()
        if call.name == "powexp":
            self.check_signature(call, 0, ("a", "b"))
            return self.construct(  # type: ignore[return-value]
                lambda: PowerExp(self.real(self.kwarg(call, "a"), what="a"), self.real(self.kwarg(call, "b"), what="b")), call
            )
        if call.name == "omega":
            self.check_signature(call, 1, ("lambda",))
            omega = self.omega(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: FromOmega(omega, self.real(self.kwarg(call, "lambda"), 1.0)), call
            )
        if call.name == "assoc":
            self.check_signature(call, 1, ("lambda",))
            sequence = self.sequence(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: AssocDilate(sequence, self.real(self.kwarg(call, "lambda"), 1.0)), call
            )
        if call.name == "poly":
            self.check_signature(call, 1, ("k",))
            base = self.weight(call.args[0])
            return self.construct(  # type: ignore[return-value]
                lambda: PolyShift(self.real(self.kwarg(call, "k"), what="k"), base), call
            )
        raise self.error(f"unknown weight '{call.name}'", call)

    # --- test functions

    def function(self, tree: Tree) -> SmoothFunction:
        if isinstance(tree, Group) and tree.kind == "product":
            factors = [self.function(member) for member in tree.members]
            if any(isinstance(f, TensorProduct) for f in factors):
                raise self.error("products of tensor functions are written factor-wise", tree)
            result: Smooth1D = factors[0]  # type: ignore[assignment]
            for factor in factors[1:]:
                result = Product(result, factor)  # type: ignore[arg-type]
            return result
        call = self.call(tree, "a test function")
        if call.name == "tensor":
            self.check_signature(call, len(call.args), ())
            factors = tuple(self.one_dimensional(arg) for arg in call.args)
            return self.construct(lambda: TensorProduct(factors), call)  # type: ignore[return-value]
        if call.name == "gaussian":
            self.check_signature(call, 0, ("a", "dim"))
            a = self.real(self.kwarg(call, "a"), 1.0)
            dim = self.integer(self.kwarg(call, "dim"), self.dimension, "dim")
            factor = self.construct(lambda: Gaussian(a), call)
            return factor if dim == 1 else TensorProduct(tuple(factor for _ in range(dim)))  # type: ignore[return-value,misc]
        return self.one_dimensional(call)

    def one_dimensional(self, tree: Tree) -> Smooth1D:
        if isinstance(tree, Group) and tree.kind == "product":
            result = self.function(tree)
            return result  # type: ignore[return-value]
        call = self.call(tree, "a test function")
        name = call.name
        if name == "zero":
            self.check_signature(call, 0, ())
            return Zero()
        if name == "gaussian":
            self.check_signature(call, 0, ("a",))
            return self.construct(lambda: Gaussian(self.real(self.kwarg(call, "a"), 1.0)), call)  # type: ignore[return-value]
        if name == "hermite":
            self.check_signature(call, 0, ("a", "n", "coef"))
            a = self.real(self.kwarg(call, "a"), 1.0)
            coef_tree = self.kwarg(call, "coef")
            if coef_tree is not None:
                coefficients = self.reals(coef_tree, "coefficients")
            else:
                degree = self.integer(self.kwarg(call, "n"), 2, "n")
                coefficients = _hermite_coefficients(a, degree)
            return self.construct(lambda: GaussHermite(a, coefficients), call)  # type: ignore[return-value]
        if name == "sinc":
            self.check_signature(call, 0, ("low", "high"))
            low = self.real(self.kwarg(call, "low"), -1.0)
            high = self.real(self.kwarg(call, "high"), 0.0)
            return self.construct(lambda: SincWindow(low, high), call)  # type: ignore[return-value]
        if name == "bump":
            self.check_signature(call, 0, ("deg", "r"))
            degree = self.integer(self.kwarg(call, "deg"), 8, "deg")
            return self.construct(  # type: ignore[return-value]
                lambda: PolyBump(degree, self.real(self.kwarg(call, "r"), 1.0)), call
            )
        if name == "plateau":
            self.check_signature(call, 0, ("inner", "outer", "order"))
            return self.construct(  # type: ignore[return-value]
                lambda: Plateau(
                    self.real(self.kwarg(call, "inner"), 0.5),
                    self.real(self.kwarg(call, "outer"), 1.0),
                    self.integer(self.kwarg(call, "order"), 3, "order"),
                ),
                call,
            )
        if name == "poly":
            self.check_signature(call, 0, ("coef",))
            coefficients = self.reals(self.kwarg(call, "coef"), "coefficients")
            return self.construct(lambda: Poly(coefficients), call)  # type: ignore[return-value]
        if name == "trig":
            self.check_signature(call, 0, (), items=True)
            terms = []
            for item in call.items or ():
                k, c = self.pair(item)
                terms.append((self.integer(k, what="frequency"), self.complex_value(c)))
            return self.construct(lambda: Trig(tuple(terms)), call)  # type: ignore[return-value]
        if name == "shift":
            self.check_signature(call, 2, ())
            return Shifted(self.one_dimensional(call.args[0]), self.real(call.args[1], what="shift"))
        if name == "scale":
            self.check_signature(call, 2, ())
            return ScaledFunction(self.one_dimensional(call.args[0]), self.complex_value(call.args[1]))
        if name == "conv":
            self.check_signature(call, 2, ())
            kernel = self.one_dimensional(call.args[1])
            if not isinstance(kernel, PolyBump):
                raise self.error("convolution kernels are bumps", call.args[1])
            return Convolution(self.one_dimensional(call.args[0]), kernel)
        if name == "cellavg":
            self.check_signature(call, 1, ())
            return CellAverage(self.one_dimensional(call.args[0]))
        if name == "conj":
            self.check_signature(call, 1, ())
            return Conjugate(self.one_dimensional(call.args[0]))
        raise self.error(f"unknown test function '{name}'", call)


def _hermite_coefficients(a: float, degree: int) -> Tuple[float, ...]:
    """Ascending coefficients of H_n(sqrt(2a) x); a = 1/2 gives the Hermite functions."""
    if degree < 0:
        raise ValueError("Hermite degree must be non-negative")
    in_u = np.polynomial.hermite.herm2poly([0.0] * degree + [1.0])
    scale = math.sqrt(2.0 * a) ** np.arange(in_u.size)
    return tuple(float(c) for c in in_u * scale)


def parse_omega(text: str, line: int = 1) -> BMTWeightFunction:
    """`pow(rho=0.5)`, `logpow(a=2)`, `phi-table:[(0,0),(1,0.5),...]`."""
    parser, tree = _tree(text, line)
    return _Builder(parser).omega(tree)


def parse_growth(text: str, line: int = 1) -> GrowthFunction:
    """A weight function as in `parse_omega`, or `growth-table:[(0,0),(10,1),...]`."""
    parser, tree = _tree(text, line)
    return _Builder(parser).growth(tree)


def parse_sequence(text: str, q_max: int = DEFAULT_Q_MAX, dimension: int = 1, line: int = 1) -> WeightSequence:
    """
    `gevrey(s=0.5,h=1)`, `table:[1,1,2,6]`, `logtable:[...]`, `tensor(<seq>,<seq>)`,
    `bmt(<omega>,lambda=1)`, `dilate(<seq>,lambda=2)`.
    """
    parser, tree = _tree(text, line)
    return _Builder(parser, q_max, dimension).sequence(tree)


def parse_sequence_system(text: str, q_max: int = DEFAULT_Q_MAX, dimension: int = 1, line: int = 1) -> WeightSequenceSystem:
    """`dilated(<seq>)`, `frombmt(<omega>)`, `explicit:[(0.5,<seq>),(1,<seq>)]`."""
    parser, tree = _tree(text, line)
    return _Builder(parser, q_max, dimension).sequence_system(tree)


def parse_function_system(text: str, q_max: int = DEFAULT_Q_MAX, dimension: int = 1, line: int = 1) -> WeightFunctionSystem:
    """`dilated(<seq>)`, `fromomega(<omega>)`, `assoc(<seq-system>)`, `polyshift(<fsys>,k=2)`, `explicit:[(1,<w>),...]`."""
    parser, tree = _tree(text, line)
    return _Builder(parser, q_max, dimension).function_system(tree)


def parse_weight(text: str, q_max: int = DEFAULT_Q_MAX, dimension: int = 1, line: int = 1) -> WeightFunction:
    """`one`, `powexp(a=1,b=2)`, `omega(<omega>,lambda=1)`, `assoc(<seq>,lambda=1)`, `poly(<w>,k=2)`, `<w>*<w>`."""
    parser, tree = _tree(text, line)
    return _Builder(parser, q_max, dimension).weight(tree)


def parse_test_function(text: str, dimension: int = 1, line: int = 1) -> SmoothFunction:
    """
    `gaussian(a=1)`, `hermite(a=1,n=2)`, `sinc`, `bump(deg=8,r=1)`, `trig:[(1,1),(-1,1)]`,
    `zero`, products and `tensor(...)`.
    """
    parser, tree = _tree(text, line)
    return _Builder(parser, dimension=dimension).function(tree)


@dataclass(frozen=True)
class SpaceSpec:
    """
    A Gelfand-Shilov type space E^[M]_[W]: the kind, both systems and the
    exponent of the E-model (0 for L^0, a pair for the mixed norm).
    """

    kind: Kind
    sequences: WeightSequenceSystem
    weights: WeightFunctionSystem
    p: Union[float, Tuple[float, float]] = 2.0

    def __post_init__(self) -> None:
        if self.sequences.dimension != self.weights.dimension:
            raise ValueError(
                f"sequence system has dimension {self.sequences.dimension}, weight system {self.weights.dimension}"
            )

    @property
    def dimension(self) -> int:
        return self.sequences.dimension


def parse_space(
    text: str,
    kind: Kind = Kind.ROUMIEU,
    p: Union[float, Tuple[float, float]] = 2.0,
    q_max: int = DEFAULT_Q_MAX,
    dimension: int = 1,
    line: int = 1,
) -> SpaceSpec:
    """
    `gs(M=<seq>,A=<seq>)`, `bmt(omega=<omega>,eta=<omega>)` or
    `space(M=<seq-system>,W=<fsys>)`; kind and exponent come from the caller.
    """
    parser, tree = _tree(text, line)
    builder = _Builder(parser, q_max, dimension)
    call = builder.call(tree, "a space gs(...), bmt(...) or space(...)")
    if call.name == "gs":
        builder.check_signature(call, 0, ("M", "A"))
        M = builder.sequence(_required(builder, call, "M"))
        A = builder.sequence(_required(builder, call, "A"))
        sequences = WeightSequenceSystem(Dilated(M), M.dimension, q_max)
        weights = WeightFunctionSystem(DilatedWeights(A), A.dimension)
    elif call.name == "bmt":
        builder.check_signature(call, 0, ("omega", "eta"))
        omega = builder.omega(_required(builder, call, "omega"))
        eta = builder.omega(_required(builder, call, "eta"))
        sequences = WeightSequenceSystem(BMTGenerated(omega), dimension, q_max)
        weights = WeightFunctionSystem(OmegaWeights(eta), dimension)
    elif call.name == "space":
        builder.check_signature(call, 0, ("M", "W"))
        sequences = builder.sequence_system(_required(builder, call, "M"))
        weights = builder.function_system(_required(builder, call, "W"))
    else:
        raise builder.error(f"unknown space '{call.name}'", call)
    return builder.construct(lambda: SpaceSpec(kind, sequences, weights, p), call)  # type: ignore[return-value]


def _required(builder: _Builder, call: Call, key: str) -> Tree:
    value = builder.kwarg(call, key)
    if value is None:
        raise builder.error(f"{call.name} needs '{key}='", call)
    return value


def parse_exponent(text: str) -> Union[float, Tuple[float, float]]:
    """E-model exponent: `0` (L^0), `1`, `2`, `inf` or a mixed pair `p1,p2`."""

    def one(part: str) -> float:
        part = part.strip()
        if part == "inf":
            return math.inf
        try:
            value = float(sp.Rational(part)) if "/" in part else float(part)
        except ValueError as e:
            raise SpecParseError(f"invalid exponent '{part}'", 1, text.find(part) + 1, text) from e
        if value != 0 and value < 1:
            raise SpecParseError(f"exponent must be 0 or lie in [1, inf], got {part}", 1, text.find(part) + 1, text)
        return value

    parts = text.split(",")
    if len(parts) == 2:
        first, second = one(parts[0]), one(parts[1])
        if first == 0 or second == 0:
            raise SpecParseError("mixed exponents lie in [1, inf]", 1, 1, text)
        return (first, second)
    if len(parts) != 1:
        raise SpecParseError("expected one exponent or a pair 'p1,p2'", 1, 1, text)
    return one(parts[0])


def parse_kind(text: str) -> Kind:
    try:
        return Kind(text.strip().lower())
    except ValueError as e:
        raise SpecParseError(f"unknown kind '{text}', expected beurling or roumieu", 1, 1, text) from e


# --- canonical printing


def format_number(x: float) -> str:
    """Shortest text that reads back to the same float."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return format_number(c.real)
    return repr(c).strip("()")


def format_omega(omega: BMTWeightFunction) -> str:
    if isinstance(omega, PowerMinusOne):
        return f"pow(rho={format_number(omega.rho)})"
    if isinstance(omega, LogPower):
        return f"logpow(a={format_number(omega.a)})"
    return "phi-table:[" + ",".join(f"({format_number(x)},{format_number(y)})" for x, y in zip(omega.x, omega.phi)) + "]"


def format_growth(sigma: GrowthFunction) -> str:
    if isinstance(sigma, SampledGrowth):
        pairs = ",".join(f"({format_number(t)},{format_number(v)})" for t, v in zip(sigma.t, sigma.values))
        return f"growth-table:[{pairs}]"
    return format_omega(sigma)


def _options(pairs: List[Tuple[str, Optional[str]]]) -> str:
    return "".join(f",{key}={value}" for key, value in pairs if value is not None)


def format_sequence(M: WeightSequence, q_max: int = DEFAULT_Q_MAX) -> str:
    spec = M.spec
    n = None if M.dimension == 1 else str(M.dimension)
    qmax = None if M.q_max == q_max else str(M.q_max)
    if isinstance(spec, GevreyIso):
        return f"gevrey(s={format_number(spec.s)},h={format_number(spec.h)}" + _options([("n", n), ("qmax", qmax)]) + ")"
    if isinstance(spec, Table):
        own = None if M.q_max == len(spec.log_values) - 1 else str(M.q_max)
        head = "logtable" if n is None and own is None else "logtable(" + _options([("n", n), ("qmax", own)])[1:] + ")"
        return head + ":[" + ",".join(format_number(v) for v in spec.log_values) + "]"
    if isinstance(spec, Tensor):
        return "tensor(" + ",".join(format_sequence(f, q_max) for f in spec.factors) + _options([("qmax", qmax)]) + ")"
    if isinstance(spec, FromBMT):
        return f"bmt({format_omega(spec.omega)},lambda={format_number(spec.lam)}" + _options([("n", n), ("qmax", qmax)]) + ")"
    return f"dilate({format_sequence(spec.base, q_max)},lambda={format_number(spec.factor)}" + _options([("qmax", qmax)]) + ")"


def format_sequence_system(system: WeightSequenceSystem, q_max: int = DEFAULT_Q_MAX) -> str:
    spec = system.spec
    qmax = None if system.q_max == q_max else str(system.q_max)
    if isinstance(spec, Dilated):
        return f"dilated({format_sequence(spec.generator, q_max)}" + _options([("qmax", qmax)]) + ")"
    if isinstance(spec, BMTGenerated):
        n = None if system.dimension == 1 else str(system.dimension)
        return f"frombmt({format_omega(spec.omega)}" + _options([("n", n), ("qmax", qmax)]) + ")"
    head = "explicit" if qmax is None else f"explicit(qmax={qmax})"
    return head + ":[" + ",".join(f"({format_number(lam)},{format_sequence(M, q_max)})" for lam, M in spec.members) + "]"


def format_weight(w: WeightFunction, q_max: int = DEFAULT_Q_MAX) -> str:
    if isinstance(w, One):
        return "one"
    if isinstance(w, PowerExp):
        return f"powexp(a={format_number(w.a)},b={format_number(w.b)})"
    if isinstance(w, FromOmega):
        return f"omega({format_omega(w.omega)},lambda={format_number(w.lam)})"
    if isinstance(w, PolyShift):
        return f"poly({format_weight(w.base, q_max)},k={format_number(w.k)})"
    if isinstance(w, AssocDilate):
        return f"assoc({format_sequence(w.sequence, q_max)},lambda={format_number(w.lam)})"
    return "*".join(
        f"({format_weight(f, q_max)})" if isinstance(f, WeightProduct) else format_weight(f, q_max) for f in w.factors
    )


def format_function_system(system: WeightFunctionSystem, q_max: int = DEFAULT_Q_MAX) -> str:
    spec = system.spec
    n = None if system.dimension == 1 else str(system.dimension)
    if isinstance(spec, DilatedWeights):
        return f"dilated({format_sequence(spec.generator, q_max)})"
    if isinstance(spec, OmegaWeights):
        return f"fromomega({format_omega(spec.omega)}" + _options([("n", n)]) + ")"
    if isinstance(spec, SequenceWeights):
        return f"assoc({format_sequence_system(spec.system, q_max)})"
    if isinstance(spec, ShiftedWeights):
        return f"polyshift({format_function_system(spec.base, q_max)},k={format_number(spec.k)})"
    head = "explicit" if n is None else f"explicit(n={n})"
    return head + ":[" + ",".join(f"({format_number(lam)},{format_weight(w, q_max)})" for lam, w in spec.members) + "]"


def format_test_function(f: SmoothFunction) -> str:
    if isinstance(f, Zero):
        return "zero"
    if isinstance(f, Gaussian):
        return f"gaussian(a={format_number(f.a)})"
    if isinstance(f, GaussHermite):
        return f"hermite(a={format_number(f.a)},coef=[{','.join(format_number(c) for c in f.coefficients)}])"
    if isinstance(f, SincWindow):
        if (f.low, f.high) == (-1.0, 0.0):
            return "sinc"
        return f"sinc(low={format_number(f.low)},high={format_number(f.high)})"
    if isinstance(f, PolyBump):
        return f"bump(deg={f.degree},r={format_number(f.radius)})"
    if isinstance(f, Plateau):
        return f"plateau(inner={format_number(f.inner)},outer={format_number(f.outer)},order={f.order})"
    if isinstance(f, Poly):
        return f"poly(coef=[{','.join(format_number(c) for c in f.coefficients)}])"
    if isinstance(f, Trig):
        return "trig:[" + ",".join(f"({k},{_format_complex(c)})" for k, c in f.terms) + "]"
    if isinstance(f, Shifted):
        return f"shift({format_test_function(f.base)},{format_number(f.shift)})"
    if isinstance(f, ScaledFunction):
        return f"scale({format_test_function(f.base)},{_format_complex(f.factor)})"
    if isinstance(f, Product):
        right = format_test_function(f.right)
        if isinstance(f.right, Product):
            right = f"({right})"
        return f"{format_test_function(f.left)}*{right}"
    if isinstance(f, Convolution):
        return f"conv({format_test_function(f.base)},{format_test_function(f.kernel)})"
    if isinstance(f, CellAverage):
        return f"cellavg({format_test_function(f.base)})"
    if isinstance(f, Conjugate):
        return f"conj({format_test_function(f.base)})"
    return "tensor(" + ",".join(format_test_function(g) for g in f.factors) + ")"


def format_space(space: SpaceSpec, q_max: int = DEFAULT_Q_MAX) -> str:
    """Canonical `space(M=...,W=...)` form, or the `gs`/`bmt` shorthand when it applies."""
    sequences, weights = space.sequences, space.weights
    if isinstance(sequences.spec, Dilated) and isinstance(weights.spec, DilatedWeights) and sequences.q_max == q_max:
        return f"gs(M={format_sequence(sequences.spec.generator, q_max)},A={format_sequence(weights.spec.generator, q_max)})"
    if (
        isinstance(sequences.spec, BMTGenerated)
        and isinstance(weights.spec, OmegaWeights)
        and sequences.q_max == q_max
        and sequences.dimension == 1
    ):
        return f"bmt(omega={format_omega(sequences.spec.omega)},eta={format_omega(weights.spec.omega)})"
    return f"space(M={format_sequence_system(sequences, q_max)},W={format_function_system(weights, q_max)})"


def parse_entry(entry: SpecEntry, parse: Callable[[str, int], T]) -> T:
    """
    Parse a spec-file entry; diagnostics carry the file line and the column
    within that line.
    """
    try:
        return parse(entry.text, entry.line)
    except SpecParseError as e:
        raise SpecParseError(e.message, entry.line, e.column + entry.column - 1, entry.text) from e
