"""
Exact multivariate polynomials with rational coefficients.

Every algebroid lives in one VariableSpace: the declared base coordinates,
the fiber coordinates y1..yn of E and the fiber coordinates xi1..xin of E*.
Arithmetic is delegated to a sympy polynomial ring over QQ in graded
lexicographic order, so values are always in canonical form and equality is
exact.
"""

import dataclasses
import enum
import functools
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from algkit.exceptions import (
    ExpressionSyntaxError,
    SemanticError,
    SpaceMismatchError,
    UnknownIdentifierError,
)

Rational = Fraction

IDENTIFIER = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')
RESERVED = re.compile(r'(y|xi)[0-9]+')


class VariableKind(enum.Enum):
    BASE = 'base'
    FIBER = 'fiber'
    DUAL_FIBER = 'dual_fiber'


@dataclasses.dataclass(frozen=True)
class Variable:
    kind: VariableKind
    index: int  # 1-based


@functools.lru_cache(maxsize=None)
def _make_ring(names: tuple[str, ...]) -> PolyRing:
    return ring(list(names), QQ, grlex)[0]


@dataclasses.dataclass(frozen=True)
class VariableSpace:
    """Coordinates (x^a, y^i, xi_i) shared by an algebroid, E and E*"""

    base_names: tuple[str, ...]
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise SemanticError(f'rank must be positive, got {self.rank}')
        seen = set()
        for name in self.base_names:
            if not IDENTIFIER.fullmatch(name):
                raise SemanticError(f'"{name}" is not a valid coordinate name')
            if RESERVED.fullmatch(name):
                raise SemanticError(
                    f'"{name}" collides with a fiber coordinate name',
                )
            if name in seen:
                raise SemanticError(f'coordinate "{name}" declared twice')
            seen.add(name)

    @property
    def base_dim(self) -> int:
        return len(self.base_names)

    @property
    def variables(self) -> tuple[Variable, ...]:
        """All variables in ring order: base, then fiber, then dual fiber"""
        return (
            self.base_variables + self.fiber_variables + self.dual_fiber_variables
        )

    @property
    def base_variables(self) -> tuple[Variable, ...]:
        return tuple(
            Variable(VariableKind.BASE, a + 1) for a in range(self.base_dim)
        )

    @property
    def fiber_variables(self) -> tuple[Variable, ...]:
        return tuple(Variable(VariableKind.FIBER, i + 1) for i in range(self.rank))

    @property
    def dual_fiber_variables(self) -> tuple[Variable, ...]:
        return tuple(
            Variable(VariableKind.DUAL_FIBER, i + 1) for i in range(self.rank)
        )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.name_of(v) for v in self.variables)

    @property
    def ring(self) -> PolyRing:
        return _make_ring(self.names)

    def name_of(self, v: Variable) -> str:
        if v.kind is VariableKind.BASE:
            return self.base_names[v.index - 1]
        if v.kind is VariableKind.FIBER:
            return f'y{v.index}'
        return f'xi{v.index}'

    def position(self, v: Variable) -> int:
        """Index of the variable among the ring generators"""
        limit = self.base_dim if v.kind is VariableKind.BASE else self.rank
        if not 1 <= v.index <= limit:
            raise UnknownIdentifierError(
                f'{v.kind.value} variable {v.index} is outside this space',
            )
        if v.kind is VariableKind.BASE:
            return v.index - 1
        if v.kind is VariableKind.FIBER:
            return self.base_dim + v.index - 1
        return self.base_dim + self.rank + v.index - 1

    def variable(self, name: str) -> Variable:
        try:
            return self.variables[self.names.index(name)]
        except ValueError as e:
            raise UnknownIdentifierError(f'unknown identifier "{name}"') from e

    def const(self, value: Union[int, Fraction]) -> 'Polynomial':
        value = Fraction(value)
        return Polynomial(
            self,
            self.ring.ground_new(QQ(value.numerator, value.denominator)),
        )

    def zero(self) -> 'Polynomial':
        return Polynomial(self, self.ring.zero)

    def one(self) -> 'Polynomial':
        return Polynomial(self, self.ring.one)

    def var(self, v: Variable | str) -> 'Polynomial':
        if isinstance(v, str):
            v = self.variable(v)
        return Polynomial(self, self.ring.gens[self.position(v)])

    def x(self, a: int) -> 'Polynomial':
        """Base coordinate, 0-based"""
        return self.var(Variable(VariableKind.BASE, a + 1))

    def y(self, i: int) -> 'Polynomial':
        """Fiber coordinate of E, 0-based"""
        return self.var(Variable(VariableKind.FIBER, i + 1))

    def xi(self, i: int) -> 'Polynomial':
        """Fiber coordinate of E*, 0-based"""
        return self.var(Variable(VariableKind.DUAL_FIBER, i + 1))


Scalar = Union[int, Fraction, 'Polynomial']


class Polynomial:
    """Immutable polynomial over a VariableSpace"""

    __slots__ = ('space', 'element')

    def __init__(self, space: VariableSpace, element: PolyElement):
        self.space = space
        self.element = element

    def _coerce(self, other: Scalar) -> PolyElement:
        if isinstance(other, Polynomial):
            if other.space != self.space:
                raise SpaceMismatchError(
                    'polynomials belong to different variable spaces',
                )
            return other.element
        if isinstance(other, (int, Fraction)):
            return self.space.const(other).element
        return NotImplemented

    def _wrap(self, element: PolyElement) -> 'Polynomial':
        return Polynomial(self.space, element)

    def __add__(self, other: Scalar) -> 'Polynomial':
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self._wrap(self.element + rhs)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> 'Polynomial':
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self._wrap(self.element - rhs)

    def __rsub__(self, other: Scalar) -> 'Polynomial':
        lhs = self._coerce(other)
        if lhs is NotImplemented:
            return NotImplemented
        return self._wrap(lhs - self.element)

    def __mul__(self, other: Scalar) -> 'Polynomial':
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return self._wrap(self.element * rhs)

    __rmul__ = __mul__

    def __neg__(self) -> 'Polynomial':
        return self._wrap(-self.element)

    def __pow__(self, exponent: int) -> 'Polynomial':
        if exponent < 0:
            raise ValueError('only non-negative powers of polynomials exist')
        return self._wrap(self.element**exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            try:
                return self.element == self._coerce(other)
            except SpaceMismatchError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.space, self.element))

    def __bool__(self) -> bool:
        return bool(self.element)

    @property
    def is_zero(self) -> bool:
        return not self.element

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """(exponent vector, coefficient) pairs, descending in grlex order"""
        return [
            (monom, Fraction(int(c.numerator), int(c.denominator)))
            for monom, c in self.element.terms()
        ]

    def coefficient(self, monom: tuple[int, ...]) -> Fraction:
        c = self.element.get(monom)
        if c is None:
            return Fraction(0)
        return Fraction(int(c.numerator), int(c.denominator))

    def constant(self) -> Fraction:
        return self.coefficient((0,) * len(self.space.variables))

    def variables(self) -> set[Variable]:
        """Variables that occur with a nonzero exponent"""
        found: set[Variable] = set()
        for monom in self.element.itermonoms():
            for v, e in zip(self.space.variables, monom):
                if e:
                    found.add(v)
        return found

    def kinds(self) -> set[VariableKind]:
        return {v.kind for v in self.variables()}

    def degree_in(self, kind: VariableKind) -> int:
        """Highest total degree in the variables of one kind (-1 for zero)"""
        if self.is_zero:
            return -1
        mask = [v.kind is kind for v in self.space.variables]
        return max(
            sum(e for e, m in zip(monom, mask) if m)
            for monom in self.element.itermonoms()
        )

    def is_homogeneous_in(self, kind: VariableKind, degree: int) -> bool:
        mask = [v.kind is kind for v in self.space.variables]
        return all(
            sum(e for e, m in zip(monom, mask) if m) == degree
            for monom in self.element.itermonoms()
        )

    def is_monomial(self) -> bool:
        return len(self.element) <= 1

    def partial(self, v: Variable) -> 'Polynomial':
        return self._wrap(self.element.diff(self.space.ring.gens[self.space.position(v)]))

    def substitute(self, bindings: Mapping[Variable, 'Polynomial']) -> 'Polynomial':
        """Simultaneous substitution; unbound variables map to themselves"""
        if not bindings:
            return self
        gens = self.space.ring.gens
        replacements = []
        for v, value in bindings.items():
            replacements.append((gens[self.space.position(v)], self._coerce(value)))
        return self._wrap(self.element.compose(replacements))

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f'Polynomial({str(self)!r})'


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def partial(p: Polynomial, v: Variable) -> Polynomial:
    return p.partial(v)


def substitute(p: Polynomial, bindings: Mapping[Variable, Polynomial]) -> Polynomial:
    return p.substitute(bindings)


def poly_sum(space: VariableSpace, items: Iterable[Polynomial]) -> Polynomial:
    total = space.ring.zero
    for item in items:
        total += item.element
    return Polynomial(space, total)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def _format_monomial(names: tuple[str, ...], monom: tuple[int, ...]) -> str:
    factors = []
    for name, exponent in zip(names, monom):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f'{name}^{exponent}')
    return '*'.join(factors)


def format_polynomial(p: Polynomial) -> str:
    """
    Canonical text: terms descending in grlex order, signs folded into the
    joining operators, unit coefficients dropped except on the constant term
    """
    terms = p.terms()
    if not terms:
        return '0'
    names = p.space.names
    pieces = []
    for n, (monom, coeff) in enumerate(terms):
        monomial = _format_monomial(names, monom)
        magnitude = abs(coeff)
        if not monomial:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f'{format_rational(magnitude)}*{monomial}'
        if n == 0:
            pieces.append(f'-{body}' if coeff < 0 else body)
        else:
            pieces.append(f' - {body}' if coeff < 0 else f' + {body}')
    return ''.join(pieces)


TOKEN = re.compile(r'\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))')


def tokenize(src: str) -> list[tuple[str, str, int]]:
    """(kind, text, position) triples; kind is 'int', 'name' or 'op'"""
    tokens = []
    pos = 0
    while pos < len(src):
        match = TOKEN.match(src, pos)
        if not match or match.end() == pos:
            break
        start = match.start(match.lastindex) if match.lastindex else pos
        number, name, op = match.groups()
        if number is not None:
            tokens.append(('int', number, start))
        elif name is not None:
            tokens.append(('name', name, start))
        elif op is not None:
            if op not in '+-*/^()':
                raise ExpressionSyntaxError(f'unexpected character "{op}"', start)
            tokens.append(('op', op, start))
        pos = match.end()
    return tokens


class _ExpressionParser:
    """
    Recursive descent over
        expr   := term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := '-' factor | atom ('^' uint)?
        atom   := uint ('/' uint)? | identifier | '(' expr ')'
    """

    def __init__(self, src: str, space: VariableSpace):
        self.src = src
        self.space = space
        self.tokens = tokenize(src)
        self.idx = 0

    def at_end(self) -> bool:
        return self.idx >= len(self.tokens)

    def peek(self) -> tuple[str, str, int] | None:
        return None if self.at_end() else self.tokens[self.idx]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.idx]
        self.idx += 1
        return token

    def position(self) -> int:
        token = self.peek()
        return len(self.src) if token is None else token[2]

    def accept(self, op: str) -> bool:
        token = self.peek()
        if token is not None and token[0] == 'op' and token[1] == op:
            self.idx += 1
            return True
        return False

    def expect_uint(self) -> int:
        token = self.peek()
        if token is None or token[0] != 'int':
            raise ExpressionSyntaxError('expected an unsigned integer', self.position())
        self.idx += 1
        return int(token[1])

    def parse(self) -> Polynomial:
        if self.at_end():
            raise ExpressionSyntaxError('empty expression', 0)
        result = self.expr()
        if not self.at_end():
            raise ExpressionSyntaxError(
                f'unexpected "{self.peek()[1]}"',
                self.position(),
            )
        return result

    def expr(self) -> Polynomial:
        result = self.term()
        while True:
            if self.accept('+'):
                result = result + self.term()
            elif self.accept('-'):
                result = result - self.term()
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while self.accept('*'):
            result = result * self.factor()
        return result

    def factor(self) -> Polynomial:
        if self.accept('-'):
            return -self.factor()
        base = self.atom()
        if self.accept('^'):
            return base ** self.expect_uint()
        return base

    def atom(self) -> Polynomial:
        token = self.peek()
        if token is None:
            raise ExpressionSyntaxError('unexpected end of expression', len(self.src))
        kind, text, pos = token
        if kind == 'int':
            self.idx += 1
            numerator = int(text)
            if self.accept('/'):
                denominator = self.expect_uint()
                if denominator == 0:
                    raise ExpressionSyntaxError('zero denominator', pos)
                return self.space.const(Fraction(numerator, denominator))
            return self.space.const(numerator)
        if kind == 'name':
            self.idx += 1
            try:
                return self.space.var(text)
            except UnknownIdentifierError as e:
                raise UnknownIdentifierError(
                    f'unknown identifier "{text}" at position {pos}',
                ) from e
        if self.accept('('):
            inner = self.expr()
            if not self.accept(')'):
                raise ExpressionSyntaxError('expected ")"', self.position())
            return inner
        raise ExpressionSyntaxError(f'unexpected "{text}"', pos)


def parse_poly(src: str, space: VariableSpace) -> Polynomial:
    """
    Parse a coefficient expression over the coordinates of a space

    >>> s = VariableSpace(('x1', 'x2'), 1)
    >>> str(parse_poly('(x1+1)^2', s))
    'x1^2 + 2*x1 + 1'
    """
    return _ExpressionParser(src, space).parse()
