"""
Skew tensors in normal form, shared by sections of the exterior algebras of
E and E* and by multivector fields on the total spaces.

Components are keyed by strictly increasing tuples of 0-based direction
indices; only nonzero coefficients are stored.
"""

from fractions import Fraction
from typing import Iterable, Mapping, Protocol, Sequence, TypeVar

from sympy.combinatorics import Permutation

from algkit.exceptions import DegreeError, SpaceMismatchError
from algkit.poly import Polynomial, VariableSpace

T = TypeVar('T', bound='SkewTensor')


def sort_indices(key: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """
    Sign of the sorting permutation and the sorted key, (0, ()) on repeats

    >>> sort_indices((3, 1, 2))
    (1, (1, 2, 3))
    >>> sort_indices((2, 1))
    (-1, (1, 2))
    """
    if len(set(key)) != len(key):
        return 0, ()
    if len(key) < 2:
        return 1, tuple(key)
    order = sorted(range(len(key)), key=key.__getitem__)
    return Permutation(order).signature(), tuple(key[i] for i in order)


class Frame(Protocol):
    """
    A local frame e_1..e_r with structure functions and an action on
    polynomials: an algebroid basis, or the coordinate fields of a total space
    """

    space: VariableSpace

    @property
    def frame_rank(self) -> int: ...

    def structure(self, i: int, j: int) -> tuple[Polynomial, ...]: ...

    def derive(self, i: int, f: Polynomial) -> Polynomial: ...


class SkewTensor:
    """
    Base for graded skew tensors. Subclasses fix what a direction index means
    (direction_token) and which frame the tensor belongs to (frame_key).
    """

    __slots__ = ('space', 'degree', 'components')

    def __init__(
        self,
        space: VariableSpace,
        degree: int,
        components: Mapping[Sequence[int], Polynomial] | None = None,
    ):
        if degree < -1:
            raise DegreeError(f'negative degree {degree}')
        self.space = space
        self.degree = degree
        comps: dict[tuple[int, ...], Polynomial] = {}
        dim = self.dim
        for key, coeff in (components or {}).items():
            if len(key) != degree:
                raise DegreeError(
                    f'component {tuple(key)} does not have degree {degree}',
                )
            if any(not 0 <= i < dim for i in key):
                raise DegreeError(f'component {tuple(key)} is outside 0..{dim - 1}')
            sign, ordered = sort_indices(key)
            if sign == 0 or not coeff:
                continue
            if ordered in comps:
                comps[ordered] = comps[ordered] + sign * coeff
            else:
                comps[ordered] = coeff if sign == 1 else -coeff
        self.components = {k: v for k, v in sorted(comps.items()) if v}

    # subclass hooks

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def frame_key(self) -> object:
        return self.space

    def direction_token(self, i: int) -> str:
        raise NotImplementedError

    def _new(self: T, degree: int, components: Mapping) -> T:
        raise NotImplementedError

    # arithmetic

    def _check(self, other: 'SkewTensor'):
        if type(other) is not type(self) or other.frame_key() != self.frame_key():
            raise SpaceMismatchError(
                f'cannot combine {type(self).__name__} with {type(other).__name__}',
            )

    def zero_like(self: T, degree: int | None = None) -> T:
        return self._new(self.degree if degree is None else degree, {})

    def __add__(self: T, other: T) -> T:
        self._check(other)
        if other.degree != self.degree:
            if other.is_zero and self.is_zero:
                return self
            raise DegreeError(
                f'cannot add degree {self.degree} and degree {other.degree}',
            )
        comps = dict(self.components)
        for key, coeff in other.components.items():
            comps[key] = comps[key] + coeff if key in comps else coeff
        return self._new(self.degree, comps)

    def __neg__(self: T) -> T:
        return self._new(self.degree, {k: -v for k, v in self.components.items()})

    def __sub__(self: T, other: T) -> T:
        return self + (-other)

    def scale(self: T, factor: Polynomial | int | Fraction) -> T:
        return self._new(
            self.degree,
            {k: v * factor for k, v in self.components.items()},
        )

    def __mul__(self: T, factor: Polynomial | int | Fraction) -> T:
        if isinstance(factor, SkewTensor):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def wedge(self: T, other: T) -> T:
        self._check(other)
        comps: dict[tuple[int, ...], Polynomial] = {}
        for k1, c1 in self.components.items():
            for k2, c2 in other.components.items():
                sign, key = sort_indices(k1 + k2)
                if sign == 0:
                    continue
                term = c1 * c2 if sign == 1 else -(c1 * c2)
                comps[key] = comps[key] + term if key in comps else term
        # above the top degree comps is empty
        return self._new(self.degree + other.degree, comps)

    def __xor__(self: T, other: T) -> T:
        return self.wedge(other)

    def map_coefficients(self: T, fn) -> T:
        return self._new(self.degree, {k: fn(v) for k, v in self.components.items()})

    # inspection

    @property
    def is_zero(self) -> bool:
        return not self.components

    def component(self, key: Sequence[int]) -> Polynomial:
        sign, ordered = sort_indices(key)
        if sign == 0 or ordered not in self.components:
            return self.space.zero()
        value = self.components[ordered]
        return value if sign == 1 else -value

    def items(self) -> Iterable[tuple[tuple[int, ...], Polynomial]]:
        return self.components.items()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SkewTensor):
            return NotImplemented
        if type(other) is not type(self) or other.frame_key() != self.frame_key():
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.degree == other.degree and self.components == other.components

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.degree, tuple(self.components.items())))

    def __str__(self) -> str:
        if self.degree <= 0:
            return str(self.components.get((), '0'))
        if not self.components:
            return '0'
        pieces = []
        for n, (key, coeff) in enumerate(self.components.items()):
            directions = '^'.join(self.direction_token(i) for i in key)
            negative = coeff.is_monomial() and coeff.terms()[0][1] < 0
            magnitude = -coeff if negative else coeff
            if magnitude == 1:
                body = directions
            elif magnitude.is_monomial():
                body = f'{magnitude}*{directions}'
            else:
                body = f'({magnitude})*{directions}'
            if n == 0:
                pieces.append(f'-{body}' if negative else body)
            else:
                pieces.append(f' - {body}' if negative else f' + {body}')
        return ''.join(pieces)

    def __repr__(self) -> str:
        return f'{type(self).__name__}({str(self)!r})'


def scalar_tensor(template: T, value: Polynomial) -> T:
    """Degree-0 tensor of the same kind as template"""
    return template._new(0, {(): value})


def vector_tensor(template: T, comps: Sequence[Polynomial]) -> T:
    """Degree-1 tensor of the same kind as template"""
    return template._new(1, {(i,): c for i, c in enumerate(comps) if c})
