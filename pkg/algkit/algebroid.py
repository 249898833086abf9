"""
Local algebroid data over a coordinate chart: a frame e_1..e_n of E,
bracket structure functions c^k_ij(x) and anchor matrices.

Storage is 0-based: c[i][j][k] is the coefficient of e_k in [e_i, e_j],
anchor_left[a][i] is the coefficient of d/dx^a in the left anchor of e_i.
"""

import dataclasses
import enum
import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from algkit.exceptions import (
    DegreeError,
    PreconditionError,
    SpaceMismatchError,
)
from algkit.poly import Polynomial, VariableKind, VariableSpace, poly_sum
from algkit.tensors import SkewTensor
from algkit.util import logger


class Carrier(enum.Enum):
    """Which bundle the bracket lives on"""

    ON_E = 'E'
    ON_E_DUAL = 'E*'


class FiberMultivector(SkewTensor):
    """Section of the exterior algebra of E; e1^e2 style directions"""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.space.rank

    def frame_key(self) -> object:
        return ('multivector', self.space)

    def direction_token(self, i: int) -> str:
        return f'e{i + 1}'

    def _new(self, degree, components):
        return FiberMultivector(self.space, degree, components)

    def as_form(self) -> 'FiberForm':
        return FiberForm(self.space, self.degree, self.components)

    @staticmethod
    def function(f: Polynomial) -> 'FiberMultivector':
        return FiberMultivector(f.space, 0, {(): f})

    @staticmethod
    def zero(space: VariableSpace, degree: int) -> 'FiberMultivector':
        return FiberMultivector(space, degree)

    @staticmethod
    def basis(space: VariableSpace, *indices: int) -> 'FiberMultivector':
        return FiberMultivector(space, len(indices), {tuple(indices): space.one()})


class FiberForm(SkewTensor):
    """Section of the exterior algebra of E*; eps1^eps2 style directions"""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.space.rank

    def frame_key(self) -> object:
        return ('form', self.space)

    def direction_token(self, i: int) -> str:
        return f'eps{i + 1}'

    def _new(self, degree, components):
        return FiberForm(self.space, degree, components)

    def as_multivector(self) -> FiberMultivector:
        return FiberMultivector(self.space, self.degree, self.components)

    @staticmethod
    def function(f: Polynomial) -> 'FiberForm':
        return FiberForm(f.space, 0, {(): f})

    @staticmethod
    def zero(space: VariableSpace, degree: int) -> 'FiberForm':
        return FiberForm(space, degree)

    @staticmethod
    def basis(space: VariableSpace, *indices: int) -> 'FiberForm':
        return FiberForm(space, len(indices), {tuple(indices): space.one()})


@dataclasses.dataclass(frozen=True)
class Section:
    """Section of E (or of E* when the carrier is E*) in the local frame"""

    space: VariableSpace
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.components) != self.space.rank:
            raise DegreeError(
                f'section has {len(self.components)} components, rank is {self.space.rank}',
            )

    @staticmethod
    def of(space: VariableSpace, comps: Sequence[Polynomial | int]) -> 'Section':
        return Section(
            space,
            tuple(c if isinstance(c, Polynomial) else space.const(c) for c in comps),
        )

    @staticmethod
    def basis(space: VariableSpace, i: int) -> 'Section':
        return Section.of(space, [1 if k == i else 0 for k in range(space.rank)])

    @staticmethod
    def zero(space: VariableSpace) -> 'Section':
        return Section.of(space, [0] * space.rank)

    @staticmethod
    def from_tensor(t: SkewTensor) -> 'Section':
        if t.degree != 1:
            raise DegreeError(f'expected degree 1, got degree {t.degree}')
        return Section.of(t.space, [t.component((k,)) for k in range(t.space.rank)])

    def __add__(self, other: 'Section') -> 'Section':
        return Section(self.space, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: 'Section') -> 'Section':
        return Section(self.space, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> 'Section':
        return Section(self.space, tuple(-a for a in self.components))

    def scale(self, f: Polynomial | int | Fraction) -> 'Section':
        return Section(self.space, tuple(a * f for a in self.components))

    @property
    def is_zero(self) -> bool:
        return not any(self.components)

    def as_multivector(self) -> FiberMultivector:
        return FiberMultivector(self.space, 1, {(k,): c for k, c in enumerate(self.components)})

    def as_form(self) -> FiberForm:
        return FiberForm(self.space, 1, {(k,): c for k, c in enumerate(self.components)})

    def __str__(self) -> str:
        return str(self.as_multivector())


@dataclasses.dataclass(frozen=True)
class EndoTensor:
    """Endomorphism N of E; matrix[i][j] is N^i_j, so N e_j = sum_i N^i_j e_i"""

    space: VariableSpace
    matrix: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        n = self.space.rank
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise DegreeError(f'endomorphism must be a {n}x{n} matrix')

    @staticmethod
    def of(space: VariableSpace, rows: Sequence[Sequence[Polynomial | int]]) -> 'EndoTensor':
        return EndoTensor(
            space,
            tuple(
                tuple(c if isinstance(c, Polynomial) else space.const(c) for c in row)
                for row in rows
            ),
        )

    @staticmethod
    def identity(space: VariableSpace) -> 'EndoTensor':
        n = space.rank
        return EndoTensor.of(space, [[int(i == j) for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(space: VariableSpace, entries: Sequence[Polynomial | int]) -> 'EndoTensor':
        n = space.rank
        return EndoTensor.of(
            space,
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)],
        )

    def entry(self, i: int, j: int) -> Polynomial:
        return self.matrix[i][j]

    def apply(self, x: Section) -> Section:
        n = self.space.rank
        return Section(
            self.space,
            tuple(
                poly_sum(self.space, (self.matrix[i][j] * x.components[j] for j in range(n)))
                for i in range(n)
            ),
        )

    def transpose_apply(self, mu: Section) -> Section:
        """N* on a 1-form given by its components"""
        n = self.space.rank
        return Section(
            self.space,
            tuple(
                poly_sum(self.space, (self.matrix[i][j] * mu.components[i] for i in range(n)))
                for j in range(n)
            ),
        )

    def __matmul__(self, other: 'EndoTensor') -> 'EndoTensor':
        n = self.space.rank
        return EndoTensor(
            self.space,
            tuple(
                tuple(
                    poly_sum(self.space, (self.matrix[i][k] * other.matrix[k][j] for k in range(n)))
                    for j in range(n)
                )
                for i in range(n)
            ),
        )

    def square(self) -> 'EndoTensor':
        return self @ self

    def __str__(self) -> str:
        parts = []
        for i, row in enumerate(self.matrix):
            for j, c in enumerate(row):
                if c:
                    parts.append(f'N[{i + 1},{j + 1}] = {c}')
        return ', '.join(parts) or '0'


@dataclasses.dataclass(frozen=True)
class Algebroid:
    """
    Local data (c, anchor_left, anchor_right) of a skew or non-skew algebroid.
    Coefficients may only depend on base coordinates.
    """

    space: VariableSpace
    c: tuple[tuple[tuple[Polynomial, ...], ...], ...]
    anchor_left: tuple[tuple[Polynomial, ...], ...]
    anchor_right: tuple[tuple[Polynomial, ...], ...]
    skew: bool = True
    carrier: Carrier = Carrier.ON_E

    @property
    def base_dim(self) -> int:
        return self.space.base_dim

    @property
    def rank(self) -> int:
        return self.space.rank

    # Frame protocol

    @property
    def frame_rank(self) -> int:
        return self.rank

    def structure(self, i: int, j: int) -> tuple[Polynomial, ...]:
        return self.c[i][j]

    def derive(self, i: int, f: Polynomial) -> Polynomial:
        """Left anchor of e_i acting on f"""
        return poly_sum(
            self.space,
            (
                self.anchor_left[a][i] * f.partial(v)
                for a, v in enumerate(self.space.base_variables)
                if self.anchor_left[a][i]
            ),
        )

    def derive_right(self, i: int, f: Polynomial) -> Polynomial:
        return poly_sum(
            self.space,
            (
                self.anchor_right[a][i] * f.partial(v)
                for a, v in enumerate(self.space.base_variables)
                if self.anchor_right[a][i]
            ),
        )

    @staticmethod
    def from_brackets(
        space: VariableSpace,
        brackets: Mapping[tuple[int, int], Mapping[int, Polynomial | int]] | None = None,
        anchor_left: Mapping[tuple[int, int], Polynomial | int] | None = None,
        anchor_right: Mapping[tuple[int, int], Polynomial | int] | None = None,
        skew: bool = True,
        carrier: Carrier = Carrier.ON_E,
    ) -> 'Algebroid':
        """
        Build from sparse 0-based data: brackets[(i, j)][k] = c^k_ij and
        anchor[(i, a)] = coefficient of d/dx^a in the anchor of e_i.
        For skew algebroids the entries with i > j are filled in by
        antisymmetry and the right anchor defaults to the left one.
        """
        n, m = space.rank, space.base_dim

        def lift(value) -> Polynomial:
            return value if isinstance(value, Polynomial) else space.const(value)

        c = [[[space.zero() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for (i, j), outputs in (brackets or {}).items():
            for k, coeff in outputs.items():
                c[i][j][k] = c[i][j][k] + lift(coeff)
                if skew and i != j:
                    c[j][i][k] = c[j][i][k] - lift(coeff)

        def anchor(entries) -> tuple[tuple[Polynomial, ...], ...]:
            rows = [[space.zero() for _ in range(n)] for _ in range(m)]
            for (i, a), coeff in (entries or {}).items():
                rows[a][i] = lift(coeff)
            return tuple(tuple(row) for row in rows)

        left = anchor(anchor_left)
        right = left if anchor_right is None else anchor(anchor_right)
        return Algebroid(
            space,
            tuple(tuple(tuple(ck) for ck in cj) for cj in c),
            left,
            right,
            skew=skew,
            carrier=carrier,
        )

    def structure_table(self) -> list[tuple[int, int, Section]]:
        """Nonzero brackets [e_i, e_j] with their values, 0-based"""
        rows = []
        for i, j in itertools.product(range(self.rank), repeat=2):
            if self.skew and i >= j:
                continue
            value = Section(self.space, self.c[i][j])
            if not value.is_zero:
                rows.append((i, j, value))
        return rows


@dataclasses.dataclass
class ValidationReport:
    shape_ok: bool
    base_only: bool
    antisymmetric: bool
    anchors_equal: bool
    skew: bool
    issues: list[str] = dataclasses.field(default_factory=list)

    @property
    def valid(self) -> bool:
        """Structurally valid; for skew algebroids also skew-consistent"""
        return self.shape_ok and self.base_only and self.skew_consistent

    @property
    def skew_consistent(self) -> bool:
        return not self.skew or (self.antisymmetric and self.anchors_equal)

    @property
    def is_pre_lie(self) -> bool:
        return self.valid and self.skew


def validate(A: Algebroid) -> ValidationReport:
    n, m = A.rank, A.base_dim
    issues = []
    shape_ok = (
        len(A.c) == n
        and all(len(cj) == n and all(len(ck) == n for ck in cj) for cj in A.c)
        and all(len(anchor) == m for anchor in (A.anchor_left, A.anchor_right))
        and all(len(row) == n for anchor in (A.anchor_left, A.anchor_right) for row in anchor)
    )
    if not shape_ok:
        issues.append(f'structure arrays do not have shape c[{n}][{n}][{n}], anchor[{m}][{n}]')
        return ValidationReport(False, False, False, False, A.skew, issues)

    polys = [
        *(p for cj in A.c for ck in cj for p in ck),
        *(p for anchor in (A.anchor_left, A.anchor_right) for row in anchor for p in row),
    ]
    base_only = all(p.kinds() <= {VariableKind.BASE} for p in polys)
    if not base_only:
        issues.append('structure functions depend on fiber coordinates')

    antisymmetric = True
    for i, j, k in itertools.product(range(n), repeat=3):
        if A.c[i][j][k] != -A.c[j][i][k]:
            antisymmetric = False
            issues.append(f'c^{k + 1}_{i + 1}{j + 1} is not antisymmetric in i, j')
            break
    anchors_equal = A.anchor_left == A.anchor_right
    if A.skew and not anchors_equal:
        issues.append('skew algebroid with different left and right anchors')
    report = ValidationReport(shape_ok, base_only, antisymmetric, anchors_equal, A.skew, issues)
    logger.debug(f'validate: {report}')
    return report


def _check_section(A: Algebroid, *sections: Section):
    for s in sections:
        if s.space != A.space:
            raise SpaceMismatchError('section and algebroid use different variable spaces')


def bracket_sections(A: Algebroid, X: Section, Y: Section) -> Section:
    """
    [X, Y]^k = X^i Y^j c^k_ij + X^i rho_l(e_i)(Y^k) - Y^j rho_r(e_j)(X^k)
    """
    _check_section(A, X, Y)
    n = A.rank
    out = []
    for k in range(n):
        terms = []
        for i, xi in enumerate(X.components):
            if not xi:
                continue
            for j, yj in enumerate(Y.components):
                if yj and A.c[i][j][k]:
                    terms.append(xi * yj * A.c[i][j][k])
            if Y.components[k]:
                terms.append(xi * A.derive(i, Y.components[k]))
        if X.components[k]:
            for j, yj in enumerate(Y.components):
                if yj:
                    terms.append(-(yj * A.derive_right(j, X.components[k])))
        out.append(poly_sum(A.space, terms))
    return Section(A.space, tuple(out))


def anchor_apply(A: Algebroid, X: Section, f: Polynomial, side: str = 'left') -> Polynomial:
    """Anchor of X as a derivation of base functions"""
    _check_section(A, X)
    if not f.kinds() <= {VariableKind.BASE}:
        raise SpaceMismatchError('anchors act on functions of the base coordinates only')
    derive = A.derive if side == 'left' else A.derive_right
    return poly_sum(A.space, (x * derive(i, f) for i, x in enumerate(X.components) if x))


def anchor_vector(A: Algebroid, X: Section) -> tuple[Polynomial, ...]:
    """Components of the left anchor of X along d/dx^a"""
    return tuple(
        poly_sum(A.space, (A.anchor_left[a][i] * x for i, x in enumerate(X.components)))
        for a in range(A.base_dim)
    )


def jacobiator(A: Algebroid, X: Section, Y: Section, Z: Section) -> Section:
    """[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]"""
    if not A.skew:
        raise PreconditionError('the jacobiator is only defined for skew algebroids')
    return (
        bracket_sections(A, bracket_sections(A, X, Y), Z)
        + bracket_sections(A, bracket_sections(A, Y, Z), X)
        + bracket_sections(A, bracket_sections(A, Z, X), Y)
    )


@dataclasses.dataclass
class LieTest:
    holds: bool
    triple: tuple[int, int, int] | None = None
    defect: Section | None = None
    anchor_pair: tuple[int, int] | None = None
    anchor_defect: tuple[Polynomial, ...] | None = None
    reason: str = ''

    def __bool__(self) -> bool:
        return self.holds


def anchor_defect(A: Algebroid, i: int, j: int) -> tuple[Polynomial, ...]:
    """rho([e_i, e_j]) - [rho(e_i), rho(e_j)] as a vector field on the base"""
    ei, ej = Section.basis(A.space, i), Section.basis(A.space, j)
    bracket_image = anchor_vector(A, bracket_sections(A, ei, ej))
    rho_i, rho_j = anchor_vector(A, ei), anchor_vector(A, ej)
    base = A.space.base_variables
    commutator = tuple(
        poly_sum(
            A.space,
            (rho_i[b] * rho_j[a].partial(base[b]) - rho_j[b] * rho_i[a].partial(base[b])
             for b in range(A.base_dim)),
        )
        for a in range(A.base_dim)
    )
    return tuple(p - q for p, q in zip(bracket_image, commutator))


def jacobi_failure(A: Algebroid) -> tuple[tuple[int, int, int], Section] | None:
    """First basis triple i < j < k with a nonzero jacobiator"""
    for i, j, k in itertools.combinations(range(A.rank), 3):
        basis = [Section.basis(A.space, t) for t in (i, j, k)]
        defect = jacobiator(A, *basis)
        if not defect.is_zero:
            logger.debug(f'jacobi fails on (e{i + 1}, e{j + 1}, e{k + 1}): {defect}')
            return (i, j, k), defect
    return None


def anchor_failure(A: Algebroid) -> tuple[tuple[int, int], tuple[Polynomial, ...]] | None:
    """First basis pair whose bracket the anchor does not map to the commutator"""
    for i, j in itertools.combinations(range(A.rank), 2):
        defect = anchor_defect(A, i, j)
        if any(defect):
            return (i, j), defect
    return None


def is_lie(A: Algebroid) -> LieTest:
    """
    A Lie algebroid is a skew algebroid whose jacobiator vanishes on basis
    triples and whose anchor maps brackets to commutators.
    """
    if not A.skew:
        return LieTest(False, reason='not skew')
    failure = jacobi_failure(A)
    if failure:
        return LieTest(False, triple=failure[0], defect=failure[1], reason='jacobi')
    anchor = anchor_failure(A)
    if anchor:
        return LieTest(False, anchor_pair=anchor[0], anchor_defect=anchor[1], reason='anchor')
    return LieTest(True)


def wedge(u: SkewTensor, v: SkewTensor) -> SkewTensor:
    return u.wedge(v)


def deformed_algebroid(A: Algebroid, N: EndoTensor) -> Algebroid:
    """
    Structure data of the deformed bracket [X,Y]_N = [NX,Y] + [X,NY] - N[X,Y]
    with anchors rho o N, read off on basis sections.
    """
    if N.space != A.space:
        raise SpaceMismatchError('endomorphism and algebroid use different variable spaces')
    n, m = A.rank, A.base_dim
    basis = [Section.basis(A.space, i) for i in range(n)]
    c = tuple(
        tuple(deformed_bracket_sections(A, N, basis[i], basis[j]).components for j in range(n))
        for i in range(n)
    )

    def compose(anchor):
        return tuple(
            tuple(
                poly_sum(A.space, (anchor[a][l] * N.matrix[l][i] for l in range(n)))
                for i in range(n)
            )
            for a in range(m)
        )

    return Algebroid(
        A.space,
        c,
        compose(A.anchor_left),
        compose(A.anchor_right),
        skew=A.skew,
        carrier=A.carrier,
    )


def deformed_bracket_sections(A: Algebroid, N: EndoTensor, X: Section, Y: Section) -> Section:
    return (
        bracket_sections(A, N.apply(X), Y)
        + bracket_sections(A, X, N.apply(Y))
        - N.apply(bracket_sections(A, X, Y))
    )
