"""
Tensor fields on the total spaces of E and E*.

An algebroid on E corresponds to a linear 2-contravariant tensor on E*
(and an algebroid on E* to one on E). This module holds that
correspondence, the vertical and complete lifts of multivectors to E,
hamiltonian lifts and J-fields, and relatedness of tensors under
fiber-linear bundle maps.

Directions on a total space are numbered base first: 0..m-1 are the
d/dx^a, m..m+n-1 are the fiber directions d/dy^i or d/dxi_i.
"""

import dataclasses
import enum
import functools
import itertools
from typing import Literal

from algkit.algebroid import (
    Algebroid,
    Carrier,
    EndoTensor,
    FiberForm,
    FiberMultivector,
    Section,
    bracket_sections,
)
from algkit.calculus import (
    apply_iN,
    exterior_derivative,
    lie_derivative,
    pair,
    schouten_in_frame,
    sharp,
)
from algkit.exceptions import (
    DegreeError,
    NonlinearTensorError,
    PreconditionError,
    SpaceMismatchError,
)
from algkit.poly import Polynomial, Variable, VariableKind, VariableSpace, poly_sum
from algkit.tensors import SkewTensor


class Bundle(enum.Enum):
    E = 'E'
    E_DUAL = 'E*'


@dataclasses.dataclass(frozen=True)
class TotalSpace:
    """Coordinates (x, y) on E or (x, xi) on E*; also the frame of coordinate fields"""

    space: VariableSpace
    bundle: Bundle

    @property
    def base_dim(self) -> int:
        return self.space.base_dim

    @property
    def rank(self) -> int:
        return self.space.rank

    @property
    def dim(self) -> int:
        return self.base_dim + self.rank

    @property
    def fiber_kind(self) -> VariableKind:
        return VariableKind.FIBER if self.bundle is Bundle.E else VariableKind.DUAL_FIBER

    @property
    def coordinates(self) -> tuple[Variable, ...]:
        fiber = (
            self.space.fiber_variables
            if self.bundle is Bundle.E
            else self.space.dual_fiber_variables
        )
        return self.space.base_variables + fiber

    def coordinate(self, direction: int) -> Polynomial:
        return self.space.var(self.coordinates[direction])

    def fiber(self, i: int) -> Polynomial:
        return self.coordinate(self.base_dim + i)

    def token(self, direction: int) -> str:
        return 'd' + self.space.name_of(self.coordinates[direction])

    # Frame protocol: coordinate fields commute and act by partial derivatives

    @property
    def frame_rank(self) -> int:
        return self.dim

    def structure(self, i: int, j: int) -> tuple[Polynomial, ...]:
        return ()

    def derive(self, i: int, f: Polynomial) -> Polynomial:
        return f.partial(self.coordinates[i])


def on_E(space: VariableSpace) -> TotalSpace:
    return TotalSpace(space, Bundle.E)


def on_E_dual(space: VariableSpace) -> TotalSpace:
    return TotalSpace(space, Bundle.E_DUAL)


class SpaceMultivector(SkewTensor):
    """Multivector field on a total space"""

    __slots__ = ('total',)

    def __init__(self, total: TotalSpace, degree: int, components=None):
        self.total = total
        super().__init__(total.space, degree, components)

    @property
    def dim(self) -> int:
        return self.total.dim

    def frame_key(self) -> object:
        return self.total

    def direction_token(self, i: int) -> str:
        return self.total.token(i)

    def _new(self, degree, components):
        return SpaceMultivector(self.total, degree, components)

    @staticmethod
    def function(total: TotalSpace, f: Polynomial) -> 'SpaceMultivector':
        return SpaceMultivector(total, 0, {(): f})

    @staticmethod
    def vector(total: TotalSpace, comps: dict[int, Polynomial]) -> 'SpaceMultivector':
        return SpaceMultivector(total, 1, {(d,): c for d, c in comps.items()})


@dataclasses.dataclass(frozen=True)
class SpaceTensor2:
    """General 2-contravariant tensor on a total space, matrix[A][B] = T(dz^A, dz^B)"""

    total: TotalSpace
    matrix: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        dim = self.total.dim
        if len(self.matrix) != dim or any(len(row) != dim for row in self.matrix):
            raise DegreeError(f'tensor on a {dim}-dimensional space must be {dim}x{dim}')

    @staticmethod
    def from_bivector(bivector: SpaceMultivector) -> 'SpaceTensor2':
        if bivector.degree != 2:
            raise DegreeError(f'expected a bivector, got degree {bivector.degree}')
        total = bivector.total
        return SpaceTensor2(
            total,
            tuple(
                tuple(bivector.component((a, b)) for b in range(total.dim))
                for a in range(total.dim)
            ),
        )

    def is_skew(self) -> bool:
        dim = self.total.dim
        return all(
            self.matrix[a][b] == -self.matrix[b][a]
            for a in range(dim)
            for b in range(a, dim)
        )

    def to_bivector(self) -> SpaceMultivector:
        if not self.is_skew():
            raise DegreeError('tensor is not skew-symmetric')
        return SpaceMultivector(
            self.total,
            2,
            {
                (a, b): self.matrix[a][b]
                for a, b in itertools.combinations(range(self.total.dim), 2)
            },
        )

    def __sub__(self, other: 'SpaceTensor2') -> 'SpaceTensor2':
        if other.total != self.total:
            raise SpaceMismatchError('tensors live on different total spaces')
        return SpaceTensor2(
            self.total,
            tuple(
                tuple(a - b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.matrix, other.matrix)
            ),
        )

    @property
    def is_zero(self) -> bool:
        return not any(c for row in self.matrix for c in row)

    def __str__(self) -> str:
        parts = []
        for a, row in enumerate(self.matrix):
            for b, c in enumerate(row):
                if c:
                    parts.append(f'({c})*{self.total.token(a)}(x){self.total.token(b)}')
        return ' + '.join(parts) or '0'


SpaceTensor = SpaceMultivector | SpaceTensor2


# algebroid <-> linear tensor


def iota_dual(A: Algebroid, x: Section) -> Polynomial:
    """The linear function X^i xi_i on E*"""
    return poly_sum(A.space, (c * A.space.xi(i) for i, c in enumerate(x.components) if c))


def iota(A: Algebroid, mu: FiberForm | Section) -> Polynomial:
    """The linear function mu_i y^i on E"""
    comps = mu.components if isinstance(mu, Section) else Section.from_tensor(mu).components
    return poly_sum(A.space, (c * A.space.y(i) for i, c in enumerate(comps) if c))


def _linear_tensor_space(A: Algebroid) -> TotalSpace:
    return on_E_dual(A.space) if A.carrier is Carrier.ON_E else on_E(A.space)


def linear_tensor(A: Algebroid) -> SpaceTensor2:
    """
    T = c^k_ij z_k dz_i(x)dz_j + d^a_i dz_i(x)dx^a - s^a_i dx^a(x)dz_i,
    z the fiber coordinates of the dual of the carrier
    """
    total = _linear_tensor_space(A)
    m, n = A.base_dim, A.rank
    rows = [[A.space.zero() for _ in range(total.dim)] for _ in range(total.dim)]
    for i, j in itertools.product(range(n), repeat=2):
        rows[m + i][m + j] = poly_sum(
            A.space,
            (c * total.fiber(k) for k, c in enumerate(A.c[i][j]) if c),
        )
    for a, i in itertools.product(range(m), range(n)):
        rows[m + i][a] = A.anchor_left[a][i]
        rows[a][m + i] = -A.anchor_right[a][i]
    return SpaceTensor2(total, tuple(tuple(r) for r in rows))


def to_linear_tensor(A: Algebroid) -> SpaceTensor:
    """The bivector for skew algebroids, the general tensor otherwise"""
    tensor = linear_tensor(A)
    return tensor.to_bivector() if A.skew else tensor


def _as_tensor2(t: SpaceTensor) -> SpaceTensor2:
    if isinstance(t, SpaceTensor2):
        return t
    return SpaceTensor2.from_bivector(t)


def linearity_defect(t: SpaceTensor) -> str | None:
    """Name of the first component breaking the linear normal form, if any"""
    tensor = _as_tensor2(t)
    total = tensor.total
    m = total.base_dim
    allowed = {VariableKind.BASE, total.fiber_kind}
    for a, b in itertools.product(range(total.dim), repeat=2):
        value = tensor.matrix[a][b]
        if not value:
            continue
        where = f'{total.token(a)}(x){total.token(b)}'
        if not value.kinds() <= allowed:
            return f'{where} depends on the wrong fiber coordinates'
        if a < m and b < m:
            return f'{where} must vanish on the base directions'
        if a >= m and b >= m:
            if not value.is_homogeneous_in(total.fiber_kind, 1):
                return f'{where} is not linear in the fiber coordinates'
        elif value.degree_in(total.fiber_kind) > 0:
            return f'{where} depends on the fiber coordinates'
    return None


def is_linear(t: SpaceTensor) -> bool:
    return linearity_defect(t) is None


def from_linear_tensor(t: SpaceTensor) -> Algebroid:
    """
    Read off c, anchor_left and anchor_right from a linear tensor on E*
    (giving an algebroid on E) or on E (giving an algebroid on E*)
    """
    problem = linearity_defect(t)
    if problem:
        raise NonlinearTensorError(problem)
    tensor = _as_tensor2(t)
    total = tensor.total
    space = total.space
    m, n = total.base_dim, total.rank
    fibers = total.coordinates[m:]
    c = tuple(
        tuple(
            tuple(tensor.matrix[m + i][m + j].partial(fibers[k]) for k in range(n))
            for j in range(n)
        )
        for i in range(n)
    )
    left = tuple(tuple(tensor.matrix[m + i][a] for i in range(n)) for a in range(m))
    right = tuple(tuple(-tensor.matrix[a][m + i] for i in range(n)) for a in range(m))
    return Algebroid(
        space,
        c,
        left,
        right,
        skew=tensor.is_skew(),
        carrier=Carrier.ON_E if total.bundle is Bundle.E_DUAL else Carrier.ON_E_DUAL,
    )


# lifts to E


def vertical_lift(A: Algebroid, u: FiberMultivector) -> SpaceMultivector:
    """e_i -> d/dy^i with the base coefficients kept"""
    total = on_E(A.space)
    m = A.base_dim
    return SpaceMultivector(
        total,
        u.degree,
        {tuple(m + i for i in key): coeff for key, coeff in u.items()},
    )


def vertical_lift_dual(A: Algebroid, mu: FiberForm) -> SpaceMultivector:
    """eps^i -> d/dxi_i on E*"""
    total = on_E_dual(A.space)
    m = A.base_dim
    return SpaceMultivector(
        total,
        mu.degree,
        {tuple(m + i for i in key): coeff for key, coeff in mu.items()},
    )


def _require_skew(A: Algebroid, what: str):
    if not A.skew:
        raise PreconditionError(f'{what} needs a skew algebroid')


def _lift_function(A: Algebroid, f: Polynomial) -> Polynomial:
    """d_T f = i_E(d f) = rho(e_j)(f) y^j"""
    return poly_sum(A.space, (A.derive(j, f) * A.space.y(j) for j in range(A.rank)))


def _lift_section(A: Algebroid, x: Section) -> SpaceMultivector:
    """
    d_T X = X^i d^a_i d/dx^a
          + (X^i c^k_ji y^j + d^a_j (d X^k / dx^a) y^j) d/dy^k
    """
    total = on_E(A.space)
    m, n = A.base_dim, A.rank
    comps: dict[int, Polynomial] = {}
    for a in range(m):
        comps[a] = poly_sum(A.space, (A.anchor_left[a][i] * xi for i, xi in enumerate(x.components)))
    for k in range(n):
        terms = []
        for i, xi in enumerate(x.components):
            if xi:
                for j in range(n):
                    if A.c[j][i][k]:
                        terms.append(xi * A.c[j][i][k] * A.space.y(j))
        if x.components[k]:
            terms.append(_lift_function(A, x.components[k]))
        comps[m + k] = poly_sum(A.space, terms)
    return SpaceMultivector.vector(total, comps)


def complete_lift(A: Algebroid, u: FiberMultivector) -> SpaceMultivector:
    """
    Complete lift d_T: functions and sections by the local formulas, higher
    degrees as the derivation d_T(X_1^...^X_k) = sum_a v(X_1)^..d_T(X_a)..^v(X_k)
    """
    _require_skew(A, 'the complete lift')
    if u.space != A.space:
        raise SpaceMismatchError('multivector and algebroid use different variable spaces')
    total = on_E(A.space)
    if u.degree == 0:
        return SpaceMultivector.function(total, _lift_function(A, u.component(())))
    if u.degree == 1:
        return _lift_section(A, Section.from_tensor(u))
    result = SpaceMultivector(total, u.degree)
    for key, coeff in u.items():
        sections = [Section.basis(A.space, i) for i in key]
        sections[0] = sections[0].scale(coeff)
        vertical = [vertical_lift(A, s.as_multivector()) for s in sections]
        for a in range(len(sections)):
            factors = list(vertical)
            factors[a] = _lift_section(A, sections[a])
            result = result + functools.reduce(SpaceMultivector.wedge, factors)
    return result


def space_schouten(u: SpaceMultivector, v: SpaceMultivector) -> SpaceMultivector:
    """Schouten-Nijenhuis bracket of polynomial multivector fields"""
    if u.total != v.total:
        raise SpaceMismatchError('multivector fields live on different total spaces')
    return schouten_in_frame(u.total, u, v)


def poisson_bracket(bivector: SpaceMultivector, f: Polynomial, g: Polynomial) -> Polynomial:
    """{f, g} = sum_{A<B} T^AB (d_A f d_B g - d_B f d_A g)"""
    if bivector.degree != 2:
        raise DegreeError(f'expected a bivector, got degree {bivector.degree}')
    coords = bivector.total.coordinates
    terms = []
    for (a, b), t in bivector.items():
        terms.append(
            t * (f.partial(coords[a]) * g.partial(coords[b])
                 - f.partial(coords[b]) * g.partial(coords[a])),
        )
    return poly_sum(bivector.space, terms)


def lambda_tensor(A: Algebroid) -> SpaceMultivector:
    """The linear Poisson-type bivector of a skew algebroid"""
    _require_skew(A, 'the bivector of an algebroid')
    return to_linear_tensor(A)


def hamiltonian_lift(A: Algebroid, x: Section) -> SpaceMultivector:
    """G(X) = -[Lambda, i_{E*} X]"""
    lam = lambda_tensor(A)
    return -space_schouten(lam, SpaceMultivector.function(lam.total, iota_dual(A, x)))


def hamiltonian_homomorphism_defect(A: Algebroid, x: Section, y: Section) -> SpaceMultivector:
    """[G(X), G(Y)] - G([X,Y]), zero for Lie algebroids"""
    return space_schouten(hamiltonian_lift(A, x), hamiltonian_lift(A, y)) - hamiltonian_lift(
        A,
        bracket_sections(A, x, y),
    )


def is_linear_vector_field(v: SpaceMultivector) -> bool:
    """Base components fiber-free and fiber components linear in the fiber"""
    if v.degree != 1:
        return False
    total = v.total
    for (d,), coeff in v.items():
        if d < total.base_dim:
            if coeff.degree_in(total.fiber_kind) > 0:
                return False
        elif not coeff.is_homogeneous_in(total.fiber_kind, 1):
            return False
    return True


def max_fiber_degree(t: SpaceMultivector) -> int:
    """Highest degree in the fiber coordinates over all components (-1 for zero)"""
    return max((coeff.degree_in(t.total.fiber_kind) for _, coeff in t.items()), default=-1)


def j_field(N: EndoTensor, total: TotalSpace) -> SpaceMultivector:
    """-N^i_j y^j d/dy^i on E, -N^i_j xi_i d/dxi_j on E*"""
    if N.space != total.space:
        raise SpaceMismatchError('endomorphism and total space use different variable spaces')
    m, n = total.base_dim, total.rank
    comps: dict[int, Polynomial] = {}
    for i, j in itertools.product(range(n), repeat=2):
        entry = N.matrix[i][j]
        if not entry:
            continue
        if total.bundle is Bundle.E:
            target, value = m + i, -(entry * total.fiber(j))
        else:
            target, value = m + j, -(entry * total.fiber(i))
        comps[target] = comps[target] + value if target in comps else value
    return SpaceMultivector.vector(total, comps)


def lambda_n(A: Algebroid, N: EndoTensor, route: Literal['lie', 'local'] = 'lie') -> SpaceMultivector:
    """
    Bivector of the deformed bracket, either as the Lie derivative of Lambda
    along the J-field of N on E*, or written out in coordinates
    """
    _require_skew(A, 'the deformed bivector')
    if route == 'lie':
        lam = lambda_tensor(A)
        return space_schouten(j_field(N, lam.total), lam)
    if route == 'local':
        return _lambda_n_local(A, N).to_bivector()
    raise ValueError(f'unknown route {route!r}')


def _lambda_n_local(A: Algebroid, N: EndoTensor) -> SpaceTensor2:
    """
    Lambda_N = (c^k_lj N^l_i + c^k_il N^l_j - c^l_ij N^k_l
                + d^a_i dN^k_j/dx^a - s^a_j dN^k_i/dx^a) xi_k dxi_i(x)dxi_j
             + N^l_i d^a_l dxi_i(x)dx^a - N^l_i s^a_l dx^a(x)dxi_i
    """
    if N.space != A.space:
        raise SpaceMismatchError('endomorphism and algebroid use different variable spaces')
    total = _linear_tensor_space(A)
    space, m, n = A.space, A.base_dim, A.rank
    base = space.base_variables
    N_ = N.matrix
    d, s = A.anchor_left, A.anchor_right
    rows = [[space.zero() for _ in range(total.dim)] for _ in range(total.dim)]
    for i, j in itertools.product(range(n), repeat=2):
        terms = []
        for k in range(n):
            coeff = poly_sum(
                space,
                itertools.chain(
                    (A.c[l][j][k] * N_[l][i] for l in range(n)),
                    (A.c[i][l][k] * N_[l][j] for l in range(n)),
                    (-(A.c[i][j][l] * N_[k][l]) for l in range(n)),
                    (d[a][i] * N_[k][j].partial(base[a]) for a in range(m)),
                    (-(s[a][j] * N_[k][i].partial(base[a])) for a in range(m)),
                ),
            )
            if coeff:
                terms.append(coeff * total.fiber(k))
        rows[m + i][m + j] = poly_sum(space, terms)
    for a, i in itertools.product(range(m), range(n)):
        rows[m + i][a] = poly_sum(space, (N_[l][i] * d[a][l] for l in range(n)))
        rows[a][m + i] = -poly_sum(space, (N_[l][i] * s[a][l] for l in range(n)))
    return SpaceTensor2(total, tuple(tuple(r) for r in rows))


def complete_lift_deformed(
    A: Algebroid,
    N: EndoTensor,
    u: FiberMultivector,
    route: Literal['rebuilt', 'cartan'] = 'rebuilt',
) -> SpaceMultivector:
    """
    Complete lift with respect to the deformed bracket: through the algebroid
    rebuilt from the deformed bivector, or as d_T(i_N u) - L_{J_E(N)} d_T u
    """
    if route == 'rebuilt':
        return complete_lift(from_linear_tensor(lambda_n(A, N)), u)
    if route == 'cartan':
        lifted = complete_lift(A, u)
        return complete_lift(A, apply_iN(N, u)) - space_schouten(j_field(N, lifted.total), lifted)
    raise ValueError(f'unknown route {route!r}')


def complete_lift_deformed_local(A: Algebroid, N: EndoTensor, x: Section) -> SpaceMultivector:
    """
    Local formula for the deformed complete lift of a section:
    X^i N^k_i d^a_k d/dx^a
    + (X^i (N^k_j c^n_ki + N^k_i c^n_jk - N^n_k c^k_ji + d^a_j dN^n_i - d^a_i dN^n_j)
       + dX^n/dx^a N^k_j d^a_k) y^j d/dy^n
    """
    _require_skew(A, 'the complete lift')
    total = on_E(A.space)
    space, m, n = A.space, A.base_dim, A.rank
    base = space.base_variables
    N_ = N.matrix
    d = A.anchor_left
    comps: dict[int, Polynomial] = {}
    for a in range(m):
        comps[a] = poly_sum(
            space,
            (
                x.components[i] * N_[k][i] * d[a][k]
                for i in range(n)
                for k in range(n)
                if x.components[i]
            ),
        )
    for nn in range(n):
        terms = []
        for j in range(n):
            inner = []
            for i, xi in enumerate(x.components):
                if not xi:
                    continue
                coeff = poly_sum(
                    space,
                    itertools.chain(
                        (N_[k][j] * A.c[k][i][nn] for k in range(n)),
                        (N_[k][i] * A.c[j][k][nn] for k in range(n)),
                        (-(N_[nn][k] * A.c[j][i][k]) for k in range(n)),
                        (d[a][j] * N_[nn][i].partial(base[a]) for a in range(m)),
                        (-(d[a][i] * N_[nn][j].partial(base[a])) for a in range(m)),
                    ),
                )
                inner.append(xi * coeff)
            inner.extend(
                x.components[nn].partial(base[a]) * N_[k][j] * d[a][k]
                for a in range(m)
                for k in range(n)
            )
            terms.append(poly_sum(space, inner) * space.y(j))
        comps[m + nn] = poly_sum(space, terms)
    return SpaceMultivector.vector(total, comps)


# the algebroid on E* induced by a bivector P


def lifted_algebroid(A: Algebroid, P: FiberMultivector) -> Algebroid:
    """Algebroid on E* whose linear tensor on E is d_T P"""
    if P.degree != 2:
        raise DegreeError(f'expected a bivector, got degree {P.degree}')
    return from_linear_tensor(complete_lift(A, P))


def lifted_form_bracket(
    A: Algebroid,
    P: FiberMultivector,
    mu: FiberForm,
    nu: FiberForm,
    route: Literal['cartan', 'tensor'] = 'cartan',
) -> FiberForm:
    """[mu, nu]_P = L_{P_mu} nu - L_{P_nu} mu - d(P(mu, nu)) on 1-forms"""
    if mu.degree != 1 or nu.degree != 1:
        raise DegreeError('the bracket of forms is defined on 1-forms')
    if route == 'cartan':
        p_mu, p_nu = sharp(mu, P), sharp(nu, P)
        value = pair(P, [mu, nu])
        return (
            lie_derivative(A, p_mu, nu)
            - lie_derivative(A, p_nu, mu)
            - exterior_derivative(A, FiberForm.function(value))
        )
    if route == 'tensor':
        dual = lifted_algebroid(A, P)
        result = bracket_sections(dual, Section.from_tensor(mu), Section.from_tensor(nu))
        return result.as_form()
    raise ValueError(f'unknown route {route!r}')


# bundle maps


@dataclasses.dataclass(frozen=True)
class FiberLinearMap:
    """
    Vector bundle map over the identity: w^i = matrix[i][j] z^j with z the
    source fiber coordinates and w the target fiber coordinates
    """

    source: TotalSpace
    target: TotalSpace
    matrix: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        if self.source.space != self.target.space:
            raise SpaceMismatchError('bundle maps must share the base')
        if len(self.matrix) != self.target.rank or any(
            len(row) != self.source.rank for row in self.matrix
        ):
            raise DegreeError('matrix shape does not match the fibers')
        for row in self.matrix:
            for c in row:
                if not c.kinds() <= {VariableKind.BASE}:
                    raise SpaceMismatchError('bundle map entries must be base functions')

    def pullback(self, f: Polynomial) -> Polynomial:
        """f o Phi: substitute w^i by matrix[i][j] z^j"""
        m = self.source.base_dim
        targets = self.target.coordinates[m:]
        bindings = {
            w: poly_sum(
                f.space,
                (c * self.source.fiber(j) for j, c in enumerate(self.matrix[i]) if c),
            )
            for i, w in enumerate(targets)
        }
        return f.substitute(bindings)

    def jacobian_columns(self) -> list[dict[int, Polynomial]]:
        """Image of each source coordinate field as target direction -> coefficient"""
        src, m = self.source, self.source.base_dim
        columns = []
        base = src.space.base_variables
        for a in range(m):
            column = {a: src.space.one()}
            for i, row in enumerate(self.matrix):
                value = poly_sum(
                    src.space,
                    (c.partial(base[a]) * src.fiber(j) for j, c in enumerate(row) if c),
                )
                if value:
                    column[m + i] = value
            columns.append(column)
        for j in range(src.rank):
            columns.append(
                {m + i: row[j] for i, row in enumerate(self.matrix) if row[j]},
            )
        return columns


def compose(phi1: FiberLinearMap, phi2: FiberLinearMap) -> FiberLinearMap:
    """phi2 after phi1"""
    if phi1.target != phi2.source:
        raise SpaceMismatchError('cannot compose: target and source differ')
    space = phi1.source.space
    rows = tuple(
        tuple(
            poly_sum(space, (phi2.matrix[i][k] * phi1.matrix[k][j] for k in range(phi1.target.rank)))
            for j in range(phi1.source.rank)
        )
        for i in range(phi2.target.rank)
    )
    return FiberLinearMap(phi1.source, phi2.target, rows)


def identity_map(total: TotalSpace) -> FiberLinearMap:
    n = total.rank
    return FiberLinearMap(
        total,
        total,
        tuple(tuple(total.space.const(int(i == j)) for j in range(n)) for i in range(n)),
    )


def endo_map(N: EndoTensor) -> FiberLinearMap:
    """N on E"""
    return FiberLinearMap(on_E(N.space), on_E(N.space), N.matrix)


def dual_endo_map(N: EndoTensor) -> FiberLinearMap:
    """N* on E*: w_j = N^i_j xi_i"""
    n = N.space.rank
    return FiberLinearMap(
        on_E_dual(N.space),
        on_E_dual(N.space),
        tuple(tuple(N.matrix[i][j] for i in range(n)) for j in range(n)),
    )


def sharp_map(P: FiberMultivector) -> FiberLinearMap:
    """-P~ : E* -> E, y^j = -P^ij xi_i"""
    if P.degree != 2:
        raise DegreeError(f'expected a bivector, got degree {P.degree}')
    n = P.space.rank
    return FiberLinearMap(
        on_E_dual(P.space),
        on_E(P.space),
        tuple(tuple(-P.component((i, j)) for i in range(n)) for j in range(n)),
    )


@dataclasses.dataclass
class Relatedness:
    related: bool
    difference: SpaceMultivector | SpaceTensor2 | None = None

    @property
    def witness(self) -> str | None:
        return None if self.related else str(self.difference)

    def __bool__(self) -> bool:
        return self.related


def pushforward(phi: FiberLinearMap, t: SpaceTensor) -> SpaceTensor:
    """Image of t under the tangent map, with coefficients still in source coordinates"""
    if t.total != phi.source:
        raise SpaceMismatchError('tensor does not live on the source of the map')
    columns = phi.jacobian_columns()
    target = phi.target
    if isinstance(t, SpaceTensor2):
        dim = target.dim
        rows = [[target.space.zero() for _ in range(dim)] for _ in range(dim)]
        for a, b in itertools.product(range(phi.source.dim), repeat=2):
            value = t.matrix[a][b]
            if not value:
                continue
            for c, jc in columns[a].items():
                for d, jd in columns[b].items():
                    rows[c][d] = rows[c][d] + jc * value * jd
        return SpaceTensor2(target, tuple(tuple(r) for r in rows))
    result = SpaceMultivector(target, t.degree)
    for key, coeff in t.items():
        factors = [SpaceMultivector.vector(target, columns[d]) for d in key]
        image = functools.reduce(SpaceMultivector.wedge, factors) if factors else (
            SpaceMultivector.function(target, target.space.one())
        )
        result = result + image.scale(coeff)
    return result


def are_related(phi: FiberLinearMap, t1: SpaceTensor, t2: SpaceTensor) -> Relatedness:
    """T1 and T2 are Phi-related when Phi_* T1 = T2 o Phi"""
    if t2.total != phi.target:
        raise SpaceMismatchError('second tensor does not live on the target of the map')
    pushed = pushforward(phi, t1)
    if isinstance(t2, SpaceTensor2) or isinstance(pushed, SpaceTensor2):
        pushed, t2 = _as_tensor2(pushed), _as_tensor2(t2)
        pulled = SpaceTensor2(
            t2.total,
            tuple(tuple(phi.pullback(c) for c in row) for row in t2.matrix),
        )
    else:
        pulled = t2.map_coefficients(phi.pullback)
    difference = pushed - pulled
    return Relatedness(difference.is_zero, None if difference.is_zero else difference)


def maps_equal(phi1: FiberLinearMap, phi2: FiberLinearMap) -> bool:
    return (
        phi1.source == phi2.source
        and phi1.target == phi2.target
        and phi1.matrix == phi2.matrix
    )

