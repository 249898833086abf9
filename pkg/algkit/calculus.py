"""
Cartan calculus of a skew algebroid: pairing and contractions, the Schouten
bracket of multivectors, the exterior derivative of forms, Lie derivatives,
and the operators built from an endomorphism N (deformed brackets and
differentials, the Frölicher-Nijenhuis bracket, the Nijenhuis torsion).

The Schouten bracket and the exterior derivative are written against the
Frame protocol, so the same code serves an algebroid basis and the
coordinate fields of a total space.
"""

import dataclasses
import itertools
from typing import Sequence

from sympy.combinatorics import Permutation

from algkit.algebroid import (
    Algebroid,
    EndoTensor,
    FiberForm,
    FiberMultivector,
    Section,
    anchor_apply,
    bracket_sections,
    deformed_bracket_sections,
)
from algkit.exceptions import DegreeError, PreconditionError, SpaceMismatchError
from algkit.poly import Polynomial, poly_sum
from algkit.tensors import Frame, SkewTensor, T, sort_indices


def _require_skew(A: Algebroid, what: str):
    if not A.skew:
        raise PreconditionError(f'{what} needs a skew algebroid')


def _accumulate(acc: dict, key: Sequence[int], coeff: Polynomial):
    if not coeff:
        return
    sign, ordered = sort_indices(key)
    if sign == 0:
        return
    term = coeff if sign == 1 else -coeff
    acc[ordered] = acc[ordered] + term if ordered in acc else term


def _determinant(rows: Sequence[Sequence[Polynomial]], zero: Polynomial) -> Polynomial:
    """Leibniz expansion; the matrices here are at most rank x rank"""
    k = len(rows)
    total = zero
    for perm in itertools.permutations(range(k)):
        term = None
        for r, col in enumerate(perm):
            entry = rows[r][col]
            if not entry:
                term = None
                break
            term = entry if term is None else term * entry
        if term is not None:
            total = total + (term if Permutation(list(perm)).signature() == 1 else -term)
    return total


def _evaluate(t: SkewTensor, vectors: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """
    Skew tensor of degree k on k vectors of the dual kind:
    sum over components of coeff * det[v_b(direction I_a)]
    """
    if len(vectors) != t.degree:
        raise DegreeError(f'degree {t.degree} tensor evaluated on {len(vectors)} arguments')
    zero = t.space.zero()
    if t.degree == 0:
        return t.component(())
    total = zero
    for key, coeff in t.items():
        rows = [[v[i] for v in vectors] for i in key]
        det = _determinant(rows, zero)
        if det:
            total = total + coeff * det
    return total


def pair(u: FiberMultivector, forms: Sequence[FiberForm | Section]) -> Polynomial:
    """u(mu_1, ..., mu_k) for 1-forms mu_a"""
    return _evaluate(u, [_vector_of(mu) for mu in forms])


def evaluate_form(omega: FiberForm, sections: Sequence[Section]) -> Polynomial:
    """omega(X_1, ..., X_k) for sections X_a"""
    return _evaluate(omega, [_vector_of(x) for x in sections])


def _vector_of(x: Section | SkewTensor) -> tuple[Polynomial, ...]:
    if isinstance(x, Section):
        return x.components
    return Section.from_tensor(x).components


def _contract(vector: Sequence[Polynomial], t: T) -> T:
    """Contraction of t in its first slot: i(e_I) = sum_a (-1)^a v_{I_a} e_{I without a}"""
    if t.degree < 1:
        raise DegreeError('cannot contract a function')
    acc: dict = {}
    for key, coeff in t.items():
        for a, idx in enumerate(key):
            if vector[idx]:
                term = vector[idx] * coeff
                _accumulate(acc, key[:a] + key[a + 1:], term if a % 2 == 0 else -term)
    return t._new(t.degree - 1, acc)


def interior_form(mu: FiberForm | Section, u: FiberMultivector) -> FiberMultivector:
    """i_mu u for a 1-form mu"""
    return _contract(_vector_of(mu), u)


def interior_section(x: Section, omega: FiberForm) -> FiberForm:
    """i_X omega"""
    return _contract(x.components, omega)


def sharp(mu: FiberForm | Section, P: FiberMultivector) -> Section:
    """P_mu = i_mu P for a bivector P"""
    if P.degree != 2:
        raise DegreeError(f'expected a bivector, got degree {P.degree}')
    return Section.from_tensor(interior_form(mu, P))


# Schouten bracket


def _basis_bracket(
    frame: Frame,
    i: int,
    phi: Polynomial | None,
    j: int,
    psi: Polynomial | None,
) -> dict[int, Polynomial]:
    """[phi e_i, psi e_j] = phi rho_i(psi) e_j - psi rho_j(phi) e_i + phi psi c_ij; None means 1"""
    out: dict[int, Polynomial] = {}

    def add(k, value):
        if value:
            out[k] = out[k] + value if k in out else value

    if psi is not None:
        d = frame.derive(i, psi)
        add(j, d if phi is None else phi * d)
    if phi is not None:
        d = frame.derive(j, phi)
        add(i, -(d if psi is None else psi * d))
    for k, ck in enumerate(frame.structure(i, j)):
        if ck:
            factor = ck
            if phi is not None:
                factor = factor * phi
            if psi is not None:
                factor = factor * psi
            add(k, factor)
    return out


def schouten_in_frame(frame: Frame, u: T, v: T) -> T:
    """
    [X_1^...^X_p, Y_1^...^Y_q] = sum (-1)^(a+b) [X_a, Y_b]^X_1..^Y_1..
    with the coefficient of each component carried by X_1 and Y_1,
    [X_1^...^X_p, g] = sum (-1)^(p-a) rho(X_a)(g) X_1..(omit a)..X_p
    and [f, v] = -(-1)^(q-1) [v, f].
    """
    u._check(v)
    p, q = u.degree, v.degree
    if p < 0 or q < 0:
        return u._new(max(p + q - 1, -1), {})
    if p == 0 and q == 0:
        return u._new(-1, {})
    if p == 0:
        swapped = schouten_in_frame(frame, v, u)
        return swapped if (q - 1) % 2 == 1 else -swapped
    acc: dict = {}
    for key_u, f in u.items():
        for key_v, g in v.items():
            if q == 0:
                for a, ia in enumerate(key_u):
                    value = f * frame.derive(ia, g)
                    if (p - 1 - a) % 2:
                        value = -value
                    _accumulate(acc, key_u[:a] + key_u[a + 1:], value)
                continue
            for a, ia in enumerate(key_u):
                for b, jb in enumerate(key_v):
                    phi = f if a == 0 else None
                    psi = g if b == 0 else None
                    rest = key_u[:a] + key_u[a + 1:] + key_v[:b] + key_v[b + 1:]
                    carried = None
                    if a != 0:
                        carried = f
                    if b != 0:
                        carried = g if carried is None else carried * g
                    for k, value in _basis_bracket(frame, ia, phi, jb, psi).items():
                        if carried is not None:
                            value = value * carried
                        if (a + b) % 2:
                            value = -value
                        _accumulate(acc, (k,) + rest, value)
    return u._new(p + q - 1, acc)


def schouten(A: Algebroid, u: FiberMultivector, v: FiberMultivector) -> FiberMultivector:
    _require_skew(A, 'the Schouten bracket')
    for t in (u, v):
        if not isinstance(t, FiberMultivector) or t.space != A.space:
            raise SpaceMismatchError('Schouten bracket operands must be multivectors of A')
    return schouten_in_frame(A, u, v)


# exterior derivative


def _koszul(frame: Frame, omega: T) -> T:
    """
    d omega(e_K) = sum_a (-1)^a rho_{K_a}(omega(K - a))
                 + sum_{a<b} (-1)^(a+b) omega([e_{K_a}, e_{K_b}], K - a - b)
    """
    k = omega.degree
    if k < 0:
        return omega._new(0, {})
    n = frame.frame_rank
    out: dict = {}
    for K in itertools.combinations(range(n), k + 1):
        terms = []
        for a, ka in enumerate(K):
            coeff = omega.component(K[:a] + K[a + 1:])
            if coeff:
                value = frame.derive(ka, coeff)
                terms.append(-value if a % 2 else value)
        for a, b in itertools.combinations(range(k + 1), 2):
            rest = K[:a] + K[a + 1:b] + K[b + 1:]
            for s, cs in enumerate(frame.structure(K[a], K[b])):
                if cs:
                    coeff = omega.component((s,) + rest)
                    if coeff:
                        value = cs * coeff
                        terms.append(-value if (a + b) % 2 else value)
        total = poly_sum(omega.space, terms)
        if total:
            out[K] = total
    return omega._new(k + 1, out)


def exterior_derivative(A: Algebroid, omega: FiberForm) -> FiberForm:
    _require_skew(A, 'the exterior derivative')
    if not isinstance(omega, FiberForm) or omega.space != A.space:
        raise SpaceMismatchError('exterior derivative expects a form of A')
    return _koszul(A, omega)


def lie_derivative(
    A: Algebroid,
    x: Section,
    t: FiberForm | FiberMultivector | Polynomial,
) -> FiberForm | FiberMultivector | Polynomial:
    """L_X on functions, forms (Cartan formula) and multivectors ([X, .])"""
    _require_skew(A, 'the Lie derivative')
    if isinstance(t, Polynomial):
        return anchor_apply(A, x, t)
    if isinstance(t, FiberMultivector):
        return schouten(A, x.as_multivector(), t)
    if t.degree == 0:
        return interior_section(x, exterior_derivative(A, t))
    return interior_section(x, exterior_derivative(A, t)) + exterior_derivative(
        A,
        interior_section(x, t),
    )


# operators built from an endomorphism N


def _derivation(t: T, action) -> T:
    """Extend a map on degree-1 directions to t as a derivation"""
    acc: dict = {}
    for key, coeff in t.items():
        for a, idx in enumerate(key):
            for s, factor in enumerate(action(idx)):
                if factor:
                    _accumulate(acc, key[:a] + (s,) + key[a + 1:], factor * coeff)
    return t._new(t.degree, acc)


def apply_iN(
    N: EndoTensor,
    t: Section | FiberMultivector | FiberForm | Polynomial,
) -> Section | FiberMultivector | FiberForm | Polynomial:
    """
    i_N: N on vectors, N* on 1-forms, zero on functions, extended as a
    derivation of degree 0
    """
    if isinstance(t, Polynomial):
        return t.space.zero()
    if isinstance(t, Section):
        return N.apply(t)
    if t.space != N.space:
        raise SpaceMismatchError('endomorphism and tensor use different variable spaces')
    n = N.space.rank
    if isinstance(t, FiberMultivector):
        return _derivation(t, lambda i: [N.matrix[k][i] for k in range(n)])
    return _derivation(t, lambda i: N.matrix[i])


def deformed_bracket(A: Algebroid, N: EndoTensor, x: Section, y: Section) -> Section:
    """[X,Y]_N = [NX,Y] + [X,NY] - N[X,Y]"""
    if N.space != A.space:
        raise SpaceMismatchError('endomorphism and algebroid use different variable spaces')
    return deformed_bracket_sections(A, N, x, y)


def deformed_differential(A: Algebroid, N: EndoTensor, omega: FiberForm) -> FiberForm:
    """d_N = i_N d - d i_N"""
    return apply_iN(N, exterior_derivative(A, omega)) - exterior_derivative(
        A,
        apply_iN(N, omega),
    )


@dataclasses.dataclass(frozen=True)
class VectorValuedForm:
    """
    A 2-form with values in E, stored as one scalar 2-form per output
    direction: forms[k] is the e_k component.
    """

    space: object
    forms: tuple[FiberForm, ...]

    @staticmethod
    def zero(space) -> 'VectorValuedForm':
        return VectorValuedForm(space, tuple(FiberForm(space, 2) for _ in range(space.rank)))

    @staticmethod
    def from_values(space, values: dict[tuple[int, int], Section]) -> 'VectorValuedForm':
        comps: list[dict] = [{} for _ in range(space.rank)]
        for (i, j), value in values.items():
            for k, c in enumerate(value.components):
                if c:
                    comps[k][(i, j)] = c
        return VectorValuedForm(space, tuple(FiberForm(space, 2, c) for c in comps))

    def value(self, i: int, j: int) -> Section:
        return Section(self.space, tuple(f.component((i, j)) for f in self.forms))

    def as_mapping(self) -> dict[tuple[int, int], Section]:
        """Nonzero values on basis pairs i < j"""
        out = {}
        for i, j in itertools.combinations(range(self.space.rank), 2):
            value = self.value(i, j)
            if not value.is_zero:
                out[(i, j)] = value
        return out

    def add_term(self, form: FiberForm, x: Section) -> 'VectorValuedForm':
        """self + form (x) X"""
        return VectorValuedForm(
            self.space,
            tuple(f + form.scale(c) if c else f for f, c in zip(self.forms, x.components)),
        )

    def __add__(self, other: 'VectorValuedForm') -> 'VectorValuedForm':
        return VectorValuedForm(self.space, tuple(a + b for a, b in zip(self.forms, other.forms)))

    def __neg__(self) -> 'VectorValuedForm':
        return VectorValuedForm(self.space, tuple(-a for a in self.forms))

    def __sub__(self, other: 'VectorValuedForm') -> 'VectorValuedForm':
        return self + (-other)

    def scale(self, factor) -> 'VectorValuedForm':
        return VectorValuedForm(self.space, tuple(a.scale(factor) for a in self.forms))

    @property
    def is_zero(self) -> bool:
        return all(f.is_zero for f in self.forms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorValuedForm):
            return NotImplemented
        return self.space == other.space and all(
            a == b for a, b in zip(self.forms, other.forms)
        )

    def __hash__(self) -> int:
        return hash(self.forms)

    def __str__(self) -> str:
        values = self.as_mapping()
        if not values:
            return '0'
        return '; '.join(f'(e{i + 1},e{j + 1}) -> {v}' for (i, j), v in values.items())


def _column(N: EndoTensor, j: int) -> Section:
    return Section(N.space, tuple(N.matrix[i][j] for i in range(N.space.rank)))


def fn_bracket_11(A: Algebroid, K: EndoTensor, L: EndoTensor) -> VectorValuedForm:
    """
    Frölicher-Nijenhuis bracket of two (1,1)-tensors, written as
    K = sum_j eps_j (x) K e_j and expanded with

        [mu (x) X, nu (x) Y] = mu^nu (x) [X,Y] + mu^L_X nu (x) Y - L_Y mu ^ nu (x) X
                               - dmu ^ i_X nu (x) Y - i_Y mu ^ dnu (x) X

    Oriented so that [N, N] = 2 T_N.
    """
    _require_skew(A, 'the Frölicher-Nijenhuis bracket')
    space = A.space
    n = space.rank
    result = VectorValuedForm.zero(space)
    for j, l in itertools.product(range(n), repeat=2):
        mu, nu = FiberForm.basis(space, j), FiberForm.basis(space, l)
        x, y = _column(K, j), _column(L, l)
        if x.is_zero or y.is_zero:
            continue
        mu_nu = mu.wedge(nu)
        result = result.add_term(mu_nu, bracket_sections(A, x, y))
        result = result.add_term(mu.wedge(lie_derivative(A, x, nu)), y)
        result = result.add_term(-lie_derivative(A, y, mu).wedge(nu), x)
        result = result.add_term(-exterior_derivative(A, mu).scale(pair_form(nu, x)), y)
        result = result.add_term(-exterior_derivative(A, nu).scale(pair_form(mu, y)), x)
    return -result


def pair_form(mu: FiberForm, x: Section) -> Polynomial:
    """<X, mu> for a 1-form mu"""
    return evaluate_form(mu, [x])


def torsion_value(A: Algebroid, N: EndoTensor, x: Section, y: Section) -> Section:
    """T_N(X,Y) = N[X,Y]_N - [NX,NY]"""
    return N.apply(deformed_bracket(A, N, x, y)) - bracket_sections(A, N.apply(x), N.apply(y))


def _on_basis_pairs(A: Algebroid, fn) -> VectorValuedForm:
    values = {}
    for i, j in itertools.combinations(range(A.rank), 2):
        values[(i, j)] = fn(Section.basis(A.space, i), Section.basis(A.space, j))
    return VectorValuedForm.from_values(A.space, values)


def nijenhuis_torsion(A: Algebroid, N: EndoTensor) -> VectorValuedForm:
    _require_skew(A, 'the Nijenhuis torsion')
    if N.space != A.space:
        raise SpaceMismatchError('endomorphism and algebroid use different variable spaces')
    return _on_basis_pairs(A, lambda x, y: torsion_value(A, N, x, y))


def operator_bracket(A: Algebroid, K: EndoTensor) -> VectorValuedForm:
    """[B, i_K](X,Y) = [KX,Y] + [X,KY] - K[X,Y], the deformed bracket on basis pairs"""
    _require_skew(A, 'the operator bracket')
    return _on_basis_pairs(A, lambda x, y: deformed_bracket(A, K, x, y))


def nested_operator_bracket(A: Algebroid, N: EndoTensor) -> VectorValuedForm:
    """[[B, i_N], i_N](X,Y) = B_N(NX,Y) + B_N(X,NY) - N B_N(X,Y)"""
    _require_skew(A, 'the operator bracket')

    def nested(x, y):
        return (
            deformed_bracket(A, N, N.apply(x), y)
            + deformed_bracket(A, N, x, N.apply(y))
            - N.apply(deformed_bracket(A, N, x, y))
        )

    return _on_basis_pairs(A, nested)


def jacobi_defect(A: Algebroid, N: EndoTensor, x: Section, y: Section, z: Section) -> Section:
    """Jacobiator of the deformed bracket"""

    def br(u, v):
        return deformed_bracket(A, N, u, v)

    return br(br(x, y), z) + br(br(y, z), x) + br(br(z, x), y)
