"""
Verifiers built on the calculus and the lifts: Poisson tensors for an
algebroid, the modified Yang-Baxter condition, Nijenhuis tensors,
Poisson-Nijenhuis structures, Lie bialgebroids and the report on the
square of Poisson maps E* -> E built from P and N.

Every verifier returns CheckReport values; a failing check carries the
rendered nonzero quantity as its witness.
"""

import dataclasses
import itertools
import random
from fractions import Fraction
from typing import Any

from algkit.algebroid import (
    Algebroid,
    EndoTensor,
    FiberForm,
    FiberMultivector,
    bracket_sections,
    is_lie,
)
from algkit.calculus import (
    exterior_derivative,
    fn_bracket_11,
    nijenhuis_torsion,
    pair,
    schouten,
    sharp,
)
from algkit.exceptions import DegreeError, PreconditionError, SpaceMismatchError
from algkit.lifts import (
    are_related,
    compose,
    complete_lift,
    complete_lift_deformed,
    dual_endo_map,
    endo_map,
    from_linear_tensor,
    j_field,
    lambda_n,
    lambda_tensor,
    lifted_algebroid,
    lifted_form_bracket,
    maps_equal,
    on_E,
    sharp_map,
    space_schouten,
)
from algkit.poly import Polynomial, poly_sum
from algkit.util import logger

HALF = Fraction(1, 2)


@dataclasses.dataclass
class CheckReport:
    name: str
    passed: bool
    witness: str | None = None
    notes: str = ''
    informational: bool = False

    def as_dict(self) -> dict[str, Any]:
        return {
            'name': self.name,
            'pass': self.passed,
            'witness': self.witness,
            'notes': self.notes,
            'informational': self.informational,
        }


def _report(name: str, value, notes: str = '', informational: bool = False) -> CheckReport:
    """Pass iff value is zero; the witness is the rendered value otherwise"""
    passed = value.is_zero
    report = CheckReport(
        name,
        passed,
        None if passed else str(value),
        notes,
        informational,
    )
    logger.debug(f'{name}: {"pass" if passed else "fail"}')
    return report


def _require_lie(A: Algebroid, what: str):
    test = is_lie(A)
    if not test:
        raise PreconditionError(f'{what} needs a Lie algebroid ({test.reason} fails)')


def _require_bivector(A: Algebroid, P: FiberMultivector):
    if P.degree != 2:
        raise DegreeError(f'expected a bivector, got degree {P.degree}')
    if P.space != A.space:
        raise SpaceMismatchError('bivector and algebroid use different variable spaces')


def is_poisson_for(A: Algebroid, P: FiberMultivector) -> CheckReport:
    """[P, P] = 0"""
    _require_lie(A, 'the Poisson check')
    _require_bivector(A, P)
    return _report('poisson', schouten(A, P, P), notes='[P,P] = 0')


def modified_yb(A: Algebroid, P: FiberMultivector) -> CheckReport:
    """The complete lift of [P, P] vanishes"""
    _require_lie(A, 'the modified Yang-Baxter check')
    _require_bivector(A, P)
    return _report(
        'modified-yang-baxter',
        complete_lift(A, schouten(A, P, P)),
        notes='d_T [P,P] = 0',
    )


def is_nijenhuis(A: Algebroid, N: EndoTensor) -> CheckReport:
    """
    T_N = 0, cross-checked against the Frölicher-Nijenhuis bracket and
    against N*-relatedness of the bivectors of A and A_N
    """
    if not A.skew:
        raise PreconditionError('the Nijenhuis check needs a skew algebroid')
    torsion = nijenhuis_torsion(A, N)
    half_fn = fn_bracket_11(A, N, N).scale(HALF)
    related = are_related(dual_endo_map(N), lambda_tensor(A), lambda_n(A, N))
    problems = []
    if half_fn != torsion:
        problems.append('[N,N] differs from 2 T_N')
    if related.related != torsion.is_zero:
        problems.append('N*-relatedness of the bivectors disagrees with T_N')
    if problems:
        for problem in problems:
            logger.error(f'nijenhuis: {problem}')
        return CheckReport('nijenhuis', False, str(torsion), 'routes disagree: ' + '; '.join(problems))
    return _report('nijenhuis', torsion, notes='T_N = 0')


def np_matrix_defect(P: FiberMultivector, N: EndoTensor) -> list[tuple[int, int, Polynomial]]:
    """Entries (i <= j) where the matrix of N P fails to be skew, i.e. NP != PN*"""
    n = P.space.rank
    np_ = [
        [poly_sum(P.space, (N.matrix[i][k] * P.component((k, j)) for k in range(n))) for j in range(n)]
        for i in range(n)
    ]
    return [
        (i, j, np_[i][j] + np_[j][i])
        for i in range(n)
        for j in range(i, n)
        if np_[i][j] + np_[j][i]
    ]


def np_bivector(P: FiberMultivector, N: EndoTensor) -> FiberMultivector:
    """The bivector with components (N P)^ij, antisymmetrized"""
    n = P.space.rank
    comps = {}
    for i, j in itertools.combinations(range(n), 2):
        upper = poly_sum(P.space, (N.matrix[i][k] * P.component((k, j)) for k in range(n)))
        lower = poly_sum(P.space, (N.matrix[j][k] * P.component((k, i)) for k in range(n)))
        comps[(i, j)] = (upper - lower) * HALF
    return FiberMultivector(P.space, 2, comps)


def check_pn(A: Algebroid, P: FiberMultivector, N: EndoTensor) -> list[CheckReport]:
    """
    The four conditions on (P, N), then two informational rows and the
    overall verdict, which only depends on the first four
    """
    _require_lie(A, 'the Poisson-Nijenhuis check')
    _require_bivector(A, P)
    reports = [is_poisson_for(A, P), is_nijenhuis(A, N)]

    defect = np_matrix_defect(P, N)
    reports.append(
        CheckReport(
            'condition-1',
            not defect,
            None if not defect else ', '.join(f'(NP+(NP)^t)[{i + 1},{j + 1}] = {v}' for i, j, v in defect),
            'NP = PN*',
        ),
    )

    np = np_bivector(P, N)
    lift_p = complete_lift(A, P)
    lie_lift = space_schouten(j_field(N, on_E(A.space)), lift_p)
    reports.append(
        _report(
            'condition-2',
            complete_lift_deformed(A, N, P) - lie_lift,
            notes='d_T^{Lambda_N} P = L_{J_E(N)} d_T P',
        ),
    )
    reports.append(
        _report(
            'condition-2-prime',
            lie_lift - complete_lift(A, np),
            notes='L_{J_E(N)} d_T P = d_T(NP)',
            informational=True,
        ),
    )
    reports.append(
        _report('np-poisson', schouten(A, np, np), notes='[NP,NP] = 0', informational=True),
    )

    failed = [r.name for r in reports if not r.informational and not r.passed]
    reports.append(
        CheckReport(
            'poisson-nijenhuis',
            not failed,
            None if not failed else ', '.join(failed),
            'poisson, nijenhuis, condition-1 and condition-2',
        ),
    )
    return reports


# Lie bialgebroids


def _bracket_on_forms(right: Algebroid, a: FiberForm, b: FiberForm) -> FiberForm:
    """Schouten bracket of the algebroid on E*, whose multivectors are forms of A"""
    return schouten(right, a.as_multivector(), b.as_multivector()).as_form()


def derivation_defect(left: Algebroid, right: Algebroid, mu: FiberForm, nu: FiberForm) -> FiberForm:
    """d[mu,nu] - [d mu, nu] - (-1)^(|mu|+1) [mu, d nu] for d from the left algebroid"""
    lhs = exterior_derivative(left, _bracket_on_forms(right, mu, nu))
    first = _bracket_on_forms(right, exterior_derivative(left, mu), nu)
    second = _bracket_on_forms(right, mu, exterior_derivative(left, nu))
    if mu.degree % 2 == 0:
        second = -second
    return lhs - first - second


def _generators(A: Algebroid) -> list[FiberForm]:
    """Base coordinate functions and the basis 1-forms"""
    space = A.space
    functions = [FiberForm.function(space.x(a)) for a in range(A.base_dim)]
    return functions + [FiberForm.basis(space, i) for i in range(A.rank)]


def sample_forms(A: Algebroid, seed: int) -> tuple[FiberForm, FiberForm]:
    """Two 1-forms with affine coefficients drawn from a seeded generator"""
    rng = random.Random(seed)
    space = A.space

    def coefficient() -> Polynomial:
        value = space.const(rng.randint(-3, 3))
        for a in range(A.base_dim):
            value = value + rng.randint(-2, 2) * space.x(a)
        return value

    def form() -> FiberForm:
        return FiberForm(space, 1, {(i,): coefficient() for i in range(A.rank)})

    return form(), form()


def derivation_check(
    left: Algebroid,
    right: Algebroid,
    seed: int = 0,
    name: str = 'derivation',
) -> CheckReport:
    pairs = list(itertools.combinations_with_replacement(_generators(left), 2))
    pairs.append(sample_forms(left, seed))
    for mu, nu in pairs:
        defect = derivation_defect(left, right, mu, nu)
        if not defect.is_zero:
            return CheckReport(
                name,
                False,
                f'({mu}, {nu}) -> {defect}',
                'd is a derivation of the bracket of forms',
            )
    return CheckReport(name, True, None, 'd is a derivation of the bracket of forms')


def coupling_defect(
    A: Algebroid,
    P: FiberMultivector,
    mu: FiberForm,
    nu: FiberForm,
    gamma: FiberForm,
) -> Polynomial:
    """
    1/2 [P,P](mu, nu, gamma) + <P~[mu,nu]_P - [P_mu, P_nu], gamma>,
    zero for every bivector on a Lie algebroid
    """
    _require_lie(A, 'the Schouten defect identity')
    _require_bivector(A, P)
    half = pair(schouten(A, P, P), [mu, nu, gamma]) * HALF
    image = sharp(lifted_form_bracket(A, P, mu, nu), P)
    commutator = bracket_sections(A, sharp(mu, P), sharp(nu, P))
    return half + pair((image - commutator).as_multivector(), [gamma])


def bialgebroid_checks(A: Algebroid, P: FiberMultivector, seed: int = 0) -> list[CheckReport]:
    """
    The differential of the algebroid on E* is [P, .]; the defect identity of
    [P, P] on basis triples; the derivation property of d on the bracket of forms
    """
    _require_lie(A, 'the bialgebroid checks')
    _require_bivector(A, P)
    space = A.space
    right = lifted_algebroid(A, P)
    reports = []

    failures = []
    generators = [FiberMultivector.function(space.x(a)) for a in range(A.base_dim)]
    generators += [FiberMultivector.basis(space, i) for i in range(A.rank)]
    for u in generators:
        twisted = exterior_derivative(right, u.as_form()).as_multivector()
        difference = twisted - schouten(A, P, u)
        if not difference.is_zero:
            failures.append(f'{u} -> {difference}')
    reports.append(
        CheckReport(
            'differential',
            not failures,
            '; '.join(failures) or None,
            "d' = [P, .]",
        ),
    )

    failures = []
    for i, j, k in itertools.combinations(range(A.rank), 3):
        value = coupling_defect(A, P, *(FiberForm.basis(space, t) for t in (i, j, k)))
        if value:
            failures.append(f'(eps{i + 1}, eps{j + 1}, eps{k + 1}) -> {value}')
    reports.append(
        CheckReport(
            'schouten-defect',
            not failures,
            '; '.join(failures) or None,
            '1/2 [P,P](mu,nu,gamma) = <[P_mu,P_nu] - P~[mu,nu]_P, gamma>',
        ),
    )
    reports.append(derivation_check(A, right, seed))
    return reports


def check_bialgebroid(A: Algebroid, P: FiberMultivector, seed: int = 0) -> CheckReport:
    """(A, A_P) is a Lie bialgebroid; needs P Poisson for A"""
    if not is_poisson_for(A, P).passed:
        raise PreconditionError('P is not a Poisson tensor for A')
    rows = bialgebroid_checks(A, P, seed)
    failed = [r for r in rows if not r.passed]
    return CheckReport(
        'lie-bialgebroid',
        not failed,
        '; '.join(f'{r.name}: {r.witness}' for r in failed) or None,
        ', '.join(r.name for r in rows),
    )


def diagram_report(
    A: Algebroid,
    P: FiberMultivector,
    N: EndoTensor,
    seed: int = 0,
) -> list[CheckReport]:
    """
    The square of Poisson maps: -P~ on the top and bottom, N* on the left,
    N on the right, and the four candidate bialgebroid pairs
    """
    _require_lie(A, 'the diagram report')
    _require_bivector(A, P)
    lam = lambda_tensor(A)
    lam_n = lambda_n(A, N)
    lift_p = complete_lift(A, P)
    lift_p_n = space_schouten(j_field(N, lift_p.total), lift_p)
    minus_p = sharp_map(P)
    reports = [
        _report('poisson:Lambda', space_schouten(lam, lam)),
        _report('poisson:Lambda_N', space_schouten(lam_n, lam_n)),
        _report('poisson:d_T P', space_schouten(lift_p, lift_p)),
        _report('poisson:(d_T P)_N', space_schouten(lift_p_n, lift_p_n)),
    ]
    for name, phi, t1, t2 in (
        ('related:top', minus_p, lam, lift_p),
        ('related:left', dual_endo_map(N), lam, lam_n),
        ('related:right', endo_map(N), lift_p, lift_p_n),
        ('related:bottom', minus_p, lam_n, lift_p_n),
    ):
        result = are_related(phi, t1, t2)
        reports.append(CheckReport(name, result.related, result.witness))
    j_related = are_related(minus_p, j_field(N, lam.total), j_field(N, lift_p.total))
    reports.append(
        CheckReport(
            'related:J',
            j_related.related,
            j_related.witness,
            'J-fields of N are -P~-related',
            informational=True,
        ),
    )

    commutes = maps_equal(compose(minus_p, endo_map(N)), compose(dual_endo_map(N), minus_p))
    reports.append(
        CheckReport(
            'commutes',
            commutes,
            None if commutes else 'N o (-P~) != (-P~) o N*',
        ),
    )
    reports.append(
        _report('lift_NP', lift_p_n - complete_lift(A, np_bivector(P, N)), notes='(d_T P)_N = d_T(NP)'),
    )

    lefts = (('Lambda', A), ('Lambda_N', from_linear_tensor(lam_n)))
    rights = (('d_T P', lifted_algebroid(A, P)), ('(d_T P)_N', from_linear_tensor(lift_p_n)))
    for (left_name, left), (right_name, right) in itertools.product(lefts, rights):
        reports.append(derivation_check(left, right, seed, name=f'bialgebroid:{left_name}/{right_name}'))
    return reports
