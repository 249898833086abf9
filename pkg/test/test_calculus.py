import dataclasses
import itertools
import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from algkit.algebroid import (
    EndoTensor,
    FiberForm,
    FiberMultivector,
    Section,
    bracket_sections,
    deformed_algebroid,
)
from algkit.calculus import (
    VectorValuedForm,
    apply_iN,
    deformed_bracket,
    deformed_differential,
    evaluate_form,
    exterior_derivative,
    fn_bracket_11,
    interior_form,
    interior_section,
    jacobi_defect,
    lie_derivative,
    nested_operator_bracket,
    nijenhuis_torsion,
    operator_bracket,
    pair,
    schouten,
    sharp,
    torsion_value,
)
from algkit.exceptions import DegreeError, PreconditionError
from algkit.poly import VariableSpace
from test.structures import (
    endomorphisms,
    ex4,
    lie_examples,
    multivectors,
    nonjac,
    polynomials,
    sl2,
    tm2,
)


def eps(space: VariableSpace, *indices: int) -> FiberForm:
    return FiberForm.basis(space, *indices)


def e(space: VariableSpace, *indices: int) -> FiberMultivector:
    return FiberMultivector.basis(space, *indices)


class TestPairing(unittest.TestCase):
    def test_dual_basis(self):
        example = ex4()
        space = example.space
        self.assertEqual(pair(example.P, [eps(space, 1), eps(space, 3)]), 1)
        self.assertEqual(pair(example.P, [eps(space, 3), eps(space, 1)]), -1)
        self.assertEqual(pair(example.P, [eps(space, 0), eps(space, 3)]), 0)

    def test_linearity(self):
        space = tm2().space
        u = e(space, 0, 1).scale(space.x(0))
        self.assertEqual(pair(u, [eps(space, 0), eps(space, 1)]), space.x(0))

    def test_degree_mismatch(self):
        example = ex4()
        with self.assertRaises(DegreeError):
            pair(example.P, [eps(example.space, 1)])

    def test_evaluate_form(self):
        space = tm2().space
        omega = eps(space, 0, 1).scale(space.x(1))
        x = Section.of(space, [1, space.x(0)])
        y = Section.basis(space, 0)
        self.assertEqual(evaluate_form(omega, [x, y]), -space.x(0) * space.x(1))


class TestInterior(unittest.TestCase):
    def test_contractions(self):
        example = ex4()
        space = example.space
        self.assertEqual(interior_form(eps(space, 1), example.P), e(space, 3))
        self.assertEqual(interior_form(eps(space, 3), example.P), -e(space, 1))
        self.assertTrue(interior_form(eps(space, 2), example.P).is_zero)

        tm = tm2().space
        u = e(tm, 0, 1).scale(tm.x(0))
        self.assertEqual(interior_form(eps(tm, 0), u), e(tm, 1).scale(tm.x(0)))

    def test_sharp(self):
        example = ex4()
        space = example.space
        self.assertEqual(sharp(eps(space, 1), example.P), Section.basis(space, 3))
        with self.assertRaises(DegreeError):
            sharp(eps(space, 1), e(space, 1))

    def test_function_contraction(self):
        space = ex4().space
        with self.assertRaises(DegreeError):
            interior_form(eps(space, 0), FiberMultivector.function(space.one()))


class TestSchouten(unittest.TestCase):
    def test_poisson_bivector(self):
        example = ex4()
        self.assertTrue(schouten(example.A, example.P, example.P).is_zero)

    def test_sl2(self):
        example = sl2()
        value = schouten(example.A, example.P, example.P)
        self.assertEqual(str(value), '2*e1^e2^e3')

    def test_degree_zero(self):
        example = tm2()
        space = example.space
        f = FiberMultivector.function(space.x(0) ** 2)
        x = e(space, 0)
        self.assertEqual(schouten(example.A, x, f), FiberMultivector.function(2 * space.x(0)))
        self.assertEqual(schouten(example.A, f, x), FiberMultivector.function(-2 * space.x(0)))
        self.assertEqual(schouten(example.A, f, f).degree, -1)

    def test_sections(self):
        example = ex4()
        space = example.space
        self.assertEqual(schouten(example.A, e(space, 0), e(space, 1)), e(space, 2))

    def test_needs_skew(self):
        A = dataclasses.replace(ex4().A, skew=False)
        with self.assertRaises(PreconditionError):
            schouten(A, e(A.space, 0), e(A.space, 1))

    def test_graded_antisymmetry_and_leibniz(self):
        example = sl2()
        A, space = example.A, example.space
        terms = [
            e(space, 0),
            e(space, 1, 2),
            e(space, 0, 2) + e(space, 1, 2),
            e(space, 0, 1, 2),
        ]
        for u, v, w in itertools.product(terms, repeat=3):
            p, q = u.degree, v.degree
            uv = schouten(A, u, v)
            vu = schouten(A, v, u)
            sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
            self.assertEqual(uv, vu.scale(sign))
            lhs = schouten(A, u, v ^ w)
            rhs = (uv ^ w) + (v ^ schouten(A, u, w)).scale((-1) ** ((p - 1) * q))
            self.assertEqual(lhs, rhs)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_antisymmetry_and_leibniz_with_coefficients(self, data):
        example = data.draw(lie_examples())
        A, space = example.A, example.space
        degrees = st.integers(1, min(3, space.rank))
        u, v, w = (data.draw(multivectors(space, data.draw(degrees))) for _ in range(3))
        p, q = u.degree, v.degree
        uv = schouten(A, u, v)
        sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
        self.assertEqual(uv, schouten(A, v, u).scale(sign))
        lhs = schouten(A, u, v ^ w)
        rhs = (uv ^ w) + (v ^ schouten(A, u, w)).scale((-1) ** ((p - 1) * q))
        self.assertEqual(lhs, rhs)

    def test_graded_jacobi(self):
        for example, holds in ((sl2(), True), (ex4(), True), (nonjac(), False)):
            A, space = example.A, example.space
            x, y, z = (e(space, i) for i in range(3))
            total = (
                schouten(A, x, schouten(A, y, z))
                - schouten(A, schouten(A, x, y), z)
                - schouten(A, y, schouten(A, x, z))
            )
            self.assertEqual(total.is_zero, holds)


class TestExteriorDerivative(unittest.TestCase):
    def test_ex4(self):
        example = ex4()
        space = example.space
        self.assertEqual(str(exterior_derivative(example.A, eps(space, 2))), '-eps1^eps2')
        self.assertTrue(exterior_derivative(example.A, eps(space, 0)).is_zero)

    def test_de_rham(self):
        example = tm2()
        space = example.space
        omega = eps(space, 1).scale(space.x(0))
        self.assertEqual(exterior_derivative(example.A, omega), eps(space, 0, 1))
        f = FiberForm.function(space.x(0) * space.x(1))
        self.assertEqual(str(exterior_derivative(example.A, f)), 'x2*eps1 + x1*eps2')

    def test_square_vanishes_iff_lie(self):
        for example, holds in ((sl2(), True), (ex4(), True), (nonjac(), False)):
            A, space = example.A, example.space
            twice = exterior_derivative(A, exterior_derivative(A, eps(space, 0)))
            self.assertEqual(twice.is_zero, holds)

    def test_chevalley_formula(self):
        for example in (sl2(), ex4()):
            A, space = example.A, example.space
            for i, j in itertools.combinations(range(space.rank), 2):
                x, y = Section.basis(space, i), Section.basis(space, j)
                for k in range(space.rank):
                    value = evaluate_form(exterior_derivative(A, eps(space, k)), [x, y])
                    self.assertEqual(value, -A.c[i][j][k])

    @settings(max_examples=100, deadline=None)
    @given(polynomials())
    def test_square_vanishes_on_functions(self, f):
        example = tm2()
        omega = FiberForm.function(f)
        twice = exterior_derivative(example.A, exterior_derivative(example.A, omega))
        self.assertTrue(twice.is_zero)


class TestLieDerivative(unittest.TestCase):
    def test_ex4(self):
        example = ex4()
        space = example.space
        value = lie_derivative(example.A, Section.basis(space, 0), eps(space, 2))
        self.assertEqual(value, -eps(space, 1))

    def test_classical(self):
        example = tm2()
        space = example.space
        value = lie_derivative(example.A, Section.basis(space, 0), eps(space, 0).scale(space.x(0)))
        self.assertEqual(value, eps(space, 0))
        f = space.x(0) ** 2
        self.assertEqual(lie_derivative(example.A, Section.basis(space, 0), f), 2 * space.x(0))

    def test_multivectors(self):
        example = ex4()
        space = example.space
        value = lie_derivative(example.A, Section.basis(space, 0), e(space, 1, 3))
        self.assertEqual(value, e(space, 2, 3))

    @settings(max_examples=100, deadline=None)
    @given(polynomials(), polynomials(), polynomials(), polynomials())
    def test_cartan_identity(self, a, b, c, d):
        example = tm2()
        A, space = example.A, example.space
        x = Section.of(space, [a, b])
        y = Section.basis(space, 1).scale(space.x(0))
        mu = FiberForm(space, 1, {(0,): c, (1,): d})
        lhs = lie_derivative(A, x, interior_section(y, mu)) - interior_section(
            y,
            lie_derivative(A, x, mu),
        )
        self.assertEqual(lhs.degree, 0)
        rhs = interior_section(bracket_sections(A, x, y), mu)
        self.assertEqual(lhs, rhs)


class TestEndomorphismOperators(unittest.TestCase):
    def test_apply_in(self):
        example = ex4()
        space, N = example.space, example.N
        self.assertEqual(apply_iN(N, example.P), example.P.scale(2))
        self.assertEqual(apply_iN(N, eps(space, 0)), -eps(space, 0))
        x = Section.of(space, [1, 2, 3, 4])
        self.assertEqual(apply_iN(EndoTensor.identity(space), x), x)
        self.assertFalse(apply_iN(N, space.one()))

    def test_deformed_bracket(self):
        example = ex4()
        A, space, N = example.A, example.space, example.N
        e1, e2 = Section.basis(space, 0), Section.basis(space, 1)
        self.assertEqual(deformed_bracket(A, N, e1, e2), -Section.basis(space, 2))
        self.assertEqual(deformed_bracket(A, EndoTensor.identity(space), e1, e2), Section.basis(space, 2))
        zero = EndoTensor.diagonal(space, [0, 0, 0, 0])
        self.assertTrue(deformed_bracket(A, zero, e1, e2).is_zero)

    def test_deformed_differential(self):
        example = ex4()
        A, space, N = example.A, example.space, example.N
        self.assertEqual(deformed_differential(A, N, eps(space, 2)), eps(space, 0, 1))
        zero = EndoTensor.diagonal(space, [0, 0, 0, 0])
        self.assertTrue(deformed_differential(A, zero, eps(space, 2)).is_zero)

    @settings(max_examples=100, deadline=None)
    @given(endomorphisms(), polynomials(), polynomials(), polynomials())
    def test_deformed_differential_is_the_deformed_algebroid_differential(self, N, f, a, b):
        example = tm2()
        A, space = example.A, example.space
        deformed = deformed_algebroid(A, N)
        function = FiberForm.function(f)
        self.assertEqual(deformed_differential(A, N, function), exterior_derivative(deformed, function))
        mu = FiberForm(space, 1, {(0,): a, (1,): b})
        self.assertEqual(deformed_differential(A, N, mu), exterior_derivative(deformed, mu))


class TestTorsion(unittest.TestCase):
    def test_ex4_is_nijenhuis(self):
        example = ex4()
        self.assertTrue(nijenhuis_torsion(example.A, example.N).is_zero)
        self.assertTrue(fn_bracket_11(example.A, example.N, example.N).is_zero)

    def test_sl2_projection(self):
        example = sl2()
        A, N, space = example.A, example.N, example.space
        torsion = nijenhuis_torsion(A, N)
        self.assertEqual(str(torsion), '(e2,e3) -> -e1')
        self.assertEqual(
            torsion_value(A, N, Section.basis(space, 1), Section.basis(space, 2)),
            -Section.basis(space, 0),
        )
        fn = fn_bracket_11(A, N, N)
        self.assertEqual(fn.value(1, 2), Section.basis(space, 0).scale(-2))

    def test_identity_and_zero(self):
        example = sl2()
        A, space = example.A, example.space
        identity = EndoTensor.identity(space)
        self.assertTrue(nijenhuis_torsion(A, identity).is_zero)
        self.assertTrue(fn_bracket_11(A, identity, identity).is_zero)
        zero = EndoTensor.diagonal(space, [0, 0, 0])
        self.assertTrue(fn_bracket_11(A, zero, example.N).is_zero)

    def test_vector_valued_form(self):
        space = sl2().space
        form = VectorValuedForm.from_values(space, {(0, 2): Section.basis(space, 1)})
        self.assertEqual(form.as_mapping(), {(0, 2): Section.basis(space, 1)})
        self.assertEqual(form.value(2, 0), -Section.basis(space, 1))
        self.assertEqual(str(form - form), '0')

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_torsion_is_half_the_fn_square(self, data):
        example = data.draw(lie_examples())
        A, N = example.A, data.draw(endomorphisms(example.space))
        self.assertEqual(nijenhuis_torsion(A, N), fn_bracket_11(A, N, N).scale(Fraction(1, 2)))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_nested_operator_identity(self, data):
        example = data.draw(lie_examples())
        A, N = example.A, data.draw(endomorphisms(example.space))
        expected = operator_bracket(A, N.square()) - nijenhuis_torsion(A, N).scale(2)
        self.assertEqual(nested_operator_bracket(A, N), expected)

    def test_torsion_is_function_linear(self):
        example = tm2()
        A, space = example.A, example.space
        x1, x2 = space.x(0), space.x(1)
        N = EndoTensor.of(space, [[x1, x2], [0, 1]])
        e1, e2 = Section.basis(space, 0), Section.basis(space, 1)
        f = x1 * x2 + 1
        self.assertEqual(torsion_value(A, N, e1.scale(f), e2), torsion_value(A, N, e1, e2).scale(f))

    def test_nijenhuis_deformation_is_lie(self):
        example = ex4()
        A, N, space = example.A, example.N, example.space
        self.assertTrue(nijenhuis_torsion(A, N).is_zero)
        basis = [Section.basis(space, i) for i in range(space.rank)]
        for x, y, z in itertools.combinations(basis, 3):
            self.assertTrue(jacobi_defect(A, N, x, y, z).is_zero)
