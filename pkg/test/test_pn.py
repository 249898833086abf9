import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from algkit.algebroid import EndoTensor, FiberForm, FiberMultivector
from algkit.exceptions import DegreeError, PreconditionError
from algkit.pn import (
    CheckReport,
    bialgebroid_checks,
    check_bialgebroid,
    check_pn,
    coupling_defect,
    diagram_report,
    is_nijenhuis,
    is_poisson_for,
    modified_yb,
    np_bivector,
    np_matrix_defect,
    sample_forms,
)
from test.structures import (
    abelian,
    bivectors,
    diagonal_endomorphisms,
    ex4,
    lie_examples,
    nonjac,
    one_forms,
    sl2,
    tm2,
)


def by_name(reports: list[CheckReport]) -> dict[str, CheckReport]:
    return {r.name: r for r in reports}


class TestPoisson(unittest.TestCase):
    def test_poisson(self):
        for example in (ex4(), tm2(), abelian()):
            self.assertTrue(is_poisson_for(example.A, example.P).passed)

    def test_sl2_is_not_poisson(self):
        example = sl2()
        report = is_poisson_for(example.A, example.P)
        self.assertFalse(report.passed)
        self.assertEqual(report.witness, '2*e1^e2^e3')
        self.assertEqual(report.as_dict()['pass'], False)

    def test_modified_yang_baxter(self):
        # sl(2) is unimodular, so the lift of any top multivector vanishes
        example = sl2()
        self.assertTrue(modified_yb(example.A, example.P).passed)

    def test_preconditions(self):
        example = nonjac()
        with self.assertRaises(PreconditionError):
            is_poisson_for(example.A, example.P)
        with self.assertRaises(PreconditionError):
            modified_yb(example.A, example.P)
        with self.assertRaises(DegreeError):
            is_poisson_for(ex4().A, FiberMultivector.basis(ex4().space, 0))


class TestNijenhuis(unittest.TestCase):
    def test_ex4(self):
        example = ex4()
        report = is_nijenhuis(example.A, example.N)
        self.assertTrue(report.passed)
        self.assertEqual(report.notes, 'T_N = 0')

    def test_sl2_projection(self):
        example = sl2()
        report = is_nijenhuis(example.A, example.N)
        self.assertFalse(report.passed)
        self.assertEqual(report.witness, '(e2,e3) -> -e1')

    def test_identity(self):
        example = sl2()
        self.assertTrue(is_nijenhuis(example.A, EndoTensor.identity(example.space)).passed)


class TestPoissonNijenhuis(unittest.TestCase):
    def test_ex4(self):
        example = ex4()
        reports = check_pn(example.A, example.P, example.N)
        self.assertEqual(
            [r.name for r in reports],
            [
                'poisson',
                'nijenhuis',
                'condition-1',
                'condition-2',
                'condition-2-prime',
                'np-poisson',
                'poisson-nijenhuis',
            ],
        )
        rows = by_name(reports)
        self.assertTrue(rows['condition-1'].passed)
        self.assertEqual(rows['condition-2'].witness, '-4*y1*dy3^dy4')
        self.assertEqual(rows['condition-2-prime'].witness, '2*y1*dy3^dy4')
        self.assertTrue(rows['condition-2-prime'].informational)
        self.assertFalse(rows['poisson-nijenhuis'].passed)
        self.assertEqual(rows['poisson-nijenhuis'].witness, 'condition-2')

    def test_identity_is_always_compatible(self):
        example = ex4()
        reports = check_pn(example.A, example.P, EndoTensor.identity(example.space))
        self.assertTrue(all(r.passed for r in reports))

    def test_abelian(self):
        example = abelian()
        reports = check_pn(example.A, example.P, example.N)
        self.assertTrue(by_name(reports)['poisson-nijenhuis'].passed)

    def test_np(self):
        example = ex4()
        space, N = example.space, example.N
        self.assertEqual(np_bivector(example.P, N), example.P)
        self.assertEqual(np_matrix_defect(example.P, N), [])
        e12 = FiberMultivector.basis(space, 0, 1)
        defect = np_matrix_defect(e12, N)
        self.assertEqual([(i, j, str(v)) for i, j, v in defect], [(0, 1, '-2')])
        self.assertTrue(np_bivector(e12, N).is_zero)

    def test_condition_1_witness(self):
        example = ex4()
        e12 = FiberMultivector.basis(example.space, 0, 1)
        rows = by_name(check_pn(example.A, e12, example.N))
        self.assertFalse(rows['condition-1'].passed)
        self.assertEqual(rows['condition-1'].witness, '(NP+(NP)^t)[1,2] = -2')

    def test_needs_lie(self):
        example = nonjac()
        with self.assertRaises(PreconditionError):
            check_pn(example.A, example.P, example.N)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_compatible_pairs_give_a_poisson_np(self, data):
        example = data.draw(lie_examples())
        A, space = example.A, example.space
        P = data.draw(bivectors(space))
        N = data.draw(diagonal_endomorphisms(space))
        rows = by_name(check_pn(A, P, N))
        if all(rows[name].passed for name in ('poisson', 'condition-1', 'condition-2')):
            self.assertTrue(rows['np-poisson'].passed)
            self.assertTrue(is_poisson_for(A, np_bivector(P, N)).passed)

    def test_scalar_endomorphisms_are_compatible(self):
        example = tm2()
        N = EndoTensor.diagonal(example.space, [2, 2])
        rows = by_name(check_pn(example.A, example.P, N))
        for name in ('poisson', 'condition-1', 'condition-2', 'np-poisson'):
            self.assertTrue(rows[name].passed, name)


class TestBialgebroid(unittest.TestCase):
    def test_schouten_defect_vanishes(self):
        for example in (sl2(), ex4()):
            space = example.space
            forms = [FiberForm.basis(space, i) for i in range(3)]
            self.assertFalse(coupling_defect(example.A, example.P, *forms))
            self.assertFalse(coupling_defect(example.A, example.P, forms[1], forms[2], forms[0]))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_schouten_defect_vanishes_for_any_bivector(self, data):
        example = data.draw(lie_examples())
        A, space = example.A, example.space
        P = data.draw(bivectors(space))
        mu, nu, gamma = (data.draw(one_forms(space, max_degree=1)) for _ in range(3))
        self.assertFalse(coupling_defect(A, P, mu, nu, gamma))

    def test_poisson_gives_bialgebroid(self):
        for example in (ex4(), tm2()):
            rows = bialgebroid_checks(example.A, example.P)
            self.assertEqual([r.name for r in rows], ['differential', 'schouten-defect', 'derivation'])
            self.assertTrue(all(r.passed for r in rows))
            self.assertTrue(check_bialgebroid(example.A, example.P).passed)

    def test_needs_poisson(self):
        example = sl2()
        with self.assertRaises(PreconditionError):
            check_bialgebroid(example.A, example.P)

    def test_sample_forms_are_seeded(self):
        A = tm2().A
        self.assertEqual(sample_forms(A, 3), sample_forms(A, 3))
        mu, nu = sample_forms(A, 0)
        self.assertEqual((mu.degree, nu.degree), (1, 1))


class TestDiagram(unittest.TestCase):
    def test_ex4(self):
        example = ex4()
        rows = by_name(diagram_report(example.A, example.P, example.N))
        self.assertEqual(rows['related:right'].witness, '4*y1*dy3^dy4')
        self.assertEqual(rows['lift_NP'].witness, '2*y1*dy3^dy4')
        failing = sorted(name for name, row in rows.items() if not row.passed)
        self.assertEqual(failing, ['lift_NP', 'related:right'])
        self.assertTrue(rows['related:J'].passed)
        self.assertTrue(rows['related:J'].informational)
        self.assertIn('bialgebroid:Lambda_N/(d_T P)_N', rows)

    def test_identity(self):
        example = ex4()
        rows = diagram_report(example.A, example.P, EndoTensor.identity(example.space))
        self.assertTrue(all(r.passed for r in rows))
