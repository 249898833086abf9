"""Algebroids shared by the tests"""

import dataclasses
import functools
import itertools
import operator
import os

from hypothesis import strategies as st

from algkit.algebroid import Algebroid, EndoTensor, FiberForm, FiberMultivector, Section
from algkit.poly import Polynomial, VariableSpace, poly_sum

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')
SPACE = VariableSpace(('x1', 'x2'), 2)


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


@dataclasses.dataclass
class Example:
    A: Algebroid
    P: FiberMultivector
    N: EndoTensor

    @property
    def space(self) -> VariableSpace:
        return self.A.space


def ex4() -> Example:
    """4-dimensional Lie algebra [e1, e2] = e3 over a point, P = e2^e4, N = diag(-1,1,1,1)"""
    space = VariableSpace((), 4)
    A = Algebroid.from_brackets(space, {(0, 1): {2: 1}})
    return Example(
        A,
        FiberMultivector.basis(space, 1, 3),
        EndoTensor.diagonal(space, [-1, 1, 1, 1]),
    )


def tm2() -> Example:
    """Tangent bundle of the plane, P = x1 e1^e2"""
    space = VariableSpace(('x1', 'x2'), 2)
    A = Algebroid.from_brackets(space, anchor_left={(0, 0): 1, (1, 1): 1})
    return Example(
        A,
        FiberMultivector.basis(space, 0, 1).scale(space.x(0)),
        EndoTensor.diagonal(space, [2, 3]),
    )


def sl2() -> Example:
    """sl(2): [e1,e2] = 2e2, [e1,e3] = -2e3, [e2,e3] = e1; P = e2^e3, N = e1 (x) eps1"""
    space = VariableSpace((), 3)
    A = Algebroid.from_brackets(space, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}})
    return Example(
        A,
        FiberMultivector.basis(space, 1, 2),
        EndoTensor.of(space, [[1, 0, 0], [0, 0, 0], [0, 0, 0]]),
    )


def nonjac() -> Example:
    """Skew bracket [e1,e2] = e2, [e1,e3] = e3, [e2,e3] = e1 failing the Jacobi identity"""
    space = VariableSpace((), 3)
    A = Algebroid.from_brackets(space, {(0, 1): {1: 1}, (0, 2): {2: 1}, (1, 2): {0: 1}})
    return Example(
        A,
        FiberMultivector.basis(space, 1, 2),
        EndoTensor.identity(space),
    )


def abelian() -> Example:
    space = VariableSpace((), 2)
    A = Algebroid.from_brackets(space)
    return Example(
        A,
        FiberMultivector.basis(space, 0, 1).scale(3),
        EndoTensor.diagonal(space, [2, 2]),
    )


def lie_examples():
    """One of the Lie algebroids EX4, SL2 and TM2"""
    return st.sampled_from((ex4, sl2, tm2)).map(lambda make: make())


def _monomial(space: VariableSpace, powers: list[int]) -> Polynomial:
    factors = (space.x(a) ** k for a, k in enumerate(powers))
    return functools.reduce(operator.mul, factors, space.one())


@st.composite
def polynomials(draw, space: VariableSpace = SPACE, max_degree: int = 2) -> Polynomial:
    """Small integer polynomials in the base coordinates, constants over a point"""
    terms = draw(
        st.lists(
            st.tuples(
                st.integers(-5, 5),
                st.lists(
                    st.integers(0, max_degree),
                    min_size=space.base_dim,
                    max_size=space.base_dim,
                ),
            ),
            max_size=4,
        ),
    )
    return poly_sum(space, (c * _monomial(space, powers) for c, powers in terms))


@st.composite
def sections(draw, space: VariableSpace = SPACE, max_degree: int = 2) -> Section:
    comps = [draw(polynomials(space, max_degree)) for _ in range(space.rank)]
    return Section.of(space, comps)


@st.composite
def one_forms(draw, space: VariableSpace = SPACE, max_degree: int = 2) -> FiberForm:
    return FiberForm(
        space,
        1,
        {(i,): draw(polynomials(space, max_degree)) for i in range(space.rank)},
    )


@st.composite
def multivectors(
    draw,
    space: VariableSpace,
    degree: int,
    max_degree: int = 1,
) -> FiberMultivector:
    return FiberMultivector(
        space,
        degree,
        {
            key: draw(polynomials(space, max_degree))
            for key in itertools.combinations(range(space.rank), degree)
        },
    )


def bivectors(space: VariableSpace, max_degree: int = 1):
    return multivectors(space, 2, max_degree)


@st.composite
def endomorphisms(draw, space: VariableSpace = SPACE) -> EndoTensor:
    """Endomorphisms with affine entries in the base coordinates"""
    n = space.rank
    return EndoTensor(
        space,
        tuple(
            tuple(draw(polynomials(space, max_degree=1)) for _ in range(n))
            for _ in range(n)
        ),
    )


@st.composite
def diagonal_endomorphisms(draw, space: VariableSpace) -> EndoTensor:
    """Constant diagonal endomorphisms with entries 0, 1 or 2, repeats are common"""
    return EndoTensor.diagonal(
        space,
        draw(st.lists(st.integers(0, 2), min_size=space.rank, max_size=space.rank)),
    )
