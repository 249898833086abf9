import json
import unittest

from algkit.algebroid import EndoTensor
from algkit.definition import parse_definition
from algkit.exceptions import (
    AlgkitError,
    ExpressionSyntaxError,
    IndexRangeError,
    ParseError,
    SemanticError,
    SkewViolationError,
    TensorKindError,
    UnknownIdentifierError,
    UnknownTensorError,
)
from test.structures import data_path, ex4, tm2


def read(name: str) -> str:
    with open(data_path(name), encoding='utf-8') as f:
        return f.read()


def definition(**overrides) -> str:
    data = {
        'name': 'test',
        'base_coords': ['x1'],
        'rank': 2,
        'skew': True,
        'brackets': [],
        'anchor_left': [],
        'tensors': {},
    }
    data.update(overrides)
    return json.dumps(data)


class TestParseDefinition(unittest.TestCase):
    def test_ex4(self):
        parsed = parse_definition(read('ex4.json'))
        self.assertEqual(parsed.file.name, 'EX4')
        self.assertEqual(parsed.algebroid, ex4().A)
        self.assertEqual(parsed.multivector('P'), ex4().P)
        self.assertEqual(parsed.endomorphism('N'), ex4().N)
        self.assertEqual(sorted(parsed.tensors), ['Id', 'N', 'P'])

    def test_tm2(self):
        parsed = parse_definition(read('tm2.json'))
        self.assertEqual(parsed.algebroid, tm2().A)
        self.assertEqual(parsed.multivector('P'), tm2().P)
        self.assertEqual(parsed.endomorphism('K'), tm2().N)

    def test_non_skew(self):
        parsed = parse_definition(read('pseudo.json'))
        A = parsed.algebroid
        self.assertFalse(A.skew)
        self.assertNotEqual(A.anchor_left, A.anchor_right)
        self.assertEqual(str(A.c[1][0][1]), 'x1')
        self.assertTrue(A.c[0][1][1].is_zero)

    def test_identity_is_always_available(self):
        parsed = parse_definition(read('tm2.json'))
        self.assertNotIn('Id', parsed.file.tensors)
        self.assertEqual(parsed.endomorphism('Id'), EndoTensor.identity(parsed.space))

    def test_to_json_round_trips(self):
        parsed = parse_definition(read('ex4.json'))
        again = parse_definition(parsed.file.to_json())
        self.assertEqual(again.algebroid, parsed.algebroid)
        self.assertEqual(again.tensors, parsed.tensors)

    def test_wedge_order_sets_the_sign(self):
        tensors = {
            'Q': {
                'kind': 'multivector',
                'degree': 2,
                'terms': [
                    {'indices': [2, 1], 'coeff': 'x1'},
                    {'indices': [1, 2], 'coeff': '1'},
                ],
            },
        }
        parsed = parse_definition(definition(tensors=tensors))
        self.assertEqual(str(parsed.multivector('Q')), '(-x1 + 1)*e1^e2')

    def test_matching_anchor_right_is_accepted(self):
        anchor = [{'i': 1, 'a': 1, 'coeff': 'x1'}]
        parsed = parse_definition(definition(anchor_left=anchor, anchor_right=anchor))
        self.assertEqual(parsed.algebroid.anchor_left, parsed.algebroid.anchor_right)


class TestDefinitionErrors(unittest.TestCase):
    def test_malformed_json(self):
        with self.assertRaises(ParseError) as ctx:
            parse_definition(read('malformed.json'))
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_schema(self):
        with self.assertRaises(ParseError) as ctx:
            parse_definition(definition(rank='two'))
        self.assertEqual(ctx.exception.path, 'rank')
        with self.assertRaises(ParseError) as ctx:
            parse_definition(json.dumps({'name': 'x'}))
        self.assertIn('base_coords', ctx.exception.message)
        with self.assertRaises(ParseError):
            parse_definition(definition(skew=1))
        with self.assertRaises(ParseError):
            parse_definition('[]')

    def test_unknown_identifier_carries_path(self):
        with self.assertRaises(UnknownIdentifierError) as ctx:
            parse_definition(read('unknown_coord.json'))
        self.assertEqual(ctx.exception.path, 'brackets[0].outputs[0].coeff')
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_fiber_coordinates_are_not_coefficients(self):
        brackets = [{'i': 1, 'j': 2, 'outputs': [{'k': 1, 'coeff': 'y1'}]}]
        with self.assertRaises(UnknownIdentifierError):
            parse_definition(definition(brackets=brackets))

    def test_expression_syntax(self):
        brackets = [{'i': 1, 'j': 2, 'outputs': [{'k': 1, 'coeff': 'x1 +'}]}]
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse_definition(definition(brackets=brackets))
        self.assertEqual(ctx.exception.path, 'brackets[0].outputs[0].coeff')
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_index_range(self):
        brackets = [{'i': 1, 'j': 3, 'outputs': []}]
        with self.assertRaises(IndexRangeError) as ctx:
            parse_definition(definition(brackets=brackets))
        self.assertEqual(ctx.exception.path, 'brackets[0].j')
        with self.assertRaises(IndexRangeError):
            parse_definition(definition(anchor_left=[{'i': 1, 'a': 2, 'coeff': '1'}]))

    def test_skew_files_list_i_below_j(self):
        for i, j in ((2, 1), (1, 1)):
            brackets = [{'i': i, 'j': j, 'outputs': [{'k': 1, 'coeff': '1'}]}]
            with self.assertRaises(SkewViolationError):
                parse_definition(definition(brackets=brackets))

    def test_skew_files_have_one_anchor(self):
        with self.assertRaises(SkewViolationError) as ctx:
            parse_definition(
                definition(
                    anchor_left=[{'i': 1, 'a': 1, 'coeff': '1'}],
                    anchor_right=[{'i': 2, 'a': 1, 'coeff': '1'}],
                ),
            )
        self.assertEqual(ctx.exception.path, 'anchor_right')

    def test_duplicate_bracket(self):
        entry = {'i': 1, 'j': 2, 'outputs': []}
        with self.assertRaises(SemanticError):
            parse_definition(definition(brackets=[entry, entry]))

    def test_bad_coordinates(self):
        with self.assertRaises(SemanticError) as ctx:
            parse_definition(definition(base_coords=['x1', 'x1']))
        self.assertEqual(ctx.exception.path, 'base_coords')

    def test_tensors(self):
        parsed = parse_definition(read('ex4.json'))
        with self.assertRaises(UnknownTensorError):
            parsed.multivector('Q')
        with self.assertRaises(TensorKindError):
            parsed.multivector('N')
        with self.assertRaises(TensorKindError):
            parsed.endomorphism('P')

    def test_bad_tensor_bodies(self):
        cases = [
            ({'kind': 'spinor', 'terms': []}, ParseError),
            ({'kind': 'multivector', 'degree': 3, 'terms': []}, IndexRangeError),
            (
                {'kind': 'multivector', 'degree': 2, 'terms': [{'indices': [1], 'coeff': '1'}]},
                SemanticError,
            ),
            (
                {'kind': 'multivector', 'degree': 2, 'terms': [{'indices': [1, 1], 'coeff': '1'}]},
                SemanticError,
            ),
            ({'kind': 'endomorphism', 'terms': [{'row': 3, 'col': 1, 'coeff': '1'}]}, IndexRangeError),
        ]
        for body, error in cases:
            with self.assertRaises(error):
                parse_definition(definition(tensors={'T': body}))

    def test_every_error_is_an_algkit_error(self):
        for src in ('{', definition(rank=0), definition(skew='yes')):
            with self.assertRaises(AlgkitError):
                parse_definition(src)
