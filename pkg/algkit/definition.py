"""
Algebroid definition files: JSON with a fixed skeleton and polynomial
coefficient expressions. Every error names the field it comes from,
e.g. brackets[0].outputs[1].coeff.
"""

import dataclasses
import json
from typing import Any

from algkit.algebroid import Algebroid, EndoTensor, FiberMultivector, validate
from algkit.exceptions import (
    AlgkitError,
    IndexRangeError,
    ParseError,
    SemanticError,
    SkewViolationError,
    TensorKindError,
    UnknownIdentifierError,
    UnknownTensorError,
)
from algkit.poly import Polynomial, VariableKind, VariableSpace, parse_poly

MULTIVECTOR = 'multivector'
ENDOMORPHISM = 'endomorphism'
IDENTITY = 'Id'


@dataclasses.dataclass
class DefinitionFile:
    """The raw fields of a definition file, after schema checks"""

    name: str
    base_coords: list[str]
    rank: int
    skew: bool
    brackets: list[dict[str, Any]]
    anchor_left: list[dict[str, Any]]
    anchor_right: list[dict[str, Any]] | None
    tensors: dict[str, dict[str, Any]]

    def to_json(self) -> str:
        data: dict[str, Any] = {
            'name': self.name,
            'base_coords': self.base_coords,
            'rank': self.rank,
            'skew': self.skew,
            'brackets': self.brackets,
            'anchor_left': self.anchor_left,
            'tensors': self.tensors,
        }
        if self.anchor_right is not None:
            data['anchor_right'] = self.anchor_right
        return json.dumps(data, indent=2)


@dataclasses.dataclass
class Definition:
    file: DefinitionFile
    space: VariableSpace
    algebroid: Algebroid
    tensors: dict[str, FiberMultivector | EndoTensor]

    def multivector(self, name: str) -> FiberMultivector:
        tensor = self._get(name)
        if not isinstance(tensor, FiberMultivector):
            raise TensorKindError(f'{name} is an {ENDOMORPHISM}, expected a {MULTIVECTOR}')
        return tensor

    def endomorphism(self, name: str) -> EndoTensor:
        tensor = self._get(name)
        if not isinstance(tensor, EndoTensor):
            raise TensorKindError(f'{name} is a {MULTIVECTOR}, expected an {ENDOMORPHISM}')
        return tensor

    def _get(self, name: str):
        if name not in self.tensors:
            known = ', '.join(sorted(self.tensors)) or 'none'
            raise UnknownTensorError(f'no tensor named {name!r} (known: {known})')
        return self.tensors[name]


def _expect(value: Any, kind: type | tuple[type, ...], path: str, what: str) -> Any:
    # bool is an int subclass; keep them apart
    if isinstance(value, bool) and kind is int:
        raise ParseError(f'expected {what}', path=path)
    if not isinstance(value, kind):
        raise ParseError(f'expected {what}', path=path)
    return value


def _field(obj: dict, key: str, kind, path: str, what: str, default: Any = ...) -> Any:
    if key not in obj:
        if default is ...:
            raise ParseError(f'missing field {key!r}', path=path or None)
        return default
    return _expect(obj[key], kind, f'{path}.{key}' if path else key, what)


def _index(obj: dict, key: str, upper: int, path: str, what: str) -> int:
    """1-based index in 1..upper, returned 0-based"""
    value = _field(obj, key, int, path, 'an integer')
    if not 1 <= value <= upper:
        raise IndexRangeError(f'{what} {value} is outside 1..{upper}', path=f'{path}.{key}')
    return value - 1


def _coefficient(obj: dict, path: str, space: VariableSpace) -> Polynomial:
    src = _field(obj, 'coeff', (str, int), path, 'an expression string')
    where = f'{path}.coeff'
    try:
        value = parse_poly(str(src), space)
    except AlgkitError as e:
        raise e.at(where) from e
    if not value.kinds() <= {VariableKind.BASE}:
        raise UnknownIdentifierError(
            'coefficients may only use the base coordinates',
            path=where,
        )
    return value


def _entries(data: dict, key: str) -> list[dict]:
    items = _field(data, key, list, '', 'a list', default=[])
    for n, item in enumerate(items):
        _expect(item, dict, f'{key}[{n}]', 'an object')
    return items


def parse_definition(src: str) -> Definition:
    try:
        data = json.loads(src)
    except json.JSONDecodeError as e:
        raise ParseError(f'invalid JSON: {e.msg} (at position {e.pos})') from e
    _expect(data, dict, '$', 'a JSON object')

    name = _field(data, 'name', str, '', 'a string')
    base_coords = _field(data, 'base_coords', list, '', 'a list of names')
    for n, coord in enumerate(base_coords):
        _expect(coord, str, f'base_coords[{n}]', 'a string')
    rank = _field(data, 'rank', int, '', 'an integer')
    if rank < 1:
        raise SemanticError('rank must be positive', path='rank')
    skew = _field(data, 'skew', bool, '', 'true or false')
    try:
        space = VariableSpace(tuple(base_coords), rank)
    except AlgkitError as e:
        raise SemanticError(e.message, path='base_coords') from e
    m = space.base_dim

    file = DefinitionFile(
        name=name,
        base_coords=list(base_coords),
        rank=rank,
        skew=skew,
        brackets=_entries(data, 'brackets'),
        anchor_left=_entries(data, 'anchor_left'),
        anchor_right=_entries(data, 'anchor_right') if 'anchor_right' in data else None,
        tensors=_field(data, 'tensors', dict, '', 'an object', default={}),
    )

    brackets: dict[tuple[int, int], dict[int, Polynomial]] = {}
    for n, entry in enumerate(file.brackets):
        path = f'brackets[{n}]'
        i = _index(entry, 'i', rank, path, 'section index')
        j = _index(entry, 'j', rank, path, 'section index')
        if skew and i >= j:
            raise SkewViolationError(
                'skew files only list brackets with i < j',
                path=path,
            )
        if (i, j) in brackets:
            raise SemanticError(f'bracket [e{i + 1}, e{j + 1}] is given twice', path=path)
        outputs: dict[int, Polynomial] = {}
        for o, output in enumerate(_field(entry, 'outputs', list, path, 'a list')):
            out_path = f'{path}.outputs[{o}]'
            _expect(output, dict, out_path, 'an object')
            k = _index(output, 'k', rank, out_path, 'section index')
            coeff = _coefficient(output, out_path, space)
            outputs[k] = outputs.get(k, space.zero()) + coeff
        brackets[(i, j)] = outputs

    def anchor(entries: list[dict], key: str) -> dict[tuple[int, int], Polynomial]:
        out: dict[tuple[int, int], Polynomial] = {}
        for n, entry in enumerate(entries):
            path = f'{key}[{n}]'
            i = _index(entry, 'i', rank, path, 'section index')
            a = _index(entry, 'a', m, path, 'base coordinate index')
            out[(i, a)] = out.get((i, a), space.zero()) + _coefficient(entry, path, space)
        return out

    left = anchor(file.anchor_left, 'anchor_left')
    right = None if file.anchor_right is None else anchor(file.anchor_right, 'anchor_right')
    if skew and right is not None:
        nonzero = {k: v for k, v in left.items() if v}
        if {k: v for k, v in right.items() if v} != nonzero:
            raise SkewViolationError(
                'skew algebroids have a single anchor; anchor_right must equal anchor_left',
                path='anchor_right',
            )
        right = None

    algebroid = Algebroid.from_brackets(space, brackets, left, right, skew=skew)
    report = validate(algebroid)
    if not report.valid:
        raise SemanticError('; '.join(report.issues) or 'invalid algebroid data')

    tensors = {
        tensor_name: _parse_tensor(body, f'tensors.{tensor_name}', space)
        for tensor_name, body in file.tensors.items()
    }
    tensors.setdefault(IDENTITY, EndoTensor.identity(space))
    return Definition(file, space, algebroid, tensors)


def _parse_tensor(body: Any, path: str, space: VariableSpace) -> FiberMultivector | EndoTensor:
    _expect(body, dict, path, 'an object')
    kind = _field(body, 'kind', str, path, 'a string')
    terms = _field(body, 'terms', list, path, 'a list')
    n = space.rank
    if kind == MULTIVECTOR:
        degree = _field(body, 'degree', int, path, 'an integer')
        if not 0 <= degree <= n:
            raise IndexRangeError(f'degree {degree} is outside 0..{n}', path=f'{path}.degree')
        comps: dict[tuple[int, ...], Polynomial] = {}
        for t, term in enumerate(terms):
            term_path = f'{path}.terms[{t}]'
            _expect(term, dict, term_path, 'an object')
            indices = _field(term, 'indices', list, term_path, 'a list of indices')
            if len(indices) != degree:
                raise SemanticError(
                    f'{len(indices)} indices given for a degree {degree} multivector',
                    path=f'{term_path}.indices',
                )
            key = []
            for a, index in enumerate(indices):
                index_path = f'{term_path}.indices[{a}]'
                _expect(index, int, index_path, 'an integer')
                if not 1 <= index <= n:
                    raise IndexRangeError(f'section index {index} is outside 1..{n}', path=index_path)
                key.append(index - 1)
            if len(set(key)) != len(key):
                raise SemanticError('repeated index in a wedge product', path=f'{term_path}.indices')
            coeff = _coefficient(term, term_path, space)
            # later terms add to earlier ones, with the sign of their ordering
            comps_term = FiberMultivector(space, degree, {tuple(key): coeff})
            for k, v in comps_term.items():
                comps[k] = comps[k] + v if k in comps else v
        return FiberMultivector(space, degree, comps)
    if kind == ENDOMORPHISM:
        rows = [[space.zero() for _ in range(n)] for _ in range(n)]
        for t, term in enumerate(terms):
            term_path = f'{path}.terms[{t}]'
            _expect(term, dict, term_path, 'an object')
            row = _index(term, 'row', n, term_path, 'row')
            col = _index(term, 'col', n, term_path, 'column')
            rows[row][col] = rows[row][col] + _coefficient(term, term_path, space)
        return EndoTensor(space, tuple(tuple(r) for r in rows))
    raise ParseError(
        f'unknown tensor kind {kind!r}, expected {MULTIVECTOR} or {ENDOMORPHISM}',
        path=f'{path}.kind',
    )
