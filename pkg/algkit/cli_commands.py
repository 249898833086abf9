"""
Verification commands: validate, lift, deform, torsion, pn-check and
bialgebroid-check, each reading one definition file and producing a Report
"""

import argparse
import logging

from algkit.algebroid import (
    anchor_failure,
    deformed_algebroid,
    is_lie,
    jacobi_failure,
    validate,
)
from algkit.calculus import nijenhuis_torsion
from algkit.config import dump_config, load_config
from algkit.definition import Definition, parse_definition
from algkit.exceptions import AlgkitError, ParseError, UsageError
from algkit.lifts import (
    complete_lift,
    lambda_n,
    lambda_tensor,
    max_fiber_degree,
    space_schouten,
    to_linear_tensor,
)
from algkit.pn import (
    CheckReport,
    bialgebroid_checks,
    check_pn,
    diagram_report,
    is_nijenhuis,
    is_poisson_for,
)
from algkit.report import Report, digest, render_report
from algkit.util import add_general_args, color_enabled, logger


def _validate(definition: Definition, report: Report, **_):
    A = definition.algebroid
    result = validate(A)
    report.checks.append(
        CheckReport(
            'skew',
            result.skew_consistent,
            None if result.skew_consistent else '; '.join(result.issues),
            'skew' if A.skew else 'not skew: two anchors, no antisymmetry',
        ),
    )
    if not A.skew:
        report.checks.append(
            CheckReport('jacobi', False, None, 'the Jacobi identity needs a skew bracket', True),
        )
        report.values.append(('Lambda', str(to_linear_tensor(A))))
        return

    failure = jacobi_failure(A)
    report.checks.append(
        CheckReport(
            'jacobi',
            failure is None,
            None if failure is None else _triple(failure[0]) + f' -> {failure[1]}',
            'jacobiator on basis triples',
        ),
    )
    anchor = anchor_failure(A)
    report.checks.append(
        CheckReport(
            'anchor',
            anchor is None,
            None if anchor is None else _anchor_witness(definition, anchor),
            'anchor maps brackets to commutators',
        ),
    )
    lam = lambda_tensor(A)
    square = space_schouten(lam, lam)
    report.checks.append(
        CheckReport(
            'poisson-tensor',
            square.is_zero,
            None if square.is_zero else str(square),
            '[Lambda,Lambda] = 0',
        ),
    )
    report.values.append(('Lambda', str(lam)))


def _triple(indices) -> str:
    return '(' + ', '.join(f'e{i + 1}' for i in indices) + ')'


def _anchor_witness(definition: Definition, anchor) -> str:
    (i, j), defect = anchor
    names = definition.space.base_names
    field = ' + '.join(f'({c})*d{names[a]}' for a, c in enumerate(defect) if c)
    return f'(e{i + 1}, e{j + 1}) -> {field}'


def _lift(definition: Definition, report: Report, tensor: str | None = None, **_):
    u = definition.multivector(tensor)
    lifted = complete_lift(definition.algebroid, u)
    report.values.append((f'd_T {tensor}', str(lifted)))
    degree = max_fiber_degree(lifted)
    report.checks.append(
        CheckReport(
            'linear',
            degree <= 1,
            None if degree <= 1 else f'fiber degree {degree}',
            'components are at most linear in the fiber coordinates',
        ),
    )


def _deform(definition: Definition, report: Report, endo: str | None = None, **_):
    A = definition.algebroid
    N = definition.endomorphism(endo)
    by_lie = lambda_n(A, N, route='lie')
    by_formula = lambda_n(A, N, route='local')
    deformed = deformed_algebroid(A, N)
    report.values.append((f'Lambda_{endo}', str(by_lie)))
    table = '; '.join(
        f'[e{i + 1},e{j + 1}] = {value}' for i, j, value in deformed.structure_table()
    )
    report.values.append(('structure', table or '0'))
    difference = by_lie - by_formula
    report.checks.append(
        CheckReport(
            'routes',
            difference.is_zero,
            None if difference.is_zero else str(difference),
            'Lie derivative along J(N) agrees with the coordinate formula',
        ),
    )
    deformed_lie = is_lie(deformed)
    report.checks.append(
        CheckReport(
            'deformed-lie',
            deformed_lie.holds,
            None if deformed_lie.holds else deformed_lie.reason,
            'the deformed bracket is a Lie algebroid bracket',
            informational=True,
        ),
    )


def _torsion(definition: Definition, report: Report, endo: str | None = None, **_):
    A = definition.algebroid
    N = definition.endomorphism(endo)
    report.values.append((f'T_{endo}', str(nijenhuis_torsion(A, N))))
    report.checks.append(is_nijenhuis(A, N))


def _pn_check(
    definition: Definition,
    report: Report,
    tensor: str | None = None,
    endo: str | None = None,
    seed: int = 0,
    **_,
):
    A = definition.algebroid
    P = definition.multivector(tensor)
    N = definition.endomorphism(endo)
    report.values.append((f'd_T {tensor}', str(complete_lift(A, P))))
    report.values.append((f'Lambda_{endo}', str(lambda_n(A, N))))
    report.checks.extend(check_pn(A, P, N))
    report.checks.extend(diagram_report(A, P, N, seed=seed))


def _bialgebroid_check(
    definition: Definition,
    report: Report,
    tensor: str | None = None,
    seed: int = 0,
    **_,
):
    A = definition.algebroid
    P = definition.multivector(tensor)
    report.checks.append(is_poisson_for(A, P))
    report.checks.extend(bialgebroid_checks(A, P, seed=seed))


# name -> (runner, needs --tensor, needs --endo, help)
COMMANDS = {
    'validate': (_validate, False, False, 'Check the algebroid axioms and the Jacobi identity.'),
    'lift': (_lift, True, False, 'Print the complete lift of a multivector to E.'),
    'deform': (_deform, False, True, 'Print the bivector and structure of the bracket deformed by N.'),
    'torsion': (_torsion, False, True, 'Print the Nijenhuis torsion of N.'),
    'pn-check': (_pn_check, True, True, 'Check the Poisson-Nijenhuis conditions and the diagram of lifts.'),
    'bialgebroid-check': (
        _bialgebroid_check,
        True,
        False,
        'Check that (A, A_P) is a Lie bialgebroid.',
    ),
}


def run_command(
    command: str,
    definition: str,
    tensor: str | None = None,
    endo: str | None = None,
    seed: int = 0,
) -> Report:
    """Run one command on a definition file and collect its report"""
    if command not in COMMANDS:
        known = ', '.join(COMMANDS)
        raise UsageError(f'unknown command {command!r}, expected one of: {known}')
    try:
        with open(definition, encoding='utf-8') as f:
            src = f.read()
    except OSError as e:
        raise ParseError(f'could not read definition: {e}', path=definition) from e
    parsed = parse_definition(src)
    logger.info(f'Loaded {parsed.file.name!r} from {definition}')
    report = Report(command, digest(src))
    runner = COMMANDS[command][0]
    runner(parsed, report, tensor=tensor, endo=endo, seed=seed)
    for check in report.checks:
        if check.informational and not check.passed:
            logger.warning(f'{check.name} does not hold (informational): {check.notes}')
    return report


def run_cli(
    command: str,
    definition: str,
    json: bool = False,
    output: str | None = None,
    config: list[str] | None = None,
    verbose: bool = False,
    tensor: str | None = None,
    endo: str | None = None,
) -> int:
    """Run a command end to end and return the process exit code"""
    try:
        settings = load_config(config)
        logger.setLevel(logging.DEBUG if verbose else settings['logging']['level'])
        report = run_command(
            command,
            definition,
            tensor=tensor,
            endo=endo,
            seed=int(settings['checks']['sample_seed']),
        )
    except AlgkitError as e:
        logger.error(str(e))
        return e.exit_code

    fmt = 'json' if json else settings['report']['format']
    text = render_report(
        report,
        fmt,
        color=color_enabled(settings['report']['color']) and output is None,
        table_format=settings['report']['table_format'],
    )
    if output:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f'Wrote report to {output}')
    else:
        print(text, end='')
    return report.exit_code


def _command_mode(command: str):
    _, needs_tensor, needs_endo, description = COMMANDS[command]

    def add_args(parser: argparse.ArgumentParser | None = None) -> argparse.ArgumentParser:
        if not parser:
            parser = argparse.ArgumentParser(f'algkit {command}', description=description)
        add_general_args(parser)
        if needs_tensor:
            parser.add_argument(
                '--tensor',
                required=True,
                help='Name of a multivector in the definition file.',
            )
        if needs_endo:
            parser.add_argument(
                '--endo',
                required=True,
                help='Name of an endomorphism in the definition file.',
            )
        return parser

    def run_from_args(args: argparse.Namespace) -> int:
        return run_cli(command, **vars(args))

    return add_args, run_from_args


def command_modes() -> dict:
    """This is a function instead of a constant so we don't see ordering definition errors."""
    return {command: _command_mode(command) for command in COMMANDS}


def add_config_args(parser: argparse.ArgumentParser | None = None) -> argparse.ArgumentParser:
    if not parser:
        parser = argparse.ArgumentParser('algkit config')
    parser.add_argument(
        '--config',
        required=False,
        action='append',
        help='Paths to configurations in TOML format, merged from left to right.',
    )
    return parser


def run_config_from_args(args: argparse.Namespace) -> int:
    return run_config(**vars(args))


def run_config(config: list[str] | None = None) -> int:
    """Print the merged configuration"""
    try:
        print(dump_config(load_config(config)), end='')
    except AlgkitError as e:
        logger.error(str(e))
        return e.exit_code
    return 0
