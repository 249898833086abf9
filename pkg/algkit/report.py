"""
Reports: an ordered list of checks plus named values, rendered either as a
text table or as canonical JSON (sorted keys, fixed indentation) so that the
same input always gives the same bytes.
"""

import dataclasses
import hashlib
import json
from typing import Any

from tabulate import tabulate

from algkit._version import __version__
from algkit.pn import CheckReport
from algkit.util import AnsiiColors, paint


def digest(src: str | bytes) -> str:
    data = src.encode('utf-8') if isinstance(src, str) else src
    return 'sha256:' + hashlib.sha256(data).hexdigest()


@dataclasses.dataclass
class Report:
    command: str
    digest: str
    checks: list[CheckReport] = dataclasses.field(default_factory=list)
    values: list[tuple[str, str]] = dataclasses.field(default_factory=list)
    version: str = f'algkit {__version__}'

    @property
    def passed(self) -> bool:
        """Informational rows never fail a report"""
        return all(c.passed for c in self.checks if not c.informational)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def as_dict(self) -> dict[str, Any]:
        return {
            'version': self.version,
            'digest': self.digest,
            'command': self.command,
            'pass': self.passed,
            'checks': [c.as_dict() for c in self.checks],
            'values': [{'name': name, 'value': value} for name, value in self.values],
        }


def _result_cell(check: CheckReport, color: bool) -> str:
    if check.passed:
        return paint('PASS', AnsiiColors.BRIGHTGREEN, color)
    if check.informational:
        return paint('INFO', AnsiiColors.BRIGHTYELLOW, color)
    return paint('FAIL', AnsiiColors.BRIGHTRED, color)


def render_report(
    report: Report,
    fmt: str = 'text',
    color: bool = True,
    table_format: str = 'simple',
) -> str:
    if fmt == 'json':
        return json.dumps(report.as_dict(), indent=2, sort_keys=True) + '\n'

    lines = [paint(f'{report.command}: {report.digest}', AnsiiColors.BOLD, color)]
    lines.extend(f'{name} = {value}' for name, value in report.values)
    if report.checks:
        rows = [
            [check.name, _result_cell(check, color), check.witness or '', check.notes]
            for check in report.checks
        ]
        lines.append(
            tabulate(rows, headers=['check', 'result', 'witness', 'notes'], tablefmt=table_format),
        )
    verdict = 'all checks pass' if report.passed else 'some checks fail'
    lines.append(
        paint(verdict, AnsiiColors.BRIGHTGREEN if report.passed else AnsiiColors.BRIGHTRED, color),
    )
    return '\n'.join(lines) + '\n'
