#!/usr/bin/env python

"""
CLI for verifying Lie algebroid structures.
See README.md for more information.
"""
import argparse
import sys
from typing import Callable, Sequence

from algkit._version import __version__
from algkit.cli_commands import add_config_args, command_modes, run_config_from_args


def main_from_args(args: Sequence[str] | None = None) -> int:
    """
    Parse args using argparse
    (if args is None, argparse automatically uses `sys.argv`)
    """
    modes: dict[str, tuple[Callable[..., argparse.ArgumentParser], Callable]] = {
        **command_modes(),
        'config': (add_config_args, run_config_from_args),
    }

    args = list(args if args is not None else sys.argv[1:])

    if len(args) == 0:
        args = ['--help']

    mode = args[0]

    if mode in ('-h', '--help', 'help'):
        # display help text
        cs_modekeys = ','.join(modes)
        print(
            f"""
usage: algkit [-h] [-v] {{{cs_modekeys}}} ...

positional arguments:
  {{{cs_modekeys},version,help}}

optional arguments:
  -h, --help       show this help message and exit
  -v, --version    display the version and exit

exit codes:
  0 all checks pass, 1 a check fails, 2 parse error, 3 semantic error
""",
        )
        return 0
    if mode in ('-v', '--version', 'version'):
        print(f'algkit {__version__}')
        return 0

    if mode not in modes:
        print(f'algkit: unknown command {mode!r}, expected one of: {", ".join(modes)}', file=sys.stderr)
        return 2
    args = args[1:]

    mode_argparser_f, run_mode = modes[mode]
    try:
        parsed = mode_argparser_f().parse_args(args)
    except SystemExit as e:
        # argparse exits with 2 on bad usage, 0 on --help
        return int(e.code or 0)
    return run_mode(parsed)


if __name__ == '__main__':
    sys.exit(main_from_args())
