"""Utility function"""

import argparse
import logging
import os

logger = logging.getLogger('algkit')
logger.addHandler(logging.StreamHandler())
logger.setLevel(logging.INFO)

COLOR_ENV_VAR = 'ALGKIT_COLOR'


def add_general_args(parser: argparse.ArgumentParser):
    """
    Add CLI arguments that are relevant for every
    verification command (validate / lift / deform / ...)
    """
    parser.add_argument(
        'definition',
        help='Path to the algebroid definition file (JSON).',
    )
    parser.add_argument(
        '--json',
        action='store_true',
        help='Emit the report as JSON instead of a text table.',
    )
    parser.add_argument(
        '-o',
        '--output',
        required=False,
        help='Write the report to this path instead of stdout.',
    )
    parser.add_argument(
        '--config',
        required=False,
        action='append',
        help=(
            'Paths to configurations in TOML format, merged from left to right '
            'on top of the defaults and the files in ALGKIT_CONFIG_PATH.'
        ),
    )
    parser.add_argument(
        '--verbose',
        action='store_true',
        help='Log every check as it runs.',
    )


def color_enabled(configured: bool = True) -> bool:
    """ALGKIT_COLOR=0 always wins over the configuration"""
    if os.getenv(COLOR_ENV_VAR, '').strip() == '0':
        return False
    return configured


class AnsiiColors:
    """
    Lookup table: https://en.wikipedia.org/wiki/ANSI_escape_code#3/4_bit
    """

    BRIGHTGREEN = '\033[92m'  # Bright green
    BRIGHTYELLOW = '\033[93m'  # Bright yellow
    BRIGHTRED = '\033[91m'  # Bright red
    RESET = '\033[0m'  # SGR (Reset / Normal)
    BOLD = '\033[1m'  # SGR (Bold or increased intensity


def paint(text: str, color: str, enabled: bool) -> str:
    if not enabled:
        return text
    return f'{color}{text}{AnsiiColors.RESET}'
