"""
Layered TOML configuration: defaults, then ALGKIT_CONFIG_PATH files,
then files given on the command line.
"""

import copy
import os
from typing import Any

import toml
from cpg_utils.config import read_configs, update_dict

from algkit.exceptions import ParseError
from algkit.util import logger

CONFIG_PATH_ENV_VAR = 'ALGKIT_CONFIG_PATH'

DEFAULT_CONFIG: dict[str, Any] = {
    'report': {
        'format': 'text',
        'color': True,
        'table_format': 'simple',
    },
    'logging': {
        'level': 'INFO',
    },
    'checks': {
        'sample_seed': 0,
    },
}


def config_paths(paths: list[str] | None = None) -> list[str]:
    """ALGKIT_CONFIG_PATH entries (comma separated) followed by the given paths"""
    env_paths = [p for p in os.getenv(CONFIG_PATH_ENV_VAR, '').split(',') if p]
    return env_paths + list(paths or [])


def load_config(paths: list[str] | None = None) -> dict[str, Any]:
    """The defaults updated by every config file, merged left to right"""
    config = copy.deepcopy(DEFAULT_CONFIG)
    all_paths = config_paths(paths)
    if not all_paths:
        return config
    logger.debug(f'Reading config from {", ".join(all_paths)}')
    try:
        update_dict(config, read_configs(all_paths))
    except ValueError as e:
        raise ParseError(f'Invalid TOML config: {e}', path=','.join(all_paths)) from e
    except OSError as e:
        raise ParseError(f'Could not read config: {e}', path=','.join(all_paths)) from e
    return config


def dump_config(config: dict[str, Any]) -> str:
    return toml.dumps(config)
