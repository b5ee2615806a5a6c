# -*- coding: utf-8 -*-
#
# Copyright (C) 2019 Frootlab
#
# This file is part of Frootlab Covest, https://www.frootlab.org/covest
#
#  Covest is free software: you can redistribute it and/or modify it under the
#  terms of the GNU General Public License as published by the Free Software
#  Foundation, either version 3 of the License, or (at your option) any later
#  version.
#
#  Covest is distributed in the hope that it will be useful, but WITHOUT ANY
#  WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
#  A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#  You should have received a copy of the GNU General Public License along with
#  Covest. If not, see <http://www.gnu.org/licenses/>.
#
"""Run configuration.

A run is configured by an INI file with the sections 'covest', 'data',
'basis', 'models', 'selection', 'run', 'simulate' and 'eval'. Missing keys take
their values from :data:`DEFAULTS` and lists are given as comma separated
strings. The effective configuration is stored next to the results of a run
and reproduces them when given back to the command line interface.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import copy
from pathlib import Path
from typing import Any, Dict, List, Tuple
from hup.base import env
from hup.io import ini
from hup.typing import PathLike
from covest.errors import DataFormatError
from covest.math import basis

#
# Module Constants
#

SCHEMA_VERSION = 1

Config = Dict[str, Dict[str, Any]]

DEFAULTS: Config = {
    'covest': {
        'schema_version': SCHEMA_VERSION},
    'data': {
        'data': 'data.csv',
        'points': 'points.csv',
        'n_points': 0,
        'n_samples': 0,
        'center': False},
    'basis': {
        'kind': 'fourier',
        'lower': 0.,
        'upper': 1.,
        'max_size': 64},
    'models': {
        'sizes': '1, 3, 5',
        'index_sets': ''},
    'selection': {
        'theta': 1.,
        'thetas': '0.5, 1, 2',
        'penalty_mode': 'delta_m'},
    'run': {
        'output': 'results',
        'threads': 0,
        'seed': 0,
        'reduction': 'sequential'},
    'simulate': {
        'experiment': 'risk_decomposition',
        'process': 'kl_process',
        'alpha': 1.,
        'scale': 1.,
        'dof': 5.,
        'truncation': 16,
        'n_points': 6,
        'size': 500,
        'replications': 400,
        'validate_phi': True,
        'phi_samples': 100000,
        'sample_sizes': '128, 256, 512, 1024, 2048, 4096',
        'factor': 2.,
        'finite_rank': False,
        'strict': True,
        'tolerance': .2,
        'p': 4.,
        'xs': '1, 2, 4, 8, 16, 32',
        'noise': 'gaussian',
        'projector': 'model',
        'model_size': 3,
        'batches': 16},
    'eval': {
        'result': 'results/result.json',
        'pairs': 'pairs.csv',
        'output': 'eval.csv'}}
"""Default configuration, which also defines the types of the keys."""

SCHEME: Dict[str, Dict[str, type]] = {
    section: {key: type(val) for key, val in keys.items()}
    for section, keys in DEFAULTS.items()}

#
# Loading and Saving
#

def default() -> Config:
    """Get a copy of the default configuration."""
    return copy.deepcopy(DEFAULTS)

def load_config(path: PathLike) -> Config:
    """Load configuration file and complete it with defaults.

    Args:
        path: Path of an INI file.

    Returns:
        Dictionary of sections, each a dictionary of typed values.

    Raises:
        DataFormatError: If the file can not be read or a value has the wrong
            type or the schema version is not supported.

    """
    path = Path(env.expand(path))
    if not path.is_file():
        raise DataFormatError("configuration file does not exist", path=path)
    try:
        parsed = ini.load(path, scheme=SCHEME)
    except Exception as err:
        raise DataFormatError(f"invalid configuration: {err}", path=path) \
            from err
    config = default()
    for section, keys in (parsed or {}).items():
        if section not in config or not isinstance(keys, dict):
            continue
        for key, val in keys.items():
            if key in config[section] and val is not None:
                config[section][key] = val
    version = config['covest']['schema_version']
    if version != SCHEMA_VERSION:
        raise DataFormatError(
            f"schema version {version} is not supported", path=path)
    return config

def save_config(config: Config, path: PathLike) -> None:
    """Save configuration to INI file."""
    ini.save(config, Path(env.expand(path)))

def override(config: Config, section: str, **values: Any) -> Config:
    """Get copy of the configuration with replaced values.

    Values, which are None are skipped.

    """
    new = copy.deepcopy(config)
    for key, val in values.items():
        if val is None:
            continue
        if key not in new[section]:
            raise KeyError(f"'{section}' has no key '{key}'")
        new[section][key] = SCHEME[section][key](val)
    return new

def resolve(config: Config, base: PathLike) -> Config:
    """Get copy with file paths relative to the directory of the config."""
    new = copy.deepcopy(config)
    root = Path(env.expand(base))
    for section, key in [
            ('data', 'data'), ('data', 'points'), ('run', 'output'),
            ('eval', 'result'), ('eval', 'pairs')]:
        val = new[section][key]
        if val and not Path(val).is_absolute():
            new[section][key] = str(root / val)
    return new

#
# Value Parsers
#

def split(text: str) -> List[str]:
    """Split comma separated string into its stripped items."""
    return [item.strip() for item in str(text).split(',') if item.strip()]

def get_ints(config: Config, section: str, key: str) -> List[int]:
    """Get list of integers from comma separated value."""
    try:
        return [int(item) for item in split(config[section][key])]
    except ValueError as err:
        raise DataFormatError(
            f"'{section}.{key}' is not a list of integers") from err

def get_floats(config: Config, section: str, key: str) -> List[float]:
    """Get list of floats from comma separated value."""
    try:
        return [float(item) for item in split(config[section][key])]
    except ValueError as err:
        raise DataFormatError(
            f"'{section}.{key}' is not a list of numbers") from err

def get_index_sets(config: Config) -> List[Tuple[str, Tuple[int, ...]]]:
    """Get explicit index sets from 'models.index_sets'.

    The value lists index sets separated by semicolons, each given as an
    identifier followed by a colon and the whitespace separated indices, like
    'even: 2 4 6; odd: 1 3 5'.

    """
    sets = []
    for part in str(config['models']['index_sets']).split(';'):
        if not part.strip():
            continue
        name, sep, indices = part.partition(':')
        if not sep or not name.strip():
            raise DataFormatError(
                f"index set '{part.strip()}' lacks an identifier")
        try:
            sets.append(
                (name.strip(), tuple(int(i) for i in indices.split())))
        except ValueError as err:
            raise DataFormatError(
                f"index set '{name.strip()}' is not a list of integers") \
                from err
    return sets

def get_family(config: Config) -> basis.BasisFamily:
    """Get basis family from section 'basis'."""
    sec = config['basis']
    return basis.BasisFamily(
        kind=sec['kind'], lower=sec['lower'], upper=sec['upper'],
        max_size=sec['max_size'])

def get_models(config: Config) -> List[basis.ModelSpec]:
    """Get candidate models from section 'models'.

    Explicit index sets take precedence over the nested model sizes.

    """
    sets = get_index_sets(config)
    if sets:
        return [basis.ModelSpec(name, indices) for name, indices in sets]
    return basis.nested_model_family(
        get_family(config), get_ints(config, 'models', 'sizes'))
