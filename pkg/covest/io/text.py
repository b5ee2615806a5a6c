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
"""Import and export of text files.

Observations, design points and pairs of points are read from comma separated
files, where lines starting with '#' are comments and an optional first row of
column names is skipped. Matrices and tables are written with a header row and
values at 17 significant digits, which round-trip bit-exactly. Matrices are
stored by rows; vectorizations within the package stack columns.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import csv as stdcsv
import json
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple
import numpy as np
from hup.base import env
from hup.io import csv
from hup.typing import PathLike
from covest.errors import DataFormatError
from covest.typing import NpArray, Record

#
# Formatting
#

def format_value(value: Any) -> str:
    """Format value for text export."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return '%.17g' % float(value)
    return str(value)

def _to_json(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"type '{type(obj).__name__}' is not JSON serializable")

#
# Reading
#

def _rows(path: PathLike) -> List[Tuple[int, List[str]]]:
    path = env.expand(path)
    if not path.is_file():
        raise DataFormatError("file does not exist", path=path)
    rows = []
    with open(path, newline='') as file:
        reader = stdcsv.reader(file)
        for row in reader:
            line = reader.line_num
            if not row or not ''.join(row).strip():
                continue
            if row[0].lstrip().startswith('#'):
                continue
            rows.append((line, [cell.strip() for cell in row]))
    return rows

def _is_header(cells: Sequence[str]) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            continue
        return False
    return True

def load_table(
        path: PathLike, columns: Optional[int] = None,
        header: Optional[bool] = None) -> NpArray:
    """Read numeric table from a comma separated file.

    Args:
        path: String or :term:`path-like object` of the file.
        columns: Optional expected number of columns. By default the number
            of columns of the first row.
        header: Whether the first row holds column names. By default the
            first row is a header, if none of its cells is a number. A first
            row with some numeric cells is data and is validated as such.

    Returns:
        Array of shape (rows, columns).

    Raises:
        DataFormatError: If the file is missing or empty, or a row has a wrong
            number of columns, a non-numeric or a non-finite value. The message
            names the line of the offending row.

    """
    rows = _rows(path)
    if header is None:
        header = bool(rows) and _is_header(rows[0][1])
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise DataFormatError("file contains no data rows", path=path)
    columns = columns or len(rows[0][1])
    values = []
    for line, cells in rows:
        if len(cells) != columns:
            raise DataFormatError(
                f"row has {len(cells)} columns, expected {columns}",
                path=path, line=line)
        try:
            vals = [float(cell) for cell in cells]
        except ValueError as err:
            raise DataFormatError(
                f"row has a non-numeric value: {err}",
                path=path, line=line) from err
        if not all(np.isfinite(vals)):
            raise DataFormatError(
                "row has a non-finite value", path=path, line=line)
        values.append(vals)
    return np.array(values, dtype=float)

def load_data(path: PathLike, n: Optional[int] = None) -> NpArray:
    """Read observations with one replication per row."""
    return load_table(path, columns=n)

def load_points(path: PathLike) -> NpArray:
    """Read design points from a single column file."""
    return load_table(path, columns=1)[:, 0]

def load_pairs(path: PathLike) -> NpArray:
    """Read pairs (s, t) of points from a two column file."""
    return load_table(path, columns=2)

def load_matrix(path: PathLike) -> NpArray:
    """Read matrix, which has been written by :func:`save_matrix`."""
    return load_table(path)

def load_json(path: PathLike) -> Record:
    """Read JSON file."""
    path = env.expand(path)
    try:
        with open(path) as file:
            return json.load(file)
    except FileNotFoundError as err:
        raise DataFormatError("file does not exist", path=path) from err
    except json.JSONDecodeError as err:
        raise DataFormatError(
            f"invalid JSON: {err.msg}", path=path, line=err.lineno) from err

#
# Writing
#

def save_table(
        path: PathLike, header: Sequence[str], rows: Sequence[Sequence[Any]],
        comment: str = '') -> None:
    """Write table with header row to a comma separated file."""
    values = [tuple(format_value(v) for v in row) for row in rows]
    csv.save(env.expand(path), header=list(header), values=values,
        comment=comment, delimiter=',')

def save_matrix(
        path: PathLike, matrix: NpArray, prefix: str = 't',
        comment: str = '') -> None:
    """Write matrix by rows, with columns named prefix1, prefix2, ..."""
    header = [f'{prefix}{j + 1}' for j in range(matrix.shape[1])]
    save_table(path, header, matrix.tolist(), comment=comment)

def dumps(obj: Any) -> str:
    """Encode object as JSON with sorted keys."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_to_json) + '\n'

def save_json(path: PathLike, obj: Any) -> None:
    """Write object to JSON file with sorted keys."""
    env.expand(path).write_text(dumps(obj))
