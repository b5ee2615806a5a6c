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
"""NumPy array functions."""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import numpy as np
from hup.typing import check
from covest.typing import NpArray, NpArrayLike

#
# Array transformations
#

def cast(x: NpArrayLike) -> NpArray:
    """Cast array like object as numpy array of floats."""
    if isinstance(x, np.ndarray) and x.dtype == np.float64:
        return x
    try:
        x = np.array(x, dtype=np.float64)
    except (TypeError, ValueError) as err:
        raise TypeError("'x' is required to be a numeric array-like") from err
    return x

def frozen(x: NpArrayLike) -> NpArray:
    """Get read-only copy of array like object."""
    x = np.array(cast(x), copy=True)
    x.setflags(write=False)
    return x

def sym(x: NpArray) -> NpArray:
    """Get symmetric part of a square matrix."""
    return (x + x.T) / 2.

#
# Array validation
#

def as_vector(name: str, x: NpArrayLike) -> NpArray:
    """Cast and check a one-dimensional, non-empty and finite array."""
    x = cast(x)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError(f"{name} is required to be one-dimensional")
    if not x.size:
        raise ValueError(f"{name} is required to be non-empty")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} is required to be finite")
    return x

def as_matrix(name: str, x: NpArrayLike) -> NpArray:
    """Cast and check a two-dimensional, non-empty and finite array."""
    x = cast(x)
    if x.ndim != 2:
        raise ValueError(f"{name} is required to be two-dimensional")
    if not x.size:
        raise ValueError(f"{name} is required to be non-empty")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} is required to be finite")
    return x

def as_square(name: str, x: NpArrayLike) -> NpArray:
    """Cast and check a finite square matrix."""
    x = as_matrix(name, x)
    if x.shape[0] != x.shape[1]:
        raise ValueError(
            f"{name} is required to be square, not of shape {x.shape}")
    return x

def is_symmetric(x: NpArray, rtol: float = 1e-10) -> bool:
    """Check if a square matrix is symmetric up to a relative tolerance."""
    scale = max(float(np.max(np.abs(x))), 1.)
    return bool(np.max(np.abs(x - x.T)) <= rtol * scale)

def check_positive(name: str, value: float) -> None:
    """Check that a number is positive."""
    check.has_type(name, value, (int, float, np.integer, np.floating))
    if not value > 0:
        raise ValueError(f"{name} is required to be positive, not {value}")
