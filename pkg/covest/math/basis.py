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
"""Orthonormal Basis Families.

Families of functions, which are orthonormal in L2([a, b]) and enumerated by a
positive integer index. Basis families are registered within a catalog and
picked by name. A model is a finite set of indices, whose basis functions span
the columns of a design matrix at given design points.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import List, Sequence
import numpy as np
from numpy.polynomial import legendre
from hup.base import call, catalog
from hup.typing import check, StrList
from covest.base import array
from covest.errors import DomainError
from covest.typing import IndexTuple, NpArray, PointsLike

#
# Define Catalog Categories
#

@catalog.category
class Family:
    name: str

#
# Basis Functions
#

def families() -> StrList:
    """Get sorted list of basis families."""
    return sorted(catalog.search(Family).get('name'))

@catalog.register(Family, name='fourier')
def fourier(index: int, u: NpArray, length: float) -> NpArray:
    """Trigonometric basis.

    Args:
        index: Positive integer index. The index 1 is the constant function,
            even indices 2k are cosines and odd indices 2k + 1 are sines of
            frequency k.
        u: Array of offsets t - a within the domain.
        length: Length b - a of the domain.

    Returns:
        Array of function values with the same shape as *u*.

    """
    if index == 1:
        return np.full(u.shape, 1. / np.sqrt(length))
    freq = index // 2
    arg = 2. * np.pi * freq * u / length
    if index % 2:
        return np.sqrt(2. / length) * np.sin(arg)
    return np.sqrt(2. / length) * np.cos(arg)

@catalog.register(Family, name='polynomial')
def polynomial(index: int, u: NpArray, length: float) -> NpArray:
    """Orthonormal Legendre polynomials of degree index - 1."""
    degree = index - 1
    x = 2. * u / length - 1.
    coef = np.zeros(degree + 1)
    coef[degree] = 1.
    return np.sqrt((2. * degree + 1.) / length) * legendre.legval(x, coef)

@catalog.register(Family, name='haar')
def haar(index: int, u: NpArray, length: float) -> NpArray:
    """Haar wavelets.

    The index 1 is the constant function. The index 2 + k with k = 2^j - 1 + l
    and 0 <= l < 2^j is the wavelet of scale j at location l. The right end of
    the domain belongs to the last wavelet of each scale.

    """
    if index == 1:
        return np.full(u.shape, 1. / np.sqrt(length))
    k = index - 2
    scale = (k + 1).bit_length() - 1
    loc = k - (2 ** scale - 1)
    x = (2. ** scale) * (u / length) - loc
    vals = np.where((x >= 0.) & (x < .5), 1., 0.)
    vals = np.where((x >= .5) & (x < 1.), -1., vals)
    if loc == 2 ** scale - 1:
        vals = np.where(x == 1., -1., vals)
    return vals * np.sqrt(2. ** scale / length)

#
# Basis Family, Models and Design Matrices
#

@dataclasses.dataclass(frozen=True)
class BasisFamily:
    """Orthonormal basis family on an interval.

    Args:
        kind: Name of the family, see :func:`families`.
        lower: Lower bound a of the domain.
        upper: Upper bound b of the domain.
        max_size: Largest admissible basis index.

    """
    kind: str = 'fourier'
    lower: float = 0.
    upper: float = 1.
    max_size: int = 64

    def __post_init__(self) -> None:
        if self.kind not in families():
            raise ValueError(
                f"basis family '{self.kind}' is not valid, "
                f"allowed values are: {', '.join(families())}")
        if not self.upper > self.lower:
            raise ValueError("domain requires 'upper' > 'lower'")
        if self.max_size < 1:
            raise ValueError("'max_size' is required to be positive")

    @property
    def length(self) -> float:
        """Length of the domain."""
        return float(self.upper - self.lower)

    def contains(self, t: NpArray) -> NpArray:
        """Get mask of points within the domain."""
        return (t >= self.lower) & (t <= self.upper)

@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """Model given by a finite set of basis indices."""
    model_id: str
    indices: IndexTuple

    def __post_init__(self) -> None:
        check.has_type("'model_id'", self.model_id, str)
        if not self.model_id:
            raise ValueError("'model_id' is required to be non-empty")
        if not self.indices:
            raise ValueError(f"model '{self.model_id}' has no indices")
        if any(int(i) != i or i < 1 for i in self.indices):
            raise ValueError(
                f"model '{self.model_id}' requires positive integer indices")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError(f"model '{self.model_id}' has repeated indices")

    @property
    def size(self) -> int:
        """Number of basis functions."""
        return len(self.indices)

@dataclasses.dataclass(frozen=True)
class DesignMatrix:
    """Basis functions of a model evaluated at design points."""
    family: BasisFamily
    model: ModelSpec
    points: NpArray
    matrix: NpArray

def evaluate_basis(
        family: BasisFamily, index: int, t: PointsLike) -> NpArray:
    """Evaluate a basis function.

    Args:
        family: :class:`BasisFamily` instance.
        index: Positive integer index, not larger than the family size.
        t: Point or array of points within the domain of the family.

    Returns:
        Function values with the shape of *t*.

    Raises:
        DomainError: If a point lies outside of the domain.

    """
    if int(index) != index or not 1 <= index <= family.max_size:
        raise ValueError(
            f"index {index} is not within 1..{family.max_size}")
    t = array.cast(t)
    inside = family.contains(t)
    if not np.all(inside):
        first = int(np.argmin(inside.ravel()))
        raise DomainError(f"point {first} outside basis domain")
    f = catalog.pick(Family, name=family.kind)
    return call.safe_call(
        f, index=int(index), u=t - family.lower, length=family.length)

def design_matrix(
        family: BasisFamily, model: ModelSpec, points: PointsLike
        ) -> DesignMatrix:
    """Get design matrix of a model at given points.

    Args:
        family: :class:`BasisFamily` instance.
        model: :class:`ModelSpec` instance with indices within the family.
        points: Non-empty sequence of design points.

    Returns:
        :class:`DesignMatrix` with an (n, m) matrix, whose columns are the
        basis functions of the model evaluated at the n design points.

    """
    points = array.as_vector("'points'", points)
    outside = np.flatnonzero(~family.contains(points))
    if outside.size:
        raise DomainError(f"point {int(outside[0])} outside basis domain")
    cols = [evaluate_basis(family, i, points) for i in model.indices]
    return DesignMatrix(
        family=family, model=model, points=array.frozen(points),
        matrix=array.frozen(np.stack(cols, axis=1)))

def nested_model_family(
        family: BasisFamily, sizes: Sequence[int]) -> List[ModelSpec]:
    """Get nested models of the first m basis functions for given sizes m."""
    if not sizes:
        return []
    sizes = [int(m) for m in sizes]
    if any(m < 1 for m in sizes):
        raise ValueError("model sizes are required to be positive")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("model sizes are required to be strictly increasing")
    if sizes[-1] > family.max_size:
        raise ValueError(
            f"model size {sizes[-1]} exceeds family size {family.max_size}")
    return [ModelSpec(f'm{m}', tuple(range(1, m + 1))) for m in sizes]
