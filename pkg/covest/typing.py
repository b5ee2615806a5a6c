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
"""Structural types for type hinting."""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

from numbers import Number
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence
from typing import Tuple, Union

# TODO (patrick.michl@frootlab.org): Replace the array aliases with the numpy
# type stubs (numpy.typing), when the minimum supported numpy version ships
# them.
NpShape = Optional[Tuple[int, ...]]
NpArray = Any
NpArraySeq = Sequence[NpArray]
NpArrayLike = Union[Number, NpArray, NpArraySeq]
OptNpArray = Optional[NpArray]
NpArrayFunc = Callable[..., NpArray]
NpGenerator = Any # numpy.random.Generator

IndexTuple = Tuple[int, ...]
IntSeq = Sequence[int]
FloatSeq = Sequence[float]
FloatList = List[float]
PointsLike = Union[NpArray, Iterable[float]]
Record = Dict[str, Any]
RecordList = List[Record]
