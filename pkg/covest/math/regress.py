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
"""Penalized Selection for Multidimensional Regression.

Generic layer of penalized model selection for the regression model
y_i = f^i + e_i, i = 1, ..., N, with observations y_i in R^d and i.i.d. errors
e_i of covariance Phi. Observations are stacked into a single vector of R^(Nd),
models are orthogonal projectors P_m on R^(Nd) and the fitted values of a model
are P_m y. Stacked vectors are compared by the empirical norm
||a||_N^2 = (1/N) sum_i a_i^T a_i.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import Any, List, Optional, Sequence, Tuple
import numpy as np
from hup.typing import check
from covest.base import array
from covest.typing import NpArray, NpArrayLike

TIE_TOL = 1e-12
"""Relative tolerance, within which criteria are regarded as tied."""

@dataclasses.dataclass(frozen=True)
class GenericSelection:
    """Result of the generic selection.

    Args:
        chosen: Position of the selected projector within the given list.
        fitted: Stacked fitted values P_m y of the selected model, as an
            array of shape (N, d).
        criteria: Penalized criterion per model.
        delta_sq: Noise level Tr(P_m (I_N x Phi)) / D_m per model.
        tie_broken: Whether the minimum was attained by more than one model.

    """
    chosen: int
    fitted: NpArray
    criteria: Tuple[float, ...]
    delta_sq: Tuple[float, ...]
    tie_broken: bool

def stacked_norm(a: NpArrayLike) -> float:
    """Squared empirical norm ||a||_N^2 of stacked vectors of shape (N, d)."""
    a = array.as_matrix("'a'", a)
    return float(np.sum(a * a) / a.shape[0])

def block_trace(p: NpArray, phi: NpArray) -> float:
    """Trace of P (I_N x Phi) for a matrix P on R^(Nd)."""
    d = phi.shape[0]
    blocks = p.shape[0] // d
    return float(np.einsum('iaib,ba->', p.reshape(blocks, d, blocks, d), phi))

def tie_order(
        dims: Sequence[float], labels: Sequence[Any]
        ) -> List[Tuple[float, Any]]:
    """Keys, which order tied models by dimension and then by label.

    Dimensions are rounded to six decimals, such that numerical traces of
    projectors compare equal to their ranks.

    """
    if len(dims) != len(labels):
        raise ValueError(
            "'dims' and 'labels' are required to have equal length")
    return [(round(float(dim), 6), label) for dim, label in zip(dims, labels)]

def argmin_tied(
        criteria: Sequence[float], order: Sequence[Tuple]) -> Tuple[int, bool]:
    """Get position of the smallest criterion and whether it is tied.

    Criteria within a relative tolerance of the minimum are regarded as equal
    and the tie is broken by the smallest key in *order*.

    """
    best = min(criteria)
    tol = TIE_TOL * (1. + abs(best))
    tied = [i for i, c in enumerate(criteria) if c <= best + tol]
    chosen = min(tied, key=lambda i: order[i])
    return chosen, len(tied) > 1

def generic_select(
        y: NpArrayLike, projectors: Sequence[Tuple[NpArray, float]],
        phi: NpArrayLike, theta: float = 1.,
        labels: Optional[Sequence[Any]] = None) -> GenericSelection:
    """Select a model by penalized least squares.

    Args:
        y: Stacked observations of shape (N, d).
        projectors: Non-empty list of pairs (P_m, D_m), where P_m is an
            orthogonal projector on R^(Nd) and D_m its trace.
        phi: Error covariance of shape (d, d).
        theta: Positive penalty parameter.
        labels: Optional model labels, which break ties after the model
            dimension, see :func:`tie_order`. By default the positions.

    Returns:
        :class:`GenericSelection` minimizing
        ||y - P_m y||_N^2 + (1 + theta) delta_m^2 D_m / N.

    """
    y = array.as_matrix("'y'", y)
    phi = array.as_square("'phi'", phi)
    check.has_type("'projectors'", projectors, (list, tuple))
    if not projectors:
        raise ValueError("at least one projector is required")
    if not theta > 0:
        raise ValueError(f"'theta' is required to be positive, not {theta}")
    count, d = y.shape
    if phi.shape[0] != d:
        raise ValueError(
            f"'phi' has dimension {phi.shape[0]}, but observations have {d}")
    vec = y.ravel()
    criteria: List[float] = []
    deltas: List[float] = []
    fits: List[NpArray] = []
    for p, dim in projectors:
        p = array.as_square("'P_m'", p)
        if p.shape[0] != vec.size:
            raise ValueError(
                f"projector has dimension {p.shape[0]}, not {vec.size}")
        if dim < 1. - 1e-6:
            raise ValueError(f"model dimension {dim} is below one")
        fit = p @ vec
        delta_sq = block_trace(p, phi) / dim
        resid = (vec - fit).reshape(count, d)
        criteria.append(
            stacked_norm(resid) + (1. + theta) * delta_sq * dim / count)
        deltas.append(delta_sq)
        fits.append(fit.reshape(count, d))
    labels = list(range(len(projectors))) if labels is None else list(labels)
    order = tie_order([dim for _, dim in projectors], labels)
    chosen, tied = argmin_tied(criteria, order)
    return GenericSelection(
        chosen=chosen, fitted=array.frozen(fits[chosen]),
        criteria=tuple(criteria), delta_sq=tuple(deltas), tie_broken=tied)
