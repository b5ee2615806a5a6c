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
"""Matrix Algebra.

Vectorization operators, the duplication, elimination and commutation matrices,
generalized inverses, orthogonal projectors and matrix norms. Matrices are
vectorized in column-major order, such that vec(A) stacks the columns of A and
vech(A) stacks the columns of the lower triangle of A, including the diagonal.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import Any
import numpy as np
from scipy import linalg
from hup.base import call, catalog
from hup.typing import StrList
from covest.base import array
from covest.errors import NumericalError
from covest.typing import NpArray, NpArrayLike

#
# Module Constants
#

REL_TOL = 1e-12
"""Relative eigenvalue cutoff for generalized inverses and numerical ranks."""

ABS_TOL = 1e-300
"""Absolute floor of the eigenvalue cutoff."""

#
# Define Catalog Categories
#

@catalog.category
class Norm:
    name: str

#
# Vectorization
#

def vec(a: NpArrayLike) -> NpArray:
    """Stack the columns of a matrix into a vector."""
    a = array.as_matrix("'a'", a)
    return a.flatten('F')

def unvec(v: NpArrayLike, rows: int) -> NpArray:
    """Reshape a column-major vector into a matrix with given rows."""
    v = array.as_vector("'v'", v)
    if rows < 1 or v.size % rows:
        raise ValueError(
            f"vector of size {v.size} can not be reshaped to {rows} rows")
    return v.reshape((rows, v.size // rows), order='F')

def vech(a: NpArrayLike) -> NpArray:
    """Half-vectorization of a square matrix.

    Args:
        a: Square matrix of shape (k, k). Only its lower triangle, including
            the diagonal, is read.

    Returns:
        Vector of size k(k + 1)/2, which stacks the columns of the lower
        triangle of *a*, each column starting at the diagonal.

    """
    a = array.as_square("'a'", a)
    k = a.shape[0]
    mask = np.triu(np.ones((k, k), dtype=bool))
    return a.T[mask]

def unvech(v: NpArrayLike) -> NpArray:
    """Get symmetric matrix from its half-vectorization."""
    v = array.as_vector("'v'", v)
    k = int(round((np.sqrt(8. * v.size + 1.) - 1.) / 2.))
    if k * (k + 1) // 2 != v.size:
        raise ValueError(
            f"vector of size {v.size} is not a half-vectorization")
    mask = np.triu(np.ones((k, k), dtype=bool))
    upper = np.zeros((k, k))
    upper[mask] = v
    return upper + upper.T - np.diag(np.diag(upper))

#
# Structured Matrices
#

def duplication_matrix(k: int) -> NpArray:
    """Get duplication matrix, which maps vech(A) to vec(A) for symmetric A."""
    if k < 1:
        raise ValueError(f"'k' is required to be positive, not {k}")
    dup = np.zeros((k * k, k * (k + 1) // 2))
    col = 0
    for j in range(k):
        for i in range(j, k):
            dup[i + j * k, col] = 1.
            dup[j + i * k, col] = 1.
            col += 1
    return dup

def elimination_matrix(k: int) -> NpArray:
    """Get elimination matrix, which maps vec(A) to vech(A)."""
    if k < 1:
        raise ValueError(f"'k' is required to be positive, not {k}")
    elim = np.zeros((k * (k + 1) // 2, k * k))
    row = 0
    for j in range(k):
        for i in range(j, k):
            elim[row, i + j * k] = 1.
            row += 1
    return elim

def commutation_matrix(k: int) -> NpArray:
    """Get commutation matrix, which maps vec(A) to vec(A^T) for square A."""
    if k < 1:
        raise ValueError(f"'k' is required to be positive, not {k}")
    perm = np.arange(k * k).reshape((k, k)).flatten('F')
    return np.eye(k * k)[perm]

def kron(a: NpArrayLike, b: NpArrayLike) -> NpArray:
    """Kronecker product of two matrices."""
    return np.kron(array.as_matrix("'a'", a), array.as_matrix("'b'", b))

#
# Generalized Inverses and Projectors
#

def _cutoff(w: NpArray, rel_tol: float) -> float:
    wmax = float(np.max(np.abs(w))) if w.size else 0.
    return max(rel_tol * wmax, ABS_TOL)

def generalized_inverse(m: NpArrayLike, rel_tol: float = REL_TOL) -> NpArray:
    """Moore-Penrose inverse of a symmetric positive semi-definite matrix.

    The inverse is computed by a symmetric eigendecomposition. Eigenvalues with
    absolute value at or below *rel_tol* times the largest absolute eigenvalue
    (but at least 1e-300) are treated as zero.

    Args:
        m: Symmetric matrix.
        rel_tol: Relative eigenvalue cutoff.

    Returns:
        Symmetric matrix H with m H m = m.

    """
    m = array.sym(array.as_square("'m'", m))
    w, v = linalg.eigh(m)
    keep = np.abs(w) > _cutoff(w, rel_tol)
    inv = np.zeros_like(w)
    inv[keep] = 1. / w[keep]
    return array.sym((v * inv) @ v.T)

def ridge_inverse(m: NpArrayLike, eps: float = 1e-10) -> NpArray:
    """Ridge regularized inverse of a symmetric positive semi-definite matrix.

    The inverse of m + e I with e = *eps* times the largest eigenvalue of *m*.
    For projections onto the column space of a design, the ridge inverse agrees
    with :func:`generalized_inverse` up to the relative size of *eps*.

    """
    m = array.sym(array.as_square("'m'", m))
    lmax = float(np.max(np.abs(linalg.eigvalsh(m))))
    if lmax <= 0.:
        raise NumericalError("ridge inverse of the zero matrix")
    reg = m + eps * lmax * np.eye(m.shape[0])
    return array.sym(linalg.solve(reg, np.eye(m.shape[0]), assume_a='pos'))

def numerical_rank(m: NpArrayLike, rel_tol: float = REL_TOL) -> int:
    """Number of eigenvalues of a symmetric matrix above the cutoff."""
    m = array.sym(array.as_square("'m'", m))
    w = linalg.eigvalsh(m)
    return int(np.sum(np.abs(w) > _cutoff(w, rel_tol)))

@dataclasses.dataclass(frozen=True)
class Projector:
    """Orthogonal projector onto the column space of a design matrix.

    Args:
        matrix: Symmetric idempotent matrix of shape (n, n).
        rank: Numerical rank of the design matrix.

    """
    matrix: NpArray
    rank: int

    @property
    def dim(self) -> int:
        """Dimension of the ambient space."""
        return int(self.matrix.shape[0])

    @property
    def trace(self) -> float:
        """Trace of the projector, which equals its rank."""
        return float(np.trace(self.matrix))

def projector(g: NpArrayLike, rel_tol: float = REL_TOL) -> Projector:
    """Get orthogonal projector onto the column space of a matrix.

    Args:
        g: Matrix of shape (n, m). Columns may be linearly dependent.
        rel_tol: Relative eigenvalue cutoff of the generalized inverse.

    Returns:
        :class:`Projector` G (G^T G)^- G^T.

    Raises:
        NumericalError: If the matrix has numerical rank zero.

    """
    g = array.as_matrix("'g'", g)
    gram = g.T @ g
    rank = numerical_rank(gram, rel_tol=rel_tol)
    if not rank:
        raise NumericalError("design matrix has rank zero")
    pi = array.sym(g @ generalized_inverse(gram, rel_tol=rel_tol) @ g.T)
    return Projector(matrix=array.frozen(pi), rank=rank)

#
# Matrix Norms
#

def norms() -> StrList:
    """Get sorted list of matrix norms."""
    return sorted(catalog.search(Norm).get('name'))

def norm(x: NpArrayLike, name: str = 'frobenius', **kwds: Any) -> float:
    """Calculate magnitude of a matrix with respect to given norm.

    Args:
        x: Any sequence that can be interpreted as a two-dimensional numpy
            ndarray.
        name: Name of matrix norm. Accepted values are:

            :frobenius: The default norm is the :term:`Frobenius Norm`
            :spectral: Largest absolute eigenvalue of a symmetric matrix
            :nuclear: Sum of the singular values

        **kwds: Parameters of the given norm.

    Returns:
        Non-negative float.

    """
    x = array.as_matrix("'x'", x)
    f = catalog.pick(Norm, name=name)
    return call.safe_call(f, a=x, **kwds)

@catalog.register(Norm, name='frobenius')
def frobenius(a: NpArrayLike) -> float:
    """Frobenius norm of a matrix."""
    a = array.as_matrix("'a'", a)
    return float(np.sqrt(np.sum(a * a)))

@catalog.register(Norm, name='spectral')
def spectral_norm(a: NpArrayLike) -> float:
    """Spectral norm of a symmetric matrix."""
    a = array.as_square("'a'", a)
    if not array.is_symmetric(a):
        raise ValueError("'a' is required to be symmetric")
    return float(np.max(np.abs(linalg.eigvalsh(array.sym(a)))))

@catalog.register(Norm, name='nuclear')
def nuclear_norm(a: NpArrayLike) -> float:
    """Nuclear norm of a matrix."""
    a = array.as_matrix("'a'", a)
    return float(np.sum(linalg.svdvals(a)))

def trace(a: NpArrayLike) -> float:
    """Trace of a square matrix."""
    return float(np.trace(array.as_square("'a'", a)))

def lambda_max(a: NpArrayLike) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    a = array.sym(array.as_square("'a'", a))
    return float(linalg.eigvalsh(a)[-1])

def clip_psd(a: NpArrayLike) -> NpArray:
    """Set negative eigenvalues of a symmetric matrix to zero."""
    a = array.sym(array.as_square("'a'", a))
    w, v = linalg.eigh(a)
    return array.sym((v * np.maximum(w, 0.)) @ v.T)
