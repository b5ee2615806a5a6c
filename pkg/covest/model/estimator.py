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
"""Least Squares Covariance Estimation.

Estimation of the covariance matrix at the design points and of the covariance
function by least squares on the sample second moment matrix. For a design
matrix G of a model, the estimate Psi = (G^T G)^- G^T S G (G^T G)^- minimizes
the empirical contrast (1/N) sum_i ||x_i x_i^T - G Psi G^T||^2 and the implied
covariance matrix G Psi G^T equals the projection Pi S Pi of the sample second
moment matrix S onto the model space.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import Any, Dict, Optional
import numpy as np
from scipy import linalg
from covest.base import array, pool
from covest.core import ui
from covest.errors import NumericalError
from covest.math import basis, matrix
from covest.typing import NpArray, NpArrayLike, PointsLike

#
# Module Constants
#

CLIP_TOL = 1e-8
"""Relative size of negative eigenvalues, which are silently clipped."""

FAIL_TOL = 1e-6
"""Relative size of negative eigenvalues, above which fitting fails."""

SPREAD_BLOCK = 2 ** 20
"""Number of matrix entries per block of centered outer products."""

#
# Data Types
#

@dataclasses.dataclass(frozen=True)
class ObservationSet:
    """Replicated observations of a process at fixed design points.

    Args:
        points: Design points t_1, ..., t_n.
        data: Array of shape (N, n), whose rows are the replications x_i.
        centered: Whether the sample mean is subtracted from the replications
            before moments are computed.
        diagnostics: Mapping with notes of the generating procedure.

    """
    points: NpArray
    data: NpArray
    centered: bool = False
    diagnostics: Dict[str, Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        points = array.as_vector("'points'", self.points)
        data = array.as_matrix("'data'", self.data)
        if data.shape[1] != points.size:
            raise ValueError(
                f"replications have length {data.shape[1]}, "
                f"but there are {points.size} design points")
        object.__setattr__(self, 'points', array.frozen(points))
        object.__setattr__(self, 'data', array.frozen(data))

    @property
    def n(self) -> int:
        """Number of design points."""
        return int(self.data.shape[1])

    @property
    def size(self) -> int:
        """Number of replications N."""
        return int(self.data.shape[0])

    @property
    def samples(self) -> NpArray:
        """Replications, which enter the moments."""
        if self.centered:
            return self.data - self.data.mean(axis=0)
        return self.data

@dataclasses.dataclass(frozen=True)
class MomentEstimates:
    """Sample moments of an observation set."""
    S: NpArray
    xbar: NpArray
    size: int
    centered: bool

@dataclasses.dataclass(frozen=True)
class CovarianceEstimate:
    """Fitted covariance model.

    Args:
        design: :class:`~covest.math.basis.DesignMatrix` of the model.
        psi_hat: Estimated coefficient matrix of shape (m, m).
        sigma_hat: Estimated covariance matrix of shape (n, n) at the design
            points.
        projector: :class:`~covest.math.matrix.Projector` onto the column space
            of the design matrix.
        diagnostics: Rank of the design and magnitudes of eigenvalue clips.

    """
    design: basis.DesignMatrix
    psi_hat: NpArray
    sigma_hat: NpArray
    projector: matrix.Projector
    diagnostics: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def model(self) -> basis.ModelSpec:
        """Model of the estimate."""
        return self.design.model

    @property
    def family(self) -> basis.BasisFamily:
        """Basis family of the estimate."""
        return self.design.family

#
# Moments
#

def sample_second_moment(
        obs: ObservationSet, threads: int = 1,
        reduction: str = 'sequential') -> MomentEstimates:
    """Sample second moment matrix S = (1/N) sum_i x_i x_i^T.

    Args:
        obs: :class:`ObservationSet` instance. If the set is centered, the
            sample mean is subtracted from the replications first.
        threads: Number of worker threads. Zero means all cores.
        reduction: Order of the blockwise summation, see
            :func:`covest.base.pool.reduce_sum`.

    Returns:
        :class:`MomentEstimates` instance.

    """
    xs = obs.samples
    total = pool.blocked_sum(
        lambda rows: rows.T @ rows, xs, threads=threads, reduction=reduction)
    s = array.sym(total / obs.size)
    return MomentEstimates(
        S=array.frozen(s), xbar=array.frozen(obs.data.mean(axis=0)),
        size=obs.size, centered=obs.centered)

def fourth_moment_norm(obs: ObservationSet) -> float:
    """Mean of ||x_i||^4 over the replications."""
    sq = np.sum(obs.samples ** 2, axis=1)
    return float(np.mean(sq * sq))

def centered_spread(
        samples: NpArrayLike, s: NpArrayLike,
        frame: Optional[NpArrayLike] = None, threads: int = 1) -> float:
    """Mean of ||U^T (x_i x_i^T - S) U||^2 over the replications.

    The outer products are centered entrywise before they are squared.

    Args:
        samples: Replications x_i of shape (N, n).
        s: Square matrix S of shape (n, n), usually the sample second moment.
        frame: Optional matrix U of shape (n, D) with orthonormal columns. By
            default U is the identity.
        threads: Number of worker threads. Zero means all cores.

    Returns:
        Non-negative float.

    """
    samples = array.as_matrix("'samples'", samples)
    s = array.as_square("'s'", s)
    if frame is not None:
        frame = array.as_matrix("'frame'", frame)
        samples = samples @ frame
        s = frame.T @ s @ frame
    dim = samples.shape[1]
    def partial(rows: NpArray) -> float:
        dev = np.einsum('ia,ib->iab', rows, rows) - s
        return float(np.sum(dev * dev))
    total = pool.blocked_sum(
        partial, samples, threads=threads,
        size=max(1, SPREAD_BLOCK // (dim * dim)))
    return total / samples.shape[0]

#
# Fitting
#

def least_squares_psi(
        ybar: NpArrayLike, g: NpArrayLike, rel_tol: float = matrix.REL_TOL,
        ginv: Optional[NpArray] = None) -> NpArray:
    """Least squares coefficient matrix for a mean observed matrix.

    Args:
        ybar: Square matrix of shape (n, n), which is not required to be
            symmetric.
        g: Design matrix of shape (n, m).
        rel_tol: Relative eigenvalue cutoff of the generalized inverse.
        ginv: Optional generalized inverse of G^T G, which replaces the
            Moore-Penrose inverse.

    Returns:
        Symmetric matrix (G^T G)^- G^T Y G (G^T G)^- of shape (m, m), with
        Y the symmetric part of *ybar*.

    """
    ybar = array.as_square("'ybar'", ybar)
    g = array.as_matrix("'g'", g)
    if g.shape[0] != ybar.shape[0]:
        raise ValueError("'g' and 'ybar' have incompatible shapes")
    if ginv is None:
        ginv = matrix.generalized_inverse(g.T @ g, rel_tol=rel_tol)
    h = ginv @ g.T
    return array.sym(h @ array.sym(ybar) @ h.T)

def _clip(name: str, a: NpArray) -> tuple:
    w = linalg.eigvalsh(a)
    lmax = max(float(np.max(np.abs(w))), 0.)
    wmin = float(w[0])
    if wmin >= 0. or lmax == 0.:
        return a, 0.
    if wmin < -FAIL_TOL * lmax:
        raise NumericalError(
            f"{name} has negative eigenvalue {wmin:.3e} beyond tolerance")
    if wmin < -CLIP_TOL * lmax:
        ui.warning(f"clipping negative eigenvalue {wmin:.3e} of {name}")
    else:
        ui.debug(f"clipping negative eigenvalue {wmin:.3e} of {name}")
    return matrix.clip_psd(a), -wmin

def fit_model(
        moments: MomentEstimates, design: basis.DesignMatrix,
        rel_tol: float = matrix.REL_TOL) -> CovarianceEstimate:
    """Fit covariance model by least squares.

    Args:
        moments: :class:`MomentEstimates` of the observations.
        design: :class:`~covest.math.basis.DesignMatrix` of the model.
        rel_tol: Relative eigenvalue cutoff of the generalized inverse.

    Returns:
        :class:`CovarianceEstimate` with Psi = (G^T G)^- G^T S G (G^T G)^- and
        Sigma = Pi S Pi. Negative eigenvalues of both matrices, which are due
        to rounding, are clipped at zero.

    Raises:
        NumericalError: If the design has rank zero or if a fitted matrix has
            a negative eigenvalue beyond 1e-6 times its largest eigenvalue.

    """
    g = design.matrix
    if g.shape[0] != moments.S.shape[0]:
        raise ValueError(
            f"design has {g.shape[0]} rows, but there are "
            f"{moments.S.shape[0]} design points")
    proj = matrix.projector(g, rel_tol=rel_tol)
    psi = least_squares_psi(moments.S, g, rel_tol=rel_tol)
    pi = proj.matrix
    sigma = array.sym(pi @ moments.S @ pi)
    psi, clip_psi = _clip('psi_hat', psi)
    sigma, clip_sigma = _clip('sigma_hat', sigma)
    if proj.rank < design.model.size:
        ui.debug(
            f"model '{design.model.model_id}' has rank {proj.rank} "
            f"of {design.model.size} columns")
    diagnostics = {
        'rank': proj.rank, 'columns': design.model.size,
        'clip_psi': clip_psi, 'clip_sigma': clip_sigma}
    return CovarianceEstimate(
        design=design, psi_hat=array.frozen(psi),
        sigma_hat=array.frozen(sigma), projector=proj,
        diagnostics=diagnostics)

def empirical_contrast(
        obs: ObservationSet, candidate: NpArrayLike,
        moments: Optional[MomentEstimates] = None,
        spread: Optional[float] = None) -> float:
    """Empirical contrast (1/N) sum_i ||x_i x_i^T - candidate||^2.

    The contrast is evaluated as the spread mean ||x_i x_i^T - S||^2 of the
    outer products plus ||S - candidate||^2.

    Args:
        obs: :class:`ObservationSet` instance.
        candidate: Square matrix of shape (n, n).
        moments: Optional precomputed moments of *obs*.
        spread: Optional precomputed :func:`centered_spread` of *obs*.

    Returns:
        Non-negative float.

    """
    candidate = array.as_square("'candidate'", candidate)
    if candidate.shape[0] != obs.n:
        raise ValueError(
            f"candidate has dimension {candidate.shape[0]}, not {obs.n}")
    moments = moments or sample_second_moment(obs)
    if spread is None:
        spread = centered_spread(obs.samples, moments.S)
    dev = moments.S - candidate
    return spread + float(np.sum(dev * dev))

def eval_cov_fn(
        est: CovarianceEstimate, s: PointsLike, t: PointsLike) -> NpArray:
    """Evaluate the estimated covariance function.

    Args:
        est: :class:`CovarianceEstimate` instance.
        s: Point or array of points within the basis domain.
        t: Point or array of points of the same shape as *s*.

    Returns:
        Values G_s^T Psi G_t with the shape of *s*.

    """
    s, t = array.cast(s), array.cast(t)
    if s.shape != t.shape:
        raise ValueError("'s' and 't' are required to have the same shape")
    idx = est.model.indices
    gs = np.stack([basis.evaluate_basis(est.family, i, s) for i in idx], -1)
    gt = np.stack([basis.evaluate_basis(est.family, i, t) for i in idx], -1)
    return np.einsum('...i,ij,...j->...', gs, est.psi_hat, gt)

def normal_equation_residual(
        moments: MomentEstimates, design: basis.DesignMatrix,
        psi_hat: NpArrayLike) -> float:
    """Residual of the normal equation of the vectorized regression.

    With the duplication matrix D, the normal equation of the least squares
    problem min ||vec(Y) - (G x G) D vech(Psi)|| reads D^T vec(A) = D^T vec(B)
    for A = G^T G Psi G^T G and B = G^T Y G. It is evaluated through the
    identity D^T vec(A) = vech(A + A^T - diag(A)).

    Returns:
        Euclidean norm of the difference of both sides.

    """
    g = design.matrix
    psi = array.as_square("'psi_hat'", psi_hat)
    ybar = moments.S
    gtg = g.T @ g
    lhs = gtg @ (psi + psi.T) @ gtg - np.diag(np.diag(gtg @ psi @ gtg))
    rhs = g.T @ (ybar + ybar.T) @ g - np.diag(np.diag(g.T @ ybar @ g))
    return float(np.linalg.norm(matrix.vech(lhs) - matrix.vech(rhs)))

def stacked_projector(proj: matrix.Projector, size: int) -> NpArray:
    """Orthogonal projector onto the stacked model space V_N(G).

    The space V_N(G) contains the vectors 1_N x vec(Gamma) for symmetric Gamma
    in the model space. Its projector is (J_N / N) x (Pi x Pi)(I + K) / 2 with
    the all-ones matrix J_N and the commutation matrix K.

    """
    if size < 1:
        raise ValueError(f"'size' is required to be positive, not {size}")
    pi = proj.matrix
    n = proj.dim
    sym = (np.eye(n * n) + matrix.commutation_matrix(n)) / 2.
    block = np.kron(pi, pi) @ sym
    return np.kron(np.full((size, size), 1. / size), block)
