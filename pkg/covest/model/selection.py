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
"""Penalized Model Selection.

Selection of a covariance model within a collection by minimizing the empirical
contrast of the fitted models, plus the penalty (1 + theta) delta_m^2 D_m / N.
The noise level delta_m^2 = Tr((Pi_m x Pi_m) Phi) / D_m of a model is computed
from the empirical covariance Phi of the vectorized outer products
vec(x_i x_i^T).

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, eigsh
from covest.base import array, pool
from covest.core import ui
from covest.math import basis, matrix, regress
from covest.model import estimator
from covest.typing import NpArray, NpArrayLike, RecordList

PENALTY_MODES = ['delta_m', 'lambda_max']
"""Accepted penalty modes."""

DENSE_LIMIT = 1024
"""Largest dimension n^2, for which spectra of Phi are computed densely."""

#
# Fourth Moments
#

@dataclasses.dataclass(frozen=True)
class FourthMomentMatrix:
    """Empirical covariance of the vectorized outer products.

    The matrix Phi = (1/N) sum_i w_i w_i^T with w_i = vec(x_i x_i^T - S) has
    dimension n^2 and is only materialized on request by :attr:`matrix`.

    Args:
        samples: Replications of shape (N, n), which enter the moments.
        S: Sample second moment matrix.
        degenerate: True for a single replication, in which case Phi is zero.

    """
    samples: NpArray
    S: NpArray
    degenerate: bool = False

    @property
    def n(self) -> int:
        """Number of design points."""
        return int(self.samples.shape[1])

    @property
    def size(self) -> int:
        """Number of replications N."""
        return int(self.samples.shape[0])

    @property
    def matrix(self) -> NpArray:
        """Dense matrix Phi of shape (n^2, n^2)."""
        n = self.n
        if self.degenerate:
            return np.zeros((n * n, n * n))
        s = self.S.flatten('F')
        def partial(rows: NpArray) -> NpArray:
            w = np.einsum('ia,ib->iab', rows, rows).reshape(-1, n * n) - s
            return w.T @ w
        phi = pool.blocked_sum(partial, self.samples) / self.size
        return array.sym(phi)

    def apply(self, v: NpArray) -> NpArray:
        """Product Phi v without materializing Phi."""
        n = self.n
        if self.degenerate:
            return np.zeros(n * n)
        mat = v.reshape((n, n), order='F')
        xs = self.samples
        c = np.sum((xs @ mat) * xs, axis=1) - np.sum(self.S * mat)
        out = (xs.T * c) @ xs / self.size - self.S * np.mean(c)
        return out.flatten('F')

    @property
    def lambda_max(self) -> float:
        """Largest eigenvalue of Phi."""
        n = self.n
        if self.degenerate:
            return 0.
        if n * n <= DENSE_LIMIT:
            return max(float(linalg.eigvalsh(self.matrix)[-1]), 0.)
        op = LinearOperator(
            (n * n, n * n), matvec=self.apply, dtype=np.float64)
        v0 = np.ones(n * n)
        w = eigsh(op, k=1, which='LA', v0=v0, tol=1e-12,
            return_eigenvectors=False)
        return max(float(w[0]), 0.)

    @property
    def trace(self) -> float:
        """Trace of Phi."""
        if self.degenerate:
            return 0.
        return estimator.centered_spread(self.samples, self.S)

def estimate_phi(obs: estimator.ObservationSet,
        moments: Optional[estimator.MomentEstimates] = None
        ) -> FourthMomentMatrix:
    """Estimate the covariance of vec(x_1 x_1^T) from the replications.

    Args:
        obs: :class:`~covest.model.estimator.ObservationSet` instance.
        moments: Optional precomputed moments of *obs*.

    Returns:
        :class:`FourthMomentMatrix` instance. For a single replication the
        matrix is zero and flagged as degenerate.

    """
    moments = moments or estimator.sample_second_moment(obs)
    degenerate = obs.size < 2
    if degenerate:
        ui.warning(
            "fourth moments of a single replication are degenerate: "
            "penalties vanish")
    return FourthMomentMatrix(
        samples=obs.samples, S=moments.S, degenerate=degenerate)

def kron_trace(pi: NpArrayLike, phi: NpArrayLike) -> float:
    """Trace of (Pi x Pi) Phi for a dense matrix Phi of shape (n^2, n^2)."""
    pi = array.as_square("'pi'", pi)
    n = pi.shape[0]
    phi4 = array.as_square("'phi'", phi).reshape(n, n, n, n)
    # vec index a + b n is stored at phi4[b, a]
    return float(np.einsum('ac,bd,dcba->', pi, pi, phi4))

def projected_spread(phi: FourthMomentMatrix, pi: NpArray) -> float:
    """Trace of (Pi x Pi) Phi, computed from the replications.

    Uses Tr((Pi x Pi) Phi) = (1/N) sum_i ||U^T (x_i x_i^T - S) U||^2, where
    the columns of U are an orthonormal basis of the range of Pi.

    """
    if phi.degenerate:
        return 0.
    w, v = linalg.eigh(array.sym(pi))
    frame = v[:, w > .5]
    if not frame.shape[1]:
        return 0.
    return estimator.centered_spread(phi.samples, phi.S, frame=frame)

def delta_sq(proj: matrix.Projector, phi: FourthMomentMatrix) -> float:
    """Noise level Tr((Pi x Pi) Phi) / D of a model.

    Args:
        proj: :class:`~covest.math.matrix.Projector` of the model.
        phi: :class:`FourthMomentMatrix` of the observations.

    Returns:
        Non-negative float.

    """
    dim = proj.trace
    if dim < 1. - 1e-6:
        raise ValueError(f"model dimension {dim} is below one")
    if proj.dim != phi.n:
        raise ValueError(
            f"projector has dimension {proj.dim}, not {phi.n}")
    return projected_spread(phi, proj.matrix) / dim

def penalty(dim: float, delta: float, theta: float, size: int) -> float:
    """Penalty (1 + theta) delta^2 D / N of a model.

    Args:
        dim: Model dimension D.
        delta: Noise level delta^2.
        theta: Positive penalty parameter.
        size: Number of replications N.

    """
    if not theta > 0:
        raise ValueError(f"'theta' is required to be positive, not {theta}")
    if size < 1:
        raise ValueError(f"'size' is required to be positive, not {size}")
    return (1. + theta) * delta * dim / size

def oracle_constant(theta: float) -> float:
    """Leading constant (2 + 8 / theta)(1 + theta) of the oracle inequality."""
    if not theta > 0:
        raise ValueError(f"'theta' is required to be positive, not {theta}")
    return (2. + 8. / theta) * (1. + theta)

def unbiased_risk(
        obs: estimator.ObservationSet, est: estimator.CovarianceEstimate,
        phi: Optional[FourthMomentMatrix] = None) -> float:
    """Unbiased estimate of the risk E||Sigma - Sigma_hat||^2 of a model.

    With the unbiased fourth moment estimate Phi' = N / (N - 1) Phi, the
    estimate is ||S - Sigma_hat||^2 + (2 Tr((Pi x Pi) Phi') - Tr(Phi')) / N.

    """
    if obs.size < 2:
        raise ValueError("unbiased risk requires at least two replications")
    phi = phi or estimate_phi(obs)
    scale = obs.size / (obs.size - 1.)
    gamma_sq = scale * projected_spread(phi, est.projector.matrix)
    resid = phi.S - est.sigma_hat
    return float(np.sum(resid * resid)) \
        + (2. * gamma_sq - scale * phi.trace) / obs.size

#
# Selection
#

@dataclasses.dataclass(frozen=True)
class PenaltyProfile:
    """Per model quantities of the penalty."""
    model_ids: Tuple[str, ...]
    dims: Tuple[float, ...]
    delta_sq: Tuple[float, ...]
    pen: Tuple[float, ...]
    theta: float
    lambda_max_phi: float

    @property
    def delta_sup(self) -> float:
        """Largest noise level over the models."""
        return max(self.delta_sq)

    def bound_violations(self, rtol: float = 1e-8) -> int:
        """Count noise levels above the largest eigenvalue of Phi."""
        bound = self.lambda_max_phi * (1. + rtol)
        return sum(1 for d in self.delta_sq if d > bound)

@dataclasses.dataclass(frozen=True)
class SelectionResult:
    """Result of the penalized selection.

    Args:
        chosen: Identifier of the selected model.
        table: Rows with the keys 'model_id', 'm', 'D_m', 'delta_sq',
            'contrast', 'pen', 'criterion', 'chosen' and 'risk_hat'.
        estimate: :class:`~covest.model.estimator.CovarianceEstimate` of the
            selected model.
        fits: Estimates of all models in the order of the model list.
        profile: :class:`PenaltyProfile` of the collection.
        tie_broken: Whether the minimum was attained by more than one model.
        penalty_mode: Name of the penalty mode.

    """
    chosen: str
    table: RecordList
    estimate: estimator.CovarianceEstimate
    fits: Tuple[estimator.CovarianceEstimate, ...]
    profile: PenaltyProfile
    tie_broken: bool
    penalty_mode: str

def _check_designs(
        obs: estimator.ObservationSet,
        designs: Sequence[basis.DesignMatrix]) -> None:
    if not designs:
        raise ValueError("empty model list")
    ids = [d.model.model_id for d in designs]
    dups = sorted({i for i in ids if ids.count(i) > 1})
    if dups:
        raise ValueError(f"duplicate model_id '{dups[0]}'")
    for design in designs:
        if not np.array_equal(design.points, obs.points):
            raise ValueError(
                f"model '{design.model.model_id}' is not built on the "
                "design points of the observations")

def penalty_profile(
        fits: Sequence[estimator.CovarianceEstimate],
        phi: FourthMomentMatrix, theta: float = 1.,
        penalty_mode: str = 'delta_m') -> PenaltyProfile:
    """Compute dimensions, noise levels and penalties of fitted models."""
    if penalty_mode not in PENALTY_MODES:
        raise ValueError(
            f"penalty mode '{penalty_mode}' is not valid, "
            f"allowed values are: {', '.join(PENALTY_MODES)}")
    lmax = phi.lambda_max
    dims = [fit.projector.trace for fit in fits]
    if penalty_mode == 'lambda_max':
        deltas = [lmax for _ in fits]
    else:
        deltas = [delta_sq(fit.projector, phi) for fit in fits]
    pens = [penalty(d, s, theta, phi.size) for d, s in zip(dims, deltas)]
    return PenaltyProfile(
        model_ids=tuple(fit.model.model_id for fit in fits),
        dims=tuple(dims), delta_sq=tuple(deltas), pen=tuple(pens),
        theta=theta, lambda_max_phi=lmax)

def select(
        obs: estimator.ObservationSet,
        designs: Sequence[basis.DesignMatrix], theta: float = 1.,
        penalty_mode: str = 'delta_m', threads: int = 1,
        reduction: str = 'sequential', rel_tol: float = matrix.REL_TOL
        ) -> SelectionResult:
    """Select a covariance model by penalized empirical contrast.

    Args:
        obs: :class:`~covest.model.estimator.ObservationSet` instance.
        designs: Non-empty list of design matrices, built on the design
            points of *obs*, with distinct model identifiers.
        theta: Positive penalty parameter.
        penalty_mode: 'delta_m' uses the noise level of each model and
            'lambda_max' the largest eigenvalue of Phi for all models.
        threads: Number of worker threads. Zero means all cores.
        reduction: Order of blockwise summations.
        rel_tol: Relative eigenvalue cutoff of generalized inverses.

    Returns:
        :class:`SelectionResult` instance. Ties within a relative tolerance of
        1e-12 are broken towards the smaller model dimension and then towards
        the lexicographically smaller model identifier.

    """
    _check_designs(obs, designs)
    if not theta > 0:
        raise ValueError(f"'theta' is required to be positive, not {theta}")
    moments = estimator.sample_second_moment(
        obs, threads=threads, reduction=reduction)
    phi = estimate_phi(obs, moments=moments)
    fits = pool.map_ordered(
        lambda d: estimator.fit_model(moments, d, rel_tol=rel_tol),
        list(designs), threads=threads)
    profile = penalty_profile(
        fits, phi, theta=theta, penalty_mode=penalty_mode)
    spread = phi.trace
    contrasts = [
        estimator.empirical_contrast(
            obs, fit.sigma_hat, moments=moments, spread=spread)
        for fit in fits]
    criteria = [c + p for c, p in zip(contrasts, profile.pen)]
    order = regress.tie_order(
        [fit.projector.trace for fit in fits],
        [fit.model.model_id for fit in fits])
    if phi.degenerate:
        ui.warning("selecting the smallest model for a single replication")
        chosen = min(range(len(fits)), key=lambda i: order[i])
        tied = False
    else:
        chosen, tied = regress.argmin_tied(criteria, order)
    table: RecordList = []
    for i, fit in enumerate(fits):
        risk_hat: Any = None
        if obs.size > 1:
            risk_hat = unbiased_risk(obs, fit, phi=phi)
        table.append({
            'model_id': fit.model.model_id, 'm': fit.model.size,
            'D_m': profile.dims[i], 'delta_sq': profile.delta_sq[i],
            'contrast': contrasts[i], 'pen': profile.pen[i],
            'criterion': criteria[i], 'chosen': i == chosen,
            'risk_hat': risk_hat})
    if tied:
        ui.info(
            f"criterion tie broken towards model "
            f"'{fits[chosen].model.model_id}'")
    return SelectionResult(
        chosen=fits[chosen].model.model_id, table=table,
        estimate=fits[chosen], fits=tuple(fits), profile=profile,
        tie_broken=tied, penalty_mode=penalty_mode)

#
# Generic Layer
#

def stacked_covariance_problem(
        obs: estimator.ObservationSet,
        designs: Sequence[basis.DesignMatrix]
        ) -> Tuple[NpArray, List[Tuple[NpArray, float]], NpArray]:
    """Express covariance selection as a generic regression problem.

    The observations are y_i = vec(x_i x_i^T) with error covariance Phi and
    the models are the projectors onto the stacked model spaces V_N(G).

    Returns:
        Tuple (y, projectors, phi) for
        :func:`covest.math.regress.generic_select`.

    """
    _check_designs(obs, designs)
    xs = obs.samples
    n = obs.n
    y = np.einsum('ia,ib->iab', xs, xs).reshape(-1, n * n)
    moments = estimator.sample_second_moment(obs)
    phi = estimate_phi(obs, moments=moments).matrix
    projectors = []
    for design in designs:
        proj = matrix.projector(design.matrix)
        stacked = estimator.stacked_projector(proj, obs.size)
        projectors.append((stacked, float(np.trace(stacked))))
    return y, projectors, phi

def selection_summary(result: SelectionResult) -> Dict[str, Any]:
    """Get JSON compatible summary of a selection result."""
    return {
        'chosen': result.chosen, 'tie_broken': result.tie_broken,
        'penalty_mode': result.penalty_mode, 'theta': result.profile.theta,
        'lambda_max_phi': result.profile.lambda_max_phi,
        'delta_sup': result.profile.delta_sup,
        'bound_violations': result.profile.bound_violations(),
        'table': result.table}
