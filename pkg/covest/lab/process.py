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
"""Simulated Processes.

Generators of replicated observations from processes with known covariance
structure: Gaussian vectors with an explicit covariance matrix, and truncated
Karhunen-Loeve expansions X(t) = sum_l gamma_l zeta_l g_l(t) with polynomially
decaying spectrum gamma_l = scale * l^(-alpha) and either standard normal or
standardized Student-t coefficients. Process kinds are registered within a
catalog and picked by name.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
from typing import Optional, Tuple
import numpy as np
from scipy import linalg, special
from hup.base import call, catalog
from hup.typing import StrList
from covest.base import array
from covest.core import ui
from covest.errors import NumericalError
from covest.math import basis, matrix
from covest.model import estimator
from covest.typing import NpArray, NpGenerator, PointsLike

JITTER = 1e-12
"""Relative size of the diagonal jitter for failing factorizations."""

GAUSSIAN = ('gp_cholesky', 'kl_process')
"""Process kinds with Gaussian finite dimensional distributions."""

#
# Define Catalog Categories
#

@catalog.category
class Process:
    name: str

def processes() -> StrList:
    """Get sorted list of process kinds."""
    return sorted(catalog.search(Process).get('name'))

#
# Process Specification
#

@dataclasses.dataclass(frozen=True)
class TrueProcessSpec:
    """Specification of a simulated process.

    Args:
        kind: Name of the process kind, see :func:`processes`.
        rng_seed: Seed of the random number generator.
        sigma: Covariance matrix at the design points, for the kind
            'gp_cholesky'.
        family: :class:`~covest.math.basis.BasisFamily` of the expansion, for
            the kinds 'kl_process' and 'non_gaussian_kl'.
        alpha: Positive decay rate of the spectrum.
        scale: Non-negative scale of the spectrum.
        truncation: Number of expansion terms L.
        dof: Degrees of freedom of the Student-t coefficients, larger than 4.

    """
    kind: str = 'kl_process'
    rng_seed: int = 0
    sigma: Optional[NpArray] = None
    family: Optional[basis.BasisFamily] = None
    alpha: float = 1.
    scale: float = 1.
    truncation: int = 16
    dof: float = 5.

    def __post_init__(self) -> None:
        if self.kind not in processes():
            raise ValueError(
                f"process kind '{self.kind}' is not valid, "
                f"allowed values are: {', '.join(processes())}")
        if self.kind == 'gp_cholesky':
            if self.sigma is None:
                raise ValueError("process 'gp_cholesky' requires 'sigma'")
            sigma = array.as_square("'sigma'", self.sigma)
            if not array.is_symmetric(sigma):
                raise ValueError("'sigma' is required to be symmetric")
            object.__setattr__(self, 'sigma', array.frozen(sigma))
            return
        if self.family is None:
            raise ValueError(f"process '{self.kind}' requires a basis family")
        if not self.alpha > 0:
            raise ValueError("'alpha' is required to be positive")
        if self.scale < 0:
            raise ValueError("'scale' is required to be non-negative")
        if not 1 <= self.truncation <= self.family.max_size:
            raise ValueError(
                f"'truncation' is required to be within "
                f"1..{self.family.max_size}")
        if self.kind == 'non_gaussian_kl' and not self.dof > 4:
            raise ValueError(
                "Student-t coefficients require 'dof' > 4 for finite fourth "
                "moments")

    @property
    def gaussian(self) -> bool:
        """Whether the process is Gaussian."""
        return self.kind in GAUSSIAN

def spectrum(spec: TrueProcessSpec) -> NpArray:
    """Standard deviations gamma_l = scale * l^(-alpha), l = 1, ..., L."""
    idx = np.arange(1, spec.truncation + 1, dtype=float)
    return spec.scale * idx ** (-spec.alpha)

def tail_energy(spec: TrueProcessSpec) -> float:
    """Spectral mass sum_{l > L} gamma_l^2 beyond the truncation."""
    if spec.kind == 'gp_cholesky':
        return 0.
    if 2. * spec.alpha <= 1.:
        return float('inf')
    return float(
        spec.scale ** 2 * special.zeta(2. * spec.alpha, spec.truncation + 1.))

def _expansion(spec: TrueProcessSpec, points: NpArray) -> NpArray:
    idx = range(1, spec.truncation + 1)
    cols = [basis.evaluate_basis(spec.family, i, points) for i in idx]
    return np.stack(cols, axis=1) * spectrum(spec)

def true_sigma(spec: TrueProcessSpec, points: PointsLike) -> NpArray:
    """Covariance matrix of the process at the design points."""
    points = array.as_vector("'points'", points)
    if spec.kind == 'gp_cholesky':
        if spec.sigma.shape[0] != points.size:
            raise ValueError(
                f"'sigma' has dimension {spec.sigma.shape[0]}, "
                f"but there are {points.size} design points")
        return np.array(spec.sigma)
    factor = _expansion(spec, points)
    return array.sym(factor @ factor.T)

def isserlis_phi(sigma: NpArray) -> NpArray:
    """Covariance of vec(x x^T) for a centered Gaussian vector x.

    The entries are Sigma_ac Sigma_bd + Sigma_ad Sigma_bc for the index pairs
    (a, b) and (c, d), which gives (Sigma x Sigma)(I + K) with the commutation
    matrix K.

    """
    sigma = array.as_square("'sigma'", sigma)
    n = sigma.shape[0]
    prod = np.kron(sigma, sigma)
    return array.sym(prod + prod @ matrix.commutation_matrix(n))

def true_phi_gaussian(spec: TrueProcessSpec, points: PointsLike) -> NpArray:
    """Covariance of vec(x x^T) for a Gaussian process specification."""
    if not spec.gaussian:
        raise ValueError(
            f"process '{spec.kind}' is not Gaussian: fourth moments are not "
            "given by pairings")
    return isserlis_phi(true_sigma(spec, points))

def gaussian_gamma_sq(sigma: NpArray, pi: NpArray) -> float:
    """Trace of (Pi x Pi) Phi for Gaussian fourth moments.

    Equals (tr Pi Sigma Pi)^2 + ||Pi Sigma Pi||^2.

    """
    sp = pi @ sigma @ pi
    return float(np.trace(sp) ** 2 + np.sum(sp * sp))

#
# Sampling
#

@catalog.register(Process, name='gp_cholesky')
def gp_cholesky(
        spec: TrueProcessSpec, points: NpArray, size: int,
        rng: NpGenerator) -> Tuple[NpArray, dict]:
    """Gaussian vectors x = L z with L L^T = Sigma."""
    sigma = true_sigma(spec, points)
    notes: dict = {}
    lmax = float(np.max(np.abs(linalg.eigvalsh(sigma))))
    z = rng.standard_normal((size, points.size))
    if lmax == 0.:
        return np.zeros((size, points.size)), notes
    try:
        low = linalg.cholesky(sigma, lower=True)
    except linalg.LinAlgError:
        jitter = JITTER * lmax
        ui.warning(f"adding jitter {jitter:.3e} to the covariance diagonal")
        notes['jitter'] = jitter
        try:
            low = linalg.cholesky(
                sigma + jitter * np.eye(points.size), lower=True)
        except linalg.LinAlgError as err:
            raise NumericalError(
                "covariance is indefinite beyond jitter repair") from err
    return z @ low.T, notes

@catalog.register(Process, name='kl_process')
def kl_process(
        spec: TrueProcessSpec, points: NpArray, size: int,
        rng: NpGenerator) -> Tuple[NpArray, dict]:
    """Truncated expansion with standard normal coefficients."""
    zeta = rng.standard_normal((size, spec.truncation))
    return zeta @ _expansion(spec, points).T, {}

@catalog.register(Process, name='non_gaussian_kl')
def non_gaussian_kl(
        spec: TrueProcessSpec, points: NpArray, size: int,
        rng: NpGenerator) -> Tuple[NpArray, dict]:
    """Truncated expansion with Student-t coefficients of unit variance."""
    zeta = rng.standard_t(spec.dof, (size, spec.truncation))
    zeta = zeta / np.sqrt(spec.dof / (spec.dof - 2.))
    return zeta @ _expansion(spec, points).T, {}

def sample_process(
        spec: TrueProcessSpec, points: PointsLike, size: int,
        rng: Optional[NpGenerator] = None,
        centered: bool = False) -> estimator.ObservationSet:
    """Draw replications of a process at the design points.

    Args:
        spec: :class:`TrueProcessSpec` instance.
        points: Design points.
        size: Number of replications N.
        rng: Optional random number generator. By default a generator seeded
            by the seed of the specification is used.
        centered: Centering flag of the returned observation set.

    Returns:
        :class:`~covest.model.estimator.ObservationSet` instance.

    """
    points = array.as_vector("'points'", points)
    if size < 1:
        raise ValueError(f"'size' is required to be positive, not {size}")
    rng = rng or np.random.default_rng(spec.rng_seed)
    f = catalog.pick(Process, name=spec.kind)
    data, notes = call.safe_call(
        f, spec=spec, points=points, size=size, rng=rng)
    return estimator.ObservationSet(
        points=points, data=data, centered=centered, diagnostics=notes)
