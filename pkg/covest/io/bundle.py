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
"""Result bundles of estimation and selection runs."""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
import datetime
from typing import Dict, Optional
import numpy as np
import covest
from covest.errors import DataFormatError
from covest.io import text
from covest.math import basis, matrix
from covest.model import estimator
from covest.typing import NpArray, Record, RecordList
from hup.typing import PathLike

@dataclasses.dataclass
class ResultBundle:
    """Results of a run together with the configuration, which produced them.

    Args:
        command: Name of the command.
        config: Effective configuration.
        family: Basis family as mapping with the keys 'kind', 'lower',
            'upper' and 'max_size'.
        model: Selected or fitted model as mapping with the keys 'model_id'
            and 'indices'.
        psi_hat: Coefficient matrix.
        sigma_hat: Covariance matrix at the design points.
        points: Design points.
        table: Selection table, empty for estimation runs.
        diagnostics: Rank decisions, clip magnitudes and further notes.
        timestamps: Start and end of the run in ISO 8601 format.
        version: Version of covest.

    """
    command: str
    config: Record
    family: Record
    model: Record
    psi_hat: NpArray
    sigma_hat: NpArray
    points: NpArray
    table: RecordList = dataclasses.field(default_factory=list)
    diagnostics: Record = dataclasses.field(default_factory=dict)
    timestamps: Dict[str, str] = dataclasses.field(default_factory=dict)
    version: str = covest.__version__

    def as_dict(self) -> Record:
        """Get JSON compatible representation."""
        return {
            'command': self.command, 'config': self.config,
            'family': self.family, 'model': self.model,
            'psi_hat': np.asarray(self.psi_hat).tolist(),
            'sigma_hat': np.asarray(self.sigma_hat).tolist(),
            'points': np.asarray(self.points).tolist(),
            'table': self.table, 'diagnostics': self.diagnostics,
            'timestamps': self.timestamps, 'version': self.version}

    def save(self, path: PathLike) -> None:
        """Write bundle to JSON file."""
        text.save_json(path, self.as_dict())

    def estimate(self) -> estimator.CovarianceEstimate:
        """Rebuild covariance estimate for the evaluation of sigma(s, t)."""
        family = basis.BasisFamily(**self.family)
        model = basis.ModelSpec(
            self.model['model_id'], tuple(self.model['indices']))
        design = basis.design_matrix(family, model, self.points)
        return estimator.CovarianceEstimate(
            design=design, psi_hat=np.array(self.psi_hat),
            sigma_hat=np.array(self.sigma_hat),
            projector=matrix.projector(design.matrix),
            diagnostics=dict(self.diagnostics))

def from_estimate(
        command: str, config: Record, est: estimator.CovarianceEstimate,
        table: Optional[RecordList] = None,
        diagnostics: Optional[Record] = None) -> ResultBundle:
    """Create bundle from a covariance estimate."""
    family = est.family
    return ResultBundle(
        command=command, config=config,
        family={
            'kind': family.kind, 'lower': family.lower,
            'upper': family.upper, 'max_size': family.max_size},
        model={
            'model_id': est.model.model_id,
            'indices': [int(i) for i in est.model.indices]},
        psi_hat=est.psi_hat, sigma_hat=est.sigma_hat,
        points=est.design.points, table=table or [],
        diagnostics={**est.diagnostics, **(diagnostics or {})})

def load(path: PathLike) -> ResultBundle:
    """Read bundle from JSON file."""
    data = text.load_json(path)
    try:
        return ResultBundle(
            command=data['command'], config=data['config'],
            family=data['family'], model=data['model'],
            psi_hat=np.array(data['psi_hat'], dtype=float),
            sigma_hat=np.array(data['sigma_hat'], dtype=float),
            points=np.array(data['points'], dtype=float),
            table=data.get('table', []),
            diagnostics=data.get('diagnostics', {}),
            timestamps=data.get('timestamps', {}),
            version=data.get('version', ''))
    except (KeyError, TypeError) as err:
        raise DataFormatError(
            f"result bundle lacks field {err}", path=path) from err

def timestamp() -> str:
    """Current UTC time in ISO 8601 format."""
    return datetime.datetime.now(datetime.timezone.utc).isoformat(
        timespec='seconds')
