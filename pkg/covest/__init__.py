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
"""Covest.

Covest is a framework for the nonparametric estimation of the covariance
function of a second order stochastic process from independent and identically
distributed replications, observed on a fixed grid of design points. Covariance
functions are modeled as finite basis expansions, fitted by least squares on the
sample second moment matrix and selected within a model collection by a
penalized empirical contrast. An experimental lab provides the Monte-Carlo
checks for the risk decomposition, the oracle inequality, the convergence rate
and the concentration of quadratic forms.

"""
__version__ = '0.1.0'
__license__ = 'GPLv3'
__copyright__ = '2019 Frootlab'
__description__ = 'Model Selection for Covariance Function Estimation'
__url__ = 'https://www.frootlab.org/covest'
__organization__ = 'Frootlab'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']
__maintainer__ = 'Patrick Michl'
__docformat__ = 'google'
