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
"""Unittesting for math modules."""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

from typing import Any, Callable
import numpy as np
from hup.base import test
from covest.typing import NpArray, NpArrayLike

class MathModule(test.ModuleTest):
    """TestCase for math modules."""

    def assertAllClose(
            self, a: NpArrayLike, b: NpArrayLike, atol: float = 1e-10,
            rtol: float = 0.) -> None:
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        self.assertEqual(a.shape, b.shape)
        gap = float(np.max(np.abs(a - b))) if a.size else 0.
        self.assertTrue(np.allclose(a, b, atol=atol, rtol=rtol),
            f"arrays differ by {gap:.3e}")

    def assertSymmetric(self, a: NpArray, atol: float = 1e-10) -> None:
        self.assertAllClose(a, a.T, atol=atol)

    def assertIdempotent(self, a: NpArray, atol: float = 1e-10) -> None:
        self.assertAllClose(a @ a, a, atol=atol)

    def assertIsProjector(self, a: NpArray, atol: float = 1e-10) -> None:
        self.assertSymmetric(a, atol=atol)
        self.assertIdempotent(a, atol=atol)

    def assertPositiveSemiDefinite(
            self, a: NpArray, rtol: float = 1e-10) -> None:
        w = np.linalg.eigvalsh((a + a.T) / 2.)
        scale = max(float(np.max(np.abs(w))), 1.)
        self.assertGreaterEqual(float(w[0]), -rtol * scale,
            f"matrix has negative eigenvalue {w[0]:.3e}")

    def assertIsMatrixNorm(self, f: Callable, **kwds: Any) -> None:
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 4))
        x = x + x.T
        y = rng.standard_normal((4, 4))
        y = y + y.T
        # Test positivity and definiteness
        self.assertGreater(f(x, **kwds), 0.)
        self.assertAlmostEqual(f(np.zeros((4, 4)), **kwds), 0.)
        # Test absolute homogeneity
        self.assertAlmostEqual(f(-3. * x, **kwds), 3. * f(x, **kwds))
        # Test triangle inequality
        self.assertLessEqual(
            f(x + y, **kwds), f(x, **kwds) + f(y, **kwds) + 1e-12)
