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

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

from fractions import Fraction
import numpy as np
from covest.errors import NumericalError
from covest.math import basis, matrix, test
from covest.model import estimator

FAMILY = basis.BasisFamily('fourier', max_size=16)

def _design(g: np.ndarray, points: np.ndarray = None) -> basis.DesignMatrix:
    g = np.asarray(g, dtype=float)
    if points is None:
        points = (np.arange(g.shape[0]) + .5) / g.shape[0]
    model = basis.ModelSpec('g', tuple(range(1, g.shape[1] + 1)))
    return basis.DesignMatrix(
        family=FAMILY, model=model, points=points, matrix=g)

def _exact_contrast(rows: list, candidate: list) -> Fraction:
    # mean ||x x^T - candidate||^2 in rational arithmetic
    total = Fraction(0)
    for x in rows:
        for a, xa in enumerate(x):
            for b, xb in enumerate(x):
                total += (Fraction(xa) * Fraction(xb) - candidate[a][b]) ** 2
    return total / len(rows)

def _obs(data: list, centered: bool = False) -> estimator.ObservationSet:
    data = np.asarray(data, dtype=float)
    n = data.shape[1]
    return estimator.ObservationSet(
        points=(np.arange(n) + .5) / n, data=data, centered=centered)

class TestEstimator(test.MathModule):
    module = estimator

    def setUp(self) -> None:
        self.rng = np.random.default_rng(7)
        self.points = (np.arange(6) + .5) / 6.
        self.data = self.rng.standard_normal((40, 6)) @ \
            self.rng.standard_normal((6, 6))
        self.obs = estimator.ObservationSet(self.points, self.data)
        self.moments = estimator.sample_second_moment(self.obs)

    def test_ObservationSet(self) -> None:
        obs = _obs([[1., 2.], [3., 4.]])
        self.assertEqual((obs.n, obs.size), (2, 2))
        self.assertFalse(obs.data.flags.writeable)
        self.assertTrue(np.array_equal(obs.samples, obs.data))
        centered = _obs([[1., 2.], [3., 4.]], centered=True)
        self.assertAllClose(centered.samples, [[-1., -1.], [1., 1.]])
        self.assertRaises(
            ValueError, estimator.ObservationSet, [0., 1.], np.ones((2, 3)))
        self.assertRaises(
            ValueError, estimator.ObservationSet, [0., 1.], [[1., np.nan]])

    def test_MomentEstimates(self) -> None:
        self.assertEqual(self.moments.size, 40)
        self.assertFalse(self.moments.centered)
        self.assertAllClose(self.moments.xbar, self.data.mean(axis=0))

    def test_CovarianceEstimate(self) -> None:
        est = estimator.fit_model(self.moments, _design(np.eye(6)))
        self.assertEqual(est.model.model_id, 'g')
        self.assertIs(est.family, FAMILY)

    def test_sample_second_moment(self) -> None:
        s = estimator.sample_second_moment(_obs([[1., 2.]])).S
        self.assertAllClose(s, [[1., 2.], [2., 4.]])
        s = estimator.sample_second_moment(_obs([[1., 0.], [0., 1.]])).S
        self.assertAllClose(s, .5 * np.eye(2))
        s = estimator.sample_second_moment(
            _obs([[1., 1.], [2., 0.], [0., 2.]])).S
        self.assertAllClose(s, [[5. / 3., 1. / 3.], [1. / 3., 5. / 3.]])

        # Centering subtracts the sample mean first
        mom = estimator.sample_second_moment(
            _obs([[1., 1.], [3., 1.]], centered=True))
        self.assertTrue(mom.centered)
        self.assertAllClose(mom.S, [[1., 0.], [0., 0.]])
        self.assertAllClose(mom.xbar, [2., 1.])

        # Deterministic for any number of threads
        data = self.rng.standard_normal((3000, 5))
        obs = estimator.ObservationSet(np.linspace(0., 1., 5), data)
        ref = estimator.sample_second_moment(obs).S
        self.assertPositiveSemiDefinite(ref)
        self.assertAllClose(ref, data.T @ data / 3000., atol=1e-12)
        for threads in [2, 3, 0]:
            with self.subTest(threads=threads):
                got = estimator.sample_second_moment(obs, threads=threads).S
                self.assertTrue(np.array_equal(got, ref))

    def test_fourth_moment_norm(self) -> None:
        obs = _obs([[1., 1.], [2., 0.]])
        self.assertAlmostEqual(estimator.fourth_moment_norm(obs), 10.)

    def test_centered_spread(self) -> None:
        s = self.moments.S
        brute = np.mean([np.sum((np.outer(x, x) - s) ** 2) for x in self.data])
        self.assertAlmostEqual(
            estimator.centered_spread(self.data, self.moments.S) / brute, 1.,
            places=10)
        frame = np.linalg.qr(self.rng.standard_normal((6, 2)))[0]
        pi = frame @ frame.T
        brute = np.mean([np.sum((pi @ (np.outer(x, x) - self.moments.S) @ pi)
            ** 2) for x in self.data])
        got = estimator.centered_spread(self.data, self.moments.S, frame=frame)
        self.assertAlmostEqual(got / brute, 1., places=10)
        self.assertEqual(estimator.centered_spread([[1., 2.]], [[1., 2.],
            [2., 4.]]), 0.)

    def test_centered_spread_offset(self) -> None:
        # replications with a large common mean
        rows = (10 ** 4 + self.rng.integers(-3, 4, size=(8, 3))).tolist()
        size = len(rows)
        exact_s = [[sum(Fraction(x[a]) * x[b] for x in rows) / size
            for b in range(3)] for a in range(3)]
        exact = _exact_contrast(rows, exact_s)
        s = np.array(exact_s, dtype=float)
        got = estimator.centered_spread(np.array(rows, dtype=float), s)
        self.assertLessEqual(abs(got / float(exact) - 1.), 1e-9)
        obs = _obs(rows)
        candidate = [[10 ** 8 + a + b for b in range(3)] for a in range(3)]
        exact = _exact_contrast(rows, candidate)
        got = estimator.empirical_contrast(obs, candidate)
        self.assertLessEqual(abs(got / float(exact) - 1.), 1e-9)

    def test_least_squares_psi(self) -> None:
        g = self.rng.standard_normal((6, 3))
        y = self.rng.standard_normal((6, 6))
        psi = estimator.least_squares_psi(y, g)
        self.assertSymmetric(psi)
        sym = estimator.least_squares_psi((y + y.T) / 2., g)
        self.assertAllClose(psi, sym, atol=1e-10)
        self.assertRaises(
            ValueError, estimator.least_squares_psi, y, np.ones((5, 2)))

    def test_fit_model(self) -> None:
        # Identity design reproduces the sample second moment
        est = estimator.fit_model(self.moments, _design(np.eye(6)))
        self.assertAllClose(est.sigma_hat, self.moments.S, atol=1e-10)
        self.assertAllClose(est.psi_hat, self.moments.S, atol=1e-10)

        # Constant design on two points
        obs = _obs([[1., 1.], [2., 0.], [0., 2.]])
        est = estimator.fit_model(
            estimator.sample_second_moment(obs), _design([[1.], [1.]]))
        self.assertAllClose(est.sigma_hat, np.ones((2, 2)), atol=1e-12)

        # Proportional columns give the single column fit
        g = self.rng.standard_normal((6, 1))
        single = estimator.fit_model(self.moments, _design(g))
        double = estimator.fit_model(
            self.moments, _design(np.hstack([g, 2. * g])))
        self.assertEqual(double.diagnostics['rank'], 1)
        self.assertEqual(double.diagnostics['columns'], 2)
        self.assertAllClose(double.sigma_hat, single.sigma_hat, atol=1e-8)

        self.assertRaises(
            NumericalError, estimator.fit_model, self.moments,
            _design(np.zeros((6, 2))))

    def test_fit_model_identities(self) -> None:
        scale = 1. + np.linalg.norm(self.moments.S)
        for rank in range(1, 6):
            u = np.linalg.qr(self.rng.standard_normal((6, rank)))[0]
            v = np.linalg.qr(self.rng.standard_normal((5, rank)))[0]
            g = (u * self.rng.uniform(.5, 2., rank)) @ v.T
            design = _design(g)
            est = estimator.fit_model(self.moments, design)
            pi = est.projector.matrix
            with self.subTest(rank=rank):
                self.assertAllClose(
                    est.sigma_hat, pi @ self.moments.S @ pi, atol=1e-8 * scale)
                self.assertAllClose(
                    est.sigma_hat, g @ est.psi_hat @ g.T, atol=1e-8 * scale)
                self.assertAllClose(
                    pi @ est.sigma_hat @ pi, est.sigma_hat, atol=1e-10 * scale)
                self.assertPositiveSemiDefinite(est.psi_hat, rtol=1e-8)
                self.assertPositiveSemiDefinite(est.sigma_hat, rtol=1e-8)

                # Independence of the generalized inverse
                ridge = matrix.ridge_inverse(g.T @ g)
                psi = estimator.least_squares_psi(
                    self.moments.S, g, ginv=ridge)
                self.assertLessEqual(
                    np.linalg.norm(g @ psi @ g.T - est.sigma_hat),
                    1e-7 * scale)

                # Projection optimality against random competitors
                dist = np.linalg.norm(self.moments.S - est.sigma_hat)
                for _ in range(100):
                    a = self.rng.standard_normal((5, 5))
                    gamma = g @ (a + a.T) @ g.T
                    self.assertLessEqual(
                        dist, np.linalg.norm(self.moments.S - gamma) + 1e-10)

    def test_empirical_contrast(self) -> None:
        s = self.moments.S
        base = estimator.empirical_contrast(self.obs, s)
        brute = np.mean([np.sum((np.outer(x, x) - s) ** 2) for x in self.data])
        self.assertAlmostEqual(base, brute, delta=1e-10 * brute)
        for _ in range(20):
            a = self.rng.standard_normal((6, 6))
            gamma = a + a.T
            gap = estimator.empirical_contrast(self.obs, gamma) - base
            self.assertAlmostEqual(
                gap, np.sum((s - gamma) ** 2), delta=1e-10 * (1. + brute))
        single = _obs([[1., 2.]])
        self.assertAlmostEqual(
            estimator.empirical_contrast(single, [[1., 2.], [2., 4.]]), 0.)
        self.assertRaises(
            ValueError, estimator.empirical_contrast, self.obs, np.eye(3))

    def test_eval_cov_fn(self) -> None:
        design = basis.design_matrix(
            FAMILY, basis.ModelSpec('m4', (1, 2, 3, 4)), self.points)
        est = estimator.fit_model(self.moments, design)
        j, k = np.meshgrid(np.arange(6), np.arange(6), indexing='ij')
        vals = estimator.eval_cov_fn(est, self.points[j], self.points[k])
        self.assertAllClose(vals, est.sigma_hat, atol=1e-10)
        s, t = self.rng.uniform(size=(2, 50))
        self.assertAllClose(
            estimator.eval_cov_fn(est, s, t), estimator.eval_cov_fn(est, t, s),
            atol=1e-12)

        # Discretized covariance function on a grid is d.n.n.
        grid = np.linspace(0., 1., 20)
        a, b = np.meshgrid(grid, grid, indexing='ij')
        self.assertPositiveSemiDefinite(
            estimator.eval_cov_fn(est, a, b), rtol=1e-8)

        zero = estimator.CovarianceEstimate(
            design=design, psi_hat=np.zeros((4, 4)),
            sigma_hat=np.zeros((6, 6)), projector=est.projector)
        self.assertEqual(
            estimator.eval_cov_fn(zero, s, t).tolist(), [0.] * 50)
        self.assertRaises(ValueError, estimator.eval_cov_fn, est, s, t[:3])

    def test_normal_equation_residual(self) -> None:
        est = estimator.fit_model(self.moments, _design(np.eye(6)))
        self.assertAlmostEqual(estimator.normal_equation_residual(
            self.moments, est.design, est.psi_hat), 0., places=10)
        norm_s = np.linalg.norm(self.moments.S)
        for cols, rank in [(2, 2), (4, 2), (3, 3)]:
            g = self.rng.standard_normal((6, rank)) \
                @ self.rng.standard_normal((rank, cols))
            design = _design(g)
            est = estimator.fit_model(self.moments, design)
            resid = estimator.normal_equation_residual(
                self.moments, design, est.psi_hat)
            limit = 1e-6 * (1. + norm_s * np.linalg.norm(g) ** 4)
            with self.subTest(cols=cols, rank=rank):
                self.assertLessEqual(resid, limit)

    def test_stacked_projector(self) -> None:
        proj = matrix.projector(self.rng.standard_normal((3, 2)))
        big = estimator.stacked_projector(proj, 4)
        self.assertEqual(big.shape, (36, 36))
        self.assertIsProjector(big, atol=1e-10)
        self.assertAlmostEqual(np.trace(big), 3., places=8)

        # Projection of stacked outer products is the stacked fit
        obs = estimator.ObservationSet(
            [.1, .5, .9], self.rng.standard_normal((4, 3)))
        y = np.stack([np.outer(x, x).ravel() for x in obs.data]).ravel()
        sigma = proj.matrix @ \
            estimator.sample_second_moment(obs).S @ proj.matrix
        self.assertAllClose(
            (big @ y).reshape(4, 9), np.tile(sigma.ravel(), (4, 1)),
            atol=1e-10)
        self.assertRaises(ValueError, estimator.stacked_projector, proj, 0)
