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

import numpy as np
from covest.math import basis, matrix, regress, test
from covest.model import estimator, selection

FAMILY = basis.BasisFamily('fourier', max_size=16)

def _obs(data: list) -> estimator.ObservationSet:
    data = np.asarray(data, dtype=float)
    n = data.shape[1]
    return estimator.ObservationSet((np.arange(n) + .5) / n, data)

def _brute_phi(data: np.ndarray) -> np.ndarray:
    vecs = np.stack([np.outer(x, x).flatten('F') for x in data])
    centered = vecs - vecs.mean(axis=0)
    return centered.T @ centered / data.shape[0]

class TestSelection(test.MathModule):
    module = selection

    def setUp(self) -> None:
        self.rng = np.random.default_rng(11)
        self.small = _obs([[1., 2.], [0., 1.], [3., -1.]])
        self.points = (np.arange(8) + .5) / 8.
        self.designs = [basis.design_matrix(FAMILY, m, self.points)
            for m in basis.nested_model_family(FAMILY, [1, 2, 3, 5])]

    def test_FourthMomentMatrix(self) -> None:
        data = self.rng.standard_normal((30, 4))
        phi = selection.estimate_phi(_obs(data))
        self.assertEqual((phi.n, phi.size), (4, 30))
        dense = phi.matrix
        self.assertAllClose(dense, _brute_phi(data), atol=1e-10)
        self.assertPositiveSemiDefinite(dense, rtol=1e-8)
        v = self.rng.standard_normal(16)
        self.assertAllClose(phi.apply(v), dense @ v, atol=1e-10)
        self.assertAlmostEqual(phi.trace, np.trace(dense), places=8)
        self.assertAlmostEqual(
            phi.lambda_max, np.linalg.eigvalsh(dense)[-1], places=8)

    def test_FourthMomentMatrix_iterative(self) -> None:
        # More than 32 points use the iterative eigensolver
        data = self.rng.standard_normal((60, 33)) * np.linspace(.5, 2., 33)
        phi = selection.estimate_phi(_obs(data))
        dense = np.linalg.eigvalsh(phi.matrix)[-1]
        self.assertAlmostEqual(phi.lambda_max / dense, 1., places=8)

    def test_estimate_phi(self) -> None:
        same = selection.estimate_phi(_obs([[1., 2.]] * 4))
        self.assertAllClose(same.matrix, np.zeros((4, 4)))
        scalar = selection.estimate_phi(_obs([[1.], [2.], [3.]]))
        self.assertAlmostEqual(
            float(scalar.matrix[0, 0]), np.var([1., 4., 9.]))
        phi = selection.estimate_phi(self.small)
        self.assertAllClose(
            phi.matrix, _brute_phi(self.small.data), atol=1e-12)
        single = selection.estimate_phi(_obs([[1., 2.]]))
        self.assertTrue(single.degenerate)
        self.assertEqual(single.lambda_max, 0.)

    def test_kron_trace(self) -> None:
        pi = matrix.projector(self.rng.standard_normal((3, 2))).matrix
        phi = _brute_phi(self.rng.standard_normal((10, 3)))
        self.assertAlmostEqual(
            selection.kron_trace(pi, phi), np.trace(np.kron(pi, pi) @ phi),
            places=10)

    def test_projected_spread(self) -> None:
        data = self.rng.standard_normal((25, 4))
        phi = selection.estimate_phi(_obs(data))
        for n_cols in range(1, 5):
            pi = matrix.projector(
                self.rng.standard_normal((4, n_cols))).matrix
            fast = selection.projected_spread(phi, pi)
            dense = selection.kron_trace(pi, phi.matrix)
            with self.subTest(cols=n_cols):
                self.assertAlmostEqual(fast / dense, 1., places=9)

    def test_projected_spread_offset(self) -> None:
        # uncentered replications with a large mean
        for offset in [1e3, 1e4]:
            data = offset + self.rng.standard_normal((30, 4))
            phi = selection.estimate_phi(_obs(data))
            dense = phi.matrix
            self.assertLessEqual(
                abs(phi.trace / np.trace(dense) - 1.), 1e-9)
            for n_cols in range(1, 5):
                pi = matrix.projector(
                    self.rng.standard_normal((4, n_cols))).matrix
                fast = selection.projected_spread(phi, pi)
                ref = selection.kron_trace(pi, dense)
                with self.subTest(offset=offset, cols=n_cols):
                    self.assertLessEqual(abs(fast / ref - 1.), 1e-9)

    def test_delta_sq(self) -> None:
        phi = selection.estimate_phi(self.small)
        ident = matrix.projector(np.eye(2))
        self.assertAlmostEqual(
            selection.delta_sq(ident, phi), phi.trace / 2., places=10)
        first = matrix.projector([[1.], [0.]])
        brute = np.trace(np.kron(first.matrix, first.matrix) @ phi.matrix)
        self.assertAlmostEqual(
            selection.delta_sq(first, phi), brute, places=10)
        empty = matrix.Projector(matrix=np.zeros((2, 2)), rank=0)
        self.assertRaises(ValueError, selection.delta_sq, empty, phi)

    def test_penalty(self) -> None:
        self.assertEqual(selection.penalty(3., 0., 1., 6), 0.)
        self.assertAlmostEqual(selection.penalty(3., 2., 1., 6), 2.)
        base = selection.penalty(3., 2., 1., 6)
        self.assertGreater(selection.penalty(3., 2., 2., 6), base)
        self.assertGreater(selection.penalty(4., 2., 1., 6), base)
        self.assertGreater(selection.penalty(3., 3., 1., 6), base)
        self.assertLess(selection.penalty(3., 2., 1., 7), base)
        self.assertRaises(ValueError, selection.penalty, 3., 2., 0., 6)
        self.assertRaises(ValueError, selection.penalty, 3., 2., 1., 0)

    def test_oracle_constant(self) -> None:
        self.assertAlmostEqual(selection.oracle_constant(1.), 20.)
        self.assertAlmostEqual(selection.oracle_constant(.5), 27.)
        self.assertAlmostEqual(selection.oracle_constant(2.), 18.)
        self.assertRaises(ValueError, selection.oracle_constant, -1.)

    def test_unbiased_risk(self) -> None:
        sigma = np.array([[2., .5, 0.], [.5, 1., .3], [0., .3, .5]])
        root = np.linalg.cholesky(sigma)
        points = np.array([.1, .5, .9])
        design = basis.design_matrix(
            FAMILY, basis.ModelSpec('m2', (1, 2)), points)
        gaps = []
        for _ in range(400):
            data = self.rng.standard_normal((10, 3)) @ root.T
            obs = estimator.ObservationSet(points, data)
            est = estimator.fit_model(
                estimator.sample_second_moment(obs), design)
            gaps.append(selection.unbiased_risk(obs, est)
                - np.sum((sigma - est.sigma_hat) ** 2))
        mean = float(np.mean(gaps))
        se = float(np.std(gaps, ddof=1) / np.sqrt(len(gaps)))
        self.assertLessEqual(abs(mean), 4. * se)
        self.assertRaises(
            ValueError, selection.unbiased_risk, _obs([[1., 2.]]), est)

    def test_PenaltyProfile(self) -> None:
        profile = selection.PenaltyProfile(
            model_ids=('a', 'b'), dims=(1., 2.), delta_sq=(1., 3.),
            pen=(.1, .2), theta=1., lambda_max_phi=2.)
        self.assertEqual(profile.delta_sup, 3.)
        self.assertEqual(profile.bound_violations(), 1)

    def test_SelectionResult(self) -> None:
        pass # Not required

    def test_penalty_profile(self) -> None:
        obs = estimator.ObservationSet(
            self.points, self.rng.standard_normal((50, 8)))
        moments = estimator.sample_second_moment(obs)
        phi = selection.estimate_phi(obs, moments=moments)
        fits = [estimator.fit_model(moments, d) for d in self.designs]
        profile = selection.penalty_profile(fits, phi, theta=2.)
        self.assertEqual(profile.model_ids, ('m1', 'm2', 'm3', 'm5'))
        self.assertAllClose(profile.dims, [1., 2., 3., 5.], atol=1e-8)
        for d, s, p in zip(profile.dims, profile.delta_sq, profile.pen):
            self.assertAlmostEqual(p, 3. * s * d / 50.)
        self.assertLessEqual(
            profile.delta_sq[0], profile.lambda_max_phi * (1. + 1e-8))
        for d, s in zip(profile.dims, profile.delta_sq):
            self.assertLessEqual(s, d * profile.lambda_max_phi * (1. + 1e-8))
        conservative = selection.penalty_profile(
            fits, phi, penalty_mode='lambda_max')
        self.assertEqual(
            set(conservative.delta_sq), {conservative.lambda_max_phi})
        self.assertRaises(
            ValueError, selection.penalty_profile, fits, phi,
            penalty_mode='trace')

    def test_select(self) -> None:
        obs = estimator.ObservationSet(
            self.points, self.rng.standard_normal((30, 8)))

        # Single model
        res = selection.select(obs, self.designs[:1], theta=5.)
        self.assertEqual(res.chosen, 'm1')
        self.assertEqual(len(res.table), 1)
        self.assertTrue(res.table[0]['chosen'])

        # Minimum of the criterion
        res = selection.select(obs, self.designs)
        crit = [row['criterion'] for row in res.table]
        chosen = [row['model_id'] for row in res.table if row['chosen']]
        self.assertEqual(chosen, [res.chosen])
        self.assertEqual(crit[[r['model_id'] for r in res.table].index(
            res.chosen)], min(crit))
        for row in res.table:
            self.assertAlmostEqual(
                row['criterion'], row['contrast'] + row['pen'])

        # Duplicated designs tie and resolve to the smaller identifier
        twin = basis.DesignMatrix(
            family=FAMILY, model=basis.ModelSpec('a', (1, 2)),
            points=self.designs[1].points, matrix=self.designs[1].matrix)
        other = basis.DesignMatrix(
            family=FAMILY, model=basis.ModelSpec('b', (1, 2)),
            points=self.designs[1].points, matrix=self.designs[1].matrix)
        res = selection.select(obs, [other, twin])
        self.assertEqual(res.chosen, 'a')
        self.assertTrue(res.tie_broken)

        # Invariance under scaling of the data
        scaled = estimator.ObservationSet(self.points, 3. * obs.data)
        self.assertEqual(
            selection.select(scaled, self.designs).chosen,
            selection.select(obs, self.designs).chosen)

        # Single replication falls back to the smallest model
        single = estimator.ObservationSet(self.points, obs.data[:1])
        self.assertEqual(selection.select(single, self.designs).chosen, 'm1')

        with self.assertRaises(ValueError) as ctx:
            selection.select(obs, [self.designs[0], self.designs[0]])
        self.assertIn("duplicate model_id", str(ctx.exception))
        self.assertRaises(ValueError, selection.select, obs, [])
        self.assertRaises(
            ValueError, selection.select, obs, self.designs, theta=0.)

    def test_select_true_model(self) -> None:
        g = self.designs[1].matrix
        hits = 0
        for _ in range(200):
            z = self.rng.standard_normal((2000, 2)) * np.sqrt([1., .5])
            obs = estimator.ObservationSet(self.points, z @ g.T)
            hits += selection.select(obs, self.designs).chosen == 'm2'
        self.assertGreaterEqual(hits, 180)

    def test_stacked_covariance_problem(self) -> None:
        points = np.array([.1, .45, .8])
        models = basis.nested_model_family(FAMILY, [1, 2, 3])
        models.append(basis.ModelSpec('odd', (1, 3)))
        designs = [basis.design_matrix(FAMILY, m, points) for m in models]
        for seed in range(20):
            rng = np.random.default_rng(seed)
            data = rng.standard_normal((12, 3)) @ rng.standard_normal((3, 3))
            obs = estimator.ObservationSet(points, data)
            y, projectors, phi = selection.stacked_covariance_problem(
                obs, designs)
            generic = regress.generic_select(
                y, projectors, phi, theta=1.,
                labels=[m.model_id for m in models])
            specific = selection.select(obs, designs, theta=1.)
            with self.subTest(seed=seed):
                self.assertEqual(
                    models[generic.chosen].model_id, specific.chosen)

    def test_select_exact_tie(self) -> None:
        # equal column spaces under different identifiers
        points = np.array([.1, .45, .8])
        models = [
            basis.ModelSpec('z', (1, 2)), basis.ModelSpec('a', (1, 2)),
            basis.ModelSpec('m', (1, 2))]
        designs = [basis.design_matrix(FAMILY, m, points) for m in models]
        data = self.rng.standard_normal((12, 3))
        obs = estimator.ObservationSet(points, data)
        specific = selection.select(obs, designs)
        self.assertEqual(specific.chosen, 'a')
        self.assertTrue(specific.tie_broken)
        y, projectors, phi = selection.stacked_covariance_problem(obs, designs)
        generic = regress.generic_select(
            y, projectors, phi, labels=[m.model_id for m in models])
        self.assertEqual(models[generic.chosen].model_id, specific.chosen)

    def test_selection_summary(self) -> None:
        obs = estimator.ObservationSet(
            self.points, self.rng.standard_normal((20, 8)))
        res = selection.select(obs, self.designs)
        summary = selection.selection_summary(res)
        self.assertEqual(summary['chosen'], res.chosen)
        self.assertEqual(summary['theta'], 1.)
        self.assertEqual(len(summary['table']), 4)
