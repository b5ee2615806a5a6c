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
from hup.base import test
from covest.base import pool

class TestPool(test.ModuleTest):
    module = pool

    def test_get_threads(self) -> None:
        self.assertEqual(pool.get_threads(3), 3)
        self.assertGreaterEqual(pool.get_threads(0), 1)
        self.assertRaises(ValueError, pool.get_threads, -1)

    def test_blocks(self) -> None:
        self.assertEqual(pool.blocks(5, size=2), [(0, 2), (2, 4), (4, 5)])
        self.assertEqual(pool.blocks(0), [])
        self.assertRaises(ValueError, pool.blocks, 3, size=0)

    def test_map_ordered(self) -> None:
        items = list(range(50))
        for threads in [1, 4]:
            with self.subTest(threads=threads):
                self.assertEqual(
                    pool.map_ordered(lambda i: i * i, items, threads=threads),
                    [i * i for i in items])

    def test_reduce_sum(self) -> None:
        parts = [1., 2., 3., 4., 5.]
        self.assertEqual(pool.reduce_sum(parts), 15.)
        self.assertEqual(pool.reduce_sum(parts, reduction='pairwise'), 15.)
        self.assertRaises(ValueError, pool.reduce_sum, [])
        self.assertRaises(ValueError, pool.reduce_sum, parts, reduction='tree')

    def test_blocked_sum(self) -> None:
        rows = np.random.default_rng(1).standard_normal((1000, 3))
        func = lambda block: block.T @ block
        ref = pool.blocked_sum(func, rows, threads=1, size=64)
        for threads in [2, 5]:
            for reduction in pool.REDUCTIONS:
                with self.subTest(threads=threads, reduction=reduction):
                    got = pool.blocked_sum(
                        func, rows, threads=threads, reduction=reduction,
                        size=64)
                    self.assertTrue(np.allclose(got, rows.T @ rows))
                    if reduction == 'sequential':
                        self.assertTrue(np.array_equal(got, ref))
