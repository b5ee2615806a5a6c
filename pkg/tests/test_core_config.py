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

import tempfile
from pathlib import Path
from hup.base import test
from covest.core import config as cfg
from covest.errors import DataFormatError

class TestConfig(test.ModuleTest):
    module = cfg

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def write(self, content: str) -> Path:
        path = self.dir / 'covest.ini'
        path.write_text(content)
        return path

    def test_default(self) -> None:
        a = cfg.default()
        a['run']['seed'] = 7
        self.assertEqual(cfg.default()['run']['seed'], 0)
        self.assertEqual(set(a), set(cfg.SCHEME))

    def test_load_config(self) -> None:
        path = self.write(
            "[covest]\nschema_version = 1\n\n"
            "[data]\nn_points = 4\n\n[selection]\ntheta = 2.5\n")
        config = cfg.load_config(path)
        self.assertEqual(config['data']['n_points'], 4)
        self.assertEqual(config['selection']['theta'], 2.5)
        self.assertEqual(config['basis'], cfg.DEFAULTS['basis'])
        with self.assertRaises(DataFormatError):
            cfg.load_config(self.dir / 'missing.ini')
        path = self.write("[covest]\nschema_version = 2\n")
        with self.assertRaises(DataFormatError) as ctx:
            cfg.load_config(path)
        self.assertIn('schema version 2', str(ctx.exception))

    def test_save_config(self) -> None:
        config = cfg.override(
            cfg.default(), 'run', seed=11, output='out', threads=2)
        config = cfg.override(config, 'selection', theta=.5)
        path = self.dir / 'saved.ini'
        cfg.save_config(config, path)
        loaded = cfg.load_config(path)
        self.assertEqual(loaded['run']['seed'], 11)
        self.assertEqual(loaded['run']['output'], 'out')
        self.assertEqual(loaded['selection']['theta'], .5)
        self.assertEqual(loaded['models']['sizes'], '1, 3, 5')

    def test_override(self) -> None:
        config = cfg.default()
        new = cfg.override(config, 'run', threads='4', seed=None)
        self.assertEqual(new['run']['threads'], 4)
        self.assertEqual(new['run']['seed'], 0)
        self.assertEqual(config['run']['threads'], 0)
        with self.assertRaises(KeyError):
            cfg.override(config, 'run', workers=2)

    def test_resolve(self) -> None:
        config = cfg.override(cfg.default(), 'data', points='/abs/points.csv')
        new = cfg.resolve(config, self.dir)
        self.assertEqual(new['data']['data'], str(self.dir / 'data.csv'))
        self.assertEqual(new['data']['points'], '/abs/points.csv')
        self.assertEqual(new['run']['output'], str(self.dir / 'results'))
        self.assertEqual(config['data']['data'], 'data.csv')

    def test_split(self) -> None:
        self.assertEqual(cfg.split(' 1, 3 ,5,'), ['1', '3', '5'])
        self.assertEqual(cfg.split(''), [])

    def test_get_ints(self) -> None:
        self.assertEqual(cfg.get_ints(cfg.default(), 'models', 'sizes'),
            [1, 3, 5])
        config = cfg.override(cfg.default(), 'models', sizes='1, x')
        with self.assertRaises(DataFormatError):
            cfg.get_ints(config, 'models', 'sizes')

    def test_get_floats(self) -> None:
        self.assertEqual(
            cfg.get_floats(cfg.default(), 'selection', 'thetas'),
            [.5, 1., 2.])
        config = cfg.override(cfg.default(), 'simulate', xs='1, two')
        with self.assertRaises(DataFormatError):
            cfg.get_floats(config, 'simulate', 'xs')

    def test_get_index_sets(self) -> None:
        config = cfg.override(
            cfg.default(), 'models', index_sets='even: 2 4 6; odd: 1 3 5;')
        self.assertEqual(cfg.get_index_sets(config),
            [('even', (2, 4, 6)), ('odd', (1, 3, 5))])
        self.assertEqual(cfg.get_index_sets(cfg.default()), [])
        bad = cfg.override(cfg.default(), 'models', index_sets='2 4 6')
        with self.assertRaises(DataFormatError):
            cfg.get_index_sets(bad)
        bad = cfg.override(cfg.default(), 'models', index_sets='a: 1 b')
        with self.assertRaises(DataFormatError):
            cfg.get_index_sets(bad)

    def test_get_family(self) -> None:
        config = cfg.override(cfg.default(), 'basis', kind='haar', upper=2)
        family = cfg.get_family(config)
        self.assertEqual(family.kind, 'haar')
        self.assertEqual(family.length, 2.)
        bad = cfg.override(cfg.default(), 'basis', kind='spline')
        with self.assertRaises(ValueError):
            cfg.get_family(bad)

    def test_get_models(self) -> None:
        models = cfg.get_models(cfg.default())
        self.assertEqual([m.model_id for m in models], ['m1', 'm3', 'm5'])
        self.assertEqual(models[1].indices, (1, 2, 3))
        config = cfg.override(cfg.default(), 'models', index_sets='odd: 1 3')
        models = cfg.get_models(config)
        self.assertEqual([(m.model_id, m.indices) for m in models],
            [('odd', (1, 3))])
