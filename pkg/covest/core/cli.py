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
"""Command line interface.

Usage: covest COMMAND --config PATH [options]

The commands 'estimate' and 'select' fit covariance models to observations,
'simulate' runs a Monte-Carlo experiment and 'eval' evaluates a fitted
covariance function at pairs of points. The exit code is 0 on success, 2 for
invalid input, 3 for numerical failures and 4 if a Monte-Carlo check fails.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import getopt
import sys
from pathlib import Path
from typing import Any, List, Optional, Tuple
import numpy as np
import covest
from covest.core import config as cfg
from covest.core import ui
from covest.errors import AssertionFailure, CovestError, DataFormatError
from covest.errors import DomainError, NumericalError
from covest.io import bundle, text
from covest.lab import experiments, process
from covest.math import basis
from covest.model import estimator, selection
from covest.typing import NpArray

#
# Module Constants
#

COMMANDS = ['estimate', 'select', 'simulate', 'eval']

VEC_COMMENT = "rows and columns follow the order of the design points"

#
# Input Helpers
#

def load_observations(config: cfg.Config) -> estimator.ObservationSet:
    """Read observations and design points given by section 'data'."""
    sec = config['data']
    points = text.load_points(sec['points'])
    n = sec['n_points'] or points.size
    if points.size != n:
        raise DataFormatError(
            f"expected {n} design points, not {points.size}",
            path=sec['points'])
    data = text.load_data(sec['data'], n=n)
    if sec['n_samples'] and data.shape[0] != sec['n_samples']:
        raise DataFormatError(
            f"expected {sec['n_samples']} replications, "
            f"not {data.shape[0]}", path=sec['data'])
    return estimator.ObservationSet(
        points=points, data=data, centered=bool(sec['center']))

def get_designs(
        config: cfg.Config, points: NpArray) -> List[basis.DesignMatrix]:
    """Build design matrices of the configured models."""
    family = cfg.get_family(config)
    models = cfg.get_models(config)
    if not models:
        raise DataFormatError("no models are configured")
    return [basis.design_matrix(family, model, points) for model in models]

def get_grid(config: cfg.Config) -> NpArray:
    """Midpoints of 'simulate.n_points' equal cells of the basis domain."""
    family = cfg.get_family(config)
    n = config['simulate']['n_points']
    if n < 1:
        raise DataFormatError("'simulate.n_points' is required to be positive")
    return family.lower + (np.arange(n) + .5) * family.length / n

def get_process(
        config: cfg.Config, points: NpArray) -> process.TrueProcessSpec:
    """Get process of the simulation from section 'simulate'.

    The process 'gp_cholesky' samples the covariance of the expansion, which
    is given by the basis family and the spectrum.

    """
    sec = config['simulate']
    kind = sec['process']
    spec = process.TrueProcessSpec(
        kind='kl_process' if kind == 'gp_cholesky' else kind,
        rng_seed=config['run']['seed'], family=cfg.get_family(config),
        alpha=sec['alpha'], scale=sec['scale'], truncation=sec['truncation'],
        dof=sec['dof'])
    if kind != 'gp_cholesky':
        return spec
    return process.TrueProcessSpec(
        kind='gp_cholesky', rng_seed=spec.rng_seed,
        sigma=process.true_sigma(spec, points))

def get_output(config: cfg.Config) -> Path:
    """Create and get output directory."""
    path = Path(config['run']['output'])
    path.mkdir(parents=True, exist_ok=True)
    return path

#
# Commands
#

def cmd_estimate(config: cfg.Config) -> bundle.ResultBundle:
    """Fit the last configured model to the observations.

    Writes 'psi_hat.csv', 'sigma_hat.csv', 'result.json' and the effective
    configuration 'config.ini' to the output directory.

    """
    started = bundle.timestamp()
    obs = load_observations(config)
    design = get_designs(config, obs.points)[-1]
    moments = estimator.sample_second_moment(
        obs, threads=config['run']['threads'],
        reduction=config['run']['reduction'])
    est = estimator.fit_model(moments, design)
    ui.info(
        f"fitted model '{est.model.model_id}' with rank "
        f"{est.projector.rank} of {design.matrix.shape[1]} columns")
    res = bundle.from_estimate('estimate', config, est, diagnostics={
        'size': obs.size, 'n': obs.n, 'centered': obs.centered,
        'normal_equation_residual': estimator.normal_equation_residual(
            moments, design, est.psi_hat)})
    res.timestamps = {'started': started, 'finished': bundle.timestamp()}
    _save_bundle(config, res)
    return res

def cmd_select(config: cfg.Config) -> bundle.ResultBundle:
    """Select a model by penalized empirical contrast.

    Writes the files of :func:`cmd_estimate` for the selected model and the
    table 'selection_table.csv'.

    """
    started = bundle.timestamp()
    obs = load_observations(config)
    designs = get_designs(config, obs.points)
    result = selection.select(
        obs, designs, theta=config['selection']['theta'],
        penalty_mode=config['selection']['penalty_mode'],
        threads=config['run']['threads'],
        reduction=config['run']['reduction'])
    ui.info(f"selected model '{result.chosen}'")
    summary = selection.selection_summary(result)
    del summary['table']
    res = bundle.from_estimate(
        'select', config, result.estimate, table=result.table,
        diagnostics={'size': obs.size, 'n': obs.n, **summary})
    res.timestamps = {'started': started, 'finished': bundle.timestamp()}
    _save_bundle(config, res)
    columns = [
        'model_id', 'm', 'D_m', 'delta_sq', 'contrast', 'pen', 'criterion',
        'chosen']
    text.save_table(
        get_output(config) / 'selection_table.csv', header=columns,
        rows=[[row[key] for key in columns] for row in result.table])
    return res

def cmd_simulate(config: cfg.Config) -> experiments.Report:
    """Run Monte-Carlo experiment given by 'simulate.experiment'.

    Writes 'report.json' and 'plotdata_<experiment>.csv'.

    """
    name = config['simulate']['experiment']
    if name not in experiments.experiments():
        raise DataFormatError(
            f"experiment '{name}' is not valid, allowed values are: "
            f"{', '.join(experiments.experiments())}")
    report = _run_experiment(name, config)
    out = get_output(config)
    text.save_json(out / 'report.json', {
        'version': covest.__version__, **report.as_dict()})
    text.save_table(
        out / f'plotdata_{name}.csv', header=report.plot_header,
        rows=report.plot_rows)
    cfg.save_config(config, out / 'config.ini')
    if report.passed:
        ui.info(f"experiment '{name}' passed")
    return report

def cmd_eval(config: cfg.Config) -> NpArray:
    """Evaluate the fitted covariance function at pairs of points.

    Reads the result bundle 'eval.result' and the pairs 'eval.pairs' and
    writes the table 'eval.output' with the columns s, t and sigma to the
    output directory.

    """
    res = bundle.load(config['eval']['result'])
    est = res.estimate()
    pairs = text.load_pairs(config['eval']['pairs'])
    inside = est.family.contains(pairs).all(axis=1)
    if not inside.all():
        index = int(np.flatnonzero(~inside)[0]) + 1
        raise DomainError(f"pair {index} outside basis domain")
    values = estimator.eval_cov_fn(est, pairs[:, 0], pairs[:, 1])
    text.save_table(
        get_output(config) / config['eval']['output'],
        header=['s', 't', 'sigma'],
        rows=[[s, t, v] for (s, t), v in zip(pairs, values)])
    return values

#
# Protected Helpers
#

def _save_bundle(config: cfg.Config, res: bundle.ResultBundle) -> None:
    out = get_output(config)
    text.save_matrix(
        out / 'psi_hat.csv', res.psi_hat, prefix='g', comment=(
            f"coefficients of the basis functions of model "
            f"'{res.model['model_id']}'"))
    text.save_matrix(
        out / 'sigma_hat.csv', res.sigma_hat, prefix='t',
        comment=VEC_COMMENT)
    res.save(out / 'result.json')
    cfg.save_config(config, out / 'config.ini')

def _run_experiment(name: str, config: cfg.Config) -> experiments.Report:
    sec = config['simulate']
    run = config['run']
    func = experiments.get_experiment(name)
    if name == 'rate':
        return func(
            alpha=sec['alpha'],
            sizes=cfg.get_ints(config, 'simulate', 'sample_sizes'),
            replications=sec['replications'], rng_seed=run['seed'],
            kind=config['basis']['kind'],
            theta=config['selection']['theta'], factor=sec['factor'],
            truncation=sec['truncation'] if sec['finite_rank'] else None,
            strict=sec['strict'], tolerance=sec['tolerance'],
            penalty_mode=config['selection']['penalty_mode'],
            threads=run['threads'])
    points = get_grid(config)
    spec = get_process(config, points)
    family = cfg.get_family(config)
    if name == 'concentration':
        phi, a_tilde = experiments.concentration_problem(
            spec, points, sec['size'], projector=sec['projector'],
            model_size=sec['model_size'], family=family)
        return func(
            phi=phi, a_tilde=a_tilde, size=sec['size'], p=sec['p'],
            replications=sec['replications'],
            xs=cfg.get_floats(config, 'simulate', 'xs'),
            rng_seed=run['seed'], noise=sec['noise'],
            dof=sec['dof'] if sec['noise'] == 'student_t' else None,
            threads=run['threads'])
    models = cfg.get_models(config)
    if name == 'unbiasedness':
        return func(
            spec=spec, points=points, models=models, size=sec['size'],
            replications=sec['replications'], rng_seed=run['seed'],
            family=family, batches=sec['batches'], threads=run['threads'])
    if name == 'risk_decomposition':
        return func(
            spec=spec, points=points, models=models, size=sec['size'],
            replications=sec['replications'], rng_seed=run['seed'],
            family=family, threads=run['threads'],
            validate_phi=sec['validate_phi'],
            phi_samples=sec['phi_samples'])
    thetas = cfg.get_floats(config, 'selection', 'thetas') \
        or [config['selection']['theta']]
    reports = [func(
        spec=spec, points=points, models=models, theta=theta,
        size=sec['size'], replications=sec['replications'],
        rng_seed=run['seed'], family=family,
        penalty_mode=config['selection']['penalty_mode'],
        threads=run['threads']) for theta in thetas]
    return experiments.Report(
        experiment=name, passed=all(rep.passed for rep in reports),
        summary={'thetas': thetas, 'cells': [rep.summary for rep in reports]},
        rows=[{'theta': theta, **row}
            for theta, rep in zip(thetas, reports) for row in rep.rows],
        plot_header=('theta', 'selected_risk', 'bound'),
        plot_rows=[row for rep in reports for row in rep.plot_rows])

#
# Entry Point
#

def print_usage() -> None:
    """Print usage to standard output."""
    ui.info("Usage: covest COMMAND --config PATH [options]\n\n"
        "Commands:\n\n"
        "    estimate            Fit covariance model to observations\n"
        "    select              Select covariance model by penalized "
        "contrast\n"
        "    simulate            Run Monte-Carlo experiment\n"
        "    eval                Evaluate fitted covariance function\n\n"
        "Options:\n\n"
        "    -c --config PATH    Configuration file\n"
        "    -t --threads N      Number of worker threads, 0 for all cores\n"
        "       --center         Center observations by their sample mean\n"
        "    -s --seed S         Seed of random number generators\n"
        "    -h --help           Print this\n"
        "    -v --version        Print version")

def print_version() -> None:
    """Print version to standard output."""
    ui.info('covest ' + covest.__version__)

def parse_args(argv: List[str]) -> Tuple[str, cfg.Config]:
    """Get command and effective configuration from arguments.

    Raises:
        DataFormatError: If the arguments or the configuration are invalid.

    """
    short = "hvc:t:s:"
    long = ["help", "version", "config=", "threads=", "center", "seed="]
    try:
        opts, args = getopt.gnu_getopt(argv, short, long)
    except getopt.GetoptError as err:
        raise DataFormatError(str(err)) from err
    dic = dict(opts)
    path = dic.get('-c') or dic.get('--config')
    if len(args) != 1 or args[0] not in COMMANDS:
        raise DataFormatError(
            f"expected one command of: {', '.join(COMMANDS)}")
    if not path:
        raise DataFormatError("option '--config' is required")
    config = cfg.resolve(cfg.load_config(path), Path(path).parent)
    threads: Any = dic.get('-t') or dic.get('--threads')
    seed: Any = dic.get('-s') or dic.get('--seed')
    try:
        config = cfg.override(config, 'run', threads=threads, seed=seed)
    except ValueError as err:
        raise DataFormatError(f"invalid option value: {err}") from err
    if '--center' in dic:
        config = cfg.override(config, 'data', center=True)
    return args[0], config

def main(argv: Optional[List[str]] = None) -> int:
    """Launch covest and get exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    ui.bypass_excepthook()
    if not argv or '-h' in argv or '--help' in argv:
        print_usage()
        return 0
    if '-v' in argv or '--version' in argv:
        print_version()
        return 0
    try:
        command, config = parse_args(argv)
        if command == 'simulate':
            report = cmd_simulate(config)
            if not report.passed:
                raise AssertionFailure(
                    f"experiment '{report.experiment}' failed")
        else:
            globals()['cmd_' + command](config)
    except CovestError as err:
        ui.error(str(err))
        return err.exit_code
    except (ArithmeticError, np.linalg.LinAlgError) as err:
        ui.error(str(err))
        return NumericalError.exit_code
    except (ValueError, TypeError, KeyError, OSError) as err:
        ui.error(str(err))
        return DataFormatError.exit_code
    return 0

if __name__ == "__main__":
    sys.exit(main())
