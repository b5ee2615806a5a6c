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
"""Monte-Carlo Experiments.

Experiments, which compare the behaviour of the covariance estimators on
simulated processes with their theoretical properties: the decomposition of the
risk into bias and variance, the oracle inequality of the penalized selection,
the rate of convergence for polynomially decaying spectra and the tail of
quadratic forms in the errors of a vector regression. Each replication draws
from its own random number generator, seeded by the seed of the experiment and
the index of the replication, such that reports do not depend on the number of
worker threads. Experiments are registered within a catalog and picked by name.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import dataclasses
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import numpy as np
from scipy import linalg, stats
from hup.base import catalog
from hup.typing import StrList
from covest.base import array, pool
from covest.core import ui
from covest.math import basis, matrix, regress
from covest.model import estimator, selection
from covest.lab import process
from covest.typing import NpArray, NpGenerator, PointsLike, RecordList

#
# Module Constants
#

SE_FACTOR = 3.
"""Number of Monte-Carlo standard errors, which are tolerated."""

PHI_EXCEED_RATE = .01
"""Tolerated fraction of fourth moment entries beyond 3 standard errors."""

CONCENTRATION_BLOCK = 1000
"""Number of replications per random stream in tail experiments."""

PROJECTORS = ['coordinate', 'model']
"""Projectors of the concentration check."""

#
# Define Catalog Categories
#

@catalog.category
class Experiment:
    name: str

def experiments() -> StrList:
    """Get sorted list of experiments."""
    return sorted(catalog.search(Experiment).get('name'))

def get_experiment(name: str) -> Callable[..., 'Report']:
    """Get experiment function by name."""
    if name not in experiments():
        raise ValueError(
            f"experiment '{name}' is not valid, "
            f"allowed values are: {', '.join(experiments())}")
    return catalog.pick(Experiment, name=name)

#
# Reports
#

@dataclasses.dataclass
class Report:
    """Report of a Monte-Carlo experiment.

    Args:
        experiment: Name of the experiment.
        passed: Whether all asserted checks hold.
        summary: Scalar results and parameters of the experiment.
        rows: Per model or per sample size results.
        plot_header: Column names of the plot data.
        plot_rows: Plot data, given by rows of floats.

    """
    experiment: str
    passed: bool
    summary: Dict[str, Any] = dataclasses.field(default_factory=dict)
    rows: RecordList = dataclasses.field(default_factory=list)
    plot_header: Tuple[str, ...] = ('x', 'empirical', 'target')
    plot_rows: List[Tuple[float, ...]] = dataclasses.field(
        default_factory=list)

    def as_dict(self) -> Dict[str, Any]:
        """Get JSON compatible representation."""
        return {
            'experiment': self.experiment, 'passed': self.passed,
            'summary': self.summary, 'rows': self.rows}

@dataclasses.dataclass
class RiskReport(Report):
    """Report of the risk decomposition."""
    replications: int = 0

#
# Replication Helpers
#

def get_rng(seed: int, *keys: int) -> NpGenerator:
    """Get random number generator of the stream (seed, *keys)."""
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])

def replicate(
        func: Callable[[int, NpGenerator], Any], count: int, seed: int,
        threads: int = 1) -> List[Any]:
    """Run replications with independent random streams.

    Args:
        func: Function of the replication index and its random number
            generator.
        count: Number of replications.
        seed: Seed of the experiment.
        threads: Number of worker threads. Zero means all cores.

    Returns:
        Results in the order of the replications.

    """
    if count < 1:
        raise ValueError(f"at least one replication is required, not {count}")
    return pool.map_ordered(
        lambda r: func(r, get_rng(seed, r)), list(range(count)),
        threads=threads)

def mean_se(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and its standard error over replications."""
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        return float(vals.mean()), float('inf')
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(vals.size))

def sq_dist(a: NpArray, b: NpArray) -> float:
    """Squared Frobenius distance."""
    return float(np.sum((a - b) ** 2))

def _designs(
        spec: process.TrueProcessSpec, points: NpArray,
        models: Sequence[basis.ModelSpec],
        family: Optional[basis.BasisFamily]) -> List[basis.DesignMatrix]:
    family = family or spec.family
    if family is None:
        raise ValueError("a basis family for the models is required")
    if not models:
        raise ValueError("at least one model is required")
    return [basis.design_matrix(family, model, points) for model in models]

#
# Fourth Moments
#

def phi_validation(
        spec: process.TrueProcessSpec, points: PointsLike,
        size: int = 100000, rng_seed: int = 0) -> Dict[str, Any]:
    """Compare Gaussian fourth moments with their empirical estimate.

    The empirical fourth moment matrix of *size* replications is compared
    entrywise with the pairing formula, over the distinct entries of the
    symmetric index pairs. Entries beyond 3 standard errors are tolerated at
    the rate :data:`PHI_EXCEED_RATE`, which exceeds the false positive rate of
    single entries.

    Returns:
        Mapping with the number of distinct entries, the number of entries
        beyond 3 standard errors, the largest absolute z-score and the pass
        flag.

    """
    points = array.as_vector("'points'", points)
    phi_true = process.true_phi_gaussian(spec, points)
    obs = process.sample_process(
        spec, points, size, rng=get_rng(rng_seed, 0, 1))
    n = obs.n
    xs = obs.samples
    moments = estimator.sample_second_moment(obs)
    w = np.einsum('ia,ib->iab', xs, xs).reshape(-1, n * n) \
        - moments.S.flatten('F')
    phi_hat = w.T @ w / size
    sq = w * w
    var = np.maximum(sq.T @ sq / size - phi_hat ** 2, 0.)
    se = np.sqrt(var / size)
    pairs = [a + b * n for b in range(n) for a in range(b, n)]
    sub = np.ix_(pairs, pairs)
    upper = np.triu(np.ones((len(pairs), len(pairs)), dtype=bool))
    gap = np.abs(phi_hat[sub] - phi_true[sub])[upper]
    err = se[sub][upper]
    scale = max(float(np.max(np.abs(phi_true))), 1.)
    exact = err <= 1e-12 * scale
    z = np.where(exact, 0., gap / np.where(exact, 1., err))
    exceed = int(np.sum(z > SE_FACTOR) + np.sum(exact & (gap > 1e-10 * scale)))
    return {
        'samples': size, 'entries': int(gap.size), 'exceed': exceed,
        'max_abs_z': float(np.max(z)),
        'passed': exceed <= PHI_EXCEED_RATE * gap.size}

#
# Risk Decomposition
#

@catalog.register(Experiment, name='risk_decomposition')
def risk_decomposition_check(
        spec: process.TrueProcessSpec, points: PointsLike,
        models: Sequence[basis.ModelSpec], size: int, replications: int,
        rng_seed: int = 0, family: Optional[basis.BasisFamily] = None,
        threads: int = 1, validate_phi: bool = True,
        phi_samples: int = 100000) -> RiskReport:
    """Compare Monte-Carlo risks of fixed models with bias plus variance.

    For every model the Monte-Carlo estimate of E||Sigma - Sigma_m||^2 is
    compared with the bias ||Sigma - Pi Sigma Pi||^2 plus the variance term
    Tr((Pi x Pi) Phi) / N. The fourth moments Phi are given by the pairing
    formula for Gaussian processes, and otherwise estimated from
    *phi_samples* replications. Furthermore N times the total Monte-Carlo
    variance of vec(Sigma_m) is compared with Tr((Pi x Pi) Phi).

    Args:
        spec: :class:`~covest.lab.process.TrueProcessSpec` instance.
        points: Design points.
        models: Models, whose risks are estimated.
        size: Number of replications N per dataset.
        replications: Number of Monte-Carlo datasets R.
        rng_seed: Seed of the experiment.
        family: Basis family of the models. By default the family of the
            process specification.
        threads: Number of worker threads. Zero means all cores.
        validate_phi: Whether the pairing formula is validated first.
        phi_samples: Number of replications for the validation and for the
            estimation of non-Gaussian fourth moments.

    Returns:
        :class:`RiskReport` instance.

    """
    points = array.as_vector("'points'", points)
    designs = _designs(spec, points, models, family)
    projs = [matrix.projector(d.matrix) for d in designs]
    sigma = process.true_sigma(spec, points)
    validation: Optional[Dict[str, Any]] = None
    if spec.gaussian:
        gammas = [process.gaussian_gamma_sq(sigma, p.matrix) for p in projs]
        if validate_phi:
            validation = phi_validation(
                spec, points, size=phi_samples, rng_seed=rng_seed)
    else:
        big = process.sample_process(
            spec, points, phi_samples, rng=get_rng(rng_seed, 0, 2))
        phi_big = selection.estimate_phi(big).matrix
        gammas = [selection.kron_trace(p.matrix, phi_big) for p in projs]

    def run(r: int, rng: NpGenerator) -> Dict[str, Any]:
        obs = process.sample_process(spec, points, size, rng=rng)
        moments = estimator.sample_second_moment(obs)
        phi = selection.estimate_phi(obs, moments=moments)
        fits = [estimator.fit_model(moments, d) for d in designs]
        return {
            'errs': [sq_dist(sigma, f.sigma_hat) for f in fits],
            'vecs': [f.sigma_hat.flatten('F') for f in fits],
            'urisk': [selection.unbiased_risk(obs, f, phi=phi) for f in fits],
            'deltas': [selection.delta_sq(f.projector, phi) for f in fits],
            'lmax': phi.lambda_max}

    results = replicate(run, replications, rng_seed, threads=threads)
    # delta^2 <= lambda_max(Phi) is only guaranteed for models with D = 1
    violations = sum(
        1 for res in results for d in res['deltas']
        if d > res['lmax'] * (1. + 1e-8))
    rows: RecordList = []
    plot: List[Tuple[float, ...]] = []
    passed = True
    for k, (design, proj) in enumerate(zip(designs, projs)):
        errs = [res['errs'][k] for res in results]
        risk, risk_se = mean_se(errs)
        sp = proj.matrix @ sigma @ proj.matrix
        bias = sq_dist(sigma, sp)
        variance = gammas[k] / size
        predicted = bias + variance
        risk_ok = abs(risk - predicted) <= SE_FACTOR * risk_se
        vecs = np.stack([res['vecs'][k] for res in results])
        centered = vecs - vecs.mean(axis=0)
        spread = np.sum(centered ** 2, axis=1) * replications \
            / (replications - 1.)
        var_trace, var_se = mean_se(spread)
        ident_ok = abs(size * var_trace - gammas[k]) \
            <= SE_FACTOR * size * var_se
        mean_gap = float(np.sqrt(sq_dist(vecs.mean(axis=0), sp.flatten('F'))))
        urisk, urisk_se = mean_se([res['urisk'][k] for res in results])
        passed = passed and risk_ok and ident_ok
        rows.append({
            'model_id': design.model.model_id, 'm': design.model.size,
            'D_m': proj.trace, 'mc_risk': risk, 'mc_se': risk_se,
            'bias': bias, 'variance_term': variance, 'predicted': predicted,
            'deviation': risk - predicted, 'risk_passed': risk_ok,
            'gamma_sq': gammas[k], 'mc_variance_trace': size * var_trace,
            'mc_variance_se': size * var_se, 'identity_passed': ident_ok,
            'mean_gap': mean_gap, 'unbiased_risk': urisk,
            'unbiased_risk_se': urisk_se})
        plot.append((proj.trace, risk, predicted))
    if validation is not None:
        passed = passed and validation['passed']
    summary = {
        'size': size, 'replications': replications, 'seed': rng_seed,
        'process': spec.kind, 'gaussian': spec.gaussian,
        'phi_validation': validation, 'bound_violations': violations,
        'tail_energy': process.tail_energy(spec)}
    if not passed:
        ui.warning("risk decomposition check failed")
    return RiskReport(
        experiment='risk_decomposition', passed=passed, summary=summary,
        rows=rows, plot_header=('x', 'empirical', 'target'), plot_rows=plot,
        replications=replications)

#
# Unbiasedness
#

@catalog.register(Experiment, name='unbiasedness')
def unbiasedness_check(
        spec: process.TrueProcessSpec, points: PointsLike,
        models: Sequence[basis.ModelSpec], size: int, replications: int,
        rng_seed: int = 0, family: Optional[basis.BasisFamily] = None,
        batches: int = 16, tolerance: float = .15,
        threads: int = 1) -> Report:
    """Check that the mean of the estimates converges to Pi Sigma Pi.

    The replications are split into disjoint groups of R = 1, 2, 4, ...
    datasets, such that every group size has at least *batches* groups. For
    each group size the root mean square distance between the group means of
    Sigma_m and Pi Sigma Pi is computed, and the slope of its logarithm
    against log R is fitted. For an unbiased estimator the slope is -1/2.

    Args:
        spec: :class:`~covest.lab.process.TrueProcessSpec` instance.
        points: Design points.
        models: Models, whose estimates are averaged.
        size: Number of replications N per dataset.
        replications: Number of Monte-Carlo datasets. At least 4 times
            *batches*.
        rng_seed: Seed of the experiment.
        family: Basis family of the models. By default the family of the
            process specification.
        batches: Minimum number of groups per group size.
        tolerance: Tolerated deviation of the slope from -1/2.
        threads: Number of worker threads. Zero means all cores.

    Returns:
        :class:`Report` instance.

    """
    points = array.as_vector("'points'", points)
    if batches < 2:
        raise ValueError("'batches' is required to be at least 2")
    if replications < 4 * batches:
        raise ValueError(
            f"at least {4 * batches} replications are required, "
            f"not {replications}")
    designs = _designs(spec, points, models, family)
    projs = [matrix.projector(d.matrix) for d in designs]
    sigma = process.true_sigma(spec, points)

    def run(r: int, rng: NpGenerator) -> List[NpArray]:
        obs = process.sample_process(spec, points, size, rng=rng)
        moments = estimator.sample_second_moment(obs)
        return [estimator.fit_model(moments, d).sigma_hat.flatten('F')
            for d in designs]

    results = replicate(run, replications, rng_seed, threads=threads)
    counts = [2 ** j for j in range(
        int(math.log2(replications // batches)) + 1)]
    rows: RecordList = []
    plot: List[Tuple[float, ...]] = []
    passed = True
    for k, (design, proj) in enumerate(zip(designs, projs)):
        target = (proj.matrix @ sigma @ proj.matrix).flatten('F')
        vecs = np.stack([res[k] for res in results])
        gaps = []
        for count in counts:
            groups = replications // count
            means = vecs[:groups * count].reshape(groups, count, -1).mean(1)
            gaps.append(float(np.sqrt(np.mean(
                np.sum((means - target) ** 2, axis=1)))))
        slope = float(np.polyfit(np.log(counts), np.log(gaps), 1)[0])
        ok = abs(slope + .5) <= tolerance
        passed = passed and ok
        rows.append({
            'model_id': design.model.model_id, 'm': design.model.size,
            'D_m': proj.trace, 'group_sizes': counts, 'rms_gaps': gaps,
            'slope': slope, 'passed': ok})
        plot += [(float(c), g, gaps[0] * c ** -.5)
            for c, g in zip(counts, gaps)]
    summary = {
        'size': size, 'replications': replications, 'seed': rng_seed,
        'process': spec.kind, 'target_slope': -.5,
        'band': [-.5 - tolerance, -.5 + tolerance]}
    if not passed:
        ui.warning("unbiasedness check failed")
    return Report(
        experiment='unbiasedness', passed=passed, summary=summary, rows=rows,
        plot_header=('x', 'empirical', 'target'), plot_rows=plot)

#
# Oracle Inequality
#

@catalog.register(Experiment, name='oracle')
def oracle_inequality_check(
        spec: process.TrueProcessSpec, points: PointsLike,
        models: Sequence[basis.ModelSpec], theta: float, size: int,
        replications: int, rng_seed: int = 0,
        family: Optional[basis.BasisFamily] = None,
        penalty_mode: str = 'delta_m', threads: int = 1) -> Report:
    """Compare the risk of the selected estimator with the best model.

    Asserts that the Monte-Carlo risk of the penalized estimator is bounded by
    K(theta) = (2 + 8 / theta)(1 + theta) times the smallest Monte-Carlo risk
    of the models, up to 3 standard errors. The remainder of order
    delta_sup^2 / N is not asserted; the constant c, which would be required to
    cover an excess, is reported instead.

    """
    points = array.as_vector("'points'", points)
    designs = _designs(spec, points, models, family)
    const = selection.oracle_constant(theta)
    sigma = process.true_sigma(spec, points)

    def run(r: int, rng: NpGenerator) -> Dict[str, Any]:
        obs = process.sample_process(spec, points, size, rng=rng)
        res = selection.select(
            obs, designs, theta=theta, penalty_mode=penalty_mode)
        errs = [sq_dist(sigma, f.sigma_hat) for f in res.fits]
        ids = [f.model.model_id for f in res.fits]
        return {
            'errs': errs, 'chosen': ids.index(res.chosen),
            'err': sq_dist(sigma, res.estimate.sigma_hat),
            'delta_sup': res.profile.delta_sup,
            'violations': res.profile.bound_violations()
            if penalty_mode == 'delta_m' else 0}

    results = replicate(run, replications, rng_seed, threads=threads)
    risks = [mean_se([res['errs'][k] for res in results])
        for k in range(len(designs))]
    best = int(np.argmin([r[0] for r in risks]))
    risk_min, se_min = risks[best]
    risk_sel, se_sel = mean_se([res['err'] for res in results])
    slack = SE_FACTOR * math.sqrt(se_sel ** 2 + (const * se_min) ** 2)
    bound = const * risk_min
    passed = risk_sel <= bound + slack
    delta_sup = float(np.mean([res['delta_sup'] for res in results]))
    excess = max(risk_sel - bound, 0.) * size
    ratio = risk_sel / risk_min if risk_min > 0. else float('inf')
    counts = np.bincount(
        [res['chosen'] for res in results], minlength=len(designs))
    violations = int(sum(res['violations'] for res in results))
    rows = [{
        'model_id': d.model.model_id, 'm': d.model.size,
        'mc_risk': risks[k][0], 'mc_se': risks[k][1],
        'selected': int(counts[k])} for k, d in enumerate(designs)]
    summary = {
        'theta': theta, 'K_theta': const, 'size': size,
        'replications': replications, 'seed': rng_seed,
        'penalty_mode': penalty_mode, 'selected_risk': risk_sel,
        'selected_se': se_sel, 'oracle_model': designs[best].model.model_id,
        'oracle_risk': risk_min, 'oracle_se': se_min, 'bound': bound,
        'slack': slack, 'ratio': ratio, 'ratio_within_1_5': ratio <= 1.5,
        'delta_sup': delta_sup,
        'c_required': excess / delta_sup if delta_sup > 0. else 0.,
        'bound_violations': violations}
    if not passed:
        ui.warning(f"oracle inequality check failed for theta {theta}")
    return Report(
        experiment='oracle', passed=passed, summary=summary, rows=rows,
        plot_header=('x', 'empirical', 'bound'),
        plot_rows=[(theta, risk_sel, bound)])

#
# Rate of Convergence
#

def model_schedule(size: int, alpha: float, factor: float = 2.) -> int:
    """Largest model size ceil(factor * N^(1 / (2 alpha + 1)))."""
    return max(1, int(math.ceil(factor * size ** (1. / (2. * alpha + 1.)))))

@catalog.register(Experiment, name='rate')
def rate_check(
        alpha: float, sizes: Sequence[int], replications: int,
        rng_seed: int = 0, kind: str = 'fourier', theta: float = 1.,
        factor: float = 2., truncation: Optional[int] = None,
        n_points: Optional[int] = None, strict: bool = True,
        tolerance: float = .2, penalty_mode: str = 'delta_m',
        threads: int = 1) -> Report:
    """Fit the rate of convergence of the penalized estimator.

    Runs the penalized selection over nested models up to
    :func:`model_schedule` for each sample size, on a Gaussian expansion with
    spectrum gamma_l = l^(-alpha) and fits the slope of the log risk against
    the log sample size. The target slope is -2 alpha / (2 alpha + 1). If a
    truncation is given, the covariance has finite rank within the model
    collection and the target slope is -1.

    Args:
        alpha: Positive decay rate of the spectrum.
        sizes: Increasing sample sizes, spanning at least four octaves.
        replications: Number of Monte-Carlo datasets per sample size.
        rng_seed: Seed of the experiment.
        kind: Name of the basis family.
        theta: Positive penalty parameter.
        factor: Factor of the model schedule.
        truncation: Optional number of expansion terms of a finite rank
            control. By default four times the largest model size.
        n_points: Number of equispaced design points. By default twice the
            largest model size.
        strict: Whether the slope is asserted to lie within the band around
            its target. Otherwise the slope is only required to be at most
            the upper end of the band.
        tolerance: Tolerated deviation of the slope from its target.
        penalty_mode: Name of the penalty mode.
        threads: Number of worker threads. Zero means all cores.

    Returns:
        :class:`Report` instance.

    """
    if not alpha > 0:
        raise ValueError(f"'alpha' is required to be positive, not {alpha}")
    sizes = [int(s) for s in sizes]
    if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("'sizes' are required to be strictly increasing")
    if math.log2(sizes[-1] / sizes[0]) < 4.:
        raise ValueError("'sizes' are required to span at least 4 octaves")
    mmax = [model_schedule(s, alpha, factor) for s in sizes]
    top = max(mmax)
    length = truncation or 4 * top
    n = n_points or 2 * top
    family = basis.BasisFamily(
        kind=kind, lower=0., upper=1., max_size=max(4 * top, length))
    spec = process.TrueProcessSpec(
        kind='kl_process', rng_seed=rng_seed, family=family, alpha=alpha,
        truncation=length)
    points = (np.arange(n) + .5) / n
    sigma = process.true_sigma(spec, points)
    designs = [basis.design_matrix(family, m, points)
        for m in basis.nested_model_family(family, list(range(1, top + 1)))]
    target = -1. if truncation else -2. * alpha / (2. * alpha + 1.)
    tasks = [(k, r) for k in range(len(sizes)) for r in range(replications)]

    def run(task: Tuple[int, int]) -> Tuple[float, int, int]:
        k, r = task
        obs = process.sample_process(
            spec, points, sizes[k], rng=get_rng(rng_seed, k, r))
        res = selection.select(
            obs, designs[:mmax[k]], theta=theta, penalty_mode=penalty_mode)
        chosen = res.estimate.model.size
        return (sq_dist(sigma, res.estimate.sigma_hat), chosen,
            res.profile.bound_violations())

    results = pool.map_ordered(run, tasks, threads=threads)
    rows: RecordList = []
    risks: List[float] = []
    for k, size in enumerate(sizes):
        part = results[k * replications:(k + 1) * replications]
        risk, risk_se = mean_se([p[0] for p in part])
        at_top = float(np.mean([p[1] == mmax[k] for p in part]))
        floor = bool(k and risk >= risks[-1] - 2. * risk_se)
        risks.append(risk)
        rows.append({
            'size': size, 'm_max': mmax[k], 'mc_risk': risk,
            'mc_se': risk_se, 'mean_selected': float(np.mean(
                [p[1] for p in part])),
            'top_fraction': at_top, 'saturated': at_top > .5 or floor})
    logn, logr = np.log(sizes), np.log(risks)
    if len(sizes) > 3:
        coef, cov = np.polyfit(logn, logr, 1, cov=True)
        slope_se = float(np.sqrt(cov[0, 0]))
    else:
        coef = np.polyfit(logn, logr, 1)
        slope_se = float('nan')
    slope = float(coef[0])
    low, high = target - tolerance, target + tolerance
    in_band = low <= slope <= high
    violations = int(sum(p[2] for p in results))
    passed = in_band if strict else slope <= high
    anchor = risks[0] * (sizes[0] ** -target)
    plot = [(float(s), r, anchor * s ** target) for s, r in zip(sizes, risks)]
    summary = {
        'alpha': alpha, 'target_slope': target, 'band': [low, high],
        'slope': slope, 'slope_se': slope_se, 'in_band': in_band,
        'asserted': 'band' if strict else 'upper',
        'replications': replications, 'seed': rng_seed,
        'n_points': n, 'truncation': length, 'finite_rank': bool(truncation),
        'tail_energy': process.tail_energy(spec), 'family': kind,
        'theta': theta, 'bound_violations': violations,
        'saturated': any(row['saturated'] for row in rows)}
    if not passed:
        ui.warning(f"rate check failed with slope {slope:.3f}")
    return Report(
        experiment='rate', passed=passed, summary=summary, rows=rows,
        plot_header=('x', 'empirical', 'target'), plot_rows=plot)

#
# Concentration of Quadratic Forms
#

def tail_threshold(
        delta_sq: float, trace: float, x: NpArray) -> NpArray:
    """Threshold d^2 Tr + 2 d^2 sqrt(Tr d x) + d^2 Tr x of the tail bound."""
    delta = math.sqrt(delta_sq)
    return delta_sq * trace + 2. * delta_sq * np.sqrt(trace * delta * x) \
        + delta_sq * trace * x

def concentration_problem(
        spec: process.TrueProcessSpec, points: PointsLike, size: int,
        projector: str = 'model', model_size: int = 1,
        family: Optional[basis.BasisFamily] = None
        ) -> Tuple[NpArray, NpArray]:
    """Error covariance and stacked projector of a concentration check.

    For the projector 'model', the errors are the centered observations of
    the process with covariance Sigma at the design points and the matrix A
    is block diagonal with the projector of the first *model_size* basis
    functions on each block. For 'coordinate', the errors are the first
    coordinate of the observations and A selects the first replication.

    Returns:
        Tuple (Phi, A).

    """
    points = array.as_vector("'points'", points)
    sigma = process.true_sigma(spec, points)
    if projector == 'coordinate':
        a_tilde = np.zeros((size, size))
        a_tilde[0, 0] = 1.
        return sigma[:1, :1], a_tilde
    if projector != 'model':
        raise ValueError(f"projector '{projector}' is not valid")
    family = family or spec.family
    if family is None:
        raise ValueError("a basis family for the projector is required")
    model = basis.nested_model_family(family, [model_size])[0]
    pi = matrix.projector(basis.design_matrix(family, model, points).matrix)
    return sigma, np.kron(np.eye(size), pi.matrix)

@catalog.register(Experiment, name='concentration')
def concentration_check(
        phi: NpArray, a_tilde: NpArray, size: int, p: float,
        replications: int, xs: Sequence[float], rng_seed: int = 0,
        noise: str = 'gaussian', dof: Optional[float] = None,
        threads: int = 1) -> Report:
    """Tail of the quadratic form e^T A e of stacked regression errors.

    The errors e_1, ..., e_N in R^d are i.i.d. with covariance Phi, either
    Gaussian or scaled Student-t. For every x the exceedance probability of
    the threshold :func:`tail_threshold` is estimated and compared with the
    shape Tr(A) E||e_1||^p / (delta^p rho(A) x^(p/2)) of the bound, whose
    constant is unknown. Asserted are the decay of the log tail against log x
    with slope at most -p/2 + 0.3 over the points x >= 1 with at least ten
    exceedances and, for a single coordinate projection of Gaussian errors,
    the agreement with the chi-square tail within 3 standard errors.

    """
    phi = array.as_square("'phi'", phi)
    a_tilde = array.sym(array.as_square("'a_tilde'", a_tilde))
    d = phi.shape[0]
    if a_tilde.shape[0] != size * d:
        raise ValueError(
            f"'a_tilde' has dimension {a_tilde.shape[0]}, not {size * d}")
    if p < 2.:
        raise ValueError(f"'p' is required to be at least 2, not {p}")
    if noise not in ('gaussian', 'student_t'):
        raise ValueError(f"noise '{noise}' is not valid")
    if noise == 'student_t' and not (dof is not None and dof > p):
        raise ValueError(
            "Student-t errors require 'dof' > 'p' for a finite p-th moment")
    xs = np.asarray(xs, dtype=float)
    if not xs.size or np.any(xs <= 0.):
        raise ValueError("'xs' are required to be positive")
    w, v = linalg.eigh(array.sym(phi))
    root = v * np.sqrt(np.maximum(w, 0.))
    trace = matrix.trace(a_tilde)
    gamma_sq = regress.block_trace(a_tilde, phi)
    delta_sq = gamma_sq / trace
    rho = matrix.spectral_norm(a_tilde)
    thresholds = tail_threshold(delta_sq, trace, xs)
    counts = [min(CONCENTRATION_BLOCK, replications - start)
        for start in range(0, replications, CONCENTRATION_BLOCK)]

    def run(b: int) -> Tuple[NpArray, NpArray]:
        rng = get_rng(rng_seed, b)
        if noise == 'gaussian':
            z = rng.standard_normal((counts[b], size, d))
        else:
            z = rng.standard_t(dof, (counts[b], size, d))
            z = z / np.sqrt(dof / (dof - 2.))
        eps = (z @ root.T).reshape(counts[b], size * d)
        zeta = np.sum((eps @ a_tilde) * eps, axis=1)
        norms = np.sum(eps[:, :d] ** 2, axis=1) ** (p / 2.)
        return zeta, norms

    parts = pool.map_ordered(run, list(range(len(counts))), threads=threads)
    zeta = np.concatenate([part[0] for part in parts])
    moment = float(np.mean(np.concatenate([part[1] for part in parts])))
    hits = np.array([int(np.sum(zeta >= thr)) for thr in thresholds])
    prob = hits / replications
    prob_se = np.sqrt(prob * (1. - prob) / replications)
    shape = moment * trace / (delta_sq ** (p / 2.) * rho * xs ** (p / 2.))
    fit = (xs >= 1.) & (hits >= 10)
    slope: Optional[float] = None
    if np.sum(fit) >= 2:
        slope = float(np.polyfit(np.log(xs[fit]), np.log(prob[fit]), 1)[0])
    shape_ok = slope is not None and slope <= -p / 2. + .3
    closed: Optional[List[float]] = None
    closed_ok = True
    nonzero = np.flatnonzero(np.abs(a_tilde) > 0.)
    if noise == 'gaussian' and d == 1 and nonzero.size == 1 \
            and nonzero[0] % (size * d + 1) == 0:
        weight = float(a_tilde.flat[nonzero[0]]) * float(phi[0, 0])
        exact = stats.chi2.sf(thresholds / weight, 1)
        exact_se = np.sqrt(exact * (1. - exact) / replications)
        closed = [float(c) for c in exact]
        closed_ok = bool(np.all(
            np.abs(prob - exact) <= SE_FACTOR * np.maximum(exact_se, 1e-300)))
    rows = [{
        'x': float(x), 'threshold': float(thr), 'exceed': int(h),
        'empirical': float(pr), 'empirical_se': float(se),
        'bound_shape': float(sh),
        'closed_form': closed[i] if closed is not None else None}
        for i, (x, thr, h, pr, se, sh) in enumerate(
            zip(xs, thresholds, hits, prob, prob_se, shape))]
    passed = bool(shape_ok and closed_ok)
    summary = {
        'size': size, 'dim': d, 'p': p, 'noise': noise, 'dof': dof,
        'replications': replications, 'seed': rng_seed, 'trace': trace,
        'gamma_sq': gamma_sq, 'delta_sq': delta_sq, 'rho': rho,
        'moment_p': moment, 'slope': slope, 'slope_limit': -p / 2. + .3,
        'shape_passed': shape_ok, 'closed_form_passed': closed_ok}
    if not passed:
        ui.warning("concentration check failed")
    return Report(
        experiment='concentration', passed=passed, summary=summary,
        rows=rows, plot_header=('x', 'empirical', 'bound'),
        plot_rows=[(float(x), float(pr), float(sh))
            for x, pr, sh in zip(xs, prob, shape)])
