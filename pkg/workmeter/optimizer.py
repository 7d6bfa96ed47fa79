# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Variational free energy estimation.

For a random joint Hamiltonian the measurable ``dF~`` of the one point
scheme is an upper bound on ``dF``. The bound is tightened by

1. scanning the duration of a linear start protocol,
2. running gradient descent on the interior spline values of ``theta`` and
   ``phi``, re-optimizing the duration between descent steps.
"""
import logging
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DimensionError
from .quantum import dagger, log_partition_function, random_hermitian, \
    random_unitary
from .collision import (
    JointHamiltonian, QubitProtocol, effective_unitary, endpoint_hamiltonians,
)
from .fluctuation import modified_je


log = logging.getLogger('workmeter').getChild('optimizer')

THETA_END = np.pi / 2.
SUPPORTED_DIMS = (2, 3, 4, 5, 6)
# gradients below this norm are treated as round-off
GRADIENT_FLOOR = 1e-8


class SplineProtocol(QubitProtocol):
    """Qubit control with natural cubic spline angles.

    ``theta_values`` and ``phi_values`` are the ``n`` interior control
    values placed at ``t_k = k T / (n + 1)``; the end points are pinned to
    ``theta(0) = 0``, ``theta(T) = pi/2`` and ``phi(0) = phi(T) = 0``.
    """
    def __init__(self, theta_values, phi_values, duration):
        theta_values = np.asarray(theta_values, dtype=float)
        phi_values = np.asarray(phi_values, dtype=float)
        if theta_values.shape != phi_values.shape or theta_values.ndim != 1:
            raise ValueError("Need equally many theta and phi values")
        self.theta_values = theta_values
        self.phi_values = phi_values
        n = len(theta_values)
        knots = np.linspace(0., 1., n + 2)
        self._theta = CubicSpline(
            knots, np.r_[0., theta_values, THETA_END], bc_type='natural')
        self._phi = CubicSpline(
            knots, np.r_[0., phi_values, 0.], bc_type='natural')
        self._dtheta = self._theta.derivative()
        self._dphi = self._phi.derivative()
        T = float(duration)
        super(SplineProtocol, self).__init__(
            lambda t: self._theta(np.asarray(t) / T),
            lambda t: self._phi(np.asarray(t) / T),
            T,
            dtheta=lambda t: self._dtheta(np.asarray(t) / T) / T,
            dphi=lambda t: self._dphi(np.asarray(t) / T) / T,
            name='spline',
        )

    @classmethod
    def linear(cls, n, duration):
        """The start protocol ``theta = pi/2 t/T``, ``phi = 0``.
        """
        values = THETA_END * np.arange(1, n + 1) / (n + 1.)
        return cls(values, np.zeros(n), duration)

    @property
    def n(self):
        return len(self.theta_values)

    @property
    def parameters(self):
        return np.r_[self.theta_values, self.phi_values]

    def with_parameters(self, parameters):
        parameters = np.asarray(parameters, dtype=float)
        return SplineProtocol(
            parameters[:self.n], parameters[self.n:], self.duration)

    def rescaled(self, duration):
        return SplineProtocol(self.theta_values, self.phi_values, duration)

    def __repr__(self):
        return 'SplineProtocol(n={}, T={:.4g})'.format(self.n, self.duration)


@dataclass(frozen=True)
class StudyConfig:
    """Parameters of a free energy estimation study.
    """
    dims: tuple = SUPPORTED_DIMS
    samples: int = 50
    T_min: float = 0.5
    T_max: float = 5.
    n: int = 5
    beta: float = 1.
    seed: int = 0
    collisions: int = 2000
    final_collisions: int = 20000
    grid_size: int = 16
    step: float = 0.2
    min_step: float = 1e-5
    max_iter: int = 60
    tol: float = 1e-6
    fd_step: float = 1e-4
    bounded_only: bool = False
    workers: int = None

    def __post_init__(self):
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))
        if not self.T_min < self.T_max:
            raise ValueError("Need T_min < T_max, got {} and {}".format(
                self.T_min, self.T_max))
        if self.n < 2:
            raise ValueError("Need n >= 2 spline values, got {}".format(
                self.n))
        if self.samples < 1:
            raise ValueError("Need at least one sample per dim")
        if self.grid_size < 2:
            raise ValueError("Need a duration grid of >= 2 points")
        bad = set(self.dims) - set(SUPPORTED_DIMS)
        if bad or not self.dims:
            raise DimensionError("Unsupported system dims {}".format(
                sorted(bad)))

    @classmethod
    def strategy(cls, number, **overrides):
        """Preset 1 (``T_max = 5``, ``n = 5``) or 2 (``T_max = 20``,
        ``n = 10``) with ``overrides`` applied on top.
        """
        presets = {
            1: dict(T_max=5., n=5),
            2: dict(T_max=20., n=10),
        }
        try:
            params = dict(presets[int(number)])
        except (KeyError, ValueError):
            raise ValueError("Unknown strategy {!r}".format(number))
        params.update(overrides)
        return cls(**params)

    def as_dict(self):
        data = asdict(self)
        data['dims'] = list(self.dims)
        return data


def sample_random_hamiltonian(dimS, rng, bounded_only=False):
    """Random joint Hamiltonian on ``dimS x 2`` with spectrum in ``[-1, 1]``.

    By default a GUE sample is affinely rescaled so that its extreme
    eigenvalues are exactly -1 and 1. With ``bounded_only`` the eigenvalues
    are drawn uniformly from ``[-1, 1]`` with Haar random eigenvectors.
    """
    if dimS not in SUPPORTED_DIMS:
        raise DimensionError("Unsupported system dim {}".format(dimS))
    dim = 2 * dimS
    if bounded_only:
        vals = rng.uniform(-1., 1., dim)
        vecs = random_unitary(dim, rng)
    else:
        vals, vecs = np.linalg.eigh(random_hermitian(dim, rng))
        vals = -1. + 2. * (vals - vals[0]) / (vals[-1] - vals[0])
    H = (vecs * vals) @ dagger(vecs)
    return JointHamiltonian((H + dagger(H)) / 2., dimS, 2)


def spectral_spread(H_SC):
    vals = np.linalg.eigvalsh(H_SC.matrix)
    return float(vals[-1] - vals[0])


def free_energy_difference(H_SC, protocol, beta=1.):
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    return -(log_partition_function(H_B, beta) -
             log_partition_function(H_A, beta)) / beta


def objective(H_SC, protocol, beta=1., N=2000):
    """``dF~`` of the one point scheme for ``protocol``.
    """
    U = effective_unitary(H_SC, protocol, N)
    H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
    return modified_je(H_A, H_B, U, beta).delta_F_tilde


def optimize_duration(H_SC, shape, T_min, T_max, grid_size=16, beta=1.,
                      N=2000, evaluate=None):
    """Best duration on a uniform grid for a fixed protocol ``shape``.

    Returns ``(T_opt, value)``; ties resolve to the smallest duration.
    ``evaluate(protocol)`` replaces the objective when given.
    """
    if grid_size < 2:
        raise ValueError("Need grid_size >= 2, got {}".format(grid_size))
    evaluate = evaluate or (lambda p: objective(H_SC, p, beta, N))
    grid = np.linspace(T_min, T_max, grid_size)
    values = np.array([evaluate(shape.rescaled(T)) for T in grid])
    best = int(np.argmin(values))
    log.debug("duration scan of {}: T_opt={:.4g}, dF~={:.8g}".format(
        shape, grid[best], values[best]))
    return float(grid[best]), float(values[best])


def _gradient(evaluate, protocol, h):
    x = protocol.parameters
    grad = np.empty_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        grad[k] = (evaluate(protocol.with_parameters(x + e)) -
                   evaluate(protocol.with_parameters(x - e))) / (2. * h)
    return grad


@dataclass
class DescentResult:
    protocol: SplineProtocol
    value: float
    iterations: int
    history: list = field(default_factory=list)


def gradient_descent(H_SC, init, config, value=None):
    """Minimize ``dF~`` over the interior spline values of ``init``.

    Each accepted step is followed by a duration re-optimization which is
    kept only if it improves the objective, so the accepted values never
    increase.
    """
    def evaluate(protocol):
        return objective(H_SC, protocol, config.beta, config.collisions)

    current = init
    value = evaluate(init) if value is None else value
    history = [value]
    step = config.step
    iterations = 0

    for iterations in range(1, config.max_iter + 1):
        grad = _gradient(evaluate, current, config.fd_step)
        norm = np.linalg.norm(grad)
        if norm < GRADIENT_FLOOR:
            log.debug("gradient vanished at iteration {}".format(iterations))
            break

        direction = grad / norm
        accepted = None
        while step >= config.min_step:
            candidate = current.with_parameters(
                current.parameters - step * direction)
            trial = evaluate(candidate)
            if trial < value:
                accepted = candidate
                break
            step /= 2.
        if accepted is None:
            log.debug("no descent step above {} at iteration {}".format(
                config.min_step, iterations))
            break

        T_opt, rescaled_value = optimize_duration(
            H_SC, accepted, config.T_min, config.T_max, config.grid_size,
            evaluate=evaluate)
        if rescaled_value < trial:
            accepted, trial = accepted.rescaled(T_opt), rescaled_value

        improvement = (value - trial) / max(abs(value), 1e-12)
        current, value = accepted, trial
        history.append(value)
        log.debug("iteration {}: dF~={:.10g}, step={:.3g}, T={:.4g}".format(
            iterations, value, step, current.duration))
        if improvement < config.tol:
            break

    return DescentResult(current, value, iterations, history)


@dataclass
class SampleResult:
    dim: int
    index: int
    delta_F: float
    delta_F_tilde_linear: float
    delta_F_tilde_opt: float
    delta_F_tilde_unit: float
    T_linear: float
    T_opt: float
    spread: float
    iterations: int

    @property
    def err_abs(self):
        return abs(self.delta_F - self.delta_F_tilde_opt)

    @property
    def err_scl(self):
        return self.err_abs / self.spread

    @property
    def err_abs_linear(self):
        return abs(self.delta_F - self.delta_F_tilde_linear)

    @property
    def err_scl_linear(self):
        return self.err_abs_linear / self.spread

    @property
    def err_abs_unit(self):
        return abs(self.delta_F - self.delta_F_tilde_unit)

    @property
    def err_scl_unit(self):
        return self.err_abs_unit / self.spread

    def as_row(self):
        row = asdict(self)
        for name in ('err_abs', 'err_scl', 'err_abs_linear',
                     'err_scl_linear', 'err_abs_unit', 'err_scl_unit'):
            row[name] = getattr(self, name)
        return row


def sample_rng(seed, dim, index):
    """Deterministic generator of sample ``index`` in dimension ``dim``.
    """
    return np.random.default_rng([int(seed), int(dim), int(index)])


def run_sample(config, dim, index):
    """Linear duration scan, spline descent and final re-evaluation for one
    random Hamiltonian.
    """
    rng = sample_rng(config.seed, dim, index)
    H_SC = sample_random_hamiltonian(dim, rng, config.bounded_only)

    linear = SplineProtocol.linear(config.n, config.T_min)
    T_lin, value = optimize_duration(
        H_SC, linear, config.T_min, config.T_max, config.grid_size,
        config.beta, config.collisions)
    linear = linear.rescaled(T_lin)
    descent = gradient_descent(H_SC, linear, config, value)

    def final(protocol):
        U = effective_unitary(H_SC, protocol, config.final_collisions)
        H_A, H_B = endpoint_hamiltonians(H_SC, protocol)
        return modified_je(H_A, H_B, U, config.beta).check_bounds()

    lin = final(linear)
    opt = final(descent.protocol)
    unit = final(linear.rescaled(1.))
    best, T_best = opt.delta_F_tilde, descent.protocol.duration
    if opt.delta_F_tilde > lin.delta_F_tilde:
        log.warning("sample {}/{}: descent lost to the start protocol at "
                    "full resolution".format(dim, index))
        best, T_best = lin.delta_F_tilde, T_lin

    result = SampleResult(
        dim=dim, index=index,
        delta_F=lin.delta_F,
        delta_F_tilde_linear=lin.delta_F_tilde,
        delta_F_tilde_opt=best,
        delta_F_tilde_unit=unit.delta_F_tilde,
        T_linear=T_lin,
        T_opt=T_best,
        spread=spectral_spread(H_SC),
        iterations=descent.iterations,
    )
    log.info("sample {}/{}: dF={:.6f} lin={:.6f} opt={:.6f}".format(
        dim, index, result.delta_F, result.delta_F_tilde_linear,
        result.delta_F_tilde_opt))
    return result


class StudyResult(object):
    """Per sample outcomes of a study and their per dimension averages.
    """
    def __init__(self, config, samples):
        self.config = config
        self.samples = sorted(samples, key=lambda s: (s.dim, s.index))

    def by_dim(self, dim):
        return [s for s in self.samples if s.dim == dim]

    def aggregates(self):
        rows = []
        for dim in sorted(set(s.dim for s in self.samples)):
            group = self.by_dim(dim)
            rows.append(OrderedDict([
                ('dim', dim),
                ('mean_err_abs_linear',
                 float(np.mean([s.err_abs_linear for s in group]))),
                ('mean_err_abs_opt',
                 float(np.mean([s.err_abs for s in group]))),
                ('mean_err_scl_linear',
                 float(np.mean([s.err_scl_linear for s in group]))),
                ('mean_err_scl_opt',
                 float(np.mean([s.err_scl for s in group]))),
                ('mean_err_abs_unit',
                 float(np.mean([s.err_abs_unit for s in group]))),
                ('mean_err_scl_unit',
                 float(np.mean([s.err_scl_unit for s in group]))),
                ('n_samples', len(group)),
            ]))
        return rows


def run_study(config, on_result=None):
    """Run every ``(dim, index)`` sample of ``config``.

    Samples run in a process pool unless ``config.workers == 1``.
    ``on_result`` is called with each finished ``SampleResult`` in
    completion order.
    """
    jobs = [(dim, index) for dim in config.dims
            for index in range(config.samples)]
    log.info("running {} samples over dims {}".format(
        len(jobs), list(config.dims)))
    samples = []

    def collect(result):
        samples.append(result)
        if on_result is not None:
            on_result(result)

    if config.workers == 1:
        for dim, index in jobs:
            collect(run_sample(config, dim, index))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(run_sample, config, dim, index)
                       for dim, index in jobs]
            try:
                for future in as_completed(futures):
                    collect(future.result())
            except BaseException:
                for future in futures:
                    future.cancel()
                raise

    return StudyResult(config, samples)
