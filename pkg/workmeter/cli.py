# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Command line entry points.

Every command writes its data file plus a sibling ``<file>.manifest.json``
recording the command, the resolved configuration and the seed.
"""
import functools
import logging
from collections import OrderedDict
from dataclasses import fields

import numpy as np
from plumbum import cli, local

from . import __version__
from .errors import DimensionError, UsageError, WorkMeterError
from .quantum import (
    log_partition_function, random_hermitian, random_unitary, thermal_state,
)
from .collision import (
    constant_protocol, endpoint_hamiltonians, energy_change,
    internal_energy_work,
)
from .meter import measure_work, sample_work
from .fluctuation import jarzynski_average, tpm_distribution
from .examples import (
    figure1_scan, oscillator_numeric, oscillator_protocol,
    oscillator_work_analytic, qubit_coupling, qubit_protocol,
)
from .optimizer import StudyConfig, run_study
from .utils import ResultFile, RunManifest, configure_logging, load_config


log = logging.getLogger('workmeter').getChild('cli')

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2
EXIT_IO = 3


def exit_codes(main):
    """Map errors raised by a command to its exit code.
    """
    @functools.wraps(main)
    def wrapper(self, *args):
        try:
            return main(self, *args)
        except UsageError as err:
            log.error("usage: {}".format(err))
            return EXIT_USAGE
        except OSError as err:
            log.error("I/O failure: {}".format(err))
            return EXIT_IO
        except WorkMeterError as err:
            log.error("{}: {}".format(type(err).__name__, err))
            return EXIT_THRESHOLD
    return wrapper


def check_choice(name, value, options):
    if value is not None and value not in options:
        raise UsageError("--{} must be one of {}, got {!r}".format(
            name, list(options), value))
    return value


def coerce(kind, value):
    """Convert a config file string to ``kind``.
    """
    if kind is bool:
        lowered = value.strip().lower()
        if lowered not in ('1', '0', 'true', 'false', 'yes', 'no'):
            raise UsageError("Expected a boolean, got {!r}".format(value))
        return lowered in ('1', 'true', 'yes')
    if kind is tuple:
        return tuple(int(v) for v in value.split(',') if v.strip())
    try:
        return kind(value)
    except ValueError:
        raise UsageError("Expected {}, got {!r}".format(kind.__name__, value))


class WorkMeter(cli.Application):
    """Simulate work measurements on a quantum control device.
    """
    PROGNAME = 'workmeter'
    VERSION = __version__

    loglevel = cli.SwitchAttr(
        '--loglevel', str, default='INFO',
        help="Log level: DEBUG, INFO, WARNING or ERROR")
    seed = cli.SwitchAttr(
        '--seed', int, default=0, envname='WORKMETER_SEED',
        help="Master seed (also read from $WORKMETER_SEED)")
    config = cli.SwitchAttr(
        '--config', cli.ExistingFile, default=None,
        help="Flat key=value file with defaults for the command options")

    def main(self, *args):
        configure_logging(self.loglevel)
        if args:
            log.error("Unknown command {!r}".format(args[0]))
            return EXIT_USAGE
        if not self.nested_command:
            self.help()
            return EXIT_USAGE
        self.file_config = load_config(self.config) if self.config else {}


class Command(cli.Application):
    """A subcommand writing one output file.
    """
    out = cli.SwitchAttr(['-o', '--out'], str, default=None,
                         help="Output file")
    COMMAND = None
    DEFAULT_OUT = 'out.csv'

    @property
    def seed(self):
        return self.parent.seed

    @property
    def outpath(self):
        return local.path(self.out or self.DEFAULT_OUT)

    def resolve(self, defaults, flags, types=None):
        """Merge ``defaults``, the ``--config`` file and the given ``flags``.

        Flags set to ``None`` (or ``False``) count as not given.
        """
        types = types or {}
        values = OrderedDict(defaults)
        for key, raw in getattr(self.parent, 'file_config', {}).items():
            if key not in flags:
                log.debug("ignoring config key '{}'".format(key))
                continue
            kind = types.get(key)
            if kind is None:
                default = defaults.get(key)
                kind = str if default is None else type(default)
            values[key] = coerce(kind, raw)
        for key, value in flags.items():
            if value is not None and value is not False:
                values[key] = value
        return values

    def manifest(self, config, summary=None):
        return RunManifest(self.COMMAND, config, self.seed, __version__,
                           summary=summary)


@WorkMeter.subcommand('tpm')
class TPMCheck(Command):
    """Verify the two point measurement Jarzynski identity on random
    instances.
    """
    COMMAND = 'tpm'
    DEFAULT_OUT = 'tpm.csv'

    dim = cli.SwitchAttr('--dim', int, default=None, help="System dim")
    beta = cli.SwitchAttr('--beta', float, default=None)
    samples = cli.SwitchAttr('--samples', int, default=None)

    @exit_codes
    def main(self):
        params = self.resolve(
            OrderedDict([('dim', 3), ('beta', 1.), ('samples', 100)]),
            dict(dim=self.dim, beta=self.beta, samples=self.samples))
        dim, beta, samples = params['dim'], params['beta'], params['samples']
        if samples < 1:
            raise UsageError("--samples must be >= 1")
        if dim < 2:
            raise UsageError("--dim must be >= 2")

        rng = np.random.default_rng(self.seed)
        rows = []
        for index in range(samples):
            H_A = random_hermitian(dim, rng)
            H_B = random_hermitian(dim, rng)
            U = random_unitary(dim, rng)
            average = jarzynski_average(
                tpm_distribution(H_A, H_B, U, beta), beta)
            ratio = np.exp(log_partition_function(H_B, beta) -
                           log_partition_function(H_A, beta))
            rows.append((index, average, float(ratio), abs(average - ratio)))

        worst = max(row[-1] for row in rows)
        manifest = self.manifest(params, {'max_residual': worst})
        with ResultFile(self.outpath, manifest) as result:
            result.commit(
                ('sample', 'average', 'partition_ratio', 'residual'), rows)
        log.info("max |<exp(-beta W)> - Z_B/Z_A| = {:.3e}".format(worst))
        return EXIT_THRESHOLD if worst > 1e-9 else EXIT_OK


@WorkMeter.subcommand('figure1')
class Figure1(Command):
    """Tabulate dF, dF~ and <W> against the switching time.
    """
    COMMAND = 'figure1'
    DEFAULT_OUT = 'figure1.csv'

    variant = cli.SwitchAttr('--variant', int, default=None,
                             help="Qubit coupling variant")
    protocol = cli.SwitchAttr('--protocol', int,
                              default=None, help="Oscillator protocol")
    t_min = cli.SwitchAttr('--t-min', float, default=None)
    t_max = cli.SwitchAttr('--t-max', float, default=None)
    points = cli.SwitchAttr('--points', int, default=None)
    collisions = cli.SwitchAttr('--collisions', int, default=None)
    beta = cli.SwitchAttr('--beta', float, default=None)
    omega = cli.SwitchAttr('--omega', float, default=None)
    g = cli.SwitchAttr('--g', float, default=None)
    numeric = cli.Flag('--numeric', help="Oscillator rows from the "
                       "truncated Fock space instead of the closed form")
    truncation = cli.SwitchAttr('--truncation', int, default=None)
    workers = cli.SwitchAttr('--workers', int, default=None)

    @exit_codes
    def main(self):
        params = self.resolve(
            OrderedDict([
                ('variant', None), ('protocol', None), ('t_min', 0.05),
                ('t_max', 50.), ('points', 40), ('collisions', 40000),
                ('beta', 1.), ('omega', 1.), ('g', 1.), ('numeric', False),
                ('truncation', 40), ('workers', None),
            ]),
            dict(variant=self.variant, protocol=self.protocol,
                 t_min=self.t_min, t_max=self.t_max, points=self.points,
                 collisions=self.collisions, beta=self.beta,
                 omega=self.omega, g=self.g, numeric=self.numeric,
                 truncation=self.truncation, workers=self.workers),
            types=dict(variant=int, protocol=int, workers=int))
        if (params['variant'] is None) == (params['protocol'] is None):
            raise UsageError("Give exactly one of --variant or --protocol")
        check_choice('variant', params['variant'], (1, 2))
        check_choice('protocol', params['protocol'], (1, 2, 3, 4))
        if params['points'] < 1 or not 0 < params['t_min'] <= params['t_max']:
            raise UsageError("Invalid switching time grid")

        kind, index = ('qubit', params['variant']) \
            if params['variant'] is not None \
            else ('oscillator', params['protocol'])
        grid = np.geomspace(params['t_min'], params['t_max'],
                            params['points'])
        rows = figure1_scan(
            kind, int(index), grid, params['collisions'], params['beta'],
            params['omega'], params['g'], params['numeric'],
            params['truncation'], params['workers'])

        broken = [row.T for row in rows if not (
            row.delta_F <= row.delta_F_tilde + 1e-9 and
            row.delta_F_tilde <= row.avg_work + 1e-9)]
        manifest = self.manifest(params, {'bound_violations': broken})
        with ResultFile(self.outpath, manifest) as result:
            result.commit(('T', 'deltaF', 'deltaF_tilde', 'avg_work'),
                          [tuple(row) for row in rows])
        if broken:
            log.error("dF <= dF~ <= <W> violated at T = {}".format(broken))
            return EXIT_THRESHOLD
        return EXIT_OK


SAMPLE_HEADER = (
    'dim', 'index', 'delta_F', 'delta_F_tilde_linear', 'delta_F_tilde_opt',
    'delta_F_tilde_unit', 'T_linear', 'T_opt', 'spread', 'iterations',
    'err_abs', 'err_scl', 'err_abs_linear', 'err_scl_linear', 'err_abs_unit',
    'err_scl_unit',
)


@WorkMeter.subcommand('optimize')
class Optimize(Command):
    """Run the variational free energy estimation study.
    """
    COMMAND = 'optimize'
    DEFAULT_OUT = 'study.csv'

    strategy = cli.SwitchAttr('--strategy', int, default=None,
                              help="Parameter preset")
    dims = cli.SwitchAttr('--dims', str, default=None,
                          help="Comma separated system dims, e.g. 2,3")
    samples = cli.SwitchAttr('--samples', int, default=None,
                             help="Random Hamiltonians per dim")
    t_min = cli.SwitchAttr('--t-min', float, default=None)
    t_max = cli.SwitchAttr('--t-max', float, default=None)
    spline_points = cli.SwitchAttr('--spline-points', int, default=None)
    collisions = cli.SwitchAttr('--collisions', int, default=None)
    final_collisions = cli.SwitchAttr('--final-collisions', int,
                                      default=None)
    grid_size = cli.SwitchAttr('--grid-size', int, default=None)
    step = cli.SwitchAttr('--step', float, default=None)
    max_iter = cli.SwitchAttr('--max-iter', int, default=None)
    tol = cli.SwitchAttr('--tol', float, default=None)
    beta = cli.SwitchAttr('--beta', float, default=None)
    bounded_only = cli.Flag('--bounded-only',
                            help="Uniform spectra instead of rescaled GUE")
    workers = cli.SwitchAttr('--workers', int, default=None)
    aggregate = cli.SwitchAttr('--aggregate', str, default=None,
                               help="Per dim aggregate JSON file")

    def flags(self):
        dims = coerce(tuple, self.dims) if self.dims else None
        return dict(
            strategy=self.strategy, dims=dims, samples=self.samples,
            T_min=self.t_min, T_max=self.t_max, n=self.spline_points,
            collisions=self.collisions,
            final_collisions=self.final_collisions,
            grid_size=self.grid_size, step=self.step,
            max_iter=self.max_iter, tol=self.tol, beta=self.beta,
            bounded_only=self.bounded_only, workers=self.workers,
        )

    @exit_codes
    def main(self):
        types = {f.name: f.type for f in fields(StudyConfig)}
        types.update(strategy=int, workers=int)
        params = self.resolve(OrderedDict(strategy=1), self.flags(), types)
        strategy = params.pop('strategy')
        check_choice('strategy', strategy, (1, 2))
        try:
            config = StudyConfig.strategy(strategy, seed=self.seed, **params)
        except (ValueError, DimensionError) as err:
            raise UsageError(str(err))

        aggregate = local.path(self.aggregate) if self.aggregate else \
            self.outpath.dirname / (self.outpath.stem + '.aggregate.json')
        resolved = dict(config.as_dict(), strategy=strategy)

        with ResultFile(self.outpath, self.manifest(resolved)) as samples:
            def stream(sample):
                row = sample.as_row()
                samples.append_row(
                    SAMPLE_HEADER, [row[name] for name in SAMPLE_HEADER])

            try:
                study = run_study(config, on_result=stream)
            except WorkMeterError:
                raise
            except Exception:
                log.exception("study aborted; partial rows kept in '{}'"
                              .format(samples.partial))
                return EXIT_THRESHOLD

            rows = [sample.as_row() for sample in study.samples]
            samples.commit(
                SAMPLE_HEADER,
                [[row[name] for name in SAMPLE_HEADER] for row in rows])

        with ResultFile(aggregate, self.manifest(resolved)) as result:
            result.commit(data=study.aggregates())
        for row in study.aggregates():
            log.info("d={dim}: <err_abs> linear {mean_err_abs_linear:.4g}, "
                     "optimized {mean_err_abs_opt:.4g}".format(**row))
        return EXIT_OK


@WorkMeter.subcommand('work-trace')
class WorkTrace(Command):
    """Record the measured work increments of a qubit example.
    """
    COMMAND = 'work-trace'
    DEFAULT_OUT = 'work-trace.csv'

    variant = cli.SwitchAttr('--variant', int, default=None)
    duration = cli.SwitchAttr('--duration', float, default=None)
    collisions = cli.SwitchAttr('--collisions', int, default=None)
    mode = cli.SwitchAttr('--mode', cli.Set('expectation', 'sampled'),
                          default=None)
    shots = cli.SwitchAttr('--shots', int, default=None)
    beta = cli.SwitchAttr('--beta', float, default=None,
                          help="Inverse temperature of the initial state")
    constant = cli.Flag('--constant',
                        help="Hold the control at its initial state")

    @exit_codes
    def main(self):
        params = self.resolve(
            OrderedDict([
                ('variant', 1), ('duration', 50.), ('collisions', 40000),
                ('mode', 'expectation'), ('shots', 1), ('beta', 1.),
                ('constant', False),
            ]),
            dict(variant=self.variant, duration=self.duration,
                 collisions=self.collisions, mode=self.mode,
                 shots=self.shots, beta=self.beta, constant=self.constant))
        check_choice('variant', params['variant'], (1, 2))
        check_choice('mode', params['mode'], ('expectation', 'sampled'))
        if params['shots'] < 1:
            raise UsageError("--shots must be >= 1")

        H_SC = qubit_coupling(int(params['variant']))
        protocol = qubit_protocol(int(params['variant']), params['duration'])
        if params['constant']:
            protocol = constant_protocol(
                protocol.state_at(0.), params['duration'])
        H_A, _ = endpoint_hamiltonians(H_SC, protocol)
        rho0 = thermal_state(H_A, params['beta'])
        N = params['collisions']

        summary = {}
        status = EXIT_OK
        if params['mode'] == 'expectation':
            record = measure_work(rho0, H_SC, protocol, N,
                                  record_states=True)
            reference = internal_energy_work(H_SC, protocol, record.states)
            times, increments = record.times, record.increments
            summary.update(
                total=record.total,
                internal_energy_work=reference,
                energy_change=energy_change(
                    H_SC, protocol, rho0, record.final_state),
                deviation=abs(record.total - reference),
            )
            if summary['deviation'] > 1e-3:
                status = EXIT_THRESHOLD
        else:
            rng = np.random.default_rng(self.seed)
            if params['shots'] == 1:
                record = measure_work(rho0, H_SC, protocol, N,
                                      mode='sampled', rng=rng)
                times, increments = record.times, record.increments
            else:
                sampled = sample_work(rho0, H_SC, protocol,
                                      params['shots'], rng, N)
                times, increments = sampled.times, sampled.mean_increments
                summary.update(mean=sampled.mean, stderr=sampled.stderr)

        rows = zip(times, increments, np.cumsum(increments))
        with ResultFile(self.outpath, self.manifest(params, summary)) as res:
            res.commit(('t', 'dW', 'cumulative_W'), rows)
        if status:
            log.error("measured work deviates from the internal energy "
                      "change by {:.3e}".format(summary['deviation']))
        return status


@WorkMeter.subcommand('oscillator-check')
class OscillatorCheck(Command):
    """Compare truncated Fock space and closed form oscillator work.
    """
    COMMAND = 'oscillator-check'
    DEFAULT_OUT = 'oscillator-check.csv'

    protocol = cli.SwitchAttr('--protocol', int,
                              default=None)
    duration = cli.SwitchAttr('--duration', float, default=None)
    collisions = cli.SwitchAttr('--collisions', int, default=None)
    truncation = cli.SwitchAttr('--truncation', int, default=None)
    omega = cli.SwitchAttr('--omega', float, default=None)
    g = cli.SwitchAttr('--g', float, default=None)

    @exit_codes
    def main(self):
        params = self.resolve(
            OrderedDict([
                ('protocol', 1), ('duration', 5.), ('collisions', 40000),
                ('truncation', 40), ('omega', 1.), ('g', 1.),
            ]),
            dict(protocol=self.protocol, duration=self.duration,
                 collisions=self.collisions, truncation=self.truncation,
                 omega=self.omega, g=self.g))
        check_choice('protocol', params['protocol'], (1, 2, 3, 4))
        protocol = oscillator_protocol(int(params['protocol']),
                                       params['duration'])
        analytic = oscillator_work_analytic(
            protocol, params['omega'], params['g'])

        rows = []
        for n0 in range(4):
            numeric = oscillator_numeric(
                protocol, params['collisions'], params['truncation'], n0,
                params['omega'], params['g'])
            rows.append((n0, numeric, analytic, abs(numeric - analytic)))

        numerics = [row[1] for row in rows]
        summary = {
            'max_abs_diff': max(row[-1] for row in rows),
            'n_spread': max(numerics) - min(numerics),
        }
        with ResultFile(self.outpath, self.manifest(params, summary)) as res:
            res.commit(('n0', 'work_numeric', 'work_analytic', 'abs_diff'),
                       rows)
        if summary['max_abs_diff'] > 1e-4 or summary['n_spread'] > 1e-4:
            log.error("numeric and closed form work disagree: {}".format(
                summary))
            return EXIT_THRESHOLD
        return EXIT_OK


def main():
    WorkMeter.run()
