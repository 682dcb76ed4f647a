# Copyright (C) 2026  The pyftm developers
#
# This file is part of pyftm.
#
# pyftm is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# pyftm is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with pyftm.  If not, see <http://www.gnu.org/licenses/>.

"""
Batch front-end.

    pyftm CONFIG [--set section.key=value ...] [--k K] [--d D] [--rtol R] [--task T] [--out DIR]

CONFIG is a JSON or TOML run configuration (see docs/config.md). Every run
writes its outputs and a run_manifest.json into the output directory.
Exit codes: 0 success, 2 invalid configuration or potential, 3 numerical
failure, 4 failed identity checks.
"""

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import time
import tomllib

import numpy as np

from pyftm.ftm.core import (ScatteringError, ConfigError, PotentialError, IntegrationError, SingularityError,
                            SymmetryError, OracleError, ScatteringConfig, build_grid)
from pyftm.ftm.evolution import StepperConfig, integrate_transfer
from pyftm.ftm.potential import potential_from_config, PiecewiseConstant, CircularWell
from pyftm.ftm.scattering import (AmplitudeSolver, Direction, snap_direction, on_grid_directions,
                                  scattering_data, spectral_singularity_scan, wavenumber_scan)
from pyftm.ftm.symmetry import verify_identities
from pyftm.oracle.born import born_amplitude
from pyftm.oracle.fixtures import encode, generate_fixtures
from pyftm.oracle.matching import match_piecewise_1d
from pyftm.oracle.partial_wave import circular_well_amplitude
from pyftm.oracle.schrodinger import integrate_schrodinger_1d
from pyftm.utils import filesystem
from pyftm.utils.tasks import default_workers
from pyftm.utils.version import runtime_versions

LOGGER = logging.getLogger(__name__)

TASKS = ('transfer', 'amplitudes', 'angle_scan', 'k_scan', 'singularity_scan', 'verify_identities',
         'oracle_compare')
ORACLES = ('matching', 'schrodinger', 'partial_wave', 'born')
MANIFEST = 'run_manifest.json'

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IDENTITY = 4


def exit_code(error):
    if isinstance(error, (ConfigError, PotentialError)):
        return EXIT_CONFIG
    if isinstance(error, SymmetryError):
        return EXIT_IDENTITY
    return EXIT_NUMERICAL


def fmt(value):
    return format(float(value), '.17g')


@dataclasses.dataclass
class RunConfig:
    """
    Task, potential and numerical settings of one run
    """
    task: str
    potential: dict
    scattering: ScatteringConfig
    stepper: StepperConfig
    scan: dict = dataclasses.field(default_factory=dict)
    out: str = 'results'
    seed: int = 0
    oracle: str | None = None
    full_grid: bool = False
    base_dir: str | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError("Unknown task '%s', expected one of %s" % (self.task, ', '.join(TASKS)))
        if self.oracle is not None and self.oracle not in ORACLES:
            raise ConfigError("Unknown oracle '%s', expected one of %s" % (self.oracle, ', '.join(ORACLES)))
        if self.task == 'singularity_scan' and not {'k_min', 'k_max'} <= set(self.scan):
            raise ConfigError("singularity_scan needs scan.k_min and scan.k_max")
        if self.task == 'k_scan' and 'k_values' not in self.scan and not {'k_min', 'k_max'} <= set(self.scan):
            raise ConfigError("k_scan needs scan.k_values or scan.k_min and scan.k_max")

    @classmethod
    def from_dict(cls, document, base_dir=None):
        """
        Build a RunConfig from a parsed configuration document.
        x_only potentials run on the one dimensional problem unless scan.keep_dimension is set.
        """
        document = dict(document)
        try:
            potential = dict(document.get('potential', {'kind': 'zero'}))
            scattering = dict(document.get('scattering', {}))
            scan = dict(document.get('scan', {}))
            if potential.get('kind') == 'x_only' and not scan.get('keep_dimension', False):
                scattering['d'] = 0
            if 'k' not in scattering:
                raise ConfigError("scattering.k is required")
            return cls(task=document.get('task', 'transfer'),
                       potential=potential,
                       scattering=ScatteringConfig(**scattering),
                       stepper=StepperConfig(**dict(document.get('stepper', {}))),
                       scan=scan,
                       out=document.get('out', 'results'),
                       seed=int(document.get('seed', 0)),
                       oracle=document.get('oracle'),
                       full_grid=bool(document.get('full_grid', False)),
                       base_dir=base_dir)
        except TypeError as e:
            raise ConfigError("Invalid configuration: %s" % e)

    def as_dict(self):
        return {'task': self.task, 'potential': self.potential,
                'scattering': dataclasses.asdict(self.scattering), 'stepper': dataclasses.asdict(self.stepper),
                'scan': self.scan, 'out': self.out, 'seed': self.seed, 'oracle': self.oracle,
                'full_grid': self.full_grid}


def parse_document(path):
    """
    Parse a JSON or TOML configuration file
    """
    content = filesystem.read_text(path)
    if content is None:
        raise ConfigError("Couldn't read configuration %s" % path)
    try:
        if path.lower().endswith('.toml'):
            return tomllib.loads(content)
        return json.loads(content)
    except (tomllib.TOMLDecodeError, ValueError) as e:
        raise ConfigError("Couldn't parse configuration %s: %s" % (path, e))


def _parse_value(text):
    try:
        return json.loads(text)
    except ValueError:
        return text


def apply_overrides(document, overrides):
    """
    Apply dotted key=value overrides; values are parsed as JSON when possible
    """
    for override in overrides:
        if '=' not in override:
            raise ConfigError("Override '%s' is not of the form key=value" % override)
        (key, text) = override.split('=', 1)
        path = key.strip().split('.')
        node = document
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError("Override '%s' descends into a non table value" % override)
        node[path[-1]] = _parse_value(text)
    return document


def _direction(d, description):
    """
    Direction from a vector [n_x, n_perp...] (normalized) or {"theta": , "phi": } angles
    """
    if isinstance(description, dict):
        return Direction.from_angles(d, float(description.get('theta', 0.0)), float(description.get('phi', 0.0)))
    vector = np.asarray(description, dtype=float)
    if vector.shape != (d + 1,):
        raise ConfigError("Direction %r must have %d components" % (description, d + 1))
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ConfigError("Zero direction vector")
    return Direction(vector / norm)


def _incident(config):
    d = config.scattering.d
    descriptions = config.scan.get('incident', [[1.0] + [0.0] * d])
    return [_direction(d, s) for s in descriptions]


def _on_grid(grid, direction, k):
    (position, distance) = snap_direction(grid, direction, k)
    return Direction.from_grid_point(grid, grid.propagating[position], direction.sign, k), distance


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(value) if isinstance(value, (float, np.floating)) else value for value in row])
    return buffer.getvalue()


def angle_scan_header(d):
    transverse = ['y', 'z'][:d]
    return (['k', 'n0x'] + ['n0' + a for a in transverse] + ['nx'] + ['n' + a for a in transverse]
            + ['Re_f', 'Im_f', 'abs2_f', 'snap_distance'])


def angle_scan_row(k, n0, n, f, snap):
    return ([float(k)] + [float(c) for c in n0.vector] + [float(c) for c in n.vector]
            + [float(f.real), float(f.imag), float(abs(f) ** 2), float(snap)])


def emit_angle_scan(result, path):
    """
    Write angle scan rows (k, n0, n, f, snap distance) as CSV
    :param result: {'d': d, 'rows': [(k, n0, n, f, snap), ...]}
    :return: sha256 of the written file
    """
    rows = [angle_scan_row(*row) for row in result['rows']]
    return filesystem.write_text(path, csv_text(angle_scan_header(result['d']), rows))


def _with_reciprocal(pairs):
    seen = {(n0.key(), n.key()) for (n0, n) in pairs}
    paired = list(pairs)
    for (n0, n) in pairs:
        reciprocal = (-n, -n0)
        key = (reciprocal[0].key(), reciprocal[1].key())
        if key not in seen:
            seen.add(key)
            paired.append(reciprocal)
    return paired


class Run:
    """
    One execution of a RunConfig; outputs are collected and written once at the end
    """
    def __init__(self, config):
        self.config = config
        self.outputs = {}
        self.timings = {}
        self.inputs = {}
        self.report = {}
        self._potential = None

    @property
    def potential(self):
        if self._potential is None:
            self._potential = potential_from_config(self.config.potential, self.config.scattering.d,
                                                    self.config.base_dir)
            if not self._potential.admissible:
                LOGGER.warning("Potential %r does not look short-range admissible", self._potential)
            path = self.config.potential.get('path')
            if path is not None:
                if self.config.base_dir is not None and not os.path.isabs(path):
                    path = os.path.join(self.config.base_dir, path)
                self.inputs[path] = filesystem.sha256_file(path)
        return self._potential

    def _timed(self, name, func, *args, **kwargs):
        started = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            self.timings[name] = time.perf_counter() - started

    def transfer(self):
        grid = build_grid(self.config.scattering)
        return self._timed('integrate', integrate_transfer, self.potential, grid, self.config.scattering.k,
                           self.config.stepper)

    def task_transfer(self):
        _, m = self.transfer()
        document = {'k': m.k, 'd': m.grid.d, 'points': m.grid.points[m.indices],
                    'weights': m.grid.weights[m.indices],
                    'M11': m.m11, 'M12': m.m12, 'M21': m.m21, 'M22': m.m22,
                    'report': {key: value for (key, value) in m.report.items() if key != 'seconds'}}
        self.outputs['transfer.json'] = json.dumps(encode(document), indent=1, sort_keys=True) + '\n'

    def _pairs(self, grid, k):
        pairs = []
        d = self.config.scattering.d
        outgoing = self.config.scan.get('outgoing')
        for n0 in _incident(self.config):
            (snapped, _) = _on_grid(grid, n0, k)
            targets = on_grid_directions(grid, k) if outgoing is None else [_direction(d, s) for s in outgoing]
            pairs.extend((snapped, n) for n in targets)
        if self.config.scan.get('paired', False):
            pairs = _with_reciprocal(pairs)
        return pairs

    def _amplitude_rows(self, m, pairs):
        solver = AmplitudeSolver(m)
        rows = []
        for (n0, n) in pairs:
            (f, snap0, snap1) = solver.amplitude(n0, n)
            rows.append((m.k, n0, n, f, max(snap0, snap1)))
        return rows

    def task_amplitudes(self):
        _, m = self.transfer()
        pairs = self._pairs(m.grid, m.k)
        rows = self._timed('amplitudes', self._amplitude_rows, m, pairs)
        self.outputs['amplitudes.csv'] = csv_text(angle_scan_header(m.grid.d),
                                                  [angle_scan_row(*row) for row in rows])
        solver = AmplitudeSolver(m)
        rt = [{'n0': n0.vector, 'n': n.vector, 'amplitudes': solver.rt(n0, n)} for (n0, n) in pairs]
        self.outputs['rt_amplitudes.json'] = json.dumps(encode(rt), indent=1, sort_keys=True) + '\n'

    def task_angle_scan(self):
        _, m = self.transfer()
        rows = self._timed('amplitudes', self._amplitude_rows, m, self._pairs(m.grid, m.k))
        self.outputs['angle_scan.csv'] = csv_text(angle_scan_header(m.grid.d),
                                                  [angle_scan_row(*row) for row in rows])

    def _k_values(self):
        if 'k_values' in self.config.scan:
            return sorted(float(k) for k in self.config.scan['k_values'])
        return np.linspace(float(self.config.scan['k_min']), float(self.config.scan['k_max']),
                           int(self.config.scan.get('n_samples', 16))).tolist()

    def task_k_scan(self):
        ks = self._k_values()
        matrices = self._timed('integrate', wavenumber_scan, self.potential, self.config.scattering, ks,
                               self.config.stepper, default_workers())
        rows = []
        for m in matrices:
            rows.extend(self._amplitude_rows(m, self._pairs(m.grid, m.k)))
        self.outputs['k_scan.csv'] = csv_text(angle_scan_header(self.config.scattering.d),
                                              [angle_scan_row(*row) for row in rows])

    def task_singularity_scan(self):
        scan = self._timed('scan', spectral_singularity_scan, self.potential, self.config.scattering,
                           (self.config.scan['k_min'], self.config.scan['k_max']),
                           int(self.config.scan.get('n_samples', 64)), self.config.stepper,
                           max_workers=default_workers())
        self.outputs['singularity_scan.csv'] = csv_text(['k', 'sigma_min', 'condition'], scan.rows())
        self.outputs['singularity_candidates.json'] = json.dumps(
            encode({'candidates': scan.candidates, 'threshold': scan.threshold, 'skipped_k': scan.skipped}),
            indent=1, sort_keys=True) + '\n'

    def task_verify_identities(self):
        u, m = self.transfer()
        d = m.grid.d
        pairs = _with_reciprocal(self._pairs(m.grid, m.k))
        count = int(self.config.scan.get('n_pairs', 0))
        if count:
            rng = np.random.default_rng(self.config.seed)
            chosen = rng.choice(len(pairs), size=min(count, len(pairs)), replace=False)
            pairs = _with_reciprocal([pairs[i] for i in sorted(chosen)])
        scatter = self._timed('scattering', scattering_data, m, pairs)
        records = self._timed('identities', verify_identities, m, scatter, u, self.config.full_grid,
                              self.potential)
        self.outputs['identities.json'] = json.dumps([r.to_dict() for r in records], indent=1) + '\n'
        failed = [r.identity_name for r in records if not r.passed]
        self.report['identities_failed'] = failed
        LOGGER.info("Verified %d identities on d=%d, %d failed", len(records), d, len(failed))
        if failed:
            raise SymmetryError("Identity checks failed: %s" % ', '.join(failed))

    def _oracle(self):
        if self.config.oracle is not None:
            return self.config.oracle
        v = self.potential
        if v.d == 0:
            profile = getattr(v, 'profile', None)
            return 'matching' if isinstance(profile, PiecewiseConstant) else 'schrodinger'
        if isinstance(v, CircularWell) and v.d == 1:
            return 'partial_wave'
        return 'born'

    def task_oracle_compare(self):
        oracle = self._oracle()
        _, m = self.transfer()
        rows = []
        if oracle in ('matching', 'schrodinger'):
            if m.grid.d != 0:
                raise ConfigError("The %s oracle compares one dimensional (d=0) runs" % oracle)
            v = self.potential
            if oracle == 'matching':
                profile = getattr(v, 'profile', None)
                if not isinstance(profile, PiecewiseConstant):
                    raise ConfigError("The matching oracle needs a piecewise constant profile")
                reference = self._timed('oracle', match_piecewise_1d, profile, m.k)
            else:
                reference = self._timed('oracle', integrate_schrodinger_1d, v, m.k)
            matrix = m.matrix()
            for (name, (i, j)) in (('M11', (0, 0)), ('M12', (0, 1)), ('M21', (1, 0)), ('M22', (1, 1))):
                rows.append((name, matrix[i, j], reference.M_exact[i, j]))
        else:
            solver = AmplitudeSolver(m)
            pairs = self._pairs(m.grid, m.k)
            if oracle == 'partial_wave':
                if not isinstance(self.potential, CircularWell):
                    raise ConfigError("The partial_wave oracle needs a circular_well potential")
                result = circular_well_amplitude(self.potential, m.k, int(self.config.scan.get('m_max', 12)))
            for (n0, n) in pairs:
                (f, _, _) = solver.amplitude(n0, n)
                if oracle == 'partial_wave':
                    cosine = float(np.clip(np.dot(n0.vector, n.vector), -1.0, 1.0))
                    reference = complex(result.amplitude(math.acos(cosine)))
                else:
                    reference = born_amplitude(self.potential, m.k, n0, n)
                label = 'f(%s;%s)' % (' '.join(fmt(c) for c in n0.vector), ' '.join(fmt(c) for c in n.vector))
                rows.append((label, f, reference))
        table = [(name, float(a.real), float(a.imag), float(b.real), float(b.imag), float(abs(a - b)))
                 for (name, a, b) in rows]
        self.report['oracle'] = oracle
        self.report['max_abs_diff'] = max((row[-1] for row in table), default=0.0)
        self.outputs['oracle_compare.csv'] = csv_text(
            ['quantity', 'pipeline_re', 'pipeline_im', 'oracle_re', 'oracle_im', 'abs_diff'], table)

    def execute(self):
        LOGGER.info("BEGIN task %s", self.config.task)
        started = time.perf_counter()
        try:
            getattr(self, 'task_' + self.config.task)()
        finally:
            self.timings['total'] = time.perf_counter() - started
            LOGGER.info("END task %s (%.3fs)", self.config.task, self.timings['total'])

    def write(self, code, config_digest):
        """
        Write collected outputs and the run manifest
        :return: {file name: sha256} of the outputs
        """
        digests = {}
        for (name, content) in sorted(self.outputs.items()):
            digests[name] = filesystem.write_text(os.path.join(self.config.out, name), content)
        manifest = {'task': self.config.task, 'config': self.config.as_dict(), 'config_sha256': config_digest,
                    'inputs': self.inputs, 'outputs': digests, 'versions': runtime_versions(),
                    'seed': self.config.seed, 'timings': self.timings, 'report': self.report, 'exit_code': code}
        filesystem.write_text(os.path.join(self.config.out, MANIFEST),
                              json.dumps(encode(manifest), indent=1, sort_keys=True) + '\n')
        return digests


def build_parser():
    parser = argparse.ArgumentParser(prog='pyftm', description="Fundamental transfer matrix scattering runs")
    parser.add_argument('config', nargs='?', help="JSON or TOML run configuration")
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help="override a configuration key (dotted path, JSON value)")
    parser.add_argument('--k', type=float, help="wavenumber (scattering.k)")
    parser.add_argument('--d', type=int, help="transverse dimension (scattering.d)")
    parser.add_argument('--rtol', type=float, help="integrator tolerance (stepper.rtol)")
    parser.add_argument('--task', choices=TASKS)
    parser.add_argument('--out', help="output directory")
    parser.add_argument('--paired', action='store_true', default=None,
                        help="add the reciprocal of every amplitude pair (scan.paired)")
    parser.add_argument('--fixtures', metavar='DIR', help="regenerate oracle fixtures into DIR and exit")
    parser.add_argument('-v', '--verbose', action='store_true')
    parser.add_argument('-q', '--quiet', action='store_true')
    return parser


def load_config(args):
    """
    :return: (RunConfig, sha256 of the merged configuration)
    """
    if args.config is None:
        raise ConfigError("A configuration file is required")
    document = parse_document(args.config)
    overrides = list(args.overrides)
    for (flag, key) in (('k', 'scattering.k'), ('d', 'scattering.d'), ('rtol', 'stepper.rtol'),
                        ('task', 'task'), ('out', 'out'), ('paired', 'scan.paired')):
        value = getattr(args, flag)
        if value is not None:
            overrides.append('%s=%s' % (key, json.dumps(value)))
    document = apply_overrides(document, overrides)
    digest = filesystem.sha256_bytes(json.dumps(document, sort_keys=True).encode('utf-8'))
    return RunConfig.from_dict(document, os.path.dirname(os.path.abspath(args.config))), digest


def _report_error(error, code):
    payload = {'error': error.__class__.__name__, 'message': str(error), 'exit_code': code}
    sys.stderr.write(json.dumps(payload) + '\n')


def run(argv=None):
    """
    :return: process exit code
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    if args.fixtures is not None:
        try:
            digests = generate_fixtures(args.fixtures)
        except ScatteringError as e:
            code = exit_code(e)
            _report_error(e, code)
            return code
        LOGGER.info("Generated %d fixtures into %s", len(digests), args.fixtures)
        return EXIT_OK
    try:
        config, digest = load_config(args)
    except ScatteringError as e:
        code = exit_code(e)
        _report_error(e, code)
        return code

    execution = Run(config)
    code = EXIT_OK
    try:
        execution.execute()
    except (IntegrationError, SingularityError, OracleError) as e:
        code = EXIT_NUMERICAL
        _report_error(e, code)
    except ScatteringError as e:
        code = exit_code(e)
        _report_error(e, code)
    finally:
        execution.write(code, digest)
    return code


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
