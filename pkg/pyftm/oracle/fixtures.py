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
Oracle fixture files: JSON documents holding the generation parameters,
tolerances and outputs of an oracle run. Complex numbers are stored as
{"re": ..., "im": ...}.
"""

import json
import logging
import math
import os

import numpy as np

from pyftm.ftm.core import OracleError
from pyftm.ftm.potential import CircularWell, PiecewiseConstant
from pyftm.oracle.matching import match_piecewise_1d, gain_slab_singularity
from pyftm.oracle.partial_wave import circular_well_amplitude
from pyftm.oracle.schrodinger import integrate_schrodinger_1d
from pyftm.utils import filesystem
from pyftm.utils.version import runtime_versions

LOGGER = logging.getLogger(__name__)

BARRIER = {'height': 1.0, 'length': 2.0, 'k': 2.0}
CIRCULAR_WELL = {'depth': 0.5, 'radius': 1.0, 'k': 1.0, 'm_max': 12, 'n_angles': 13}
GAIN_SLAB = {'length': 10.0, 'k_guess': 2.0, 'gain_guess': 1.1}


def encode(value):
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(value.real), 'im': float(value.imag)}
    if isinstance(value, np.ndarray):
        return [encode(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(key): encode(v) for (key, v) in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def decode(value):
    if isinstance(value, dict):
        if set(value) == {'re', 'im'}:
            return complex(value['re'], value['im'])
        return {key: decode(v) for (key, v) in value.items()}
    if isinstance(value, list):
        return [decode(v) for v in value]
    return value


def write_fixture(path, name, parameters, tolerances, outputs):
    """
    :return: sha256 of the written document
    """
    document = {'name': name, 'parameters': parameters, 'tolerances': tolerances,
                'outputs': encode(outputs), 'versions': runtime_versions()}
    digest = filesystem.write_text(path, json.dumps(document, indent=2, sort_keys=True) + '\n')
    LOGGER.info("Wrote fixture %s to %s", name, path)
    return digest


def load_fixture(path):
    content = filesystem.read_text(path)
    if content is None:
        raise OracleError("Couldn't read fixture %s" % path)
    try:
        document = json.loads(content)
        document['outputs'] = decode(document['outputs'])
    except (ValueError, KeyError) as e:
        raise OracleError("Malformed fixture %s: %s" % (path, e))
    return document


def _amplitudes(result):
    return {'M': result.M_exact, 'R^l': result.R_l, 'R^r': result.R_r, 'T^l': result.T_l, 'T^r': result.T_r}


def barrier_fixture():
    profile = PiecewiseConstant([((0.0, BARRIER['length']), BARRIER['height'])])
    matched = match_piecewise_1d(profile, BARRIER['k'])
    integrated = integrate_schrodinger_1d(profile, BARRIER['k'])
    return ('barrier_1d', BARRIER, {'rt': 1e-9, 'det': 1e-14, 'regression': 1e-9},
            {'matching': _amplitudes(matched), 'ode': _amplitudes(integrated)})


def circular_well_fixture():
    well = CircularWell(CIRCULAR_WELL['depth'], CIRCULAR_WELL['radius'], d=1)
    result = circular_well_amplitude(well, CIRCULAR_WELL['k'], CIRCULAR_WELL['m_max'])
    if result.flagged:
        raise OracleError("Circular well fixture tail %.3g is not converged" % result.tail_bound)
    thetas = np.linspace(0.0, math.pi, CIRCULAR_WELL['n_angles'])
    return ('circular_well_2d', CIRCULAR_WELL, {'tail': 1e-8, 'regression': 1e-8},
            {'theta': thetas, 'f': result.amplitude(thetas), 'coefficients': result.coefficients,
             'tail_bound': result.tail_bound})


def gain_slab_fixture():
    k, gain = gain_slab_singularity(GAIN_SLAB['length'], GAIN_SLAB['k_guess'], GAIN_SLAB['gain_guess'])
    return ('gain_slab_1d', GAIN_SLAB, {'k': 1e-3, 'regression': 1e-8}, {'k': k, 'gain': gain})


FIXTURES = (barrier_fixture, circular_well_fixture, gain_slab_fixture)


def generate_fixtures(directory):
    """
    Regenerate every oracle fixture into directory
    :return: {file name: sha256}
    """
    digests = {}
    for factory in FIXTURES:
        (name, parameters, tolerances, outputs) = factory()
        file_name = name + '.json'
        digests[file_name] = write_fixture(os.path.join(directory, file_name), name, parameters,
                                           tolerances, outputs)
    return digests


def deviation(reference, value):
    """
    Largest absolute difference between two decoded output trees
    :raise OracleError: if the trees differ in structure
    """
    if isinstance(reference, dict):
        if not isinstance(value, dict) or set(reference) != set(value):
            raise OracleError("Output keys differ: %r != %r" % (sorted(reference), sorted(value)))
        return max((deviation(reference[key], value[key]) for key in reference), default=0.0)
    if isinstance(reference, list):
        if not isinstance(value, list) or len(reference) != len(value):
            raise OracleError("Output lengths differ for %r" % (reference,))
        return max((deviation(r, v) for (r, v) in zip(reference, value)), default=0.0)
    if isinstance(reference, (bool, str)) or reference is None:
        if reference != value:
            raise OracleError("Output %r differs from %r" % (value, reference))
        return 0.0
    return float(abs(complex(reference) - complex(value)))


def verify_fixtures(directory):
    """
    Regenerate every oracle fixture and compare it with the file stored in directory
    :return: {file name: (deviation, passed)} with the stored 'regression' tolerance
    """
    results = {}
    for factory in FIXTURES:
        (name, _, _, outputs) = factory()
        file_name = name + '.json'
        stored = load_fixture(os.path.join(directory, file_name))
        drift = deviation(stored['outputs'], decode(encode(outputs)))
        passed = drift <= stored['tolerances']['regression']
        if not passed:
            LOGGER.warning("Fixture %s drifted by %.3g (tolerance %.1g)", file_name, drift,
                           stored['tolerances']['regression'])
        results[file_name] = (drift, passed)
    return results
