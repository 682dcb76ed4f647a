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
Direct integration of -psi'' + v psi = k^2 psi in position space.
"""

import logging

import numpy as np
from scipy.integrate import solve_ivp

from pyftm.ftm.core import OracleError
from pyftm.ftm.potential import Profile
from pyftm.oracle.matching import Oracle1DResult, rt_from_transfer_1d

LOGGER = logging.getLogger(__name__)

WRONSKIAN_TOLERANCE = 1e-9


def _longitudinal(v):
    """
    (u, support, breakpoints) of a d=0 potential or a profile
    """
    if isinstance(v, Profile):
        return (lambda x: complex(v(x))), v.support, v.breakpoints
    if v.d != 0:
        raise OracleError("Position space 1D oracle needs a d=0 potential, found d=%d" % v.d)
    zero = np.zeros(0)
    return (lambda x: complex(v.transverse_fourier(x, zero))), v.support_bounds(), v.breakpoints


def _inside(a, b):
    return a + 1e-12 * (b - a)


def integrate_schrodinger_1d(v, k, x_span=None, rtol=1e-11, atol=1e-13):
    """
    Integrate the two solutions that are pure exp(+ikx) and pure exp(-ikx) beyond the right
    edge back to the left edge, then read off the transfer matrix from their left asymptotic
    coefficients A = (psi' + ik psi) exp(-ikx) / 2ik, B = (ik psi - psi') exp(ikx) / 2ik.
    """
    u, support, breakpoints = _longitudinal(v)
    k = float(k)
    if x_span is None:
        if support.empty:
            return Oracle1DResult(np.eye(2, dtype=complex), 0j, 0j, 1 + 0j, 1 + 0j)
        x_span = (support.lower, support.upper)
    (lower, upper) = (float(x_span[0]), float(x_span[1]))
    edges = sorted({lower, upper} | {b for b in breakpoints if lower < b < upper})

    def rhs(x, y, x_potential):
        # y = (psi1, psi1', psi2, psi2'); potential sampled inside the current slice
        factor = u(x_potential(x)) - k * k
        return [y[1], factor * y[0], y[3], factor * y[2]]

    y = np.array([np.exp(1j * k * upper), 1j * k * np.exp(1j * k * upper),
                  np.exp(-1j * k * upper), -1j * k * np.exp(-1j * k * upper)])
    w0 = -2j * k
    drift = 0.0
    for (a, b) in reversed(list(zip(edges, edges[1:]))):
        def x_potential(x, a=a, b=b):
            return min(max(x, _inside(a, b)), _inside(b, a))

        solution = solve_ivp(rhs, (b, a), y, method='DOP853', rtol=rtol, atol=atol, args=(x_potential,))
        if not solution.success:
            raise OracleError("Schrodinger integration failed on [%r, %r]: %s" % (a, b, solution.message))
        states = solution.y
        wronskian = states[0] * states[3] - states[1] * states[2]
        drift = max(drift, float(np.max(np.abs(wronskian - w0)) / abs(w0)))
        y = states[:, -1]

    phase = np.exp(-1j * k * lower)
    coefficients = np.empty((2, 2), dtype=complex)
    for (column, (psi, derivative)) in enumerate(((y[0], y[1]), (y[2], y[3]))):
        coefficients[0, column] = (derivative + 1j * k * psi) / (2j * k) * phase
        coefficients[1, column] = (1j * k * psi - derivative) / (2j * k) / phase
    # right asymptotics are the unit columns, so M maps left coefficients to them
    m = np.linalg.inv(coefficients)
    (r_l, r_r, t_l, t_r) = rt_from_transfer_1d(m)
    flagged = drift > WRONSKIAN_TOLERANCE
    if flagged:
        LOGGER.warning("Wronskian drift %.3g above %.1g for k=%r", drift, WRONSKIAN_TOLERANCE, k)
    return Oracle1DResult(m, r_l, r_r, t_l, t_r, wronskian_drift=drift, flagged=flagged)
