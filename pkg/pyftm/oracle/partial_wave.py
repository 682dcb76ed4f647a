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
Cylindrical partial waves for a radially symmetric 2D potential.

Outside the support the channel m solution is J_m(kr) + a_m H_m(kr); with
the outgoing asymptotics exp(ikr)/sqrt(r) f(theta) the amplitude is

    f(theta) = sqrt(2 / (pi k)) exp(-i pi/4) [a_0 + 2 sum_{m>0} a_m cos(m theta)]
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from pyftm.ftm.core import OracleError

LOGGER = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-8
START_FRACTION = 1e-3
# matches the outgoing cylindrical wave sum to the exp(ikr)/r^(d/2) asymptotics
NORMALIZATION = 1.0


@dataclasses.dataclass
class PartialWaveResult:
    k: float
    radius: float
    coefficients: np.ndarray
    tail_bound: float
    flagged: bool = False

    @property
    def m_max(self):
        return len(self.coefficients) - 1

    def amplitude(self, theta):
        """
        f(theta), theta measured from the incident direction
        """
        theta = np.asarray(theta, dtype=float)
        orders = np.arange(1, len(self.coefficients))
        series = self.coefficients[0] + 2.0 * np.sum(
            self.coefficients[1:, None] * np.cos(orders[:, None] * theta.reshape(-1)[None, :]), axis=0)
        f = NORMALIZATION * math.sqrt(2.0 / (math.pi * self.k)) * np.exp(-0.25j * math.pi) * series
        return f.reshape(theta.shape)[()] if theta.ndim == 0 else f.reshape(theta.shape)


def _log_derivative(v_radial, k, m, radius, rtol, atol):
    """
    R'/R at the support radius of the regular channel m solution
    """
    start = START_FRACTION * radius
    order = abs(m)
    local = k * k - complex(v_radial(start))
    # regular series r^m (1 - local r^2 / (4 (m + 1))), scaled by start^-m
    psi = 1.0 - local * start ** 2 / (4.0 * (order + 1))
    derivative = order / start - local * (order + 2) * start / (4.0 * (order + 1))

    def rhs(r, y):
        return [y[1], -y[1] / r + (order * order / (r * r) - k * k + complex(v_radial(r))) * y[0]]

    solution = solve_ivp(rhs, (start, radius), [complex(psi), complex(derivative)], method='DOP853',
                         rtol=rtol, atol=atol)
    if not solution.success:
        raise OracleError("Radial integration failed for m=%d: %s" % (m, solution.message))
    (value, slope) = solution.y[:, -1]
    return slope / value


def partial_wave_2d(v_radial, radius, k, m_max=12, rtol=1e-11, atol=1e-14):
    """
    :param v_radial: r -> v(r), zero beyond radius
    """
    if not radius > 0:
        raise OracleError("Support radius must be positive, found %r" % (radius,))
    kr = k * radius
    coefficients = np.zeros(m_max + 1, dtype=complex)
    for m in range(m_max + 1):
        log_derivative = _log_derivative(v_radial, k, m, radius, rtol, atol)
        j = special.jv(m, kr)
        jp = special.jvp(m, kr)
        h = special.hankel1(m, kr)
        hp = special.h1vp(m, kr)
        coefficients[m] = -(k * jp - log_derivative * j) / (k * hp - log_derivative * h)
    tail = float(np.max(np.abs(coefficients[-2:])))
    flagged = tail > TAIL_TOLERANCE
    if flagged:
        LOGGER.warning("Partial wave tail %.3g above %.1g: raise m_max beyond %d", tail, TAIL_TOLERANCE, m_max)
    return PartialWaveResult(float(k), float(radius), coefficients, tail, flagged)


def circular_well_amplitude(well, k, m_max=12):
    """
    Partial wave result of a CircularWell potential on the 2D problem
    """
    if well.d != 1:
        raise OracleError("Partial waves are implemented for the 2D problem (d=1), found d=%d" % well.d)
    return partial_wave_2d(well.radial_value, well.radius, k, m_max)
