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
First Born approximation

    f_B(n0, n) = -i / (2 c_d) v^(k (n - n0)),    c_d = (2 pi i)^(d/2) k^(1 - d/2)

with v^(q) = int dx d^d r exp(-i q.(x, r)) v(x, r).
"""

import logging

import numpy as np

from pyftm.ftm.core import OracleError, PotentialError
from pyftm.ftm.scattering import c_d

LOGGER = logging.getLogger(__name__)

DEFAULT_NODES = 64


def fourier_transform(v, q, nodes=DEFAULT_NODES):
    """
    Full Fourier transform at q = (q_x, q_perp): Gauss-Legendre quadrature of
    exp(-i q_x x) ~v(x, q_perp) over every smooth piece of the support
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    if v.kind in ('x_only', 'zero') and v.d > 0:
        raise OracleError("x_only potentials have a delta transverse transform; use d=0")
    support = v.support_bounds()
    if support.empty:
        return 0j
    (qx, transverse) = (q[0], q[1:])
    edges = sorted({support.lower, support.upper}
                   | {b for b in v.breakpoints if support.lower < b < support.upper})
    (points, weights) = np.polynomial.legendre.leggauss(nodes)
    total = 0j
    for (a, b) in zip(edges, edges[1:]):
        xs = 0.5 * (b - a) * points + 0.5 * (a + b)
        values = np.array([complex(v.transverse_fourier(x, transverse)) for x in xs])
        total += 0.5 * (b - a) * np.sum(weights * np.exp(-1j * qx * xs) * values)
    return complex(total)


def born_amplitude(v, k, n0, n, nodes=DEFAULT_NODES):
    """
    :param n0: incident Direction
    :param n: scattering Direction
    """
    q = k * (n.vector - n0.vector)
    try:
        transform = complex(v.fourier_transform(q[0], q[1:].reshape(1, -1)))
    except (AttributeError, PotentialError, ValueError) as e:
        LOGGER.debug("Closed form transform unavailable for %r (%s), using quadrature", v, e)
        transform = fourier_transform(v, q, nodes)
    return complex(-0.5j / c_d(v.d, k) * transform)
