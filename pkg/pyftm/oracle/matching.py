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
One dimensional plane-wave matching for piecewise constant potentials.

In every region psi = a exp(i kappa x) + b exp(-i kappa x) with
kappa = sqrt(k^2 - v), Im kappa >= 0; the coefficients are carried across
each interface by continuity of psi and psi'.
"""

import dataclasses
import logging

import numpy as np
from scipy import optimize

from pyftm.ftm.core import OracleError
from pyftm.ftm.potential import PiecewiseConstant

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass
class Oracle1DResult:
    M_exact: np.ndarray
    R_l: complex
    R_r: complex
    T_l: complex
    T_r: complex
    wronskian_drift: float = 0.0
    flagged: bool = False

    def to_dict(self):
        return {'M': self.M_exact,
                'R^l': self.R_l, 'R^r': self.R_r, 'T^l': self.T_l, 'T^r': self.T_r,
                'wronskian_drift': self.wronskian_drift, 'flagged': self.flagged}


def rt_from_transfer_1d(m):
    """
    R^l = -M21/M22, R^r = M12/M22, T^l = det(M)/M22, T^r = 1/M22
    """
    m = np.asarray(m, dtype=complex)
    if m[1, 1] == 0:
        raise OracleError("M22 vanishes: spectral singularity")
    return (complex(-m[1, 0] / m[1, 1]), complex(m[0, 1] / m[1, 1]),
            complex(np.linalg.det(m) / m[1, 1]), complex(1.0 / m[1, 1]))


def local_wavenumber(k, v):
    kappa = np.sqrt(complex(k) ** 2 - complex(v))
    if kappa == 0:
        raise OracleError("kappa = 0 in a region with v=%r at k=%r; perturb k" % (v, k))
    return -kappa if kappa.imag < 0 else kappa


def _basis(kappa, x):
    """
    (psi, psi') of the (exp(i kappa x), exp(-i kappa x)) pair
    """
    forward = np.exp(1j * kappa * x)
    backward = np.exp(-1j * kappa * x)
    return np.array([[forward, backward], [1j * kappa * forward, -1j * kappa * backward]])


def _regions(profile):
    edges = profile.breakpoints
    values = [complex(profile(0.5 * (a + b))) for (a, b) in zip(edges, edges[1:])]
    return edges, [0j] + values + [0j]


def match_piecewise_1d(segments, k):
    """
    Exact transfer matrix of a piecewise constant potential
    :param segments: PiecewiseConstant, or ((a, b), v) pairs
    """
    profile = segments if isinstance(segments, PiecewiseConstant) else PiecewiseConstant(segments)
    edges, values = _regions(profile)
    kappas = [local_wavenumber(k, v) for v in values]
    m = np.eye(2, dtype=complex)
    for (n, x) in enumerate(edges):
        crossing = np.linalg.solve(_basis(kappas[n + 1], x), _basis(kappas[n], x))
        m = crossing @ m
    (r_l, r_r, t_l, t_r) = rt_from_transfer_1d(m)
    LOGGER.debug("match_piecewise_1d k=%r interfaces=%d det-1=%.3g", k, len(edges), abs(np.linalg.det(m) - 1))
    return Oracle1DResult(m, r_l, r_r, t_l, t_r)


def slab_m22(length, k, gain):
    """
    M22 of the slab v = i gain on [0, length]; gain > 0 amplifies stationary waves
    """
    m = match_piecewise_1d([((0.0, length), 1j * gain)], k).M_exact
    return complex(m[1, 1])


def gain_slab_singularity(length, k_guess, gain_guess, tol=1e-12):
    """
    (k, gain) with M22 = 0 for a gain slab, a spectral singularity
    :raise OracleError: if the root search fails
    """
    def residual(z):
        m22 = slab_m22(length, z[0], z[1])
        return [m22.real, m22.imag]

    solution = optimize.root(residual, [k_guess, gain_guess], tol=tol)
    if not solution.success:
        raise OracleError("Gain slab root search failed from (k=%r, gain=%r): %s"
                          % (k_guess, gain_guess, solution.message))
    (k, gain) = (float(solution.x[0]), float(solution.x[1]))
    LOGGER.info("Gain slab of length %r: spectral singularity at k=%.12g gain=%.12g", length, k, gain)
    return k, gain
