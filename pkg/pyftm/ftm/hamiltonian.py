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
Effective non-Hermitian Hamiltonian

    H(x) = 1/2 E(-x) [V(x) varpi^-1 (x) K] E(x) - i varpi_i (x) sigma_3

with K = sigma_3 + i sigma_2 = [[1, 1], [-1, -1]] and E(x) = exp(i x varpi_r sigma_3).
"""

import logging
import math

import numpy as np

from pyftm.ftm.core import BlockOperator, PotentialError, varpi_values

LOGGER = logging.getLogger(__name__)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
K_MATRIX = SIGMA3 + 1j * SIGMA2
OMEGA = np.array([[0, 1], [-1, 0]], dtype=complex)


class EffectiveHamiltonian:
    """
    H(x) of a potential on a momentum grid at wavenumber k
    """
    def __init__(self, potential, grid, k=None):
        if potential.d != grid.d:
            raise PotentialError("Potential of dimension d=%d used on a d=%d grid" % (potential.d, grid.d))
        self.potential = potential
        self.grid = grid
        self.k = grid.k if k is None else float(k)
        self.varpi = varpi_values(grid, self.k)
        self.varpi_r = self.varpi.real.copy()
        self.varpi_i = self.varpi.imag.copy()
        self.inv_varpi = 1.0 / self.varpi
        self._convolution = potential.convolution_operator(grid)

    def convolution(self, x):
        return self._convolution(x)

    def phases(self, x):
        return np.exp(1j * x * self.varpi_r)

    def blocks(self, x, x_potential=None):
        """
        Blocks of H(x); x_potential overrides where the potential is sampled
        (one-sided limits at discontinuities)
        """
        e = self.phases(x)
        ec = e.conj()
        vw = self._convolution(x if x_potential is None else x_potential) * self.inv_varpi[None, :]
        blocks = np.empty((2, 2, self.grid.size, self.grid.size), dtype=complex)
        blocks[0, 0] = 0.5 * ec[:, None] * vw * e[None, :]
        blocks[0, 1] = 0.5 * ec[:, None] * vw * ec[None, :]
        blocks[1, 0] = -0.5 * e[:, None] * vw * e[None, :]
        blocks[1, 1] = -0.5 * e[:, None] * vw * ec[None, :]
        diagonal = np.arange(self.grid.size)
        blocks[0, 0, diagonal, diagonal] -= 1j * self.varpi_i
        blocks[1, 1, diagonal, diagonal] += 1j * self.varpi_i
        return blocks

    def at(self, x, x_potential=None):
        return BlockOperator(self.blocks(x, x_potential), self.grid)

    def matrix(self, x, x_potential=None):
        return self.at(x, x_potential).matrix()

    def __repr__(self):
        return "EffectiveHamiltonian(potential=%r,grid=%r,k=%r)" % (self.potential, self.grid, self.k)


def assemble_V(v, grid, x):
    return v.convolution_operator(grid)(x)


def assemble_H(v, grid, k, x):
    return EffectiveHamiltonian(v, grid, k).at(x)


def assemble_H_1d(v, k, x):
    """
    2x2 Hamiltonian (u(x)/2k) [[1, exp(-2ikx)], [-exp(2ikx), -1]] of a one dimensional potential
    """
    if v.d != 0:
        raise PotentialError("One dimensional Hamiltonian needs a d=0 potential, found d=%d" % v.d)
    u = complex(v.transverse_fourier(x, np.zeros(0)))
    phase = np.exp(2j * k * x)
    return (u / (2.0 * k)) * np.array([[1.0, 1.0 / phase], [-phase, -1.0]])


def reciprocity_metric(grid, k=None):
    """
    (A, A^-1) with A = Omega (x) (varpi^-1 P) on the whole grid
    """
    w = varpi_values(grid, k)
    permutation = np.eye(grid.size)[grid.parity_perm]
    a = np.kron(OMEGA, np.diag(1.0 / w) @ permutation)
    a_inv = np.kron(OMEGA.T, permutation.T @ np.diag(w))
    return a, a_inv


def pseudo_anti_hermiticity_residual(hamiltonian, x, metric=None):
    """
    ||A^-1 H(x)^T A + H(x)|| / ||H(x)||, zero when H(x) is Omega-T pseudo-anti-Hermitian
    """
    a, a_inv = metric if metric is not None else reciprocity_metric(hamiltonian.grid, hamiltonian.k)
    h = hamiltonian.matrix(x)
    scale = np.linalg.norm(h)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(a_inv @ h.T @ a + h) / scale)


def operator_norm_bound(hamiltonian, xs):
    """
    Largest infinity norm of H over the sample positions xs
    """
    bound = 0.0
    for x in xs:
        h = hamiltonian.blocks(x)
        rows = np.abs(h).sum(axis=(1, 3)).max()
        bound = max(bound, float(rows))
    if not math.isfinite(bound):
        LOGGER.warning("Non finite Hamiltonian norm for %r", hamiltonian)
    return bound
