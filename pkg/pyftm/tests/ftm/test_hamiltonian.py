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

import unittest

import numpy as np
from numpy.testing import assert_allclose

from pyftm.ftm.core import ScatteringConfig, PotentialError, build_grid, varpi_values
from pyftm.ftm.hamiltonian import *
from pyftm.ftm.potential import (GaussianPotential, XOnlyPotential, GaussianProfile, CircularWell,
                                 gaussian_mixture, zero_potential)


class EffectiveHamiltonianTestFunction(unittest.TestCase):

    def setUp(self):
        self.grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))

    def test_zero_potential_is_diagonal(self):
        h = EffectiveHamiltonian(zero_potential(1), self.grid).at(0.3)
        w = varpi_values(self.grid)
        assert_allclose(np.diag(-1j * w.imag), h.block(0, 0))
        assert_allclose(np.diag(1j * w.imag), h.block(1, 1))
        assert_allclose(0.0, h.block(0, 1))

    def test_dimension_mismatch(self):
        with self.assertRaises(PotentialError):
            EffectiveHamiltonian(zero_potential(2), self.grid)

    def test_block_structure(self):
        v = GaussianPotential(0.3 + 0.1j, 1.0, 0.8, d=1)
        hamiltonian = EffectiveHamiltonian(v, self.grid)
        x = 0.4
        h = hamiltonian.at(x)
        vw = assemble_V(v, self.grid, x) / hamiltonian.varpi[None, :]
        e = np.exp(1j * x * hamiltonian.varpi_r)
        assert_allclose(0.5 * e.conj()[:, None] * vw * e.conj()[None, :], h.block(0, 1))
        assert_allclose(-0.5 * e[:, None] * vw * e[None, :], h.block(1, 0))

    def test_pseudo_anti_hermiticity(self):
        for v in (gaussian_mixture(1, seed=1), CircularWell(0.5 - 0.2j, 1.0, d=1),
                  XOnlyPotential(GaussianProfile(0.4j, 1.0), d=1)):
            hamiltonian = EffectiveHamiltonian(v, self.grid)
            metric = reciprocity_metric(self.grid)
            for x in (-0.7, 0.0, 0.35):
                with self.subTest(v=v, x=x):
                    self.assertLess(pseudo_anti_hermiticity_residual(hamiltonian, x, metric), 1e-12)

    def test_pseudo_anti_hermiticity_three_dimensional(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=2, n_per_axis=4))
        hamiltonian = EffectiveHamiltonian(gaussian_mixture(2, seed=4), grid)
        self.assertLess(pseudo_anti_hermiticity_residual(hamiltonian, 0.2), 1e-12)

    def test_metric_inverse(self):
        a, a_inv = reciprocity_metric(self.grid)
        assert_allclose(np.eye(16), a @ a_inv, atol=1e-14)

    def test_one_dimensional_hamiltonian(self):
        v = XOnlyPotential(GaussianProfile(0.4 - 0.2j, 1.0), d=0)
        grid = build_grid(ScatteringConfig(k=1.3, d=0))
        for x in (-0.5, 0.8):
            with self.subTest(x=x):
                assert_allclose(assemble_H_1d(v, 1.3, x), assemble_H(v, grid, 1.3, x).matrix(), atol=1e-15)
        with self.assertRaises(PotentialError):
            assemble_H_1d(XOnlyPotential(GaussianProfile(0.4, 1.0), d=1), 1.0, 0.0)

    def test_operator_norm_bound(self):
        hamiltonian = EffectiveHamiltonian(zero_potential(1), self.grid)
        assert_allclose(np.max(varpi_values(self.grid).imag), operator_norm_bound(hamiltonian, [0.0, 1.0]))

if __name__ == '__main__':
    unittest.main()
