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

import cmath
import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from pyftm.ftm.core import (ScatteringConfig, SymmetryError, BlockOperator, TransferMatrix, build_grid)
from pyftm.ftm.evolution import StepperConfig, integrate_transfer
from pyftm.ftm.potential import (XOnlyPotential, PiecewiseConstant, GaussianPotential, gaussian_mixture,
                                 zero_potential)
from pyftm.ftm.scattering import scattering_data, on_grid_directions
from pyftm.ftm.symmetry import *

ADAPTIVE = StepperConfig(method='adaptive', rtol=1e-10, atol=1e-12)


def all_pairs(grid):
    directions = on_grid_directions(grid)
    return [(n0, n) for n0 in directions for n in directions]


class OperatorsTestFunction(unittest.TestCase):

    def test_one_dimensional(self):
        ops = build_symmetry(build_grid(ScatteringConfig(k=2.0, d=0)))
        self.assertEqual(1, ops.size)
        assert_allclose([[0.5]], ops.Q)
        assert_allclose(np.eye(2), ops.Omega @ ops.Omega.T)

    def test_two_dimensional(self):
        ops = build_symmetry(build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8)))
        self.assertEqual([3, 2, 1, 0], ops.parity.tolist())
        assert_allclose(np.eye(4), ops.Q @ ops.Q_inv)
        assert_allclose(np.eye(4), ops.P @ ops.P)
        assert_allclose(ops.Sigma1 @ ops.Sigma1, np.eye(8))

    def test_time_reversal_involution(self):
        ops = build_symmetry(build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8)))
        rng = np.random.default_rng(0)
        operator = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert_allclose(operator, ops.time_reversed(ops.time_reversed(operator)), atol=1e-12)

    def test_reference_tolerance(self):
        self.assertEqual(1e-6, reference_tolerance(1.0, 1e-10))
        self.assertAlmostEqual(5e-3, reference_tolerance(1e4, 1e-8))


class ZeroPotentialTestFunction(unittest.TestCase):

    def test_identity_residuals(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        _, m = integrate_transfer(zero_potential(1), grid)
        records = verify_identities(m)
        self.assertEqual(8, len(records))
        for record in records:
            self.assertLess(record.residual, 1e-14, record.identity_name)
            self.assertTrue(record.passed)


class OneDimensionalTestFunction(unittest.TestCase):

    def setUp(self):
        grid = build_grid(ScatteringConfig(k=2.0, d=0))
        self.ops = build_symmetry(grid)
        self.grid = grid

    def test_barrier(self):
        v = XOnlyPotential(PiecewiseConstant([((0.0, 2.0), 1.0 + 0.4j)]), d=0)
        _, m = integrate_transfer(v, self.grid, stepper=ADAPTIVE)
        scatter = scattering_data(m, all_pairs(self.grid))
        records = require(verify_identities(m, scatter, v=v))
        names = [r.identity_name for r in records]
        self.assertIn('symplectic_form', names)
        self.assertIn('unit_determinant', names)
        self.assertIn('S_prime_reciprocity', names)

    def test_unequal_transmission(self):
        s = BlockOperator.from_blocks([[0.3]], [[0.2]], [[0.1]], [[0.5]], self.grid)
        s_prime = BlockOperator(s.blocks[::-1].copy(), self.grid)
        (first, second) = check_S_identities(s, s_prime, self.ops)
        expected = math.sqrt(2.0) * 0.2 / math.sqrt(0.39)
        self.assertAlmostEqual(expected, first.residual)
        self.assertAlmostEqual(expected, second.residual)
        self.assertFalse(second.passed)

    def test_symplectic_only_for_one_dimension(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        _, m = integrate_transfer(zero_potential(1), grid)
        with self.assertRaises(SymmetryError):
            check_symplectic_1d(m)


class MixtureTestFunction(unittest.TestCase):

    def setUp(self):
        self.grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))

    def check(self, v):
        u, m = integrate_transfer(v, self.grid, stepper=ADAPTIVE)
        scatter = scattering_data(m, all_pairs(self.grid))
        records = verify_identities(m, scatter, u, v=v)
        for record in records:
            self.assertTrue(record.passed, record.to_dict())
        return records

    def test_complex_mixture(self):
        records = self.check(gaussian_mixture(1, seed=0))
        self.assertEqual(16, len(records))
        link = [r for r in records if r.identity_name == 'reciprocity_link']
        self.assertEqual(1, len(link))
        self.assertEqual(100.0, link[0].reference_tol)

    def test_link_flags_amplitude_drift(self):
        v = gaussian_mixture(1, seed=0)
        u, m = integrate_transfer(v, self.grid, stepper=ADAPTIVE)
        scatter = scattering_data(m, all_pairs(self.grid))
        samples = dict(scatter.f_samples)
        key = next(iter(samples))
        samples[key] += 1e-3
        scatter.f_samples = samples
        records = {r.identity_name: r for r in verify_identities(m, scatter, u)}
        self.assertFalse(records['amplitude_reciprocity'].passed)
        self.assertFalse(records['reciprocity_link'].passed)
        self.assertTrue(records['M_anti_pseudo_unitarity'].passed)

    def test_unimodular_phase(self):
        self.check(gaussian_mixture(1, seed=0).scaled(cmath.exp(0.7j)))

    def test_amplitude_reciprocity(self):
        _, m = integrate_transfer(gaussian_mixture(1, seed=1), self.grid, stepper=ADAPTIVE)
        scatter = scattering_data(m, all_pairs(self.grid))
        residual, channels, compared = check_amplitude_reciprocity(scatter)
        self.assertEqual(64, compared)
        self.assertLess(residual, 1e-6)
        self.assertEqual({'R^l', 'R^r', 'T'}, set(channels))
        for value in channels.values():
            self.assertLess(value, 1e-5)

    def test_random_matrix_fails(self):
        rng = np.random.default_rng(4)
        matrix = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        m = TransferMatrix(BlockOperator.from_matrix(matrix, self.grid, self.grid.propagating), 1.0)
        ops = build_symmetry(self.grid)
        self.assertFalse(check_M_anti_pseudo_unitarity(m, ops, tol=1e-6).passed)
        with self.assertRaises(SymmetryError):
            require(check_entry_forms(m, ops, tol=1e-6))


class FullGridTestFunction(unittest.TestCase):

    def test_full_grid_unitarity(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, p_max=1.3, n_per_axis=8))
        v = GaussianPotential(0.2 + 0.1j, 0.5, 0.7, d=1)
        u, m = integrate_transfer(v, grid, stepper=ADAPTIVE)
        self.assertTrue(check_full_grid_unitarity(u, 1.0).passed)
        records = verify_identities(m, u=u, full_grid=True)
        self.assertEqual('U_full_grid_anti_pseudo_unitarity', records[-1].identity_name)

    def test_hamiltonian(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        self.assertTrue(hamiltonian_residual(gaussian_mixture(1, seed=2), grid).passed)


class HelpersTestFunction(unittest.TestCase):

    def test_residual_record(self):
        record = Residual('x', 2e-7, 1e-6)
        self.assertEqual({'identity_name': 'x', 'residual': 2e-7, 'reference_tol': 1e-6, 'pass': True},
                         record.to_dict())

    def test_require(self):
        records = [Residual('a', 0.0, 1e-6), Residual('b', 1.0, 1e-6)]
        with self.assertRaisesRegex(SymmetryError, 'b'):
            require(records)
        self.assertEqual(records[:1], require(records[:1]))

    def test_link_constant(self):
        self.assertEqual(0.0, link_constant(0.0, 0.0, np.eye(2)))
        self.assertEqual(math.inf, link_constant(1.0, 0.0, np.eye(2)))
        self.assertAlmostEqual(2.0, link_constant(1e-6, 1e-6, 2.0 * np.eye(2)))

if __name__ == '__main__':
    unittest.main()
