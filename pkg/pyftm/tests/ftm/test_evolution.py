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

from pyftm.ftm.core import ScatteringConfig, ConfigError, IntegrationError, SingularityError, build_grid
from pyftm.ftm.evolution import *
from pyftm.ftm.potential import (XOnlyPotential, PiecewiseConstant, GaussianProfile, GaussianPotential,
                                 gaussian_mixture, zero_potential)
from pyftm.ftm.symmetry import build_symmetry, check_M_anti_pseudo_unitarity
from pyftm.oracle.matching import match_piecewise_1d


def barrier(lower=0.0, upper=2.0, height=1.0):
    return XOnlyPotential(PiecewiseConstant([((lower, upper), height)]), d=0)


class StepperConfigTestFunction(unittest.TestCase):

    def test_invalid(self):
        for kwargs in ({'method': 'euler'}, {'reduction': 'drop'}, {'rtol': 0.0}, {'max_step': -1.0},
                       {'max_steps': 0}, {'growth_budget': float('inf')}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigError):
                    StepperConfig(**kwargs)


class ScatteringFormTestFunction(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(2)
        n = 3
        self.blocks = [np.eye(2 * n).reshape(2, n, 2, n).transpose(0, 2, 1, 3)
                       + 0.3 * (rng.normal(size=(2, 2, n, n)) + 1j * rng.normal(size=(2, 2, n, n)))
                       for _ in range(2)]

    def test_round_trip(self):
        s = transfer_to_scattering(self.blocks[0])
        assert_allclose(self.blocks[0], scattering_to_transfer(s), atol=1e-12)

    def test_star_product_composes_transfer_matrices(self):
        (first, second) = self.blocks
        product = np.einsum('abij,bcjk->acik', second, first)
        star = redheffer_star(transfer_to_scattering(first), transfer_to_scattering(second))
        assert_allclose(transfer_to_scattering(product), star, atol=1e-10)

    def test_guard(self):
        blocks = np.array(self.blocks[0])
        blocks[1, 1] = 0.0
        with self.assertRaises(SingularityError):
            transfer_to_scattering(blocks, guard=True)


class TransferOneDimensionalTestFunction(unittest.TestCase):

    def test_zero_potential(self):
        assert_allclose(np.eye(2), transfer_1d(zero_potential(0), 1.0))

    def test_barrier_matches_interface_matching(self):
        expected = match_piecewise_1d([((0.0, 2.0), 1.0)], 2.0).M_exact
        for method in ('rk4', 'adaptive'):
            with self.subTest(method=method):
                m = transfer_1d(barrier(), 2.0, StepperConfig(method=method, rtol=1e-10))
                assert_allclose(expected, m, atol=1e-7)

    def test_unit_determinant(self):
        v = XOnlyPotential(GaussianProfile(0.5 - 0.3j, 0.7), d=0)
        m = transfer_1d(v, 1.2, StepperConfig(rtol=1e-10))
        self.assertLess(abs(np.linalg.det(m) - 1.0), 1e-8)

    def test_composition(self):
        stepper = StepperConfig(rtol=1e-10)
        (a, b) = (barrier(0.0, 1.0, 0.8), barrier(2.0, 3.5, 0.5j))
        both = XOnlyPotential(PiecewiseConstant([((0.0, 1.0), 0.8), ((2.0, 3.5), 0.5j)]), d=0)
        assert_allclose(transfer_1d(b, 1.5, stepper) @ transfer_1d(a, 1.5, stepper),
                        transfer_1d(both, 1.5, stepper), atol=1e-8)

    def test_x_only_routed_to_one_dimension(self):
        v = XOnlyPotential(PiecewiseConstant([((0.0, 2.0), 1.0)]), d=1)
        assert_allclose(transfer_1d(barrier(), 2.0), transfer_1d(v, 2.0))

    def test_wrapped_x_only_routed_to_one_dimension(self):
        stepper = StepperConfig(rtol=1e-10)
        first = XOnlyPotential(PiecewiseConstant([((0.0, 1.0), 1.6)]), d=2)
        second = XOnlyPotential(PiecewiseConstant([((2.0, 3.5), 0.5j)]), d=2)
        both = XOnlyPotential(PiecewiseConstant([((0.0, 1.0), 0.8), ((2.0, 3.5), 0.5j)]), d=0)
        assert_allclose(transfer_1d(both, 1.5, stepper), transfer_1d(first.scaled(0.5) + second, 1.5, stepper),
                        atol=1e-8)
        line = (first.scaled(0.5) + second).as_line()
        self.assertEqual(0, line.d)
        self.assertEqual([0.0, 1.0, 2.0, 3.5], line.breakpoints)

    def test_requires_x_only(self):
        with self.assertRaises(ConfigError):
            transfer_1d(GaussianPotential(0.1, 1.0, 1.0, d=1), 1.0)
        with self.assertRaises(ConfigError):
            transfer_1d(XOnlyPotential(GaussianProfile(0.1, 1.0), d=1) + GaussianPotential(0.1, 1.0, 1.0, d=1), 1.0)


class IntegrateTransferTestFunction(unittest.TestCase):

    def setUp(self):
        self.grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        self.stepper = StepperConfig(method='adaptive', rtol=1e-10, atol=1e-12)

    def test_zero_potential(self):
        u, m = integrate_transfer(zero_potential(1), self.grid)
        assert_allclose(np.eye(8), m.matrix())
        assert_allclose(np.eye(16), u.matrix())
        self.assertEqual(0, m.report['steps'])

    def test_report(self):
        _, m = integrate_transfer(GaussianPotential(0.2, 0.7, 0.7, d=1), self.grid, stepper=StepperConfig())
        self.assertEqual(4, m.size)
        for key in ('method', 'rtol', 'slices', 'window', 'max_growth', 'step', 'steps', 'rate', 'reduction'):
            self.assertIn(key, m.report)
        self.assertEqual('eliminate', m.report['reduction'])

    def test_anti_pseudo_unitarity(self):
        ops = build_symmetry(self.grid)
        _, m = integrate_transfer(gaussian_mixture(1, seed=0), self.grid, stepper=self.stepper)
        self.assertLess(check_M_anti_pseudo_unitarity(m, ops).residual, 1e-6)

    def test_no_evanescent_points(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, p_max=1.0, n_per_axis=4))
        u, m = integrate_transfer(GaussianPotential(0.2, 0.7, 0.7, d=1), grid, stepper=self.stepper)
        self.assertEqual('none', m.report['reduction'])
        assert_allclose(u.matrix(), m.matrix())

    def test_evolve_matches_full_grid_operator(self):
        v = GaussianPotential(0.2, 0.7, 0.7, d=1)
        u, _ = integrate_transfer(v, self.grid, stepper=self.stepper)
        assert_allclose(u.matrix(), evolve(v, self.grid, stepper=self.stepper).matrix(), atol=1e-8)

    def test_growth_budget(self):
        with self.assertRaises(IntegrationError) as context:
            integrate_transfer(GaussianPotential(0.2, 20.0, 1.0, d=1), self.grid)
        self.assertIsNotNone(context.exception.shell)

    def test_step_underflow(self):
        with self.assertRaises(IntegrationError):
            integrate_transfer(GaussianPotential(0.2, 1.0, 1.0, d=1), self.grid,
                               stepper=StepperConfig(rtol=1e-12, max_steps=10))

if __name__ == '__main__':
    unittest.main()
