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

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pyftm.ftm.core import *


class ScatteringConfigTestFunction(unittest.TestCase):

    def test_defaults(self):
        cfg = ScatteringConfig(k=1.5)
        self.assertEqual(1, cfg.d)
        self.assertEqual(3.0, cfg.cutoff)
        self.assertEqual(32, cfg.n_per_axis)

    def test_invalid_values(self):
        for kwargs in ({'k': 0.0}, {'k': -1.0}, {'k': math.inf}, {'k': 1.0, 'd': 3},
                       {'k': 1.0, 'p_max': 0.5}, {'k': 1.0, 'n_per_axis': 7}, {'k': 1.0, 'exclusion': 0.0}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigError):
                    ScatteringConfig(**kwargs)

    def test_for_wavenumber(self):
        cfg = ScatteringConfig(k=1.0, n_per_axis=16).for_wavenumber(2.0)
        self.assertEqual(2.0, cfg.k)
        self.assertEqual(16, cfg.n_per_axis)


class BuildGridTestFunction(unittest.TestCase):

    def test_one_dimensional_grid(self):
        grid = build_grid(ScatteringConfig(k=2.0, d=0))
        self.assertEqual((1, 0), grid.points.shape)
        assert_array_equal([0], grid.propagating)
        assert_array_equal([0], grid.parity_perm)
        assert_allclose([2.0], varpi_values(grid))

    def test_staggered_axis(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        assert_allclose(np.arange(-3.5, 4.0) * 0.5, grid.points[:, 0])
        assert_allclose(np.full(8, 0.5), grid.weights)
        assert_array_equal([2, 3, 4, 5], grid.propagating)
        self.assertEqual(0.5, grid.spacing)

    def test_unstaggered_axis_keeps_origin(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, p_max=2.2, n_per_axis=8, grid_offset=False))
        self.assertEqual(9, grid.size)
        self.assertIn(0.0, grid.points[:, 0])

    def test_parity(self):
        for d in (1, 2):
            grid = build_grid(ScatteringConfig(k=1.0, d=d, n_per_axis=8))
            with self.subTest(d=d):
                assert_array_equal(-grid.points, grid.points[grid.parity_perm])
                assert_array_equal(np.arange(grid.size), grid.parity_perm[grid.parity_perm])

    def test_three_dimensional_propagating_disk(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=2, n_per_axis=8))
        self.assertEqual(64, grid.size)
        self.assertTrue(np.all(grid.norms[grid.propagating] < 1.0))
        self.assertEqual(12, grid.n_prop)

    def test_resonant_grid(self):
        with self.assertRaises(GridError):
            build_grid(ScatteringConfig(k=1.5, d=1, p_max=2.0, n_per_axis=4))

    def test_propagating_parity(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        assert_array_equal([3, 2, 1, 0], propagating_parity(grid))


class VarpiTestFunction(unittest.TestCase):

    def test_branches(self):
        assert_allclose(0.6, varpi(0.8, 1.0))
        assert_allclose(1j * math.sqrt(3.0), varpi(2.0, 1.0))
        assert_allclose([0.6, 0.8j], varpi(np.array([[0.8], [math.sqrt(1.64)]]), 1.0))

    def test_diag_family(self):
        grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=8))
        w, w_r, w_i = diag_varpi_family(grid)
        assert_allclose(w, w_r + 1j * w_i)
        self.assertTrue(np.all(np.diag(w_i) >= 0))
        self.assertTrue(np.all(np.diag(w_r)[grid.propagating] > 0))


class BlockOperatorTestFunction(unittest.TestCase):

    def setUp(self):
        self.grid = build_grid(ScatteringConfig(k=1.0, d=1, n_per_axis=4))
        rng = np.random.default_rng(1)
        self.matrix = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))

    def test_matrix_layout(self):
        op = BlockOperator.from_matrix(self.matrix, self.grid)
        assert_array_equal(self.matrix[:4, 4:], op.block(0, 1))
        assert_array_equal(self.matrix[4:, :4], op.block(1, 0))
        assert_array_equal(self.matrix, op.matrix())

    def test_product(self):
        a = BlockOperator.from_matrix(self.matrix, self.grid)
        b = BlockOperator.from_matrix(self.matrix.T, self.grid)
        assert_allclose(self.matrix @ self.matrix.T, (a @ b).matrix(), atol=1e-12)

    def test_identity_and_restrict(self):
        op = BlockOperator.identity(self.grid).restrict([1, 2])
        assert_array_equal(np.eye(4), op.matrix())
        assert_array_equal([1, 2], op.grid_indices)

    def test_shape_validation(self):
        with self.assertRaises(ValueError):
            BlockOperator(np.zeros((2, 3, 4, 4)), self.grid)

    def test_transfer_matrix_blocks(self):
        m = TransferMatrix(BlockOperator.from_matrix(self.matrix, self.grid), 1.0)
        assert_array_equal(self.matrix[4:, 4:], m.m22)
        self.assertEqual(4, m.size)

if __name__ == '__main__':
    unittest.main()
