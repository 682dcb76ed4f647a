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
from numpy.testing import assert_allclose

from pyftm.ftm.core import OracleError
from pyftm.ftm.potential import PiecewiseConstant
from pyftm.oracle.matching import *


class LocalWavenumberTestFunction(unittest.TestCase):

    def test_branch(self):
        self.assertEqual(2.0, local_wavenumber(2.0, 0.0))
        self.assertAlmostEqual(1j, local_wavenumber(2.0, 5.0))
        self.assertGreaterEqual(local_wavenumber(2.0, 1.0 - 3j).imag, 0.0)

    def test_threshold(self):
        with self.assertRaises(OracleError):
            local_wavenumber(2.0, 4.0)


class MatchingTestFunction(unittest.TestCase):

    def test_no_segments(self):
        result = match_piecewise_1d([], 1.0)
        assert_allclose(np.eye(2), result.M_exact)
        self.assertEqual((0, 0, 1, 1), (result.R_l, result.R_r, result.T_l, result.T_r))

    def test_barrier_transmission(self):
        result = match_piecewise_1d(PiecewiseConstant([((0.0, 2.0), 1.0)]), 2.0)
        expected = 1.0 / (1.0 + math.sin(2.0 * math.sqrt(3.0)) ** 2 / 48.0)
        self.assertAlmostEqual(expected, abs(result.T_l) ** 2, places=12)
        self.assertAlmostEqual(1.0, abs(result.T_l) ** 2 + abs(result.R_l) ** 2, places=12)
        self.assertAlmostEqual(1.0, abs(result.T_r) ** 2 + abs(result.R_r) ** 2, places=12)

    def test_complex_segments(self):
        result = match_piecewise_1d([((-1.0, 0.0), 0.5 + 0.2j), ((0.5, 1.5), -0.3j)], 1.3)
        self.assertLess(abs(np.linalg.det(result.M_exact) - 1.0), 1e-13)
        self.assertAlmostEqual(result.T_l, result.T_r, places=12)

    def test_translation(self):
        shift = 0.7
        k = 1.5
        a = match_piecewise_1d([((0.0, 1.0), 0.4)], k)
        b = match_piecewise_1d([((shift, 1.0 + shift), 0.4)], k)
        self.assertAlmostEqual(a.T_l, b.T_l, places=12)
        self.assertAlmostEqual(a.R_l * np.exp(2j * k * shift), b.R_l, places=12)

    def test_rt_from_transfer(self):
        self.assertEqual((0, 0, 1, 1), rt_from_transfer_1d(np.eye(2)))
        with self.assertRaises(OracleError):
            rt_from_transfer_1d(np.array([[1.0, 1.0], [1.0, 0.0]]))

    def test_to_dict(self):
        document = match_piecewise_1d([((0.0, 1.0), 0.4)], 1.0).to_dict()
        self.assertEqual({'M', 'R^l', 'R^r', 'T^l', 'T^r', 'wronskian_drift', 'flagged'}, set(document))


class GainSlabTestFunction(unittest.TestCase):

    def test_spectral_singularity(self):
        k, gain = gain_slab_singularity(10.0, 4.85, 3.35)
        self.assertGreater(gain, 0.0)
        self.assertAlmostEqual(4.85, k, delta=0.2)
        self.assertLess(abs(slab_m22(10.0, k, gain)), 1e-9)
        self.assertGreater(abs(slab_m22(10.0, k + 0.05, gain)), 1e-3)

    def test_root_inside_window(self):
        k, gain = gain_slab_singularity(10.0, 2.0, 1.1)
        self.assertAlmostEqual(2.0105662285829, k, places=9)
        self.assertAlmostEqual(1.0970756999455, gain, places=9)
        self.assertLess(abs(slab_m22(10.0, k, gain)), 1e-9)

if __name__ == '__main__':
    unittest.main()
