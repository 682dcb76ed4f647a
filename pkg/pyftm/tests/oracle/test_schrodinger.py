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

from pyftm.ftm.core import OracleError
from pyftm.ftm.potential import (XOnlyPotential, PiecewiseConstant, GaussianProfile, GaussianPotential,
                                 zero_potential)
from pyftm.oracle.matching import match_piecewise_1d
from pyftm.oracle.schrodinger import integrate_schrodinger_1d


class SchrodingerTestFunction(unittest.TestCase):

    def test_barrier(self):
        profile = PiecewiseConstant([((0.0, 2.0), 1.0)])
        expected = match_piecewise_1d(profile, 2.0)
        result = integrate_schrodinger_1d(profile, 2.0)
        assert_allclose(expected.M_exact, result.M_exact, atol=1e-8)
        self.assertAlmostEqual(expected.T_l, result.T_l, places=8)
        self.assertFalse(result.flagged)

    def test_complex_steps(self):
        segments = [((-1.0, 0.0), 0.5 + 0.2j), ((0.5, 1.5), -0.3j)]
        v = XOnlyPotential(PiecewiseConstant(segments), d=0)
        assert_allclose(match_piecewise_1d(segments, 1.3).M_exact, integrate_schrodinger_1d(v, 1.3).M_exact,
                        atol=1e-8)

    def test_smooth_potential(self):
        result = integrate_schrodinger_1d(GaussianProfile(0.8 - 0.2j, 0.6), 1.1)
        self.assertLess(result.wronskian_drift, 1e-9)
        self.assertLess(abs(np.linalg.det(result.M_exact) - 1.0), 1e-8)

    def test_explicit_span(self):
        profile = GaussianProfile(0.8, 0.6)
        full = integrate_schrodinger_1d(profile, 1.1)
        wider = integrate_schrodinger_1d(profile, 1.1, x_span=(-6.0, 6.0))
        self.assertAlmostEqual(full.T_l, wider.T_l, places=8)

    def test_empty_support(self):
        result = integrate_schrodinger_1d(zero_potential(0), 1.0)
        assert_allclose(np.eye(2), result.M_exact)

    def test_requires_one_dimension(self):
        with self.assertRaises(OracleError):
            integrate_schrodinger_1d(GaussianPotential(0.1, 1.0, 1.0, d=1), 1.0)

if __name__ == '__main__':
    unittest.main()
