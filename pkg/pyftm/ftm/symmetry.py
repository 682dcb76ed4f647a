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
Matrix realizations of the parity, time-reversal and block operators on the
propagating disk, and the reciprocity identities as residual records.

The antilinear time-reversal 𝔗 = varpi^-1 P T is never materialized: with
Q = Winv P, a similarity X L^dagger X^-1 by X = A (conjugation) is the plain
matrix expression A^-1 L^T A, and 𝔗 L 𝔗^-1 of a linear L is Q L* Q^-1.
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import linalg

from pyftm.ftm.core import GridError, SymmetryError, varpi_values, propagating_parity
from pyftm.ftm.hamiltonian import EffectiveHamiltonian, reciprocity_metric, pseudo_anti_hermiticity_residual
from pyftm.ftm.scattering import c_d

LOGGER = logging.getLogger(__name__)

TOLERANCE_FLOOR = 1e-6
TOLERANCE_FACTOR = 50.0
LINK_LIMIT = 100.0
DEFAULT_RTOL = 1e-8


@dataclasses.dataclass(frozen=True)
class Residual:
    identity_name: str
    residual: float
    reference_tol: float

    @property
    def passed(self):
        return bool(self.residual <= self.reference_tol)

    def to_dict(self):
        return {'identity_name': self.identity_name, 'residual': self.residual,
                'reference_tol': self.reference_tol, 'pass': self.passed}


@dataclasses.dataclass(frozen=True, eq=False)
class SymmetryOperators:
    """
    P, W = diag(varpi), Winv, Omega and Sigma1 on the propagating disk of a grid.
    parity holds P as an index permutation.
    """
    k: float
    parity: np.ndarray
    P: np.ndarray
    W: np.ndarray
    Winv: np.ndarray
    Omega: np.ndarray
    Sigma1: np.ndarray

    @property
    def size(self):
        return len(self.parity)

    @property
    def Q(self):
        """
        Winv P, the linear part of 𝔗
        """
        return self.Winv @ self.P

    @property
    def Q_inv(self):
        return self.P @ self.W

    def time_reversed(self, operator):
        """
        𝔗 L 𝔗^-1 of a linear operator L, as Q L* Q^-1
        """
        return self.Q @ np.conj(operator) @ self.Q_inv


def build_symmetry(grid, k=None):
    """
    :raise GridError: if the propagating disk is not closed under parity
    :raise SymmetryError: if an invariant of the operators fails to hold
    """
    k = grid.k if k is None else float(k)
    parity = propagating_parity(grid)
    n = len(parity)
    w = varpi_values(grid, k)[grid.propagating]
    if np.any(w.imag != 0) or np.any(w.real <= 0):
        raise GridError("varpi is not real positive on the propagating disk of %r" % (grid,))
    w = w.real
    permutation = np.eye(n)[parity]
    identity = np.eye(n)
    zero = np.zeros((n, n))
    ops = SymmetryOperators(k=k, parity=parity, P=permutation, W=np.diag(w), Winv=np.diag(1.0 / w),
                            Omega=np.block([[zero, identity], [-identity, zero]]),
                            Sigma1=np.block([[zero, identity], [identity, zero]]))
    if not np.array_equal(ops.P @ ops.P, identity):
        raise SymmetryError("Parity is not an involution on the propagating disk")
    if not np.array_equal(ops.P @ ops.W, ops.W @ ops.P):
        raise SymmetryError("Parity does not commute with varpi")
    return ops


def reference_tolerance(condition, rtol=DEFAULT_RTOL):
    """
    max(1e-6, 50 rtol cond(M22))
    """
    return max(TOLERANCE_FLOOR, TOLERANCE_FACTOR * rtol * condition)


def _relative(difference, scale):
    scale = np.linalg.norm(scale)
    if scale == 0:
        return float(np.linalg.norm(difference))
    return float(np.linalg.norm(difference) / scale)


def _condition(m22):
    sigma = linalg.svdvals(m22)
    return math.inf if sigma[-1] == 0 else float(sigma[0] / sigma[-1])


def _tolerance(m, tol):
    if tol is not None:
        return tol
    return reference_tolerance(_condition(m.m22), m.report.get('rtol', DEFAULT_RTOL))


def _metric(ops):
    a = np.kron(np.array([[0, 1], [-1, 0]]), ops.Q)
    a_inv = np.kron(np.array([[0, -1], [1, 0]]), ops.Q_inv)
    return a, a_inv


def check_M_anti_pseudo_unitarity(m, ops, tol=None):
    """
    ||A^-1 M^T A M - I|| / ||M|| with A = Omega (x) (Winv P)
    """
    a, a_inv = _metric(ops)
    matrix = m.matrix()
    residual = _relative(a_inv @ matrix.T @ a @ matrix - np.eye(len(matrix)), matrix)
    return Residual('M_anti_pseudo_unitarity', residual, _tolerance(m, tol))


def check_entry_identities(m, ops, tol=None):
    """
    Time-reversal identities of M22^-1 M21, M12 M22^-1, the transmission block and the
    determinant-like identity M11 M22 - M12 M22^-1 M21 M22 = P W (M22^-1)^T Winv P M22
    """
    tol = _tolerance(m, tol)
    lu = linalg.lu_factor(m.m22)
    right = linalg.lu_solve(lu, m.m21)
    left = linalg.lu_solve(lu, m.m12.T, trans=1).T
    # the inverse itself is part of the reported identities
    inverse = linalg.lu_solve(lu, np.eye(m.size, dtype=complex))
    schur = m.m11 - m.m12 @ right
    records = []
    lhs = right.conj().T
    records.append(Residual('M22inv_M21_time_reversal', _relative(lhs - ops.time_reversed(right), lhs), tol))
    lhs = left.conj().T
    records.append(Residual('M12_M22inv_time_reversal', _relative(lhs - ops.time_reversed(left), lhs), tol))
    lhs = inverse.conj().T
    records.append(Residual('M22inv_schur_time_reversal', _relative(lhs - ops.time_reversed(schur), lhs), tol))
    lhs = m.m11 @ m.m22 - m.m12 @ right @ m.m22
    rhs = ops.Q_inv @ inverse.T @ ops.Q @ m.m22
    records.append(Residual('det_M_generalization', _relative(lhs - rhs, lhs), tol))
    return records


def check_entry_forms(m, ops, tol=None):
    """
    Block entries of M^T A M = A:
    M11^T Q M21 = M21^T Q M11, M12^T Q M22 = M22^T Q M12, M22^T Q M11 = M12^T Q M21 + Q
    """
    tol = _tolerance(m, tol)
    q = ops.Q
    records = []
    lhs = m.m11.T @ q @ m.m21
    records.append(Residual('entry_M11_M21', _relative(lhs - m.m21.T @ q @ m.m11, lhs), tol))
    lhs = m.m22.T @ q @ m.m12
    records.append(Residual('entry_M22_M12', _relative(lhs - m.m12.T @ q @ m.m22, lhs), tol))
    lhs = m.m22.T @ q @ m.m11
    records.append(Residual('entry_M22_M11', _relative(lhs - m.m12.T @ q @ m.m21 - q, lhs), tol))
    return records


def check_S_identities(s, s_prime, ops, tol=TOLERANCE_FLOOR):
    """
    ||B^-1 S^T B - S|| / ||S|| with B = Sigma1 (x) (Winv P), and the same for S' with B' = I (x) (Winv P)
    """
    b = np.kron(np.array([[0, 1], [1, 0]]), ops.Q)
    b_inv = np.kron(np.array([[0, 1], [1, 0]]), ops.Q_inv)
    matrix = s.matrix()
    first = _relative(b_inv @ matrix.T @ b - matrix, matrix)
    b = np.kron(np.eye(2), ops.Q)
    b_inv = np.kron(np.eye(2), ops.Q_inv)
    matrix = s_prime.matrix()
    second = _relative(b_inv @ matrix.T @ b - matrix, matrix)
    return [Residual('S_reciprocity', first, tol), Residual('S_prime_reciprocity', second, tol)]


def check_symplectic_1d(m, tol=None):
    """
    d=0: M^T Omega M = Omega, equivalently det M = 1
    """
    if m.grid.d != 0:
        raise SymmetryError("Symplectic form check is only defined for d=0, found d=%d" % m.grid.d)
    tol = _tolerance(m, tol)
    matrix = m.matrix()
    omega = np.array([[0, 1], [-1, 0]], dtype=complex)
    return [Residual('symplectic_form', _relative(matrix.T @ omega @ matrix - omega, omega), tol),
            Residual('unit_determinant', float(abs(np.linalg.det(matrix) - 1.0)), tol)]


def check_full_grid_unitarity(u, k=None, tol=TOLERANCE_FLOOR):
    """
    Anti-pseudo-unitarity of the full grid evolution operator, evanescent channels
    included (complex varpi in the metric)
    """
    a, a_inv = reciprocity_metric(u.grid, k)
    matrix = u.matrix()
    residual = _relative(a_inv @ matrix.T @ a @ matrix - np.eye(len(matrix)), matrix)
    return Residual('U_full_grid_anti_pseudo_unitarity', residual, tol)


def hamiltonian_residual(v, grid, k=None, xs=None, tol=1e-12):
    """
    Largest ||A^-1 H(x)^T A + H(x)|| / ||H(x)|| over xs (default: 9 points across the support)
    """
    hamiltonian = EffectiveHamiltonian(v, grid, k)
    if xs is None:
        support = v.support_bounds()
        xs = [0.0] if support.empty else np.linspace(support.lower, support.upper, 9)
    metric = reciprocity_metric(grid, hamiltonian.k)
    residual = max(pseudo_anti_hermiticity_residual(hamiltonian, x, metric) for x in xs)
    return Residual('H_pseudo_anti_hermiticity', residual, tol)


def channel_residuals(kernels, parity):
    """
    Reflection and transmission reciprocity on R/T kernels:
    R^l[i, j] = R^l[Pj, Pi], R^r[i, j] = R^r[Pj, Pi], T^l[i, j] = T^r[Pj, Pi] (smooth parts)
    """
    def flipped(kernel):
        return kernel[np.ix_(parity, parity)].T

    return {'R^l': float(np.max(np.abs(kernels['R^l'] - flipped(kernels['R^l'])), initial=0.0)),
            'R^r': float(np.max(np.abs(kernels['R^r'] - flipped(kernels['R^r'])), initial=0.0)),
            'T': float(np.max(np.abs(kernels['T^l_smooth'] - flipped(kernels['T^r_smooth'])), initial=0.0))}


def check_amplitude_reciprocity(scatter):
    """
    max |f(n0, n) - f(-n, -n0)| over sampled pairs whose reciprocal is sampled too,
    plus per channel kernel residuals.
    :return: (max residual, {channel: residual}, number of compared pairs)
    """
    residual = 0.0
    compared = 0
    for (key0, key1), f in scatter.f_samples.items():
        reciprocal = (tuple(-c for c in key1), tuple(-c for c in key0))
        if reciprocal in scatter.f_samples:
            residual = max(residual, abs(f - scatter.f_samples[reciprocal]))
            compared += 1
    if scatter.f_samples and not compared:
        LOGGER.warning("No sampled pair has its reciprocal sampled; amplitude residual is vacuous")
    channels = channel_residuals(scatter.rt_kernels, propagating_parity(scatter.grid))
    return float(residual), channels, compared


def link_constant(amplitude_residual, operator_residual, m22):
    """
    C in amplitude residual <= C (operator residual) ||M22^-1||
    """
    bound = operator_residual * float(1.0 / linalg.svdvals(m22)[-1])
    if bound == 0:
        return 0.0 if amplitude_residual == 0 else math.inf
    constant = amplitude_residual / bound
    LOGGER.info("Reciprocity link constant C=%.3g", constant)
    return constant


def require(records):
    """
    :raise SymmetryError: naming every failed residual record
    """
    failed = [r for r in records if not r.passed]
    if failed:
        raise SymmetryError("Identity checks failed: %s" % ', '.join(
            "%s (%.3g > %.3g)" % (r.identity_name, r.residual, r.reference_tol) for r in failed))
    return records


def verify_identities(m, scatter=None, u=None, full_grid=False, v=None):
    """
    Every identity applicable to a transfer matrix as residual records
    """
    ops = build_symmetry(m.grid, m.k)
    tol = _tolerance(m, None)
    records = [check_M_anti_pseudo_unitarity(m, ops, tol)]
    records.extend(check_entry_identities(m, ops, tol))
    records.extend(check_entry_forms(m, ops, tol))
    if scatter is not None:
        records.extend(check_S_identities(scatter.S, scatter.S_prime, ops, tol))
        amplitude, channels, compared = check_amplitude_reciprocity(scatter)
        scale = max([abs(f) for f in scatter.f_samples.values()] + [1.0])
        records.append(Residual('amplitude_reciprocity', amplitude, tol * scale))
        for (name, value) in channels.items():
            records.append(Residual('%s_reciprocity' % name, value, tol * scale))
        # f = (2pi)^d varpi_j / c_d L[i, j] / w_j, back to the units of M
        kernel_units = abs(c_d(m.grid.d, m.k)) * float(m.grid.weights[0]) / ((2.0 * math.pi) ** m.grid.d * m.k)
        operator = max(records[0].residual, np.finfo(float).eps)
        records.append(Residual('reciprocity_link', link_constant(amplitude * kernel_units, operator, m.m22),
                                LINK_LIMIT))
    if m.grid.d == 0:
        records.extend(check_symplectic_1d(m, tol))
    if v is not None:
        records.append(hamiltonian_residual(v, m.grid, m.k))
    if full_grid and u is not None:
        records.append(check_full_grid_unitarity(u, m.k, tol))
    for record in records:
        LOGGER.debug("%s residual=%.3g tol=%.3g", record.identity_name, record.residual, record.reference_tol)
    return records
