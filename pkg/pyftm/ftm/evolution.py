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
Integration of i dU/dx = H(x) U across the support of a potential.

The window is cut into slices at the potential breakpoints and wherever the
evanescent growth exp(varpi_i dx) of a slice would exceed the slice budget.
Slices are integrated independently and combined twice: as a product (the
full grid evolution operator) and as a Redheffer star product of their
scattering forms, which imposes decaying boundary conditions on the
evanescent channels before restricting to the propagating disk.
"""

import dataclasses
import itertools
import logging
import math
import numbers
import time
from enum import Enum

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

from pyftm.ftm.core import (ConfigError, IntegrationError, SingularityError, BlockOperator, TransferMatrix,
                            ScatteringConfig, build_grid)
from pyftm.ftm.hamiltonian import EffectiveHamiltonian, operator_norm_bound

LOGGER = logging.getLogger(__name__)

SINGULAR_CONDITION = 1e12
NORM_SAMPLES = 65


class Method(Enum):
    rk4 = 'rk4'
    adaptive = 'adaptive'


class Reduction(Enum):
    eliminate = 'eliminate'
    submatrix = 'submatrix'


@dataclasses.dataclass(frozen=True)
class StepperConfig:
    """
    Integrator settings.

    rk4 uses a fixed step h = min(max_step, rtol^(1/4) / rate), rate being the
    largest infinity norm of H over the window plus the fastest phase
    frequency 2 max(varpi_r); adaptive uses DOP853 with rtol/atol.
    """
    method: str = 'rk4'
    rtol: float = 1e-8
    atol: float = 1e-12
    max_step: float | None = None
    max_steps: int = 1000000
    growth_budget: float = 40.0
    slice_growth: float = 2.0
    reduction: str = 'eliminate'

    def __post_init__(self):
        try:
            Method(self.method)
            Reduction(self.reduction)
        except ValueError as e:
            raise ConfigError(str(e))
        for name in ('rtol', 'atol', 'growth_budget', 'slice_growth'):
            value = getattr(self, name)
            if not (isinstance(value, numbers.Real) and value > 0 and math.isfinite(value)):
                raise ConfigError("Stepper %s must be a finite positive number, found %r" % (name, value))
        if self.max_step is not None and not self.max_step > 0:
            raise ConfigError("Stepper max_step must be positive, found %r" % (self.max_step,))
        if not self.max_steps > 0:
            raise ConfigError("Stepper max_steps must be positive, found %r" % (self.max_steps,))


def transfer_to_scattering(blocks, guard=False):
    """
    [[U11 - U12 U22^-1 U21, U12 U22^-1], [-U22^-1 U21, U22^-1]] from the blocks of U
    :raise SingularityError: if guard is set and U22 is numerically singular
    """
    (u11, u12), (u21, u22) = blocks
    if guard:
        size = len(u22)
        full = np.asarray(blocks).transpose(0, 2, 1, 3).reshape(2 * size, 2 * size)
        check_invertible(u22, scale=np.linalg.norm(full, 2))
    lu = linalg.lu_factor(u22)
    right = linalg.lu_solve(lu, u21)
    left = linalg.lu_solve(lu, u12.T, trans=1).T
    inverse = linalg.lu_solve(lu, np.eye(len(u22), dtype=complex))
    return np.array([[u11 - u12 @ right, left], [-right, inverse]])


def scattering_to_transfer(blocks):
    """
    Inverse of transfer_to_scattering
    """
    (s11, s12), (s21, s22) = blocks
    lu = linalg.lu_factor(s22)
    m21 = -linalg.lu_solve(lu, s21)
    m12 = linalg.lu_solve(lu, s12.T, trans=1).T
    m22 = linalg.lu_solve(lu, np.eye(len(s22), dtype=complex))
    return np.array([[s11 - m12 @ s21, m12], [m21, m22]])


def redheffer_star(left, right):
    """
    Scattering blocks of two adjacent slices, left slice first
    """
    (a11, a12), (a21, a22) = left
    (b11, b12), (b21, b22) = right
    identity = np.eye(len(a11), dtype=complex)
    x = linalg.solve(identity - a12 @ b21, identity)
    y = linalg.solve(identity - b21 @ a12, identity)
    return np.array([[b11 @ x @ a11, b12 + b11 @ x @ a12 @ b22],
                     [a21 + a22 @ b21 @ x @ a11, a22 @ y @ b22]])


def check_invertible(matrix, limit=SINGULAR_CONDITION, scale=None):
    """
    :param scale: norm the smallest singular value is measured against, at least the largest
        singular value of matrix (a 1x1 M22 is measured against the whole of M)
    :return: (sigma_min, condition number)
    :raise SingularityError: above the condition limit
    """
    sigma = linalg.svdvals(matrix)
    sigma_min = float(sigma[-1]) if len(sigma) else 1.0
    largest = float(sigma[0]) if len(sigma) else 1.0
    if scale is not None:
        largest = max(largest, float(scale))
    condition = math.inf if sigma_min == 0 else largest / sigma_min
    if condition > limit:
        raise SingularityError("M22 numerically singular (cond=%.3g, sigma_min=%.3g): near spectral singularity"
                               % (condition, sigma_min), sigma_min=sigma_min, condition=condition)
    return sigma_min, condition


def _dominant_shell(hamiltonian):
    norms = hamiltonian.grid.norms
    if not np.any(hamiltonian.varpi_i > 0):
        return float(np.max(norms)) if len(norms) else 0.0
    return float(norms[int(np.argmax(hamiltonian.varpi_i))])


def _slices(lower, upper, breakpoints, kappa, slice_growth):
    knots = sorted({lower, upper} | {b for b in breakpoints if lower < b < upper})
    slices = []
    for (a, b) in itertools.pairwise(knots):
        count = 1 if kappa == 0 else max(1, math.ceil(kappa * (b - a) / slice_growth))
        edges = np.linspace(a, b, count + 1)
        slices.extend(zip(edges[:-1].tolist(), edges[1:].tolist()))
    return slices


def _inside(x, lower, upper):
    # potential is sampled from inside the slice at its edges
    shift = 1e-12 * (upper - lower)
    return min(max(x, lower + shift), upper - shift)


def _rk4_slice(hamiltonian, lower, upper, steps):
    h = (upper - lower) / steps
    size = 2 * hamiltonian.grid.size
    u = np.eye(size, dtype=complex)

    def generator(x):
        return -1j * hamiltonian.matrix(x, _inside(x, lower, upper))

    g0 = generator(lower)
    for step in range(steps):
        x = lower + step * h
        gm = generator(x + h / 2.0)
        g1 = generator(lower + (step + 1) * h)
        k1 = g0 @ u
        k2 = gm @ (u + (h / 2.0) * k1)
        k3 = gm @ (u + (h / 2.0) * k2)
        k4 = g1 @ (u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        g0 = g1
    return u


def _adaptive_slice(hamiltonian, lower, upper, stepper, shell):
    size = 2 * hamiltonian.grid.size

    def rhs(x, y):
        return (-1j * (hamiltonian.matrix(x, _inside(x, lower, upper)) @ y.reshape(size, size))).ravel()

    solution = solve_ivp(rhs, (lower, upper), np.eye(size, dtype=complex).ravel(), method='DOP853',
                         rtol=stepper.rtol, atol=stepper.atol,
                         max_step=stepper.max_step if stepper.max_step is not None else np.inf)
    if solution.status != 0:
        raise IntegrationError("Adaptive integration failed on [%.17g, %.17g] (%s); stiff evanescent growth "
                               "at shell |p|=%.6g" % (lower, upper, solution.message, shell),
                               x=float(solution.t[-1]), shell=shell)
    return solution.y[:, -1].reshape(size, size), solution.nfev


def _integrate(hamiltonian, lower, upper, breakpoints, stepper, eliminate):
    grid = hamiltonian.grid
    kappa = float(np.max(hamiltonian.varpi_i)) if grid.size else 0.0
    shell = _dominant_shell(hamiltonian)
    growth = kappa * (upper - lower)
    if growth > stepper.growth_budget:
        raise IntegrationError("Evanescent growth exp(%.1f) over [%.6g, %.6g] exceeds the budget exp(%.1f) "
                               "at shell |p|=%.6g; lower p_max or narrow the window"
                               % (growth, lower, upper, stepper.growth_budget, shell), shell=shell)

    slices = _slices(lower, upper, breakpoints, kappa, stepper.slice_growth)
    report = {'method': stepper.method, 'rtol': stepper.rtol, 'slices': len(slices),
              'window': [lower, upper], 'max_growth': growth}

    method = Method(stepper.method)
    if method is Method.rk4:
        samples = np.union1d(np.linspace(lower, upper, NORM_SAMPLES),
                             [b for b in breakpoints if lower <= b <= upper])
        rate = operator_norm_bound(hamiltonian, samples) + 2.0 * float(np.max(hamiltonian.varpi_r))
        h = stepper.rtol ** 0.25 / rate if rate > 0 else upper - lower
        if stepper.max_step is not None:
            h = min(h, stepper.max_step)
        counts = [max(1, math.ceil((b - a) / h)) for (a, b) in slices]
        if sum(counts) > stepper.max_steps:
            raise IntegrationError("Step size underflow: %d steps of %.3g needed (max_steps=%d); "
                                   "stiff coupling at shell |p|=%.6g"
                                   % (sum(counts), h, stepper.max_steps, shell), shell=shell)
        report.update({'step': h, 'steps': sum(counts), 'rate': rate, 'local_error_scale': (rate * h) ** 5})

    full = None
    scattering = None
    evaluations = 0
    for (n, (a, b)) in enumerate(slices):
        if method is Method.rk4:
            u = _rk4_slice(hamiltonian, a, b, counts[n])
        else:
            u, nfev = _adaptive_slice(hamiltonian, a, b, stepper, shell)
            evaluations += nfev
        if not np.all(np.isfinite(u)):
            raise IntegrationError("Non-finite evolution operator entries at x=%.17g" % b, x=b, shell=shell)
        full = u if full is None else u @ full
        if eliminate:
            size = grid.size
            s = transfer_to_scattering(u.reshape(2, size, 2, size).transpose(0, 2, 1, 3))
            scattering = s if scattering is None else redheffer_star(scattering, s)
    if method is Method.adaptive:
        report['evaluations'] = evaluations
    if not np.all(np.isfinite(full)):
        raise IntegrationError("Non-finite evolution operator entries at x=%.17g" % upper, x=upper, shell=shell)
    return full, scattering, report


def evolve(v, grid, k=None, x0=None, x1=None, stepper=None):
    """
    Full grid evolution operator U(x1, x0) as a BlockOperator
    """
    stepper = stepper if stepper is not None else StepperConfig()
    hamiltonian = EffectiveHamiltonian(v, grid, k)
    support = v.support_bounds()
    x0 = support.lower if x0 is None else float(x0)
    x1 = support.upper if x1 is None else float(x1)
    if not x1 > x0:
        return BlockOperator.identity(grid)
    full, _, _ = _integrate(hamiltonian, x0, x1, v.breakpoints, stepper, eliminate=False)
    return BlockOperator.from_matrix(full, grid)


def integrate_transfer(v, grid, k=None, stepper=None):
    """
    Integrate across the support of v.
    :return: (full grid U(x_max, x_min), TransferMatrix on the propagating disk)
    """
    stepper = stepper if stepper is not None else StepperConfig()
    k = grid.k if k is None else float(k)
    propagating = grid.propagating
    support = v.support_bounds()
    if support.empty:
        LOGGER.debug("Empty support for %r: identity transfer matrix", v)
        identity = BlockOperator.identity(grid)
        report = {'method': stepper.method, 'rtol': stepper.rtol, 'steps': 0, 'slices': 0,
                  'reduction': stepper.reduction, 'seconds': 0.0}
        return identity, TransferMatrix(identity.restrict(propagating), k, report)

    LOGGER.debug("BEGIN integrate_transfer k=%.17g grid=%r window=[%.6g, %.6g]", k, grid, support.lower, support.upper)
    started = time.perf_counter()
    hamiltonian = EffectiveHamiltonian(v, grid, k)
    evanescent = grid.n_prop < grid.size
    eliminate = evanescent and Reduction(stepper.reduction) is Reduction.eliminate
    full, scattering, report = _integrate(hamiltonian, support.lower, support.upper, v.breakpoints,
                                          stepper, eliminate)
    u = BlockOperator.from_matrix(full, grid)
    if eliminate:
        restricted = scattering[:, :, propagating[:, None], propagating[None, :]]
        m = BlockOperator(scattering_to_transfer(restricted), grid, propagating.copy())
    else:
        m = u.restrict(propagating)
    report['reduction'] = stepper.reduction if evanescent else 'none'
    report['seconds'] = time.perf_counter() - started
    LOGGER.debug("END integrate_transfer %s", report)
    return u, TransferMatrix(m, k, report)


def transfer_1d(v, k, stepper=None):
    """
    2x2 transfer matrix of a one dimensional (d=0) potential
    """
    if v.d != 0:
        line = v.as_line()
        if line is None:
            raise ConfigError("transfer_1d needs a potential of x alone, found %r" % v)
        v = line
    grid = build_grid(ScatteringConfig(k=k, d=0))
    _, m = integrate_transfer(v, grid, k, stepper)
    return m.matrix()
