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
Scattering amplitudes, reflection/transmission kernels and S-matrices from a
fundamental transfer matrix.

Grid kernels follow <p_i|L|p_j> = L[i, j] / w_j, the identity kernel being
delta_ij / w_j.
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

from pyftm.ftm.core import (ConfigError, GridError, ScatteringError, BlockOperator, build_grid, varpi,
                            varpi_values, propagating_parity)
from pyftm.ftm.evolution import StepperConfig, integrate_transfer, transfer_to_scattering, check_invertible
from pyftm.utils.tasks import map_concurrently

LOGGER = logging.getLogger(__name__)

GRAZING = 1e-6
SINGULARITY_RATIO = 1e-3


def c_d(d, k):
    """
    (2 pi i)^(d/2) k^(1 - d/2)
    """
    return complex((2j * math.pi) ** (d / 2.0) * k ** (1.0 - d / 2.0))


@dataclasses.dataclass(frozen=True, eq=False)
class Direction:
    """
    Unit vector n = (n_x, n_perp) in d+1 dimensions, grazing directions excluded
    """
    vector: np.ndarray

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=float).reshape(-1)
        object.__setattr__(self, 'vector', vector)
        if abs(np.linalg.norm(vector) - 1.0) > 1e-12:
            raise ConfigError("Direction %r is not a unit vector" % (vector.tolist(),))
        if abs(vector[0]) < GRAZING:
            raise ConfigError("Grazing direction %r (|n_x| < %g) has no scattering amplitude"
                              % (vector.tolist(), GRAZING))

    @property
    def d(self):
        return len(self.vector) - 1

    @property
    def nx(self):
        return float(self.vector[0])

    @property
    def transverse(self):
        return self.vector[1:]

    @property
    def sign(self):
        return 1 if self.vector[0] > 0 else -1

    def __neg__(self):
        return Direction(-self.vector)

    def key(self):
        return tuple(self.vector.tolist())

    @classmethod
    def from_angles(cls, d, theta, phi=0.0):
        """
        theta is measured from the +x axis; for d=0 only theta in {0, pi} is meaningful
        """
        if d == 0:
            return cls(np.array([1.0 if math.cos(theta) > 0 else -1.0]))
        if d == 1:
            return cls(np.array([math.cos(theta), math.sin(theta)]))
        return cls(np.array([math.cos(theta), math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi)]))

    @classmethod
    def from_grid_point(cls, grid, index, sign=1, k=None):
        """
        Direction whose transverse momentum k n_perp is exactly grid point index
        """
        k = grid.k if k is None else float(k)
        p = grid.points[index]
        w = varpi(p, k)
        if w.imag != 0:
            raise ConfigError("Grid point %r is not propagating at k=%r" % (p.tolist(), k))
        return cls(np.concatenate([[sign * w.real / k], p / k]))

    def __repr__(self):
        return "Direction(%r)" % (self.vector.tolist(),)


def snap_direction(grid, direction, k=None):
    """
    Nearest propagating grid point to k n_perp
    :return: (position in grid.propagating, snap distance)
    :raise ConfigError: farther than half a cell from every propagating point
    """
    k = grid.k if k is None else float(k)
    if direction.d != grid.d:
        raise ConfigError("Direction of dimension %d on a d=%d grid" % (direction.d + 1, grid.d))
    if grid.d == 0:
        return 0, 0.0
    target = k * direction.transverse
    offsets = grid.points[grid.propagating] - target[None, :]
    distances = np.linalg.norm(offsets, axis=1)
    position = int(np.argmin(distances))
    if np.max(np.abs(offsets[position])) > 0.5 * grid.spacing * (1.0 + 1e-9):
        raise ConfigError("Direction %r is more than half a cell away from the propagating grid" % (direction,))
    return position, float(distances[position])


def on_grid_directions(grid, k=None):
    """
    All directions whose transverse momenta are propagating grid points, both signs of n_x
    """
    directions = []
    for sign in (1, -1):
        for index in grid.propagating:
            directions.append(Direction.from_grid_point(grid, index, sign, k))
    return directions


def reciprocal_pairs(grid, count, seed=0, k=None):
    """
    count seeded on-grid (n0, n) pairs; each reciprocal pair (-n, -n0) is on-grid too
    """
    directions = on_grid_directions(grid, k)
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        (a, b) = rng.integers(0, len(directions), size=2)
        pairs.append((directions[a], directions[b]))
    return pairs


class AmplitudeSolver:
    """
    Amplitude evaluation on one transfer matrix with a single LU factorization of M22.
    """
    def __init__(self, m):
        self.m = m
        self.k = m.k
        self.grid = m.grid
        self.d = m.grid.d
        self.sigma_min, self.condition = check_invertible(m.m22, scale=np.linalg.norm(m.matrix(), 2))
        self._lu = linalg.lu_factor(m.m22)
        self.weights = self.grid.weights[m.indices]
        self.varpi = varpi_values(self.grid, self.k)[m.indices].real
        self.c_d = c_d(self.d, self.k)
        self.parity = propagating_parity(self.grid)

    def _unit(self, j):
        e = np.zeros(self.m.size, dtype=complex)
        e[j] = 1.0
        return e

    def column(self, incident_sign, outgoing_sign, j):
        """
        Column j of the (incident, outgoing) quadrant operator, identity subtracted in the transmission quadrants
        """
        m = self.m
        if incident_sign > 0 and outgoing_sign > 0:
            return m.m11[:, j] - m.m12 @ linalg.lu_solve(self._lu, m.m21[:, j]) - self._unit(j)
        if incident_sign > 0:
            return -linalg.lu_solve(self._lu, m.m21[:, j])
        if outgoing_sign > 0:
            return m.m12 @ linalg.lu_solve(self._lu, self._unit(j))
        return linalg.lu_solve(self._lu, self._unit(j)) - self._unit(j)

    def snap(self, direction):
        return snap_direction(self.grid, direction, self.k)

    def amplitude(self, n0, n):
        """
        :return: (f(n0, n), snap distance of n0, snap distance of n)
        """
        (j, snap0) = self.snap(n0)
        (i, snap1) = self.snap(n)
        kernel = self.column(n0.sign, n.sign, j)[i] / self.weights[j]
        f = (2.0 * math.pi) ** self.d * self.varpi[j] / self.c_d * kernel
        return complex(f), snap0, snap1

    def rt(self, n0, n):
        """
        Reflection or transmission amplitude of the sign-compatible quadrant, with the singular
        part of transmission split off
        """
        (j, _) = self.snap(n0)
        (i, _) = self.snap(n)
        scale = (2.0 * math.pi) ** self.d * self.k ** (self.d - 1) * self.varpi[j] / self.weights[j]
        smooth = complex(scale * self.column(n0.sign, n.sign, j)[i])
        if n0.sign != n.sign:
            name = 'R^l' if n0.sign > 0 else 'R^r'
            return {name: smooth}
        singular = complex(scale) if i == j else 0.0j
        name = 'T^l' if n0.sign > 0 else 'T^r'
        result = {name: smooth + singular, name + '_smooth': smooth, name + '_singular': singular}
        if n0.sign > 0:
            result['T^l_alt'] = self.transmission_left_alt(i, j)
        return result

    def transmission_left_alt(self, i, j):
        """
        T^l from <k0| P M22^-1 P |k>, independent of M11, M12, M21
        """
        column = linalg.lu_solve(self._lu, self._unit(self.parity[i]))
        value = column[self.parity[j]] / self.weights[i]
        return complex((2.0 * math.pi) ** self.d * self.k ** (self.d - 1) * self.varpi[i] * value)


def scattering_amplitude(m, n0, n):
    f, _, _ = AmplitudeSolver(m).amplitude(n0, n)
    return f


def rt_amplitudes(m, n0, n):
    return AmplitudeSolver(m).rt(n0, n)


def assemble_S(m):
    """
    [[M11 - M12 M22^-1 M21, M12 M22^-1], [-M22^-1 M21, M22^-1]]
    """
    blocks = transfer_to_scattering(m.operator.blocks, guard=True)
    return BlockOperator(blocks, m.grid, m.indices)


def assemble_S_prime(m, s=None):
    """
    sigma_1 S: block rows of S swapped
    """
    s = assemble_S(m) if s is None else s
    return BlockOperator(s.blocks[::-1].copy(), s.grid, s.indices)


@dataclasses.dataclass
class ScatteringData:
    """
    Sampled amplitudes, R/T kernels and S-matrices of one transfer matrix
    """
    k: float
    d: int
    c_d: complex
    grid: object
    indices: np.ndarray
    S: BlockOperator
    S_prime: BlockOperator
    rt_kernels: dict
    f_samples: dict = dataclasses.field(default_factory=dict)
    snap_distances: dict = dataclasses.field(default_factory=dict)
    sigma_min: float = 1.0
    condition: float = 1.0


def rt_kernels(m, s=None):
    """
    The four R/T kernels on the propagating grid, kernel[i, j] for k = p_i, k0 = p_j.

    Transmission kernels are split in smooth and singular (delta) parts.
    """
    s = assemble_S(m) if s is None else s
    d = m.grid.d
    w = m.grid.weights[m.indices]
    varpi_prop = varpi_values(m.grid, m.k)[m.indices].real
    scale = ((2.0 * math.pi) ** d * m.k ** (d - 1) * varpi_prop / w)[None, :]
    identity = np.eye(m.size)
    singular = scale * identity
    kernels = {'R^l': scale * s.blocks[1, 0],
               'R^r': scale * s.blocks[0, 1],
               'T^l_smooth': scale * (s.blocks[0, 0] - identity),
               'T^r_smooth': scale * (s.blocks[1, 1] - identity),
               'T_singular': singular}
    kernels['T^l'] = kernels['T^l_smooth'] + singular
    kernels['T^r'] = kernels['T^r_smooth'] + singular
    parity = propagating_parity(m.grid)
    flipped = s.blocks[1, 1][np.ix_(parity, parity)]
    kernels['T^l_alt'] = ((2.0 * math.pi) ** d * m.k ** (d - 1) * varpi_prop[:, None] * flipped.T / w[:, None])
    return kernels


def scattering_data(m, pairs=()):
    """
    S, S', R/T kernels and f on the requested (n0, n) pairs
    """
    solver = AmplitudeSolver(m)
    s = assemble_S(m)
    data = ScatteringData(k=m.k, d=m.grid.d, c_d=solver.c_d, grid=m.grid, indices=m.indices,
                          S=s, S_prime=assemble_S_prime(m, s), rt_kernels=rt_kernels(m, s),
                          sigma_min=solver.sigma_min, condition=solver.condition)
    for (n0, n) in pairs:
        sample(data, solver, n0, n)
    return data


def sample(data, solver, n0, n):
    f, snap0, snap1 = solver.amplitude(n0, n)
    data.f_samples[(n0.key(), n.key())] = f
    data.snap_distances[(n0.key(), n.key())] = max(snap0, snap1)
    return f


def transparency_reflectionless_check(m, n0, tol=1e-8):
    """
    Directional transparency and reflectionlessness along n0
    """
    (j, _) = snap_direction(m.grid, n0, m.k)
    parity = propagating_parity(m.grid)
    e = np.zeros(m.size, dtype=complex)
    if n0.sign > 0:
        e[parity[j]] = 1.0
        transparency = np.linalg.norm(m.m22.conj().T @ e - e)
        reflection = np.linalg.norm(m.m21[:, j])
    else:
        e[j] = 1.0
        transparency = np.linalg.norm(m.m22 @ e - e)
        reflection = np.linalg.norm(m.m12.conj().T[:, parity[j]])
    return {'transparent': {'value': bool(transparency < tol), 'residual': float(transparency)},
            'reflectionless': {'value': bool(reflection < tol), 'residual': float(reflection)}}


def omnidirectional_check(m, tol=1e-8):
    """
    M22 = I (omnidirectional transparency) and M12 = M21 = 0 (omnidirectional reflectionlessness)
    """
    transparency = np.linalg.norm(m.m22 - np.eye(m.size))
    reflection = max(np.linalg.norm(m.m12), np.linalg.norm(m.m21))
    return {'transparent': {'value': bool(transparency < tol), 'residual': float(transparency)},
            'reflectionless': {'value': bool(reflection < tol), 'residual': float(reflection)}}


@dataclasses.dataclass
class SingularityScan:
    k: np.ndarray
    sigma_min: np.ndarray
    condition: np.ndarray
    candidates: list
    threshold: float
    skipped: list

    def rows(self):
        return [(float(k), float(s), float(c)) for (k, s, c) in zip(self.k, self.sigma_min, self.condition)]


def m22_spectrum(v, cfg, k, stepper=None):
    """
    (sigma_min, condition number) of M22 at wavenumber k
    """
    grid = build_grid(cfg.for_wavenumber(k))
    _, m = integrate_transfer(v, grid, k, stepper)
    sigma = linalg.svdvals(m.m22)
    sigma_min = float(sigma[-1])
    return sigma_min, (math.inf if sigma_min == 0 else float(sigma[0]) / sigma_min)


def spectral_singularity_scan(v, cfg, k_range, n_samples, stepper=None, ratio=SINGULARITY_RATIO,
                              max_workers=None):
    """
    Scan sigma_min(M22) over k_range; local minima are refined by golden section and kept as
    spectral singularity candidates when below ratio * median(sigma_min).
    """
    (k_low, k_high) = (float(k_range[0]), float(k_range[1]))
    if not 0 < k_low < k_high:
        raise ConfigError("Scan range must be positive and increasing, found %r" % (k_range,))
    if n_samples < 3:
        raise ConfigError("A scan needs at least 3 samples, found %r" % (n_samples,))
    stepper = stepper if stepper is not None else StepperConfig()
    ks = np.linspace(k_low, k_high, n_samples)

    def evaluate(k):
        try:
            return m22_spectrum(v, cfg, k, stepper)
        except GridError as e:
            LOGGER.warning("Skipping k=%.17g: %s", k, e)
            return None

    LOGGER.debug("BEGIN spectral_singularity_scan %r samples=%d", k_range, n_samples)
    results = map_concurrently(evaluate, ks.tolist(), max_workers)
    skipped = [float(k) for (k, r) in zip(ks, results) if r is None]
    kept = [(k, r) for (k, r) in zip(ks, results) if r is not None]
    k_values = np.array([k for (k, _) in kept])
    sigma = np.array([r[0] for (_, r) in kept])
    condition = np.array([r[1] for (_, r) in kept])
    threshold = ratio * float(np.median(sigma)) if len(sigma) else 0.0

    def objective(k):
        try:
            return m22_spectrum(v, cfg, k, stepper)[0]
        except GridError:
            return math.inf

    candidates = []
    for i in range(1, len(sigma) - 1):
        if not (sigma[i] < sigma[i - 1] and sigma[i] <= sigma[i + 1]):
            continue
        try:
            refined = minimize_scalar(objective, bracket=(k_values[i - 1], k_values[i], k_values[i + 1]),
                                      method='golden', tol=1e-10)
            (k_star, s_star) = (float(refined.x), float(refined.fun))
        except (ValueError, ScatteringError) as e:
            LOGGER.debug("Golden section refinement failed near k=%.6g: %s", k_values[i], e)
            (k_star, s_star) = (float(k_values[i]), float(sigma[i]))
        if s_star < threshold:
            candidates.append({'k': k_star, 'sigma_min': s_star, 'scan_k': float(k_values[i])})

    # adjacent minima collapsing onto one singularity keep the smaller sigma_min
    spacing = (k_high - k_low) / (n_samples - 1)
    merged = []
    for candidate in sorted(candidates, key=lambda c: c['k']):
        if merged and abs(candidate['k'] - merged[-1]['k']) < spacing:
            if candidate['sigma_min'] < merged[-1]['sigma_min']:
                merged[-1] = candidate
        else:
            merged.append(candidate)
    LOGGER.debug("END spectral_singularity_scan candidates=%r", merged)
    return SingularityScan(k_values, sigma, condition, merged, threshold, skipped)


def wavenumber_scan(v, cfg, ks, stepper=None, max_workers=None):
    """
    Transfer matrices at each k (grids rebuilt per k), ordered as ks
    """
    def evaluate(k):
        grid = build_grid(cfg.for_wavenumber(k))
        return integrate_transfer(v, grid, k, stepper)[1]

    return map_concurrently(evaluate, [float(k) for k in ks], max_workers)


__all__ = ['c_d', 'Direction', 'snap_direction', 'on_grid_directions', 'reciprocal_pairs', 'AmplitudeSolver',
           'scattering_amplitude', 'rt_amplitudes', 'assemble_S', 'assemble_S_prime', 'ScatteringData',
           'rt_kernels', 'scattering_data', 'sample', 'transparency_reflectionless_check',
           'omnidirectional_check', 'SingularityScan', 'm22_spectrum', 'spectral_singularity_scan',
           'wavenumber_scan']
