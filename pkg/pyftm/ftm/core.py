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
Momentum-space discretization, dispersion functions and the dense 2x2 block
operator algebra shared by the rest of the package.
"""

import dataclasses
import logging
import math
import numbers

import numpy as np

LOGGER = logging.getLogger(__name__)

DEFAULT_EXCLUSION = 1e-6


class ScatteringError(Exception):
    pass


class ConfigError(ScatteringError):
    pass


class GridError(ConfigError):
    pass


class PotentialError(ScatteringError):
    pass


class AliasingError(PotentialError):
    pass


class IntegrationError(ScatteringError):
    def __init__(self, message, x=None, shell=None):
        super().__init__(message)
        self.x = x
        self.shell = shell


class SingularityError(ScatteringError):
    def __init__(self, message, sigma_min=None, condition=None):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.condition = condition


class SymmetryError(ScatteringError):
    pass


class OracleError(ScatteringError):
    pass


@dataclasses.dataclass(frozen=True)
class ScatteringConfig:
    """
    Wavenumber, transverse dimension and momentum lattice parameters.

    d=0 is the one dimensional problem (empty transverse grid), d=1 and d=2
    are the 2D and 3D problems. p_max=None means 2k.
    """
    k: float
    d: int = 1
    p_max: float | None = None
    n_per_axis: int = 32
    grid_offset: bool = True
    exclusion: float = DEFAULT_EXCLUSION

    def __post_init__(self):
        if not (isinstance(self.k, numbers.Real) and math.isfinite(self.k) and self.k > 0):
            raise ConfigError("Wavenumber k must be a finite positive number, found %r" % (self.k,))
        if self.d not in (0, 1, 2):
            raise ConfigError("Transverse dimension d must be 0, 1 or 2, found %r" % (self.d,))
        if self.p_max is not None and not self.p_max >= self.k:
            raise ConfigError("Momentum cutoff p_max=%r is smaller than k=%r" % (self.p_max, self.k))
        if self.d > 0:
            if not isinstance(self.n_per_axis, int) or self.n_per_axis <= 0 or self.n_per_axis % 2:
                raise ConfigError("n_per_axis must be an even positive integer, found %r" % (self.n_per_axis,))
        if not self.exclusion > 0:
            raise ConfigError("Exclusion band must be positive, found %r" % (self.exclusion,))

    @property
    def cutoff(self):
        return 2.0 * self.k if self.p_max is None else float(self.p_max)

    def for_wavenumber(self, k):
        """
        Same lattice parameters at another wavenumber (scans rebuild one grid per k)
        """
        return dataclasses.replace(self, k=float(k))


@dataclasses.dataclass(frozen=True, eq=False)
class MomentumGrid:
    """
    Transverse momentum lattice.

    points has shape (N, d); weights are the midpoint quadrature weights;
    propagating holds the indices of the disk |p| < k and parity_perm maps
    each index to the index of -p.
    """
    d: int
    k: float
    points: np.ndarray
    weights: np.ndarray
    propagating: np.ndarray
    parity_perm: np.ndarray
    spacing: float

    @property
    def size(self):
        return len(self.weights)

    @property
    def n_prop(self):
        return len(self.propagating)

    @property
    def norms(self):
        return np.linalg.norm(self.points, axis=1)

    def __repr__(self):
        return "MomentumGrid(d=%r,k=%r,size=%r,n_prop=%r,spacing=%r)" % (
            self.d, self.k, self.size, self.n_prop, self.spacing)


def _axis(cfg):
    p_max = cfg.cutoff
    if cfg.grid_offset:
        n = cfg.n_per_axis
        spacing = 2.0 * p_max / n
        return (np.arange(n) - (n - 1) / 2.0) * spacing, spacing
    # unstaggered lattice keeps p=0 and needs the odd point count
    n = cfg.n_per_axis + 1
    spacing = 2.0 * p_max / cfg.n_per_axis
    return (np.arange(n) - (n - 1) / 2.0) * spacing, spacing


def build_grid(cfg):
    """
    Build the parity symmetric lattice on [-p_max, p_max]^d for cfg.
    :raise GridError: if a point falls inside the exclusion band around |p|=k
    """
    if cfg.d == 0:
        return MomentumGrid(d=0, k=cfg.k,
                            points=np.zeros((1, 0)),
                            weights=np.ones(1),
                            propagating=np.zeros(1, dtype=int),
                            parity_perm=np.zeros(1, dtype=int),
                            spacing=0.0)

    axis, spacing = _axis(cfg)
    mesh = np.meshgrid(*([axis] * cfg.d), indexing='ij')
    points = np.stack([m.ravel() for m in mesh], axis=1)
    norms = np.linalg.norm(points, axis=1)

    gap = np.abs(norms - cfg.k)
    if np.any(gap < cfg.exclusion * cfg.k):
        worst = int(np.argmin(gap))
        raise GridError("Grid resonant with dispersion circle: point %r lies at |p|=%.17g for k=%.17g; "
                        "change n_per_axis or p_max" % (points[worst].tolist(), norms[worst], cfg.k))

    # C-order raveling of a symmetric lattice: reversing every axis reverses the flat index
    parity_perm = np.arange(len(points))[::-1].copy()
    if not np.array_equal(points[parity_perm], -points):
        raise GridError("Lattice is not closed under p -> -p")

    grid = MomentumGrid(d=cfg.d, k=cfg.k,
                        points=points,
                        weights=np.full(len(points), spacing ** cfg.d),
                        propagating=np.flatnonzero(norms < cfg.k),
                        parity_perm=parity_perm,
                        spacing=spacing)
    LOGGER.debug("Built %r", grid)
    return grid


def varpi(p, k):
    """
    Longitudinal wavenumber sqrt(k^2 - p^2), continued as i*sqrt(p^2 - k^2)
    outside the propagating disk.
    :param p: transverse momentum vector, array of vectors (last axis), or scalar |p|
    """
    p = np.asarray(p, dtype=float)
    p2 = p * p if p.ndim == 0 else np.sum(p * p, axis=-1)
    k2 = float(k) * float(k)
    result = np.where(p2 < k2,
                      np.sqrt(np.maximum(k2 - p2, 0.0)) + 0j,
                      1j * np.sqrt(np.maximum(p2 - k2, 0.0)))
    return result[()] if result.ndim == 0 else result


def varpi_values(grid, k=None):
    return np.atleast_1d(varpi(grid.points, grid.k if k is None else k))


def diag_varpi_family(grid, k=None):
    """
    Diagonal matrices (varpi, varpi_r, varpi_i) with varpi_i = i(varpi_r - varpi),
    so varpi = varpi_r + i*varpi_i and varpi_i >= 0
    """
    w = varpi_values(grid, k)
    return np.diag(w), np.diag(w.real), np.diag(w.imag)


@dataclasses.dataclass(frozen=True, eq=False)
class BlockOperator:
    """
    2x2 block of NxN complex matrices acting on two-component grid functions.

    indices are the grid indices the rows and columns live on (None for the
    whole grid).
    """
    blocks: np.ndarray
    grid: MomentumGrid
    indices: np.ndarray | None = None

    def __post_init__(self):
        shape = np.shape(self.blocks)
        if len(shape) != 4 or shape[:2] != (2, 2) or shape[2] != shape[3]:
            raise ValueError("Blocks must have shape (2, 2, N, N), found %r" % (shape,))

    @property
    def size(self):
        return self.blocks.shape[-1]

    @property
    def grid_indices(self):
        return np.arange(self.grid.size) if self.indices is None else self.indices

    def block(self, row, col):
        return self.blocks[row, col]

    def matrix(self):
        n = self.size
        return self.blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)

    @classmethod
    def from_matrix(cls, matrix, grid, indices=None):
        matrix = np.asarray(matrix, dtype=complex)
        n = matrix.shape[0] // 2
        blocks = matrix.reshape(2, n, 2, n).transpose(0, 2, 1, 3).copy()
        return cls(blocks, grid, indices)

    @classmethod
    def from_blocks(cls, b11, b12, b21, b22, grid, indices=None):
        blocks = np.array([[b11, b12], [b21, b22]], dtype=complex)
        return cls(blocks, grid, indices)

    @classmethod
    def identity(cls, grid, indices=None):
        n = grid.size if indices is None else len(indices)
        blocks = np.zeros((2, 2, n, n), dtype=complex)
        blocks[0, 0] = np.eye(n)
        blocks[1, 1] = np.eye(n)
        return cls(blocks, grid, indices)

    def restrict(self, indices):
        """
        Rows and columns of every block restricted to indices (relative to this operator)
        """
        indices = np.asarray(indices, dtype=int)
        sub = self.blocks[:, :, indices[:, None], indices[None, :]]
        return BlockOperator(sub.copy(), self.grid, self.grid_indices[indices])

    def __matmul__(self, other):
        if self.size != other.size:
            raise ValueError("Block size mismatch %d != %d" % (self.size, other.size))
        product = np.einsum('abij,bcjk->acik', self.blocks, other.blocks)
        return BlockOperator(product, self.grid, self.indices)

    def __repr__(self):
        return "BlockOperator(size=%r,grid=%r)" % (self.size, self.grid)


@dataclasses.dataclass(frozen=True, eq=False)
class TransferMatrix:
    """
    Fundamental transfer matrix restricted to the propagating disk.
    """
    operator: BlockOperator
    k: float
    report: dict = dataclasses.field(default_factory=dict)

    @property
    def grid(self):
        return self.operator.grid

    @property
    def indices(self):
        return self.operator.grid_indices

    @property
    def m11(self):
        return self.operator.blocks[0, 0]

    @property
    def m12(self):
        return self.operator.blocks[0, 1]

    @property
    def m21(self):
        return self.operator.blocks[1, 0]

    @property
    def m22(self):
        return self.operator.blocks[1, 1]

    @property
    def size(self):
        return self.operator.size

    def matrix(self):
        return self.operator.matrix()

    def __repr__(self):
        return "TransferMatrix(k=%r,size=%r,d=%r)" % (self.k, self.size, self.grid.d)


def propagating_parity(grid):
    """
    Parity permutation restricted to the propagating disk, as positions in grid.propagating
    :raise GridError: if the disk is not closed under p -> -p
    """
    position = np.full(grid.size, -1)
    position[grid.propagating] = np.arange(grid.n_prop)
    permutation = position[grid.parity_perm[grid.propagating]]
    if np.any(permutation < 0):
        raise GridError("Propagating subset of %r is not closed under p -> -p" % (grid,))
    return permutation
