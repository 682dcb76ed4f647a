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
from .core import ScatteringError, ConfigError, GridError, PotentialError, AliasingError
from .core import IntegrationError, SingularityError, SymmetryError, OracleError
from .core import ScatteringConfig, MomentumGrid, BlockOperator, TransferMatrix
from .core import build_grid, varpi, varpi_values

from .potential import potential_from_config, zero_potential, gaussian_mixture
from .hamiltonian import EffectiveHamiltonian, assemble_V, assemble_H
from .evolution import StepperConfig, integrate_transfer, transfer_1d
from .scattering import Direction, scattering_amplitude, rt_amplitudes, assemble_S, assemble_S_prime
from .scattering import spectral_singularity_scan
from .symmetry import build_symmetry, verify_identities
