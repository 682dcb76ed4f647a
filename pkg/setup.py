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


from setuptools import setup, find_packages
from pyftm import version_info

setup(
  name = "pyftm",
  version = version_info,
  description="Fundamental transfer matrices for stationary potential scattering in 1D, 2D and 3D",
  license='GPLv3',
  packages=find_packages(exclude=['pyftm.tests', 'pyftm.tests.*']),
  python_requires='>=3.11',
  install_requires=['numpy', 'scipy'],
  entry_points={
    'console_scripts': ['pyftm = pyftm.cli:main'],
  },
  classifiers=[
    'Development Status :: 2 - Pre-Alpha',
    'Intended Audience :: Science/Research',
    'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
    'Programming Language :: Python :: 3.11',
    'Topic :: Scientific/Engineering :: Physics'
  ]
)
