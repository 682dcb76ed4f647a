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

VERSION = (0, 1, 0, 'alpha', 0)


def _check_requirements():
    #Check python >= 3.11 (tomllib)
    import sys
    if sys.version_info < (3, 11):
        raise ImportError("Python 3.11 or more is required")

_check_requirements()

#setup version
from pyftm.utils.version import get_pretty_version
version_info = get_pretty_version(VERSION)
