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

import asyncio
import datetime
import logging
import os
import platform
import subprocess

LOGGER = logging.getLogger(__name__)

_RELEASE_MAPPING = {'alpha': 'a', 'beta': 'b', 'rc': 'c'}


async def _get_git_changeset():
    """Returns a numeric identifier of the latest git changeset.

    The result is the UTC timestamp of the changeset in YYYYMMDDHHMMSS format,
    or None outside a git checkout.
    """
    repo_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    try:
        git_log = await asyncio.create_subprocess_exec(
            'git', 'log', '--pretty=format:%ct', '--quiet', '-1', 'HEAD',
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, cwd=repo_dir)
        (stdout, stderr) = await git_log.communicate()
    except OSError as e:
        LOGGER.debug("git not available: %s", e)
        return None
    try:
        timestamp = datetime.datetime.fromtimestamp(int(stdout), tz=datetime.timezone.utc)
    except ValueError:
        return None
    return timestamp.strftime('%Y%m%d%H%M%S')


async def _get_version(version):
    "Returns a PEP 386-compliant version number from VERSION."

    # main = X.Y[.Z]
    # sub = .devN - for pre-alpha releases
    # | {a|b|c}N - for alpha, beta and rc releases
    parts = 2 if version[2] == 0 else 3
    main = '.'.join(str(x) for x in version[:parts])

    sub = ''
    if version[3] == 'alpha' and version[4] == 0:
        changeset = await _get_git_changeset()
        if changeset:
            sub = '.dev%s' % changeset

    elif version[3] != 'final':
        sub = _RELEASE_MAPPING[version[3]] + str(version[4])

    return str(main + sub)


def get_pretty_version(v):
    return asyncio.run(_get_version(v))


def runtime_versions():
    """
    Versions of the interpreter and numerical stack, recorded in run manifests
    """
    import numpy
    import scipy
    import pyftm
    return {'pyftm': pyftm.version_info,
            'python': platform.python_version(),
            'numpy': numpy.__version__,
            'scipy': scipy.__version__}
