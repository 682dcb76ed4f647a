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

import hashlib
import logging
import os

LOGGER = logging.getLogger(__name__)


def read_text(file):
    """
    Read a whole UTF-8 text file
    :param file: path to read
    :return: file content, or None if the file can't be read
    """
    try:
        LOGGER.debug("BEGIN read_text %s", file)
        with open(file, encoding='utf-8') as fp:
            content = fp.read()
    except PermissionError:
        LOGGER.warning("Permission error while reading %s.", file)
        return None
    except Exception as e:
        LOGGER.warning("Exception while reading file %s : %s", file, e)
        return None
    LOGGER.debug("END read_text %s", file)
    return content


def write_text(file, content):
    """
    Write UTF-8 text with LF line endings, creating parent directories
    :return: sha256 hex digest of the written bytes
    """
    directory = os.path.dirname(os.path.abspath(file))
    os.makedirs(directory, exist_ok=True)
    data = content.encode('utf-8')
    with open(file, 'wb') as fp:
        fp.write(data)
    LOGGER.debug("Wrote %d bytes to %s", len(data), file)
    return sha256_bytes(data)


def sha256_bytes(data):
    return hashlib.sha256(data).hexdigest()


def sha256_file(file):
    digest = hashlib.sha256()
    with open(file, 'rb') as fp:
        for chunk in iter(lambda: fp.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
