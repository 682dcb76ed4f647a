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
import logging
import os
from concurrent.futures import ThreadPoolExecutor

LOGGER = logging.getLogger(__name__)

THREADS_ENV = 'PYFTM_THREADS'


def default_workers():
    """
    Worker count from the PYFTM_THREADS environment variable, None (executor default) otherwise
    """
    value = os.environ.get(THREADS_ENV)
    if not value:
        return None
    try:
        workers = int(value)
    except ValueError:
        LOGGER.warning("Ignoring %s=%r: not an integer", THREADS_ENV, value)
        return None
    return workers if workers > 0 else None


async def gather_in_executor(func, items, max_workers=None, loop=None):
    """
    Run func on every item in a thread pool; results keep the order of items
    """
    _loop = loop if loop is not None else asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        LOGGER.debug("BEGIN gather_in_executor %d jobs (max_workers=%r)", len(items), max_workers)
        results = await asyncio.gather(*(_loop.run_in_executor(pool, func, item) for item in items))
        LOGGER.debug("END gather_in_executor")
    return list(results)


def map_concurrently(func, items, max_workers=None):
    items = list(items)
    if max_workers is None:
        max_workers = default_workers()
    return asyncio.run(gather_in_executor(func, items, max_workers))
