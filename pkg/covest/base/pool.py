# -*- coding: utf-8 -*-
#
# Copyright (C) 2019 Frootlab
#
# This file is part of Frootlab Covest, https://www.frootlab.org/covest
#
#  Covest is free software: you can redistribute it and/or modify it under the
#  terms of the GNU General Public License as published by the Free Software
#  Foundation, either version 3 of the License, or (at your option) any later
#  version.
#
#  Covest is distributed in the hope that it will be useful, but WITHOUT ANY
#  WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
#  A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#  You should have received a copy of the GNU General Public License along with
#  Covest. If not, see <http://www.gnu.org/licenses/>.
#
"""Deterministic parallel evaluation.

Work is split into blocks of fixed size, which only depend on the amount of
work and never on the number of worker threads. The blocks are evaluated by a
thread pool and their partial results are reduced in a fixed order, such that
results are bit-identical for any thread count.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import multiprocessing
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Sequence, Tuple
from covest.typing import NpArray

BLOCK_SIZE = 256
"""Number of rows per block in blocked reductions."""

REDUCTIONS = ['sequential', 'pairwise']
"""Accepted orders for the reduction of partial results."""

def get_threads(threads: int = 1) -> int:
    """Resolve number of worker threads, where zero means all cores."""
    if threads < 0:
        raise ValueError(f"'threads' is required to be >= 0, not {threads}")
    if threads == 0:
        return max(multiprocessing.cpu_count(), 1)
    return threads

def blocks(count: int, size: int = BLOCK_SIZE) -> List[Tuple[int, int]]:
    """Get half-open index ranges of consecutive blocks."""
    if size < 1:
        raise ValueError(f"'size' is required to be positive, not {size}")
    return [(i, min(i + size, count)) for i in range(0, count, size)]

def map_ordered(
        func: Callable[[Any], Any], items: Sequence[Any],
        threads: int = 1) -> List[Any]:
    """Apply function to items and return results in the order of items."""
    threads = get_threads(threads)
    if threads == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as executor:
        return list(executor.map(func, items))

def reduce_sum(partials: Sequence[Any], reduction: str = 'sequential') -> Any:
    """Sum partial results in a fixed order.

    Args:
        partials: Non-empty sequence of partial sums, given in block order.
        reduction: Name of the reduction order. Accepted values are
            'sequential', which sums from left to right and 'pairwise', which
            sums adjacent pairs until a single value remains.

    Returns:
        Sum of the partial results.

    """
    if not partials:
        raise ValueError("at least one partial result is required")
    if reduction not in REDUCTIONS:
        raise ValueError(
            f"reduction '{reduction}' is not valid, "
            f"allowed values are: {', '.join(REDUCTIONS)}")
    items = list(partials)
    if reduction == 'sequential':
        total = items[0]
        for item in items[1:]:
            total = total + item
        return total
    while len(items) > 1:
        pairs = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            pairs.append(items[-1])
        items = pairs
    return items[0]

def blocked_sum(
        func: Callable[[NpArray], Any], rows: NpArray, threads: int = 1,
        reduction: str = 'sequential', size: int = BLOCK_SIZE) -> Any:
    """Sum a function over consecutive row blocks of an array.

    Args:
        func: Function, which maps a block of rows to its partial sum.
        rows: Array, which is split along its first axis.
        threads: Number of worker threads. Zero means all cores.
        reduction: Name of the reduction order, see :func:`reduce_sum`.
        size: Number of rows per block.

    Returns:
        Sum of the partial results.

    """
    ranges = blocks(rows.shape[0], size=size)
    partials = map_ordered(
        lambda rng: func(rows[rng[0]:rng[1]]), ranges, threads=threads)
    return reduce_sum(partials, reduction=reduction)
