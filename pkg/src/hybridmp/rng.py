"""Reproducible random streams for indexed sample batches.

Samples are numbered 0, 1, 2, ... within a named stream.  Consecutive indices
are grouped into blocks of ``BLOCK`` and every block gets its own
``random.Random`` seeded from ``(master_seed, stream, block)``.  A block is the
unit of work handed to a worker, so the output for a given index never depends
on how many workers were used.

Seeding a Mersenne Twister costs about as much as drawing a small sample, which
is why streams are per block rather than per sample.  Callers whose work per
index is large can ask for ``block=1``, giving every index a private stream.
"""

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor

BLOCK = 64

# stream tags, one per independent phase
MISINFO_SELECTION = "misinfo-selection"
LOWER_BOUND = "lower-bound"
FRAMEWORK = "framework"
EVALUATION = "evaluation"
UNIFORM = "uniform"


def block_seed(master_seed, stream, block):
    key = f"{int(master_seed)}:{stream}:{int(block)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=16).digest(), "big")


def block_rng(master_seed, stream, block):
    return random.Random(block_seed(master_seed, stream, block))


def blocks_for(start, stop, size=BLOCK):
    """Block numbers covering the index range [start, stop)."""
    if stop <= start:
        return range(0)
    return range(start // size, (stop - 1) // size + 1)


_context = None


def _set_context(context):
    global _context
    _context = context


def _run_block(fn, context, master_seed, stream, block, start, stop, size):
    rng = block_rng(master_seed, stream, block)
    lo = block * size
    hi = min(stop, (block + 1) * size)
    out = []
    for i in range(lo, hi):
        r = fn(context, rng)
        if i >= start:
            out.append(r)
    return out


def _run_blocks_in_worker(fn, master_seed, stream, blocks, start, stop, size):
    out = []
    for b in blocks:
        out.extend(_run_block(fn, _context, master_seed, stream, b, start, stop, size))
    return out


def run_indexed(fn, context, master_seed, stream, start, stop, workers=1, block=BLOCK):
    """Return ``[fn(context, rng) for each index in [start, stop)]``.

    ``fn`` is called once per index with its block's shared rng.  Indices of the
    first block that lie before ``start`` are executed and discarded, so index
    ``start`` sees the same rng state it would in a run beginning at 0.

    With ``workers > 1`` whole blocks are farmed out to a process pool; ``fn``
    must then be a module-level function and ``context`` picklable.  Results are
    identical for every worker count.  A stream must always be used with the
    same ``block`` size.
    """
    blocks = blocks_for(start, stop, block)
    if workers <= 1 or len(blocks) <= 1:
        out = []
        for b in blocks:
            out.extend(_run_block(fn, context, master_seed, stream, b, start, stop, block))
        return out
    # hand out runs of consecutive blocks so tiny blocks do not drown in overhead
    per_task = max(1, BLOCK // block)
    chunks = [blocks[i:i + per_task] for i in range(0, len(blocks), per_task)]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_set_context, initargs=(context,)
    ) as pool:
        futures = [
            pool.submit(_run_blocks_in_worker, fn, master_seed, stream, c, start, stop, block)
            for c in chunks
        ]
        out = []
        for fut in futures:
            out.extend(fut.result())
    return out
