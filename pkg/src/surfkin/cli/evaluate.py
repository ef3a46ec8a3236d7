"""Grid evaluation fanned out over fixed row blocks.

Blocks do not depend on the worker count, and every quantity is computed
pointwise, so results are identical for any ``SURFKIN_THREADS`` value.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ConfigError

BLOCK_ROWS = 8
THREADS_ENV = "SURFKIN_THREADS"


def worker_count(env=None):
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return max(1, min(os.cpu_count() or 1, 8))
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def interior_grid(chart, cells, margin):
    """Node indices and parameters of the grid with ``margin`` cells stripped on every side."""
    nu, nv = cells
    U, V = chart.grid(nu, nv)
    I, J = np.meshgrid(np.arange(nu + 1), np.arange(nv + 1), indexing="ij")
    sl = (slice(margin, nu + 1 - margin), slice(margin, nv + 1 - margin))
    return I[sl], J[sl], U[sl], V[sl]


def evaluate(fn, U, V, workers=None):
    """Apply ``fn(u, v) -> dict[str, array]`` on row blocks and reassemble by grid position."""
    workers = worker_count() if workers is None else workers
    starts = range(0, U.shape[0], BLOCK_ROWS)
    blocks = [(U[s : s + BLOCK_ROWS], V[s : s + BLOCK_ROWS]) for s in starts]
    if workers == 1 or len(blocks) == 1:
        parts = [fn(u, v) for u, v in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), blocks))
    return {k: np.concatenate([p[k] for p in parts], axis=0) for k in parts[0]}
