"""Exact incremental nearest-neighbour index.

Points are bucketed into a uniform grid whose cells hold a linked list of
point positions. The grid box always contains every stored point; it grows
(and the grid is rebuilt) when an insert lands outside it, and the cell size
is re-chosen whenever the point count doubles so cells hold about two points.

Queries visit whole cells and compare exact distances computed with the same
left-to-right accumulation as :func:`ibrrt.geometry.distance`, so results are
identical to a linear scan.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .errors import UsageError

_EMPTY = np.empty(0, dtype=np.int64)
_POINTS_PER_CELL = 2.0
_MAX_CELLS = 1 << 21


class NnIndex:
    """Grid index over ``dim``-D points keyed by integer vertex id.

    ``bounds`` (a ``(lo, hi)`` pair) seeds the grid box; without it the box is
    grown around the inserted points.
    """

    def __init__(self, dim: int, bounds=None):
        if dim < 1:
            raise UsageError("index dimension must be >= 1")
        self.dim = dim
        self._points = np.empty((64, dim))
        self._ids = np.empty(64, dtype=np.int64)
        self._nxt = np.empty(64, dtype=np.int64)
        self._size = 0
        self._known: set[int] = set()
        self._lo: np.ndarray | None = None
        self._hi: np.ndarray | None = None
        if bounds is not None:
            lo = np.asarray(bounds[0], dtype=np.float64)
            hi = np.asarray(bounds[1], dtype=np.float64)
            if lo.shape != (dim,) or hi.shape != (dim,) or not np.all(hi > lo):
                raise UsageError("index bounds must be two dim-vectors with hi > lo")
            self._lo, self._hi = lo.copy(), hi.copy()
        self._built_for = 0
        self._origin = np.zeros(dim)
        self._h = 1.0
        self._dims = np.ones(dim, dtype=np.int64)
        self._head = np.full(1, -1, dtype=np.int64)

    def __len__(self) -> int:
        return self._size

    def _regrid(self) -> None:
        extent = self._hi - self._lo
        cells = min(max(1.0, self._size / _POINTS_PER_CELL), float(_MAX_CELLS))
        h = (float(np.prod(extent)) / cells) ** (1.0 / self.dim)
        h = max(h, float(extent.max()) / _MAX_CELLS)
        dims = np.maximum(1, np.ceil(extent / h)).astype(np.int64)
        while int(np.prod(dims)) > _MAX_CELLS:
            h *= 1.25
            dims = np.maximum(1, np.ceil(extent / h)).astype(np.int64)
        self._origin = self._lo.copy()
        self._h = h
        self._dims = dims
        self._head = np.full(int(np.prod(dims)), -1, dtype=np.int64)
        K.grid_rebuild(self._size, self._points, self._head, self._nxt, self._origin, self._h, self._dims)
        self._built_for = max(self._size, 1)

    def _grow_box(self, x: np.ndarray) -> None:
        if self._lo is None:
            self._lo = x - 0.5
            self._hi = x + 0.5
            return
        extent = self._hi - self._lo
        self._lo = np.minimum(self._lo, x - 0.5 * extent)
        self._hi = np.maximum(self._hi, x + 0.5 * extent)

    def insert(self, x, vid: int) -> None:
        vid = int(vid)
        if vid in self._known:
            raise UsageError(f"vertex id {vid} already indexed")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise UsageError(f"dimension mismatch: index is {self.dim}-D, point has shape {x.shape}")
        if not math.isfinite(float(x.sum())):
            raise UsageError("indexed points must be finite")
        if self._size == self._points.shape[0]:
            self._points = np.concatenate([self._points, np.empty_like(self._points)])
            self._ids = np.concatenate([self._ids, np.empty_like(self._ids)])
            self._nxt = np.concatenate([self._nxt, np.empty_like(self._nxt)])
        pos = self._size
        self._points[pos] = x
        self._ids[pos] = vid
        self._size += 1
        self._known.add(vid)
        outside = self._lo is None or not K.point_in_box(x, self._lo, self._hi)
        if outside:
            self._grow_box(x)
        if outside or self._size >= 2 * self._built_for:
            self._regrid()
        else:
            K.grid_insert(pos, self._points, self._head, self._nxt, self._origin, self._h, self._dims)

    def _check_query(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (self.dim,):
            raise UsageError(f"dimension mismatch: index is {self.dim}-D, query has shape {q.shape}")
        return q

    def nearest(self, q) -> int:
        """Id of the closest stored point; ties go to the smallest id."""
        if self._size == 0:
            raise UsageError("nearest query on an empty index")
        q = self._check_query(q)
        p = K.grid_nearest(
            q, self._size, self._points, self._ids, self._head, self._nxt, self._origin, self._h, self._dims
        )
        return int(self._ids[p])

    def near(self, q, r: float) -> np.ndarray:
        """Sorted ids of all points within the closed ball of radius ``r`` about ``q``."""
        if not r > 0.0:
            raise UsageError("near radius must be positive")
        q = self._check_query(q)
        if self._size == 0:
            return _EMPTY
        if not math.isfinite(r):
            r = float(np.finfo(np.float64).max)
        pos = K.grid_near(q, r, self._size, self._points, self._head, self._nxt, self._origin, self._h, self._dims)
        if pos.size == 0:
            return _EMPTY
        return np.sort(self._ids[pos])

    def ids(self) -> np.ndarray:
        return self._ids[: self._size].copy()

    def points(self) -> np.ndarray:
        return self._points[: self._size].copy()


def nn_insert(index: NnIndex, x, vid: int) -> None:
    index.insert(x, vid)


def nn_nearest(index: NnIndex, q) -> int:
    return index.nearest(q)


def nn_near(index: NnIndex, q, r: float) -> np.ndarray:
    return index.near(q, r)
