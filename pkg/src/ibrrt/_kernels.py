"""Compiled inner loops for collision checks and the grid neighbour index.

Squared components are accumulated left to right exactly as in
:func:`ibrrt.geometry.distance`, so compiled and pure-Python distances agree
bit for bit.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def dist(p, q):
    acc = 0.0
    for k in range(q.shape[0]):
        d = p[k] - q[k]
        acc += d * d
    if acc == 0.0 or acc == np.inf:
        m = 0.0
        for k in range(q.shape[0]):
            m = max(m, abs(p[k] - q[k]))
        if m == 0.0 or m == np.inf:
            return m
        acc = 0.0
        for k in range(q.shape[0]):
            d = (p[k] - q[k]) / m
            acc += d * d
        return m * math.sqrt(acc)
    return math.sqrt(acc)


@njit(cache=True)
def point_in_box(x, lo, hi):
    for k in range(x.shape[0]):
        if x[k] < lo[k] or x[k] > hi[k]:
            return False
    return True


@njit(cache=True)
def point_in_any_box(x, lo, hi):
    for i in range(lo.shape[0]):
        inside = True
        for k in range(x.shape[0]):
            if x[k] < lo[i, k] or x[k] > hi[i, k]:
                inside = False
                break
        if inside:
            return True
    return False


@njit(cache=True)
def point_in_any_sphere(x, centers, radii):
    for i in range(centers.shape[0]):
        acc = 0.0
        for k in range(x.shape[0]):
            d = x[k] - centers[i, k]
            acc += d * d
        if acc <= radii[i] * radii[i]:
            return True
    return False


@njit(cache=True)
def segment_hits_any_box(a, b, lo, hi):
    n = a.shape[0]
    for i in range(lo.shape[0]):
        t_enter = 0.0
        t_exit = 1.0
        for k in range(n):
            dk = b[k] - a[k]
            if dk == 0.0:
                if a[k] < lo[i, k] or a[k] > hi[i, k]:
                    t_enter = np.inf
                    break
                continue
            t1 = (lo[i, k] - a[k]) / dk
            t2 = (hi[i, k] - a[k]) / dk
            if dk < 0.0:
                t1, t2 = t2, t1
            if t1 > t_enter:
                t_enter = t1
            if t2 < t_exit:
                t_exit = t2
            if t_enter > t_exit:
                break
        if t_enter <= t_exit:
            return True
    return False


@njit(cache=True)
def segment_hits_any_sphere(a, b, centers, radii):
    n = a.shape[0]
    dd = 0.0
    for k in range(n):
        dk = b[k] - a[k]
        dd += dk * dk
    for i in range(centers.shape[0]):
        t = 0.0
        if dd > 0.0:
            dot = 0.0
            for k in range(n):
                dot += (centers[i, k] - a[k]) * (b[k] - a[k])
            t = min(1.0, max(0.0, dot / dd))
        acc = 0.0
        for k in range(n):
            g = centers[i, k] - (a[k] + t * (b[k] - a[k]))
            acc += g * g
        if acc <= radii[i] * radii[i]:
            return True
    return False


# ---------------------------------------------------------------------------
# uniform grid with per-cell linked lists: head[cell] -> first point, nxt[p] -> next


@njit(cache=True)
def cell_of(x, origin, h, dims):
    """Flat cell index of ``x``, clamped into the grid."""
    idx = 0
    stride = 1
    for k in range(x.shape[0]):
        c = int(min(max((x[k] - origin[k]) / h, 0.0), float(dims[k] - 1)))
        idx += c * stride
        stride *= dims[k]
    return idx


@njit(cache=True)
def grid_insert(pos, points, head, nxt, origin, h, dims):
    c = cell_of(points[pos], origin, h, dims)
    nxt[pos] = head[c]
    head[c] = pos


@njit(cache=True)
def grid_rebuild(size, points, head, nxt, origin, h, dims):
    head[:] = -1
    for p in range(size):
        grid_insert(p, points, head, nxt, origin, h, dims)


@njit(cache=True)
def _cell_range(q, r, origin, h, dims, lo_c, hi_c):
    """Clamped per-axis cell index range touched by the box ``[q - r, q + r]``; returns cell count."""
    total = 1
    for k in range(q.shape[0]):
        top = float(dims[k] - 1)
        lo = int(min(max((q[k] - r - origin[k]) / h, 0.0), top))
        hi = int(min(max((q[k] + r - origin[k]) / h, 0.0), top))
        lo_c[k] = lo
        hi_c[k] = hi
        total *= hi - lo + 1
    return total


@njit(cache=True)
def grid_near(q, r, size, points, head, nxt, origin, h, dims):
    """Positions of all points within distance ``r`` of ``q``, ascending."""
    n = q.shape[0]
    lo_c = np.empty(n, dtype=np.int64)
    hi_c = np.empty(n, dtype=np.int64)
    total = _cell_range(q, r, origin, h, dims, lo_c, hi_c)
    out = np.empty(16, dtype=np.int64)
    m = 0
    if total >= size:
        for p in range(size):
            if dist(points[p], q) <= r:
                if m == out.shape[0]:
                    out = np.concatenate((out, np.empty(m, dtype=np.int64)))
                out[m] = p
                m += 1
        return out[:m]
    cur = lo_c.copy()
    for _ in range(total):
        idx = 0
        stride = 1
        for k in range(n):
            idx += cur[k] * stride
            stride *= dims[k]
        p = head[idx]
        while p >= 0:
            if dist(points[p], q) <= r:
                if m == out.shape[0]:
                    out = np.concatenate((out, np.empty(m, dtype=np.int64)))
                out[m] = p
                m += 1
            p = nxt[p]
        # odometer increment over the cell box
        for k in range(n):
            cur[k] += 1
            if cur[k] <= hi_c[k]:
                break
            cur[k] = lo_c[k]
    res = out[:m]
    res.sort()
    return res


@njit(cache=True)
def grid_nearest(q, size, points, ids, head, nxt, origin, h, dims):
    """Position of the closest point; equal distances resolve to the smallest id."""
    n = q.shape[0]
    if size <= 64:
        best = np.inf
        best_p = -1
        for p in range(size):
            d = dist(points[p], q)
            if d < best or (d == best and ids[p] < ids[best_p]):
                best = d
                best_p = p
        return best_p
    home = np.empty(n, dtype=np.int64)
    max_shell = 0
    for k in range(n):
        c = int(min(max((q[k] - origin[k]) / h, 0.0), float(dims[k] - 1)))
        home[k] = c
        span = max(c, dims[k] - 1 - c)
        if span > max_shell:
            max_shell = span
    best = np.inf
    best_p = -1
    lo_c = np.empty(n, dtype=np.int64)
    hi_c = np.empty(n, dtype=np.int64)
    for shell in range(max_shell + 1):
        total = 1
        for k in range(n):
            lo_c[k] = max(home[k] - shell, 0)
            hi_c[k] = min(home[k] + shell, dims[k] - 1)
            total *= hi_c[k] - lo_c[k] + 1
        cur = lo_c.copy()
        for _ in range(total):
            on_shell = False
            idx = 0
            stride = 1
            for k in range(n):
                if abs(cur[k] - home[k]) == shell:
                    on_shell = True
                idx += cur[k] * stride
                stride *= dims[k]
            if on_shell:
                p = head[idx]
                while p >= 0:
                    d = dist(points[p], q)
                    if d < best or (d == best and ids[p] < ids[best_p]):
                        best = d
                        best_p = p
                    p = nxt[p]
            for k in range(n):
                cur[k] += 1
                if cur[k] <= hi_c[k]:
                    break
                cur[k] = lo_c[k]
        if best_p >= 0:
            # distance from q to the part of the grid outside the visited cell box
            gap = np.inf
            for k in range(n):
                if home[k] - shell > 0:
                    g = q[k] - (origin[k] + (home[k] - shell) * h)
                    if g < gap:
                        gap = g
                if home[k] + shell < dims[k] - 1:
                    g = origin[k] + (home[k] + shell + 1) * h - q[k]
                    if g < gap:
                        gap = g
            if gap > best:
                break
    return best_p


@njit(cache=True)
def sorted_candidates(ids, points, costs, target):
    """Edge lengths, totals and the stable cost order of candidate ``ids`` (given ascending)."""
    m = ids.shape[0]
    edge = np.empty(m)
    total = np.empty(m)
    for j in range(m):
        edge[j] = dist(points[ids[j]], target)
        total[j] = costs[ids[j]] + edge[j]
    order = np.argsort(total, kind="mergesort")
    return order, edge, total
