"""Compiled inner loops.

Times are grid indices here; callers rescale slopes by ``dt``.
"""
import numba
import numpy as np


@numba.njit(cache=True, nogil=True, inline="always")
def _slope(i, yi, j, yj):
    return (yj - yi) / (j - i)


@numba.njit(cache=True, nogil=True)
def taut_string_kernel(lo, up, free_left, free_right):
    """Shortest path through the corridor ``lo[k] <= h[k] <= up[k]``.

    Funnel method: from the last fixed knot (the apex) keep the greatest
    convex minorant of the upper barrier and the least concave majorant of
    the lower barrier. When a new point makes one hull cut below/above the
    other, the apex walks along the other hull, emitting knots.

    A free end is treated as a horizontal ray at infinity, which makes the
    string leave/arrive flat. Returns knot indices and knot values.
    """
    n = lo.shape[0] - 1
    kx = np.empty(n + 2, np.int64)
    ky = np.empty(n + 2, np.float64)
    nk = 0
    ub = np.empty(n + 1, np.int64)
    uh = 0
    ut = 0
    lb = np.empty(n + 1, np.int64)
    lh = 0
    lt = 0

    start = 1
    ax = 0
    ay = lo[0]
    if free_left:
        # flat prefix while a single level fits every tube section seen so far
        hi = up[0]
        lov = lo[0]
        c = 0.0
        j = -1
        for k in range(1, n + 1):
            if up[k] < lov:
                c = lov
                for i in range(k):
                    if lo[i] == lov:
                        j = i
                break
            if lo[k] > hi:
                c = hi
                for i in range(k):
                    if up[i] == hi:
                        j = i
                break
            hi = min(hi, up[k])
            lov = max(lov, lo[k])
        if j < 0:
            c = min(max(0.0, lov), hi)
            kx[0] = 0
            ky[0] = c
            kx[1] = n
            ky[1] = c
            return kx[:2].copy(), ky[:2].copy()
        kx[0] = 0
        ky[0] = c
        nk = 1
        if j > 0:
            kx[1] = j
            ky[1] = c
            nk = 2
        ax = j
        ay = c
        start = j + 1
    else:
        kx[0] = 0
        ky[0] = ay
        nk = 1

    for k in range(start, n + 1):
        # upper barrier point
        while ut > uh:
            if ut - uh >= 2:
                p = ub[ut - 2]
                py = up[p]
            else:
                p = ax
                py = ay
            q = ub[ut - 1]
            if _slope(p, py, q, up[q]) >= _slope(p, py, k, up[k]):
                ut -= 1
            else:
                break
        ub[ut] = k
        ut += 1
        if ut - uh == 1:
            while lt > lh and _slope(ax, ay, k, up[k]) < _slope(ax, ay, lb[lh], lo[lb[lh]]):
                ax = lb[lh]
                ay = lo[ax]
                lh += 1
                kx[nk] = ax
                ky[nk] = ay
                nk += 1
        # lower barrier point
        while lt > lh:
            if lt - lh >= 2:
                p = lb[lt - 2]
                py = lo[p]
            else:
                p = ax
                py = ay
            q = lb[lt - 1]
            if _slope(p, py, q, lo[q]) <= _slope(p, py, k, lo[k]):
                lt -= 1
            else:
                break
        lb[lt] = k
        lt += 1
        if lt - lh == 1:
            while ut > uh and _slope(ax, ay, k, lo[k]) > _slope(ax, ay, ub[uh], up[ub[uh]]):
                ax = ub[uh]
                ay = up[ax]
                uh += 1
                kx[nk] = ax
                ky[nk] = ay
                nk += 1

    if free_right:
        while ut > uh:
            if ut - uh >= 2:
                p = ub[ut - 2]
                py = up[p]
            else:
                p = ax
                py = ay
            q = ub[ut - 1]
            if _slope(p, py, q, up[q]) >= 0.0:
                ut -= 1
            else:
                break
        if ut == uh:
            while lt > lh and _slope(ax, ay, lb[lh], lo[lb[lh]]) > 0.0:
                ax = lb[lh]
                ay = lo[ax]
                lh += 1
                kx[nk] = ax
                ky[nk] = ay
                nk += 1
        while lt > lh:
            if lt - lh >= 2:
                p = lb[lt - 2]
                py = lo[p]
            else:
                p = ax
                py = ay
            q = lb[lt - 1]
            if _slope(p, py, q, lo[q]) <= 0.0:
                lt -= 1
            else:
                break
        if lt == lh:
            while ut > uh and _slope(ax, ay, ub[uh], up[ub[uh]]) < 0.0:
                ax = ub[uh]
                ay = up[ax]
                uh += 1
                kx[nk] = ax
                ky[nk] = ay
                nk += 1
        if ut > uh:
            for i in range(uh, ut):
                if ub[i] > ax:
                    ay = up[ub[i]]
                    kx[nk] = ub[i]
                    ky[nk] = ay
                    nk += 1
        elif lt > lh:
            for i in range(lh, lt):
                if lb[i] > ax:
                    ay = lo[lb[i]]
                    kx[nk] = lb[i]
                    ky[nk] = ay
                    nk += 1
        if kx[nk - 1] != n:
            kx[nk] = n
            ky[nk] = ay
            nk += 1
    else:
        # both hulls end at the pinned point; at most one still bends
        if ut - uh > 1:
            for i in range(uh, ut):
                if ub[i] > ax:
                    kx[nk] = ub[i]
                    ky[nk] = up[ub[i]]
                    nk += 1
        else:
            for i in range(lh, lt):
                if lb[i] > ax:
                    kx[nk] = lb[i]
                    ky[nk] = lo[lb[i]]
                    nk += 1
    return kx[:nk].copy(), ky[:nk].copy()


@numba.njit(cache=True, nogil=True)
def tv_automaton(x, r):
    """Truncated variation as a flat/up/down automaton.

    ``flat`` is the best total with no open move, ``up``/``down`` the best
    total minus/plus the start of an open upward/downward move. Closing a
    move pays the truncation ``r``.
    """
    flat = 0.0
    up = -x[0]
    down = x[0]
    for i in range(1, x.shape[0]):
        v = x[i]
        f = max(flat, up + v - r, down - v - r)
        up = max(up, f - v)
        down = max(down, f + v)
        flat = f
    return flat


@numba.njit(cache=True, nogil=True)
def utv_automaton(x, r):
    flat = 0.0
    up = -x[0]
    for i in range(1, x.shape[0]):
        v = x[i]
        f = max(flat, up + v - r)
        up = max(up, f - v)
        flat = f
    return flat
