# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the hot kernels in `pure`.

Same conventions as the fallback: half-open scanline spans, strict
crossing test at pixel centers, shortest-augmenting-path assignment.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF INF = 1e308


def rasterize_ring(xs, ys, int width, int height):
    """Scanline-fill a closed ring into a (height, width) uint8 mask."""
    cdef double[::1] vx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(ys, dtype=np.float64)
    cdef int n = vx.shape[0]
    mask = np.zeros((height, width), dtype=np.uint8)
    cdef unsigned char[:, ::1] mv = mask

    buf_x = np.empty(n, dtype=np.float64)
    buf_d = np.empty(n, dtype=np.int64)
    cdef double[::1] cx = buf_x
    cdef long long[::1] cd = buf_d

    cdef double ymin_all = INF, ymax_all = -INF
    cdef int e
    for e in range(n):
        if vy[e] < ymin_all:
            ymin_all = vy[e]
        if vy[e] > ymax_all:
            ymax_all = vy[e]
    cdef int row_lo = <int>(ymin_all - 0.5) if ymin_all > 0.5 else 0
    cdef int row_hi = <int>(ymax_all + 0.5) + 1
    if row_hi > height:
        row_hi = height

    cdef int j, i, k, p, q
    cdef double yc, y0, y1, x, px
    cdef long long d, acc
    for j in range(row_lo, row_hi):
        yc = j + 0.5
        k = 0
        for e in range(n):
            y0 = vy[e]
            y1 = vy[e + 1] if e + 1 < n else vy[0]
            if y0 == y1:
                continue
            if (y0 <= yc < y1) or (y1 <= yc < y0):
                x = vx[e] + (yc - y0) / (y1 - y0) * ((vx[e + 1] if e + 1 < n else vx[0]) - vx[e])
                d = 1 if y1 > y0 else -1
                # insertion sort keeps crossings ordered by x
                p = k
                while p > 0 and cx[p - 1] > x:
                    cx[p] = cx[p - 1]
                    cd[p] = cd[p - 1]
                    p -= 1
                cx[p] = x
                cd[p] = d
                k += 1
        if k == 0:
            continue
        # directions over a full scanline sum to zero, so the winding at a
        # pixel equals minus the prefix sum of crossings at or left of it
        acc = 0
        q = 0
        for i in range(width):
            px = i + 0.5
            while q < k and cx[q] <= px:
                acc += cd[q]
                q += 1
            if acc != 0:
                mv[j, i] = 1
    return mask


def lsa_solve(cost):
    """Minimum-cost injective row-to-column assignment (rows <= cols)."""
    cdef double[:, ::1] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef int n = c.shape[0]
    cdef int m = c.shape[1]
    col = np.empty(n, dtype=np.int64)
    cdef long long[::1] colv = col
    if n == 0:
        return col

    u_arr = np.zeros(n + 1, dtype=np.float64)
    v_arr = np.zeros(m + 1, dtype=np.float64)
    match_arr = np.zeros(m + 1, dtype=np.int64)
    way_arr = np.zeros(m + 1, dtype=np.int64)
    minv_arr = np.empty(m + 1, dtype=np.float64)
    used_arr = np.empty(m + 1, dtype=np.uint8)
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef long long[::1] match = match_arr
    cdef long long[::1] way = way_arr
    cdef double[::1] minv = minv_arr
    cdef unsigned char[::1] used = used_arr

    cdef int i, j, j0, j1, i0
    cdef double cur, delta
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        for j in range(m + 1):
            minv[j] = INF
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = <int>match[j0]
            delta = INF
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = c[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = <int>way[j0]
            match[j0] = match[j1]
            j0 = j1

    for j in range(1, m + 1):
        if match[j]:
            colv[match[j] - 1] = j - 1
    return col
