"""Pure numpy implementations of the hot kernels.

These are the import-time fallback when the compiled extension is not
available, and the reference the compiled twins are tested against.
Both backends implement the same conventions bit-for-bit:

* rasterization sets pixel (i, j) when the winding number of the ring at
  the pixel center (i + 0.5, j + 0.5) is nonzero, with half-open vertex
  handling (an edge spans a scanline y when min(y0, y1) <= y < max(y0, y1))
  and a strictly-greater crossing test in x;
* the assignment solver is the shortest-augmenting-path algorithm with
  potentials and requires rows <= cols.
"""

import numpy as np


def rasterize_ring(xs, ys, width, height):
    """Scanline-fill a closed ring into a (height, width) uint8 mask."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    mask = np.zeros((height, width), dtype=np.uint8)

    x0, y0 = xs, ys
    x1, y1 = np.roll(xs, -1), np.roll(ys, -1)
    dy = y1 - y0
    slanted = dy != 0.0  # horizontal edges never cross a scanline
    if not slanted.any():
        return mask
    x0, y0, x1, y1, dy = (a[slanted] for a in (x0, y0, x1, y1, dy))
    dirs = np.where(dy > 0, 1, -1).astype(np.int64)
    ylo = np.minimum(y0, y1)
    yhi = np.maximum(y0, y1)

    row_lo = max(0, int(np.floor(ylo.min() - 0.5)))
    row_hi = min(height, int(np.ceil(yhi.max() + 0.5)))
    px = np.arange(width, dtype=np.float64) + 0.5

    for j in range(row_lo, row_hi):
        yc = j + 0.5
        hit = (ylo <= yc) & (yc < yhi)
        if not hit.any():
            continue
        t = (yc - y0[hit]) / dy[hit]
        xc = x0[hit] + t * (x1[hit] - x0[hit])
        d = dirs[hit]
        order = np.argsort(xc, kind="stable")
        xc = xc[order]
        # winding at px = sum of directions over crossings with xc > px
        suffix = np.concatenate([np.cumsum(d[order][::-1])[::-1], [0]])
        pos = np.searchsorted(xc, px, side="right")
        mask[j] = suffix[pos] != 0
    return mask


def lsa_solve(cost):
    """Minimum-cost injective row-to-column assignment.

    `cost` must be a finite (n, m) float64 array with n <= m. Returns an
    int64 array `col` of length n with row i assigned to column col[i].
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    if n == 0:
        return np.empty(0, dtype=np.int64)

    # 1-based columns; row 0 / column 0 are virtual slots of the search.
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    match = np.zeros(m + 1, dtype=np.int64)  # column -> assigned row, 0 = free
    way = np.zeros(m + 1, dtype=np.int64)

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv[1:])
            if better.any():
                minv1 = minv[1:]
                way1 = way[1:]
                minv1[better] = cur[better]
                way1[better] = j0
            reach = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(reach)) + 1
            delta = reach[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1

    col = np.empty(n, dtype=np.int64)
    for j in range(1, m + 1):
        if match[j]:
            col[match[j] - 1] = j - 1
    return col
