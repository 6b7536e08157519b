"""Reference forward pass of multi-scale deformable attention.

For each query with normalized reference point p, every head samples K
offset locations per pyramid level around the rescaled point, combines the
bilinear samples with normalized attention weights, projects through the
per-head value matrix, and merges heads through the output projections:

    out(q) = sum_m W_m [ sum_{l,k} A[m,l,k] * W'_m x_l(phi_l(p) + off[m,l,k]) ]

Conventions: grid values live on the integer lattice (row y, col x),
phi_l maps the unit square onto that lattice as (x*(W_l-1), y*(H_l-1)),
offsets are in level pixels, and locations outside a grid contribute zeros.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError


@dataclass
class FeaturePyramid:
    levels: list  # each (H_l, W_l, C) float array

    def __post_init__(self):
        if not self.levels:
            raise ShapeMismatchError("pyramid needs at least one level")
        self.levels = [np.asarray(g, dtype=np.float64) for g in self.levels]
        channels = {g.shape[2] for g in self.levels}
        if len(channels) != 1:
            raise ShapeMismatchError(f"channel counts differ across levels: {channels}")

    @property
    def channels(self):
        return self.levels[0].shape[2]


@dataclass
class Query:
    ref_point: np.ndarray  # normalized (x, y) in [0, 1]^2

    def __post_init__(self):
        self.ref_point = np.asarray(self.ref_point, dtype=np.float64)
        if not ((0.0 <= self.ref_point).all() and (self.ref_point <= 1.0).all()):
            raise ValueError(f"reference point outside unit square: {self.ref_point}")


@dataclass
class AttentionParams:
    """Per-head sampling weights, offsets, and projections.

    attn_weights: (heads, L, K), expected normalized per head;
    offsets: (heads, L, K, 2) in level pixels (dx, dy);
    value_proj: (heads, C_h, C) slices of W'_m; out_proj: (heads, C, C_h).
    """

    attn_weights: np.ndarray
    offsets: np.ndarray
    value_proj: np.ndarray
    out_proj: np.ndarray

    @property
    def heads(self):
        return self.attn_weights.shape[0]

    @property
    def points_per_level(self):
        return self.attn_weights.shape[2]

    @classmethod
    def identity(cls, channels, heads=1, levels=1):
        """Weight-1 single sampling point at zero offset, projections
        composing to the identity (sum_m W_m W'_m = I)."""
        if channels % heads:
            raise ShapeMismatchError(f"channels {channels} not divisible by heads {heads}")
        ch = channels // heads
        eye = np.eye(channels)
        weights = np.zeros((heads, levels, 1))
        weights[:, 0, 0] = 1.0
        return cls(
            attn_weights=weights,
            offsets=np.zeros((heads, levels, 1, 2)),
            value_proj=np.stack([eye[m * ch : (m + 1) * ch, :] for m in range(heads)]),
            out_proj=np.stack([eye[:, m * ch : (m + 1) * ch] for m in range(heads)]),
        )

    @classmethod
    def random(cls, rng, channels, heads=8, levels=4, points=4, offset_scale=2.0):
        """Random normalized parameters for property checks."""
        if channels % heads:
            raise ShapeMismatchError(f"channels {channels} not divisible by heads {heads}")
        ch = channels // heads
        return cls(
            attn_weights=normalize_weights(rng.normal(size=(heads, levels, points))),
            offsets=rng.normal(scale=offset_scale, size=(heads, levels, points, 2)),
            value_proj=rng.normal(size=(heads, ch, channels)) / np.sqrt(channels),
            out_proj=rng.normal(size=(heads, channels, ch)) / np.sqrt(ch),
        )


def normalize_weights(raw) -> np.ndarray:
    """Softmax over the (level, point) slots within each head."""
    raw = np.asarray(raw, dtype=np.float64)
    flat = raw.reshape(raw.shape[0], -1)
    flat = flat - flat.max(axis=1, keepdims=True)
    e = np.exp(flat)
    return (e / e.sum(axis=1, keepdims=True)).reshape(raw.shape)


def bilinear_sample(grid, loc) -> np.ndarray:
    """Bilinear interpolation of a (H, W, C) grid at (x, y); zeros outside."""
    h, w, c = grid.shape
    x, y = float(loc[0]), float(loc[1])
    x0, y0 = int(np.floor(x)), int(np.floor(y))
    fx, fy = x - x0, y - y0
    out = np.zeros(c)
    for dy_, wy in ((0, 1.0 - fy), (1, fy)):
        yy = y0 + dy_
        if not 0 <= yy < h or wy == 0.0:
            continue
        for dx_, wx in ((0, 1.0 - fx), (1, fx)):
            xx = x0 + dx_
            if not 0 <= xx < w or wx == 0.0:
                continue
            out += (wy * wx) * grid[yy, xx]
    return out


def level_scale(grid, ref_point) -> np.ndarray:
    """phi_l: map a normalized point onto the level's pixel lattice."""
    h, w, _ = grid.shape
    return np.array([ref_point[0] * (w - 1), ref_point[1] * (h - 1)])


def msda_forward(pyramid: FeaturePyramid, queries, params: AttentionParams) -> np.ndarray:
    """Multi-scale deformable attention output, one C-vector per query."""
    heads, levels_p, points = params.attn_weights.shape
    if levels_p != len(pyramid.levels):
        raise ShapeMismatchError(
            f"params cover {levels_p} levels, pyramid has {len(pyramid.levels)}"
        )
    c = pyramid.channels
    ch = params.value_proj.shape[1]
    if params.value_proj.shape != (heads, ch, c) or params.out_proj.shape != (heads, c, ch):
        raise ShapeMismatchError("projection shapes inconsistent with heads/channels")
    if params.offsets.shape != (heads, levels_p, points, 2):
        raise ShapeMismatchError("offset shape inconsistent with attention weights")

    out = np.zeros((len(queries), c))
    for qi, q in enumerate(queries):
        acc = np.zeros(c)
        for m in range(heads):
            head_sum = np.zeros(ch)
            for l, grid in enumerate(pyramid.levels):
                base = level_scale(grid, q.ref_point)
                for k in range(points):
                    loc = base + params.offsets[m, l, k]
                    sample = bilinear_sample(grid, loc)
                    head_sum += params.attn_weights[m, l, k] * (params.value_proj[m] @ sample)
            acc += params.out_proj[m] @ head_sum
        out[qi] = acc
    return out
