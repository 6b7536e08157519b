"""Core polygon primitives in image coordinates (x right, y down).

A Ring is a closed simple polygon stored as an (n, 2) float array; the
closing edge from the last vertex back to the first is implicit. The
canonical form used throughout the pipeline is screen-clockwise order
(positive shoelace sum on raw image coordinates) starting from the top
extreme point (minimal y, ties broken by minimal x).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, ZeroAreaError

ZERO_AREA_TOL = 1e-9


class Ring:
    """Closed simple polygon: ordered vertices, implicitly closed."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=np.float64).reshape(-1, 2)
        if arr.shape[0] < 3:
            raise ZeroAreaError(f"ring needs >= 3 vertices, got {arr.shape[0]}")
        if not np.isfinite(arr).all():
            raise ValueError("ring coordinates must be finite")
        nxt = np.roll(arr, -1, axis=0)
        if (np.abs(arr - nxt).max(axis=1) == 0).any():
            raise ValueError("ring has consecutive identical vertices")
        self.coords = arr

    def __len__(self):
        return self.coords.shape[0]

    def __eq__(self, other):
        return isinstance(other, Ring) and np.array_equal(self.coords, other.coords)

    def __repr__(self):
        return f"Ring({len(self)} vertices)"


@dataclass(frozen=True)
class BoundingBox:
    """Normalized center/size box: cx, cy in [0, 1], w, h in (0, 1]."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValueError(f"box center out of range: ({self.cx}, {self.cy})")
        if not (self.w > 0.0 and self.h > 0.0):
            raise ValueError(f"box size must be positive: ({self.w}, {self.h})")

    def corners(self):
        """(x1, y1, x2, y2) corner form."""
        return (
            self.cx - self.w / 2.0,
            self.cy - self.h / 2.0,
            self.cx + self.w / 2.0,
            self.cy + self.h / 2.0,
        )

    def as_array(self):
        return np.array([self.cx, self.cy, self.w, self.h])


@dataclass
class Mask:
    """Row-major boolean pixel grid."""

    width: int
    height: int
    data: np.ndarray  # (height, width) bool

    def count(self):
        return int(self.data.sum())


def signed_area(ring: Ring) -> float:
    """Shoelace sum over the closed ring on raw image coordinates.

    Positive for screen-clockwise rings under y-down axes.
    """
    x = ring.coords[:, 0]
    y = ring.coords[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def perimeter(ring: Ring) -> float:
    """Sum of Euclidean edge lengths including the closing edge."""
    d = np.roll(ring.coords, -1, axis=0) - ring.coords
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def edge_lengths(ring: Ring) -> np.ndarray:
    """Length of edge i = (v_i, v_{i+1 mod n}), for all i."""
    d = np.roll(ring.coords, -1, axis=0) - ring.coords
    return np.hypot(d[:, 0], d[:, 1])


def canonicalize(ring: Ring, tol: float = ZERO_AREA_TOL) -> Ring:
    """Rotate/reverse the ring into canonical form.

    Canonical: signed_area > 0 (screen-clockwise) and vertex 0 is the top
    extreme point (minimal y, ties by minimal x). Raises ZeroAreaError for
    degenerate rings.
    """
    area = signed_area(ring)
    if abs(area) < tol:
        raise ZeroAreaError(f"|signed area| {abs(area):g} below tolerance {tol:g}")
    coords = ring.coords if area > 0 else ring.coords[::-1]
    order = np.lexsort((coords[:, 0], coords[:, 1]))
    start = int(order[0])
    return Ring(np.roll(coords, -start, axis=0))


def rasterize(ring: Ring, width: int, height: int) -> Mask:
    """Pixel (i, j) is set iff its center (i+0.5, j+0.5) has nonzero winding.

    Out-of-bounds geometry clips; an entirely outside ring gives an empty mask.
    """
    bits = _kernels.rasterize_ring(ring.coords[:, 0], ring.coords[:, 1], width, height)
    return Mask(width=width, height=height, data=bits.astype(bool))


def mask_iou(a: Mask, b: Mask) -> float:
    """|a & b| / |a | b|; 1.0 when both masks are empty."""
    if a.width != b.width or a.height != b.height:
        raise DimensionMismatchError(
            f"mask dims differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    union = int(np.logical_or(a.data, b.data).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(a.data, b.data).sum())
    return inter / union


def bbox_of(ring: Ring, image_w: float, image_h: float) -> BoundingBox:
    """Tight axis-aligned vertex box, normalized by image dims, clamped to [0, 1]."""
    x = ring.coords[:, 0] / image_w
    y = ring.coords[:, 1] / image_h
    x1 = min(max(float(x.min()), 0.0), 1.0)
    x2 = min(max(float(x.max()), 0.0), 1.0)
    y1 = min(max(float(y.min()), 0.0), 1.0)
    y2 = min(max(float(y.max()), 0.0), 1.0)
    # rings entirely outside the frame clamp to a zero-extent box; keep the
    # w,h > 0 invariant with a hair of width instead of failing
    return BoundingBox(
        cx=(x1 + x2) / 2.0,
        cy=(y1 + y2) / 2.0,
        w=max(x2 - x1, 1e-9),
        h=max(y2 - y1, 1e-9),
    )
