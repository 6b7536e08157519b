"""Fixed-length polygon encoding.

Turns a variable-length ring into exactly M vertices plus a parallel
corner-flag sequence, via one of two schemes:

* uniform sampling: M points at equal arc-length spacing along the
  canonical boundary, with every annotated corner snapped onto its
  assigned sample through a minimum-cost assignment on Euclidean
  distances; flags are 1 at snapped positions, 0 elsewhere;
* zero padding: the canonical vertices followed by (0, 0) entries up to
  M; flags mark the real-vertex prefix.

Rings with more than M vertices are first reduced by repeatedly collapsing
the shortest edge to its midpoint.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import assignment
from .errors import SizeMismatchError, TooManyCornersError, ZeroAreaError
from .geometry import Ring, canonicalize, edge_lengths


class Scheme(enum.Enum):
    UNIFORM_SAMPLING = "uniform"
    ZERO_PAD = "zeropad"


@dataclass
class EncodingConfig:
    m: int = 96
    phase1_labels: bool = False  # all-ones corner labels (first training phase)

    def __post_init__(self):
        if self.m < 4:
            raise ValueError(f"m must be >= 4, got {self.m}")


@dataclass
class EncodedPolygon:
    """M vertex coordinates plus per-vertex corner flags/scores."""

    coords: np.ndarray  # (M, 2) float64, pixel coordinates
    corner_flags: np.ndarray  # (M,) float64 in [0, 1]
    scheme: Scheme

    @property
    def m(self):
        return self.coords.shape[0]


def uniform_sample(ring: Ring, m: int) -> np.ndarray:
    """m boundary points at equal arc-length spacing, point 0 at vertex 0."""
    n = len(ring)
    if n > m:
        raise TooManyCornersError(f"ring has {n} vertices > m={m}; simplify first")
    lengths = edge_lengths(ring)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    targets = np.arange(m, dtype=np.float64) * (total / m)
    edge = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, n - 1)
    frac = (targets - cum[edge]) / lengths[edge]
    start = ring.coords[edge]
    vec = ring.coords[(edge + 1) % n] - start
    return start + frac[:, None] * vec


def snap_corners(samples: np.ndarray, corners: np.ndarray):
    """Replace assigned samples with the annotated corners.

    Builds the |corners| x |samples| Euclidean cost matrix, solves the
    rectangular assignment, and writes each corner over its assigned
    sample. Returns (modified samples, sorted array of snapped indices);
    every corner appears exactly once in the output.
    """
    k, s = corners.shape[0], samples.shape[0]
    if k > s:
        raise SizeMismatchError(f"{k} corners > {s} samples")
    diff = corners[:, None, :] - samples[None, :, :]
    cost = np.hypot(diff[..., 0], diff[..., 1])
    result = assignment.solve(cost)
    snapped = samples.copy()
    idx = np.empty(k, dtype=np.int64)
    for row, col in result.pairs:
        snapped[col] = corners[row]
        idx[row] = col
    return snapped, np.sort(idx)


def simplify_to(ring: Ring, m: int) -> Ring:
    """Collapse the currently shortest edge to its midpoint until <= m vertices.

    Ties break at the lowest edge index. Raises ZeroAreaError if the ring
    would drop below 3 vertices.
    """
    if m < 3:
        raise ZeroAreaError(f"cannot simplify below 3 vertices (m={m})")
    coords = ring.coords
    while coords.shape[0] > m:
        d = np.roll(coords, -1, axis=0) - coords
        lengths = np.hypot(d[:, 0], d[:, 1])
        i = int(np.argmin(lengths))  # argmin takes the first minimum
        n = coords.shape[0]
        mid = (coords[i] + coords[(i + 1) % n]) / 2.0
        if i + 1 < n:
            coords = np.vstack([coords[:i], [mid], coords[i + 2 :]])
        else:  # closing edge: midpoint replaces last and first vertices
            coords = np.vstack([[mid], coords[1 : n - 1]])
        # midpoint merging can create exact duplicates on collinear runs
        dup = (coords == np.roll(coords, -1, axis=0)).all(axis=1)
        if dup.any():
            coords = coords[~dup]
        if coords.shape[0] < 3:
            raise ZeroAreaError("simplification collapsed ring below 3 vertices")
    return Ring(coords)


def encode_uniform(ring: Ring, cfg: EncodingConfig) -> EncodedPolygon:
    """Canonicalize, simplify if needed, sample M points, snap corners."""
    r = canonicalize(ring)
    if len(r) > cfg.m:
        r = canonicalize(simplify_to(r, cfg.m))
    samples = uniform_sample(r, cfg.m)
    coords, idx = snap_corners(samples, r.coords)
    if cfg.phase1_labels:
        flags = np.ones(cfg.m)
    else:
        flags = np.zeros(cfg.m)
        flags[idx] = 1.0
    return EncodedPolygon(coords=coords, corner_flags=flags, scheme=Scheme.UNIFORM_SAMPLING)


def encode_zeropad(ring: Ring, cfg: EncodingConfig) -> EncodedPolygon:
    """Canonical vertices followed by (0, 0) padding up to M."""
    r = canonicalize(ring)
    if len(r) > cfg.m:
        r = canonicalize(simplify_to(r, cfg.m))
    n = len(r)
    coords = np.zeros((cfg.m, 2))
    coords[:n] = r.coords
    flags = np.zeros(cfg.m)
    flags[:n] = 1.0
    return EncodedPolygon(coords=coords, corner_flags=flags, scheme=Scheme.ZERO_PAD)
