"""Turn predicted M-vertex polygons with corner scores into clean rings.

Two stages mirror the inference pipeline: a score threshold removes
redundant vertices along the walls, then a circular 1-d non-maximum
suppression removes redundancy next to the corners. Zero-padded
predictions instead keep the confident prefix of the vertex sequence.
"""

from dataclasses import dataclass

import numpy as np

from .encoding import EncodedPolygon
from .errors import ZeroAreaError
from .geometry import Ring


@dataclass
class RefineConfig:
    score_threshold: float = 0.1
    nms_window: int = 2
    min_vertices: int = 3

    def __post_init__(self):
        if not 0.0 <= self.score_threshold <= 1.0:
            raise ValueError(f"threshold out of [0,1]: {self.score_threshold}")
        if self.nms_window < 1:
            raise ValueError(f"nms window must be >= 1, got {self.nms_window}")
        if self.min_vertices < 3:
            raise ValueError(f"min_vertices must be >= 3, got {self.min_vertices}")


def nms_1d_circular(scores, window: int) -> np.ndarray:
    """Indices of local maxima within a circular window.

    Index i survives iff scores[i] >= scores[j] for every j within circular
    distance <= window, keeping only the lowest index among exact ties (a
    plateau yields one survivor; a constant sequence keeps index 0).
    """
    s = np.asarray(scores, dtype=np.float64)
    m = s.shape[0]
    keep = np.ones(m, dtype=bool)
    idx = np.arange(m)
    for d in range(1, window + 1):
        for j in (np.roll(idx, d), np.roll(idx, -d)):
            if d % m == 0:  # window wrapped all the way to self
                continue
            other = s[j]
            keep &= (s > other) | ((s == other) & (idx < j))
    return np.where(keep)[0]


def _index_ring(pred: EncodedPolygon, indices) -> Ring:
    """Ring from the prediction's coords at the given (sorted) indices.

    Junk predictions can repeat coordinates; consecutive duplicates are
    dropped so downstream rasterization always gets a valid ring.
    """
    coords = pred.coords[np.asarray(indices, dtype=np.int64)]
    dup = (coords == np.roll(coords, -1, axis=0)).all(axis=1)
    if dup.any():
        coords = coords[~dup]
    if coords.shape[0] < 3:
        raise ZeroAreaError("prediction has fewer than 3 distinct vertices")
    return Ring(coords)


def _fallback_indices(scores: np.ndarray, k: int) -> np.ndarray:
    """The k highest-scoring indices (ties by lowest index), in index order."""
    order = np.lexsort((np.arange(len(scores)), -scores))
    return np.sort(order[:k])


def threshold_filter(pred: EncodedPolygon, threshold: float, min_vertices: int = 3) -> Ring:
    """Corner-score filter alone: keep indices with score >= threshold."""
    scores = pred.corner_flags
    surv = np.where(scores >= threshold)[0]
    if surv.size < min_vertices:
        surv = _fallback_indices(scores, min_vertices)
    return _index_ring(pred, surv)


def refine(pred: EncodedPolygon, cfg: RefineConfig = RefineConfig()) -> Ring:
    """Score threshold followed by circular NMS over the candidate scores.

    Falls back to the min_vertices highest-scoring indices when too few
    survive, so the output is always a valid ring.
    """
    scores = pred.corner_flags
    cand = scores >= cfg.score_threshold
    # non-candidates are masked below any valid score so they can neither
    # survive nor suppress a candidate
    masked = np.where(cand, scores, -1.0)
    kept = nms_1d_circular(masked, cfg.nms_window)
    surv = kept[cand[kept]]
    if surv.size < cfg.min_vertices:
        surv = _fallback_indices(scores, cfg.min_vertices)
    return _index_ring(pred, surv)


def refine_zeropad(pred: EncodedPolygon, threshold: float, min_vertices: int = 3) -> Ring:
    """Keep the maximal confident prefix of a zero-padded prediction."""
    scores = pred.corner_flags
    n = 0
    while n < scores.shape[0] and scores[n] >= threshold:
        n += 1
    if n < min_vertices:
        return _index_ring(pred, _fallback_indices(scores, min_vertices))
    return _index_ring(pred, np.arange(n))
