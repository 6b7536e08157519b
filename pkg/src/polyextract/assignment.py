"""Rectangular minimum-cost assignment and instance matching.

`solve` finds the globally optimal injective row-to-column mapping of size
min(rows, cols). `match_instances` builds the detection matching cost
between ground-truth boxes and predictions (focal classification term,
generalized-IoU term, and L1 box term) and solves it.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, losses
from .errors import NonFiniteError
from .geometry import BoundingBox


@dataclass
class CostMatrix:
    values: np.ndarray  # (rows, cols) float64

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"cost matrix must be 2-d, got shape {self.values.shape}")

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


@dataclass
class Assignment:
    pairs: list  # [(row, col)] injective in both coordinates
    total_cost: float


@dataclass
class MatchWeights:
    lambda_cls: float = 2.0
    lambda_iou: float = 2.0
    lambda_l1: float = 5.0


@dataclass
class InstancePrediction:
    class_prob: float
    box: BoundingBox
    polygon: object = None  # EncodedPolygon when the caller has one

    def __post_init__(self):
        if not 0.0 <= self.class_prob <= 1.0:
            raise ValueError(f"class_prob out of [0,1]: {self.class_prob}")


def solve(costs) -> Assignment:
    """Globally minimal-cost assignment of size min(rows, cols)."""
    values = costs.values if isinstance(costs, CostMatrix) else np.asarray(costs, dtype=np.float64)
    if not np.isfinite(values).all():
        raise NonFiniteError("cost matrix contains NaN or infinity")
    r, c = values.shape
    if r == 0 or c == 0:
        return Assignment(pairs=[], total_cost=0.0)
    if r <= c:
        col = _kernels.lsa_solve(values)
        pairs = [(i, int(col[i])) for i in range(r)]
    else:
        row = _kernels.lsa_solve(np.ascontiguousarray(values.T))
        pairs = sorted((int(row[j]), j) for j in range(c))
    total = float(sum(values[i, j] for i, j in pairs))
    return Assignment(pairs=pairs, total_cost=total)


def matching_cost(
    gt_box: BoundingBox,
    pred: InstancePrediction,
    w: MatchWeights = MatchWeights(),
    focal: "losses.FocalParams" = None,
) -> float:
    """Detection matching cost: focal term + GIoU term + box L1 term."""
    fp = focal if focal is not None else losses.FocalParams()
    cls_cost, _ = losses.focal_loss(pred.class_prob, True, fp)
    g, _, _ = losses.giou(gt_box, pred.box)
    l1 = float(np.abs(gt_box.as_array() - pred.box.as_array()).sum())
    return w.lambda_cls * cls_cost + w.lambda_iou * (1.0 - g) + w.lambda_l1 * l1


def cost_matrix(
    gts,
    preds,
    w: MatchWeights = MatchWeights(),
    focal=None,
    gt_polygons=None,
    polygon_l1_weight: float = 0.0,
) -> CostMatrix:
    """Pairwise matching costs; optionally adds a per-vertex polygon L1 term.

    The polygon term (mean absolute coordinate difference against
    gt_polygons[i]) is off by default; it is an extension for matching
    without boxes, not part of the standard cost.
    """
    fp = focal if focal is not None else losses.FocalParams()
    values = np.empty((len(gts), len(preds)))
    for i, g in enumerate(gts):
        for j, p in enumerate(preds):
            values[i, j] = matching_cost(g, p, w, fp)
            if polygon_l1_weight > 0.0 and gt_polygons is not None:
                d = np.abs(gt_polygons[i].coords - p.polygon.coords).mean()
                values[i, j] += polygon_l1_weight * d
    return CostMatrix(values)


def match_instances(gts, preds, w: MatchWeights = MatchWeights(), focal=None, **kw) -> Assignment:
    """Optimal bipartite matching of ground-truth boxes to predictions."""
    if not gts:
        return Assignment(pairs=[], total_cost=0.0)
    return solve(cost_matrix(gts, preds, w, focal, **kw))
