"""Training losses as pure scalar functions with analytic gradients.

Every gradient here is validated against central finite differences in the
test suite; probabilities are clamped to [1e-7, 1 - 1e-7] before any log.
"""

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError
from .geometry import BoundingBox

PROB_CLAMP = 1e-7


@dataclass
class FocalParams:
    alpha: float = 0.25
    gamma: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha out of (0,1): {self.alpha}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0: {self.gamma}")


@dataclass
class LossWeights:
    lambda_cls: float = 2.0
    lambda_poly: float = 5.0
    lambda_cnr: float = 1.0
    lambda_iou: float = 2.0
    lambda_l1: float = 5.0


def _clamp(p):
    return float(min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP))


def focal_loss(p_hat: float, is_object: bool, fp: FocalParams = FocalParams()):
    """Per-instance focal term and its derivative w.r.t. p_hat.

    Positive instances: -alpha (1-p)^gamma log p.
    Negative instances: -(1-alpha) p^gamma log(1-p).
    """
    p = _clamp(p_hat)
    a, g = fp.alpha, fp.gamma
    if is_object:
        value = -a * (1.0 - p) ** g * np.log(p)
        grad = a * g * (1.0 - p) ** (g - 1.0) * np.log(p) - a * (1.0 - p) ** g / p
    else:
        value = -(1.0 - a) * p**g * np.log(1.0 - p)
        grad = -(1.0 - a) * g * p ** (g - 1.0) * np.log(1.0 - p) + (1.0 - a) * p**g / (1.0 - p)
    return float(value), float(grad)


def _box_grads_to_center_form(gx1, gy1, gx2, gy2):
    # corners from center form: x1 = cx - w/2, x2 = cx + w/2 (same for y)
    return np.array(
        [gx1 + gx2, gy1 + gy2, 0.5 * (gx2 - gx1), 0.5 * (gy2 - gy1)]
    )


def giou(a: BoundingBox, b: BoundingBox):
    """Generalized IoU of two boxes with gradients w.r.t. (cx, cy, w, h) of each.

    GIoU = IoU - (|C| - |A u B|) / |C| with C the smallest enclosing box;
    the loss form used elsewhere is 1 - GIoU. Subgradient 0 is chosen at
    min/max ties.
    """
    ax1, ay1, ax2, ay2 = a.corners()
    bx1, by1, bx2, by2 = b.corners()
    area_a = a.w * a.h
    area_b = b.w * b.h

    # intersection; d*/d(corner) indicators select which box owns each side
    ix1, ix1_a = (ax1, 1.0) if ax1 >= bx1 else (bx1, 0.0)
    iy1, iy1_a = (ay1, 1.0) if ay1 >= by1 else (by1, 0.0)
    ix2, ix2_a = (ax2, 1.0) if ax2 <= bx2 else (bx2, 0.0)
    iy2, iy2_a = (ay2, 1.0) if ay2 <= by2 else (by2, 0.0)
    iw = max(ix2 - ix1, 0.0)
    ih = max(iy2 - iy1, 0.0)
    inter = iw * ih

    # enclosing box
    ex1, ex1_a = (ax1, 1.0) if ax1 <= bx1 else (bx1, 0.0)
    ey1, ey1_a = (ay1, 1.0) if ay1 <= by1 else (by1, 0.0)
    ex2, ex2_a = (ax2, 1.0) if ax2 >= bx2 else (bx2, 0.0)
    ey2, ey2_a = (ay2, 1.0) if ay2 >= by2 else (by2, 0.0)
    ew = ex2 - ex1
    eh = ey2 - ey1
    enclose = ew * eh

    union = area_a + area_b - inter
    value = inter / union - (enclose - union) / enclose

    # dI w.r.t. each box's corners (zero when there is no overlap)
    if iw > 0.0 and ih > 0.0:
        dI_a = np.array([-ih * ix1_a, -iw * iy1_a, ih * ix2_a, iw * iy2_a])
        dI_b = np.array(
            [-ih * (1 - ix1_a), -iw * (1 - iy1_a), ih * (1 - ix2_a), iw * (1 - iy2_a)]
        )
    else:
        dI_a = np.zeros(4)
        dI_b = np.zeros(4)
    # d(areaA) in corner coords of a: area = (x2-x1)(y2-y1)
    dA_a = np.array([-a.h, -a.w, a.h, a.w])
    dB_b = np.array([-b.h, -b.w, b.h, b.w])
    dU_a = dA_a - dI_a
    dU_b = dB_b - dI_b
    dC_a = np.array([-eh * ex1_a, -ew * ey1_a, eh * ex2_a, ew * ey2_a])
    dC_b = np.array(
        [-eh * (1 - ex1_a), -ew * (1 - ey1_a), eh * (1 - ex2_a), ew * (1 - ey2_a)]
    )

    # GIoU = I/U - 1 + U/C
    dG_a = (dI_a * union - inter * dU_a) / union**2 + (dU_a * enclose - union * dC_a) / enclose**2
    dG_b = (dI_b * union - inter * dU_b) / union**2 + (dU_b * enclose - union * dC_b) / enclose**2

    grad_a = _box_grads_to_center_form(*dG_a)
    grad_b = _box_grads_to_center_form(*dG_b)
    return float(value), grad_a, grad_b


def l1_seq(a, b):
    """Sum of absolute differences with subgradients (0 at ties)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    value = float(np.abs(diff).sum())
    grad_a = np.sign(diff)
    return value, grad_a, -grad_a


def polygon_l1(gt, pred):
    """L1 loss over the flattened 2M polygon coordinates."""
    if gt.coords.shape != pred.coords.shape:
        raise LengthMismatchError(
            f"polygon shapes differ: {gt.coords.shape} vs {pred.coords.shape}"
        )
    value, g_gt, g_pred = l1_seq(gt.coords.ravel(), pred.coords.ravel())
    return value, g_gt.reshape(gt.coords.shape), g_pred.reshape(pred.coords.shape)


def corner_bce(gt_flags, pred_probs):
    """Binary cross entropy over the corner score sequence, with gradient."""
    c = np.asarray(gt_flags, dtype=np.float64)
    p = np.asarray(pred_probs, dtype=np.float64)
    if c.shape != p.shape:
        raise LengthMismatchError(f"lengths differ: {c.shape} vs {p.shape}")
    p = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    value = float(np.sum(-c * np.log(p) - (1.0 - c) * np.log(1.0 - p)))
    grad = -c / p + (1.0 - c) / (1.0 - p)
    return value, grad


def total_loss(
    cls_loss: float,
    iou_loss: float,
    l1_loss: float,
    poly_loss: float,
    cnr_loss: float,
    w: LossWeights = LossWeights(),
) -> float:
    """Weighted sum of the per-head losses (box term carries two weights)."""
    return (
        w.lambda_cls * cls_loss
        + w.lambda_iou * iou_loss
        + w.lambda_l1 * l1_loss
        + w.lambda_poly * poly_loss
        + w.lambda_cnr * cnr_loss
    )


def deep_supervision(layer_losses) -> float:
    """Total loss summed over all decoder layers."""
    return float(np.sum(np.asarray(layer_losses, dtype=np.float64)))
