"""Polygon evaluation suite: pixel IoU, COCO-style AP/AR, MTA, N ratio, C-IoU.

Instances are matched inside each image. AP/AR use score-ordered greedy
matching against rasterized-mask IoU at the image's native size with
101-point precision interpolation over IoU thresholds 0.50:0.05:0.95;
the geometry metrics (MTA, N ratio, C-IoU) share one greedy matching at
IoU >= 0.5. Image ids are processed in sorted order so parallel callers
get byte-identical aggregates.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ring, mask_iou, rasterize

DEFAULT_IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

REPORT_KEYS = ("AP", "AP50", "AP75", "AR", "AR50", "AR75", "IoU", "MTA", "N_ratio", "C_IoU")


@dataclass
class GtInstance:
    image_id: int
    ring: Ring


@dataclass
class PredInstance:
    image_id: int
    ring: Ring
    score: float


@dataclass
class EvalConfig:
    iou_thresholds: tuple = DEFAULT_IOU_THRESHOLDS
    match_iou: float = 0.5  # matching threshold for the geometry metrics
    samples_per_polygon: int = 1000
    max_dets: int = 100
    default_size: tuple = (300, 300)
    image_sizes: dict = field(default_factory=dict)  # image_id -> (w, h)
    iou_mode: str = "per-image"  # or "pooled"
    c_iou_mode: str = "pair-mean"  # or "pooled"

    def size_of(self, image_id):
        return self.image_sizes.get(image_id, self.default_size)


@dataclass
class EvalReport:
    """All metrics; AP/AR/IoU/C-IoU as percentages, MTA in degrees."""

    ap: float
    ap50: float
    ap75: float
    ar: float
    ar50: float
    ar75: float
    iou: float
    mta_degrees: float
    n_ratio: float
    c_iou: float
    iou_mode: str = "per-image"

    def as_dict(self):
        return dict(
            zip(
                REPORT_KEYS,
                (
                    self.ap,
                    self.ap50,
                    self.ap75,
                    self.ar,
                    self.ar50,
                    self.ar75,
                    self.iou,
                    self.mta_degrees,
                    self.n_ratio,
                    self.c_iou,
                ),
            )
        )


def format_report(report: EvalReport) -> str:
    """Flat key/value document, one metric per line."""
    return "".join(f"{k}: {v:.4f}\n" for k, v in report.as_dict().items())


class _MaskCache:
    """Rasterized masks keyed by ring identity and raster size."""

    def __init__(self):
        self._masks = {}

    def get(self, ring, size):
        key = (id(ring), size)
        if key not in self._masks:
            self._masks[key] = rasterize(ring, size[0], size[1])
        return self._masks[key]


def _image_ids(gts, preds):
    return sorted({g.image_id for g in gts} | {p.image_id for p in preds})


def _by_image(instances):
    out = {}
    for inst in instances:
        out.setdefault(inst.image_id, []).append(inst)
    return out


def _score_order(preds, max_dets=None):
    order = sorted(range(len(preds)), key=lambda i: (-preds[i].score, i))
    if max_dets is not None:
        order = order[:max_dets]
    return order


def _iou_matrix(pred_list, gt_list, size, cache):
    out = np.zeros((len(pred_list), len(gt_list)))
    for i, p in enumerate(pred_list):
        pm = cache.get(p.ring, size)
        for j, g in enumerate(gt_list):
            out[i, j] = mask_iou(pm, cache.get(g.ring, size))
    return out


def coco_ap_ar(gts, preds, iou_thresholds=DEFAULT_IOU_THRESHOLDS, config: EvalConfig = None, cache=None):
    """AP and AR per IoU threshold (fractions in [0, 1]).

    Detections are capped at max_dets per image, matched greedily in score
    order to the highest-IoU unmatched ground truth of their image, and
    pooled over the dataset for 101-point interpolated AP; AR is the
    maximal recall at each threshold.
    """
    cfg = config if config is not None else EvalConfig(iou_thresholds=tuple(iou_thresholds))
    cache = cache if cache is not None else _MaskCache()
    thresholds = tuple(iou_thresholds)

    gt_total = len(gts)
    if gt_total == 0:
        val = 1.0 if not preds else 0.0
        ar_val = 1.0  # vacuous recall
        return np.full(len(thresholds), val), np.full(len(thresholds), ar_val)

    gts_img = _by_image(gts)
    preds_img = _by_image(preds)

    # per image: capped score-ordered detections and their IoU rows
    pooled_scores = []  # (score, image rank, per-threshold tp flags)
    per_image = []
    for img in _image_ids(gts, preds):
        plist = preds_img.get(img, [])
        glist = gts_img.get(img, [])
        order = _score_order(plist, cfg.max_dets)
        capped = [plist[i] for i in order]
        ious = _iou_matrix(capped, glist, cfg.size_of(img), cache)
        per_image.append((img, capped, glist, ious))

    aps = np.zeros(len(thresholds))
    ars = np.zeros(len(thresholds))
    recall_grid = np.linspace(0.0, 1.0, 101)
    for ti, t in enumerate(thresholds):
        det_scores = []
        det_tp = []
        for _, capped, glist, ious in per_image:
            taken = np.zeros(len(glist), dtype=bool)
            for i in range(len(capped)):
                best, best_iou = -1, t
                for j in range(len(glist)):
                    if not taken[j] and ious[i, j] >= best_iou and (best < 0 or ious[i, j] > best_iou):
                        best, best_iou = j, ious[i, j]
                tp = best >= 0
                if tp:
                    taken[best] = True
                det_scores.append(capped[i].score)
                det_tp.append(tp)
        if det_scores:
            order = np.argsort(-np.asarray(det_scores), kind="stable")
            tp = np.asarray(det_tp, dtype=np.float64)[order]
            cum_tp = np.cumsum(tp)
            cum_fp = np.cumsum(1.0 - tp)
            recall = cum_tp / gt_total
            precision = cum_tp / (cum_tp + cum_fp)
            # precision envelope, then 101-point interpolation
            for i in range(len(precision) - 2, -1, -1):
                precision[i] = max(precision[i], precision[i + 1])
            idx = np.searchsorted(recall, recall_grid, side="left")
            aps[ti] = float(
                np.where(idx < len(precision), np.append(precision, 0.0)[idx], 0.0).mean()
            )
            ars[ti] = float(recall[-1])
        else:
            aps[ti] = 0.0
            ars[ti] = 0.0
    return aps, ars


def dataset_iou(gts, preds, config: EvalConfig = None, cache=None) -> float:
    """Pixel coverage: IoU of the union masks, averaged over images
    (or pooled over the dataset when config.iou_mode == 'pooled')."""
    cfg = config if config is not None else EvalConfig()
    cache = cache if cache is not None else _MaskCache()
    gts_img = _by_image(gts)
    preds_img = _by_image(preds)
    per_image = []
    pooled_i, pooled_u = 0, 0
    for img in _image_ids(gts, preds):
        w, h = cfg.size_of(img)
        gt_union = np.zeros((h, w), dtype=bool)
        for g in gts_img.get(img, []):
            gt_union |= cache.get(g.ring, (w, h)).data
        pred_union = np.zeros((h, w), dtype=bool)
        for p in preds_img.get(img, []):
            pred_union |= cache.get(p.ring, (w, h)).data
        inter = int((gt_union & pred_union).sum())
        union = int((gt_union | pred_union).sum())
        per_image.append(1.0 if union == 0 else inter / union)
        pooled_i += inter
        pooled_u += union
    if not per_image:
        return 1.0
    if cfg.iou_mode == "pooled":
        return 1.0 if pooled_u == 0 else pooled_i / pooled_u
    return float(np.mean(per_image))


def matched_pairs(gts, preds, match_iou=0.5, config: EvalConfig = None, cache=None):
    """Greedy score-ordered matching at mask IoU >= match_iou.

    Returns (pairs, n_unmatched_gts) where each pair is (gt, pred, iou).
    """
    cfg = config if config is not None else EvalConfig()
    cache = cache if cache is not None else _MaskCache()
    gts_img = _by_image(gts)
    preds_img = _by_image(preds)
    pairs = []
    unmatched = 0
    for img in _image_ids(gts, preds):
        plist = preds_img.get(img, [])
        glist = gts_img.get(img, [])
        order = _score_order(plist)
        ious = _iou_matrix([plist[i] for i in order], glist, cfg.size_of(img), cache)
        taken = np.zeros(len(glist), dtype=bool)
        for i, pi in enumerate(order):
            best, best_iou = -1, match_iou
            for j in range(len(glist)):
                if not taken[j] and ious[i, j] >= best_iou and (best < 0 or ious[i, j] > best_iou):
                    best, best_iou = j, ious[i, j]
            if best >= 0:
                taken[best] = True
                pairs.append((glist[best], plist[pi], float(ious[i, best])))
        unmatched += int((~taken).sum())
    return pairs, unmatched


def _arc_samples_with_tangents(ring: Ring, count: int):
    """Points at equal arc spacing plus the direction angle (deg) of the
    edge each point lies on."""
    coords = ring.coords
    n = len(ring)
    vec = np.roll(coords, -1, axis=0) - coords
    lengths = np.hypot(vec[:, 0], vec[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    targets = np.arange(count) * (cum[-1] / count)
    edge = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, n - 1)
    frac = (targets - cum[edge]) / lengths[edge]
    pts = coords[edge] + frac[:, None] * vec[edge]
    angles = np.degrees(np.arctan2(vec[:, 1], vec[:, 0])) % 180.0
    return pts, angles[edge]


def _fold_angle(delta):
    d = np.abs(delta) % 180.0
    return np.minimum(d, 180.0 - d)


def _pair_max_tangent_error(gt_ring: Ring, pred_ring: Ring, samples: int) -> float:
    pts, pred_angles = _arc_samples_with_tangents(pred_ring, samples)
    g = gt_ring.coords
    gvec = np.roll(g, -1, axis=0) - g
    glen2 = (gvec**2).sum(axis=1)
    gangles = np.degrees(np.arctan2(gvec[:, 1], gvec[:, 0])) % 180.0

    # point-to-segment distances, samples x gt edges
    rel = pts[:, None, :] - g[None, :, :]
    t = np.clip((rel * gvec[None, :, :]).sum(axis=2) / glen2[None, :], 0.0, 1.0)
    closest = g[None, :, :] + t[..., None] * gvec[None, :, :]
    dist = np.hypot(*(pts[:, None, :] - closest).transpose(2, 0, 1))

    # the nearest point can sit where several edges are equally close (a
    # vertex); compare against every edge within tolerance and keep the
    # most charitable tangent
    dmin = dist.min(axis=1, keepdims=True)
    candidate = dist <= dmin + 1e-9
    err = _fold_angle(pred_angles[:, None] - gangles[None, :])
    err = np.where(candidate, err, np.inf).min(axis=1)
    return float(err.max())


def mta(gts, preds, match_iou=0.5, samples_per_polygon=1000, config: EvalConfig = None, cache=None) -> float:
    """Max tangent angle error in degrees, averaged over matched pairs.

    NaN when nothing matches.
    """
    pairs, _ = matched_pairs(gts, preds, match_iou, config, cache)
    if not pairs:
        return math.nan
    errors = [
        _pair_max_tangent_error(g.ring, p.ring, samples_per_polygon) for g, p, _ in pairs
    ]
    return float(np.mean(errors))


def n_ratio(gts, preds, match_iou=0.5, config: EvalConfig = None, cache=None) -> float:
    """Predicted-to-ground-truth vertex count ratio over matched pairs."""
    pairs, _ = matched_pairs(gts, preds, match_iou, config, cache)
    if not pairs:
        return math.nan
    pred_total = sum(len(p.ring) for _, p, _ in pairs)
    gt_total = sum(len(g.ring) for g, _, _ in pairs)
    return pred_total / gt_total


def c_iou(gts, preds, match_iou=0.5, config: EvalConfig = None, cache=None) -> float:
    """Complexity-aware IoU: per pair (1 - RD) * IoU with
    RD = |N_gt - N_pred| / (N_gt + N_pred); mean over matched pairs with
    unmatched ground truths contributing zeros."""
    cfg = config if config is not None else EvalConfig()
    pairs, unmatched = matched_pairs(gts, preds, match_iou, cfg, cache)
    if not pairs:
        return 0.0 if unmatched else math.nan
    if cfg.c_iou_mode == "pooled":
        ng = sum(len(g.ring) for g, _, _ in pairs)
        np_ = sum(len(p.ring) for _, p, _ in pairs)
        rd = abs(ng - np_) / (ng + np_)
        return (1.0 - rd) * float(np.mean([iou for _, _, iou in pairs]))
    scores = []
    for g, p, iou in pairs:
        ng, npred = len(g.ring), len(p.ring)
        rd = abs(ng - npred) / (ng + npred)
        scores.append((1.0 - rd) * iou)
    scores.extend([0.0] * unmatched)
    return float(np.mean(scores))


def evaluate(gts, preds, config: EvalConfig = None) -> EvalReport:
    """All metrics in one report (shared mask cache and matching)."""
    cfg = config if config is not None else EvalConfig()
    cache = _MaskCache()
    aps, ars = coco_ap_ar(gts, preds, cfg.iou_thresholds, cfg, cache)
    thresholds = list(cfg.iou_thresholds)
    i50 = thresholds.index(0.5)
    i75 = thresholds.index(0.75)
    return EvalReport(
        ap=float(aps.mean()) * 100.0,
        ap50=float(aps[i50]) * 100.0,
        ap75=float(aps[i75]) * 100.0,
        ar=float(ars.mean()) * 100.0,
        ar50=float(ars[i50]) * 100.0,
        ar75=float(ars[i75]) * 100.0,
        iou=dataset_iou(gts, preds, cfg, cache) * 100.0,
        mta_degrees=mta(gts, preds, cfg.match_iou, cfg.samples_per_polygon, cfg, cache),
        n_ratio=n_ratio(gts, preds, cfg.match_iou, cfg, cache),
        c_iou=c_iou(gts, preds, cfg.match_iou, cfg, cache) * 100.0,
        iou_mode=cfg.iou_mode,
    )
