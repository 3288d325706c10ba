"""
Task metrics: accuracy, retrieval Recall@K and AP, segmentation mIoU.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from ..core.exceptions import MetricError, ShapeMismatchError
from ..core.constants import IGNORE_INDEX

TOP_ONE_PERCENT = "top1%"

K = Union[int, str]


def accuracy(predictions: Sequence[int], labels: Sequence[int]) -> float:
    """Percentage of predictions equal to their label."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.size == 0:
        raise MetricError("Accuracy of an empty set is undefined")
    if predictions.shape != labels.shape:
        raise ShapeMismatchError(f"{predictions.shape} predictions for {labels.shape} labels")
    return 100.0 * float(np.mean(predictions == labels))


def cosine_similarity(queries: np.ndarray, gallery: np.ndarray) -> np.ndarray:
    """Q x G cosine similarities."""
    q = np.asarray(queries, dtype=np.float64)
    g = np.asarray(gallery, dtype=np.float64)
    q = q / np.maximum(np.linalg.norm(q, axis=1, keepdims=True), 1e-12)
    g = g / np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-12)
    return q @ g.T


def resolve_k(k: K, gallery_size: int) -> int:
    """Integer cutoff; ``"top1%"`` means ``ceil(gallery_size / 100)``."""
    if k == TOP_ONE_PERCENT:
        return max(1, math.ceil(gallery_size / 100))
    if isinstance(k, str) or int(k) < 1:
        raise MetricError(f"k must be a positive integer or '{TOP_ONE_PERCENT}', got {k!r}")
    return int(k)


def true_match_ranks(
    queries: np.ndarray, gallery: np.ndarray, ground_truth: Sequence[Optional[int]]
) -> np.ndarray:
    """
    Zero-based rank of each query's true gallery item.

    Rank is the number of other gallery items with similarity at least as
    high, so a tie with a distractor counts against the query.

    Raises:
        MetricError: If a query has no ground-truth gallery index
    """
    sims = cosine_similarity(queries, gallery)
    if len(ground_truth) != sims.shape[0]:
        raise MetricError(f"{sims.shape[0]} queries but {len(ground_truth)} ground-truth entries")
    ranks = np.empty(sims.shape[0], dtype=np.int64)
    for qi, gi in enumerate(ground_truth):
        if gi is None or not 0 <= int(gi) < sims.shape[1]:
            raise MetricError(f"Query {qi} has no valid ground-truth gallery item")
        row = sims[qi]
        # the true item itself always satisfies >=
        ranks[qi] = int(np.sum(row >= row[int(gi)])) - 1
    return ranks


def recall_at_k(
    queries: np.ndarray, gallery: np.ndarray, ground_truth: Sequence[Optional[int]], k: K
) -> float:
    """
    Percentage of queries whose true match ranks within the top ``k``.

    Args:
        queries: Q x D embeddings
        gallery: G x D embeddings
        ground_truth: Gallery index of each query's true match
        k: Cutoff, or ``"top1%"``
    """
    ranks = true_match_ranks(queries, gallery, ground_truth)
    if ranks.size == 0:
        raise MetricError("Recall of an empty query set is undefined")
    cutoff = resolve_k(k, np.asarray(gallery).shape[0])
    return 100.0 * float(np.mean(ranks < cutoff))


def average_precision(ranked_relevance: Sequence[Sequence[bool]]) -> float:
    """
    Mean over queries of non-interpolated average precision, in percent.

    Each entry lists, in ranked order, whether the retrieved item is relevant.
    A query's AP is the mean of precision@i over the relevant positions i, so a
    single relevant item at rank r scores 1/r.

    Raises:
        MetricError: If there are no queries or a query has no relevant item
    """
    if len(ranked_relevance) == 0:
        raise MetricError("Average precision of an empty query set is undefined")
    scores = []
    for qi, relevance in enumerate(ranked_relevance):
        rel = np.asarray(relevance, dtype=bool)
        if not rel.any():
            raise MetricError(f"Query {qi} has no relevant item")
        hits = np.cumsum(rel)
        positions = np.arange(1, rel.size + 1)
        scores.append(float(np.mean(hits[rel] / positions[rel])))
    return 100.0 * float(np.mean(scores))


def retrieval_average_precision(
    queries: np.ndarray, gallery: np.ndarray, ground_truth: Sequence[Optional[int]]
) -> float:
    """AP with one true match per query, i.e. the mean of 1 / rank."""
    ranks = true_match_ranks(queries, gallery, ground_truth)
    if ranks.size == 0:
        raise MetricError("Average precision of an empty query set is undefined")
    return 100.0 * float(np.mean(1.0 / (ranks + 1)))


def confusion_matrix(
    pred_map: np.ndarray, gt_map: np.ndarray, num_classes: int, ignore_index: int = IGNORE_INDEX
) -> np.ndarray:
    """num_classes x num_classes counts (rows gt, columns pred) over non-ignored pixels."""
    pred = np.asarray(pred_map).astype(np.int64)
    gt = np.asarray(gt_map).astype(np.int64)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"Prediction {pred.shape} and label {gt.shape} maps differ")
    valid = gt != ignore_index
    gt, pred = gt[valid], pred[valid]
    if gt.size and (min(gt.min(), pred.min()) < 0 or max(gt.max(), pred.max()) >= num_classes):
        raise MetricError(f"Class ids must lie in [0, {num_classes})")
    counts = np.bincount(num_classes * gt + pred, minlength=num_classes**2)
    return counts.reshape(num_classes, num_classes)


def miou_from_confusion(confusion: np.ndarray) -> float:
    """Mean IoU over classes present in either prediction or ground truth."""
    confusion = np.asarray(confusion, dtype=np.float64)
    intersection = np.diag(confusion)
    union = confusion.sum(axis=0) + confusion.sum(axis=1) - intersection
    present = union > 0
    if not present.any():
        raise MetricError("mIoU is undefined when every pixel is ignored")
    return float(np.mean(intersection[present] / union[present]))


def miou(
    pred_map: np.ndarray, gt_map: np.ndarray, num_classes: int, ignore_index: int = IGNORE_INDEX
) -> float:
    """Mean intersection-over-union in [0, 1]."""
    return miou_from_confusion(confusion_matrix(pred_map, gt_map, num_classes, ignore_index))
