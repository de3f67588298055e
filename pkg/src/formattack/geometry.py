"""Box arithmetic: IoU, neighbor zones, and neighbor-set computation.

A value's neighbor zone is its tight bounding box expanded on each side,
clamped to the page. Words overlapping the zone by more than 0.5 (plus a
fixed count of reading-order adjacent words) form the value's neighbor set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .docmodel import BoundingBox, Document, FieldAnnotation

OverlapMetric = Literal["iou", "word_coverage"]
ExpandMode = Literal["page_relative", "box_relative"]

OVERLAP_THRESHOLD = 0.5  # strictly greater-than


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0.0 when the union has zero area."""
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    inter = max(0.0, ix) * max(0.0, iy)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def overlap(word_box: BoundingBox, zone_box: BoundingBox, metric: OverlapMetric = "iou") -> float:
    """Word/zone overlap under the configured metric.

    ``word_coverage`` is intersection over the word's own area, which never
    shrinks as the zone grows; plain IoU can under-select against large
    zones but follows the neighbor definition literally.
    """
    if metric == "iou":
        return iou(word_box, zone_box)
    ix = min(word_box.x2, zone_box.x2) - max(word_box.x1, zone_box.x1)
    iy = min(word_box.y2, zone_box.y2) - max(word_box.y1, zone_box.y1)
    inter = max(0.0, ix) * max(0.0, iy)
    if word_box.area <= 0.0:
        return 0.0
    return inter / word_box.area


@dataclass(frozen=True)
class NeighborZone:
    """Expanded box around a value span used to pick geometric neighbors."""

    box: BoundingBox
    expand_rate: float
    extra_order_neighbors: int


def value_box(doc: Document, ann: FieldAnnotation) -> BoundingBox:
    """Tight union of the annotation's value word boxes."""
    boxes = [doc.words[i].box for i in ann.value_indices]
    return BoundingBox(
        min(b.x1 for b in boxes),
        min(b.y1 for b in boxes),
        max(b.x2 for b in boxes),
        max(b.y2 for b in boxes),
    )


def value_zone(
    doc: Document,
    ann: FieldAnnotation,
    expand_rate: float,
    extra_order_neighbors: int = 0,
    expand_mode: ExpandMode = "page_relative",
) -> NeighborZone:
    """Neighbor zone: value box expanded by ``expand_rate`` per side.

    Expansion is relative to the page size by default (a rate of 0.02 of a
    small value box would be nearly a no-op); ``box_relative`` scales by the
    value box's own dimensions instead. The zone is clamped to the page.
    """
    vb = value_box(doc, ann)
    if expand_mode == "page_relative":
        dx = expand_rate * doc.page_width
        dy = expand_rate * doc.page_height
    else:
        dx = expand_rate * vb.width
        dy = expand_rate * vb.height
    box = BoundingBox(
        max(0.0, vb.x1 - dx),
        max(0.0, vb.y1 - dy),
        min(doc.page_width, vb.x2 + dx),
        min(doc.page_height, vb.y2 + dy),
    )
    return NeighborZone(box=box, expand_rate=expand_rate, extra_order_neighbors=extra_order_neighbors)


def neighbors(
    doc: Document,
    ann: FieldAnnotation,
    expand_rate: float,
    extra_order_neighbors: int,
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> set[int]:
    """Indices of the annotation's neighbor words.

    Union of (a) words whose overlap with the neighbor zone exceeds 0.5 and
    (b) the ``extra_order_neighbors`` words immediately before and after the
    value span in reading order. The value's own indices are excluded.
    """
    own = set(ann.value_indices)
    zone = value_zone(doc, ann, expand_rate, extra_order_neighbors, expand_mode)
    out = {
        i
        for i, w in enumerate(doc.words)
        if i not in own and overlap(w.box, zone.box, metric) > OVERLAP_THRESHOLD
    }
    lo = min(ann.value_indices)
    hi = max(ann.value_indices)
    for i in range(max(0, lo - extra_order_neighbors), lo):
        if i not in own:
            out.add(i)
    for i in range(hi + 1, min(len(doc.words), hi + 1 + extra_order_neighbors)):
        if i not in own:
            out.add(i)
    return out


def union_neighbors(
    doc: Document,
    expand_rate: float,
    extra_order_neighbors: int,
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> frozenset[int]:
    """Union of all annotations' neighbor sets, minus every value index.

    Value words of one field can fall inside another field's zone; they are
    excluded here because no transform may touch value words through the
    neighbor set.
    """
    values = doc.value_index_set()
    out: set[int] = set()
    for ann in doc.annotations:
        out |= neighbors(doc, ann, expand_rate, extra_order_neighbors, metric, expand_mode)
    return frozenset(out - values)
