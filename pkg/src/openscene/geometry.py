"""Box and mask geometry: IoU, the RLE codec, box-fill masks, disjointness,
and point membership queries.

Masks are run-length encoded over a row-major scan from the top-left pixel,
alternating zero-run / one-run and always starting with the zero-run (which
may have length 0).  All operations here are pure and the value types are
treated as immutable after construction, so scenes can be processed in
parallel without locking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CodecError, GeometryError, RangeError, ValidationError


@dataclass(frozen=True)
class BoundingBox:
    """Continuous-coordinate box, x right / y down, corners [x1, y1, x2, y2]."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        vals = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"box coordinates must be finite, got {vals}")
        if any(v < 0 for v in vals):
            raise ValidationError(f"box coordinates must be >= 0, got {vals}")
        if not (self.x2 > self.x1 and self.y2 > self.y1):
            raise ValidationError(f"box must satisfy x2 > x1 and y2 > y1, got {vals}")

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def contains(self, x: float, y: float) -> bool:
        """Half-open containment: [x1, x2) x [y1, y2), so adjacent boxes never
        double-claim a shared edge."""
        return self.x1 <= x < self.x2 and self.y1 <= y < self.y2

    def as_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass
class RleMask:
    """Binary mask as alternating run lengths, row-major from the top-left.

    counts[0] is a zero-run and may be 0; every later run must be positive.
    The run lengths always sum to width*height.
    """

    width: int
    height: int
    counts: list[int]
    _cumsum: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise CodecError(f"mask dims must be positive, got {self.width}x{self.height}")
        counts = list(self.counts)
        if not counts:
            raise CodecError("counts must not be empty")
        if any(c < 0 for c in counts):
            raise CodecError("run lengths must be non-negative")
        if any(c == 0 for c in counts[1:]):
            raise CodecError("only the leading zero-run may have length 0")
        total = sum(counts)
        if total != self.width * self.height:
            raise CodecError(
                f"run lengths sum to {total}, expected {self.width * self.height}"
            )
        self.counts = counts

    def _cum(self) -> np.ndarray:
        if self._cumsum is None:
            self._cumsum = np.cumsum(np.asarray(self.counts, dtype=np.int64))
        return self._cumsum

    @property
    def area(self) -> int:
        """Number of set pixels."""
        return int(sum(self.counts[1::2]))

    def contains(self, x: float, y: float) -> bool:
        """Membership of the pixel containing continuous point (x, y)."""
        if not (0 <= x <= self.width and 0 <= y <= self.height):
            raise RangeError(f"point ({x}, {y}) outside {self.width}x{self.height} image")
        col = min(int(x), self.width - 1)
        row = min(int(y), self.height - 1)
        flat = row * self.width + col
        # Runs at odd indices are one-runs (the scan starts with a zero-run).
        run = int(np.searchsorted(self._cum(), flat, side="right"))
        return run % 2 == 1

    def decode(self) -> np.ndarray:
        return rle_decode(self)


@dataclass
class EntityMask:
    """A role's mask plus the segmenter's confidence for it."""

    role: str
    mask: RleMask
    confidence: float

    def __post_init__(self):
        if not self.role:
            raise ValidationError("entity role must be non-empty")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(f"confidence must be in [0, 1], got {self.confidence}")


def box_iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union on continuous coordinates; 0 when disjoint."""
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def rle_encode(bitmask: np.ndarray) -> RleMask:
    """Encode a height x width binary grid into canonical run lengths."""
    grid = np.asarray(bitmask)
    if grid.ndim != 2 or grid.shape[0] <= 0 or grid.shape[1] <= 0:
        raise CodecError(f"expected a 2-D grid, got shape {grid.shape}")
    flat = grid.astype(bool).ravel()
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts = [0] + counts
    height, width = grid.shape
    return RleMask(width=int(width), height=int(height), counts=counts)


def rle_decode(mask: RleMask) -> np.ndarray:
    """Decode back to a height x width boolean grid; exact inverse of encode."""
    values = np.zeros(len(mask.counts), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, mask.counts)
    return flat.reshape(mask.height, mask.width)


def box_to_mask(box: BoundingBox, width: int, height: int) -> RleMask:
    """Rasterize a box: pixel (row i, col j) is set iff its center
    (j+0.5, i+0.5) lies inside box intersected with the image.

    A box that covers no pixel center yields an empty mask and a warning.
    """
    if width <= 0 or height <= 0:
        raise GeometryError(f"image dims must be positive, got {width}x{height}")
    # Centers j+0.5 in [x1, x2) <=> ceil(x1 - 0.5) <= j <= ceil(x2 - 0.5) - 1.
    c0 = max(0, math.ceil(box.x1 - 0.5))
    c1 = min(width - 1, math.ceil(box.x2 - 0.5) - 1)
    r0 = max(0, math.ceil(box.y1 - 0.5))
    r1 = min(height - 1, math.ceil(box.y2 - 0.5) - 1)
    if c0 > c1 or r0 > r1:
        if box.x2 <= 0 or box.x1 >= width or box.y2 <= 0 or box.y1 >= height:
            warnings.warn(f"box {box.as_list()} lies fully outside the {width}x{height} image")
        else:
            warnings.warn(f"box {box.as_list()} covers no pixel center")
        return RleMask(width=width, height=height, counts=[width * height])
    grid = np.zeros((height, width), dtype=bool)
    grid[r0 : r1 + 1, c0 : c1 + 1] = True
    return rle_encode(grid)


def make_disjoint(masks: Sequence[EntityMask]) -> list[EntityMask]:
    """Resolve overlaps so every input pixel belongs to exactly one output mask.

    Contested pixels go to the mask with higher confidence, then smaller
    original area, then earlier position in the input list.  Output order,
    roles, and confidences mirror the input.
    """
    if not masks:
        return []
    w, h = masks[0].mask.width, masks[0].mask.height
    for m in masks:
        if (m.mask.width, m.mask.height) != (w, h):
            raise GeometryError(
                f"mask dims {m.mask.width}x{m.mask.height} for role {m.role!r} "
                f"do not match {w}x{h}"
            )
    order = sorted(
        range(len(masks)),
        key=lambda i: (-masks[i].confidence, masks[i].mask.area, i),
    )
    claimed = np.zeros((h, w), dtype=bool)
    out: list[EntityMask | None] = [None] * len(masks)
    for i in order:
        grid = rle_decode(masks[i].mask)
        mine = grid & ~claimed
        claimed |= mine
        out[i] = EntityMask(
            role=masks[i].role,
            mask=rle_encode(mine),
            confidence=masks[i].confidence,
        )
    return out  # type: ignore[return-value]


def entities_to_json(entities: Sequence[EntityMask]) -> dict:
    """Mask-file schema: {width, height, entities: [{role, confidence, counts}]}."""
    if not entities:
        return {"width": 0, "height": 0, "entities": []}
    return {
        "width": entities[0].mask.width,
        "height": entities[0].mask.height,
        "entities": [
            {"role": e.role, "confidence": e.confidence, "counts": list(e.mask.counts)}
            for e in entities
        ],
    }


def entities_from_json(data: dict) -> list[EntityMask]:
    """Parse the mask-file schema back into entity masks."""
    if not isinstance(data, dict) or "entities" not in data:
        raise CodecError("mask data must be an object with an 'entities' array")
    out = []
    for rec in data["entities"]:
        try:
            mask = RleMask(
                width=int(data["width"]),
                height=int(data["height"]),
                counts=[int(c) for c in rec["counts"]],
            )
            out.append(
                EntityMask(role=str(rec["role"]), mask=mask, confidence=float(rec["confidence"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CodecError(f"bad mask entity record: {exc}") from exc
    return out


Geometry = Union[RleMask, BoundingBox]


def covering_set(
    entries: Iterable[tuple[str, Geometry]],
    point: tuple[float, float],
    width: int,
    height: int,
) -> list[str]:
    """Roles whose geometry covers the point, in the given entry order.

    Masks answer by pixel membership; boxes by half-open containment.
    """
    x, y = point
    if not (0 <= x <= width and 0 <= y <= height):
        raise RangeError(f"point ({x}, {y}) outside {width}x{height} image")
    hit: list[str] = []
    for role, geom in entries:
        if isinstance(geom, RleMask):
            covered = geom.contains(x, y)
        elif isinstance(geom, BoundingBox):
            covered = geom.contains(x, y)
        else:
            raise GeometryError(f"unsupported geometry {type(geom).__name__} for role {role!r}")
        if covered:
            hit.append(role)
    return hit
