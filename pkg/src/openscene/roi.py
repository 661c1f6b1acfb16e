"""Point and region queries against a scene bundle.

Queries answer "what is here?" for a touch point or a swept region, in either
mask mode (tight silhouettes, at most one hit on a disjoint bundle) or bbox
mode (loose rectangles, possibly several).  Results carry a ready-to-speak
text line so a screen-reader front end can pass them straight through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RangeError
from .geometry import BoundingBox, covering_set
from .pipeline import SceneBundle

MODES = ("mask", "bbox")


@dataclass(frozen=True)
class Hit:
    """One entity under the query point.  `noun` is the display wording."""

    role: str
    noun: str
    confidence: Optional[float] = None


@dataclass(frozen=True)
class RegionHit:
    role: str
    noun: str
    fraction: float


@dataclass(frozen=True)
class ResolveResult:
    mode: str
    hits: tuple
    ambiguous: bool
    background: bool
    spoken_text: str


def _spoken(hits) -> str:
    if not hits:
        return "background"
    return "; ".join(f"{h.noun}, the {h.role.lower()}" for h in hits)


def resolve_point(bundle: SceneBundle, x: float, y: float, mode: str = "mask") -> ResolveResult:
    """Resolve one point.  Out-of-bounds points are a caller error, not a miss."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "mask":
        entries = [(em.role, em.mask) for em in bundle.masks]
        confidences = {em.role: em.confidence for em in bundle.masks}
    else:
        entries = [
            (e.role, e.box) for e in bundle.situation.entries if e.box is not None
        ]
        confidences = {}
    roles = covering_set(entries, (x, y), bundle.width, bundle.height)
    hits = tuple(
        Hit(role=r, noun=bundle.display_for(r), confidence=confidences.get(r))
        for r in roles
    )
    return ResolveResult(
        mode=mode,
        hits=hits,
        ambiguous=len(hits) > 1,
        background=not hits,
        spoken_text=_spoken(hits),
    )


def resolve_center(bundle: SceneBundle, mode: str = "mask") -> ResolveResult:
    """Default query when no point was given: the image center."""
    return resolve_point(bundle, bundle.width / 2.0, bundle.height / 2.0, mode=mode)


def _pixel_span(lo: float, hi: float, limit: int) -> tuple[int, int]:
    # Centers at k + 0.5; first center >= lo and last center < hi, clamped.
    first = max(0, math.ceil(lo - 0.5))
    last = min(limit - 1, math.ceil(hi - 0.5) - 1)
    return first, last


def resolve_region(bundle: SceneBundle, region: BoundingBox) -> list[RegionHit]:
    """Coverage fractions of each mask over the region, largest first.

    Fractions are relative to the part of the region inside the image, so
    they describe what the user actually swept.  Entities with zero overlap
    are omitted.
    """
    c0, c1 = _pixel_span(region.x1, region.x2, bundle.width)
    r0, r1 = _pixel_span(region.y1, region.y2, bundle.height)
    if c1 < c0 or r1 < r0:
        raise RangeError(
            f"region {region.as_list()} covers no pixels of a "
            f"{bundle.width}x{bundle.height} image"
        )
    denom = (c1 - c0 + 1) * (r1 - r0 + 1)
    hits = []
    for em in bundle.masks:
        grid = em.mask.decode()
        inside = int(grid[r0 : r1 + 1, c0 : c1 + 1].sum())
        if inside:
            hits.append(
                RegionHit(
                    role=em.role,
                    noun=bundle.display_for(em.role),
                    fraction=inside / denom,
                )
            )
    hits.sort(key=lambda h: -h.fraction)
    return hits


@dataclass(frozen=True)
class ModeAmbiguity:
    ambiguous: int
    background: int
    ambiguous_fraction: float
    background_fraction: float


@dataclass(frozen=True)
class AmbiguityReport:
    """How often a probe grid lands on 2+ entities (or none), per mode."""

    spacing: int
    points: int
    mask: ModeAmbiguity
    bbox: ModeAmbiguity


def _mode_counts(counts: np.ndarray) -> ModeAmbiguity:
    total = counts.size
    ambiguous = int((counts >= 2).sum())
    background = int((counts == 0).sum())
    return ModeAmbiguity(
        ambiguous=ambiguous,
        background=background,
        ambiguous_fraction=ambiguous / total,
        background_fraction=background / total,
    )


def ambiguity_report(bundle: SceneBundle, spacing: int = 8) -> AmbiguityReport:
    """Probe pixel centers every `spacing` px and tally overlap per mode.

    Because bundle masks are pairwise disjoint, the mask-mode ambiguous
    fraction of a well-formed bundle is exactly zero; the bbox number is the
    interesting one.
    """
    if spacing < 1:
        raise ValueError(f"spacing must be >= 1, got {spacing}")
    xs = np.arange(0.5, bundle.width, spacing)
    ys = np.arange(0.5, bundle.height, spacing)
    cols = np.floor(xs).astype(int)
    rows = np.floor(ys).astype(int)

    mask_counts = np.zeros((len(rows), len(cols)), dtype=np.int32)
    for em in bundle.masks:
        grid = em.mask.decode()
        mask_counts += grid[np.ix_(rows, cols)].astype(np.int32)

    bbox_counts = np.zeros_like(mask_counts)
    for e in bundle.situation.entries:
        if e.box is None:
            continue
        in_x = (xs >= e.box.x1) & (xs < e.box.x2)
        in_y = (ys >= e.box.y1) & (ys < e.box.y2)
        bbox_counts += np.outer(in_y, in_x).astype(np.int32)

    return AmbiguityReport(
        spacing=spacing,
        points=int(mask_counts.size),
        mask=_mode_counts(mask_counts),
        bbox=_mode_counts(bbox_counts),
    )


def resolve_result_to_json(result: ResolveResult) -> dict:
    return {
        "mode": result.mode,
        "hits": [
            {"role": h.role, "noun": h.noun, "confidence": h.confidence}
            for h in result.hits
        ],
        "ambiguous": result.ambiguous,
        "background": result.background,
        "spoken_text": result.spoken_text,
    }


def region_hits_to_json(hits: list[RegionHit]) -> dict:
    return {
        "hits": [
            {"role": h.role, "noun": h.noun, "fraction": h.fraction} for h in hits
        ]
    }


def ambiguity_to_json(report: AmbiguityReport) -> dict:
    def mode(m: ModeAmbiguity) -> dict:
        return {
            "ambiguous": m.ambiguous,
            "background": m.background,
            "ambiguous_fraction": m.ambiguous_fraction,
            "background_fraction": m.background_fraction,
        }

    return {
        "spacing": report.spacing,
        "points": report.points,
        "mask": mode(report.mask),
        "bbox": mode(report.bbox),
    }
