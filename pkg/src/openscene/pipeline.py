"""Scene assembly: a verb frame plus per-role boxes goes in, a self-contained
bundle with a caption and pairwise-disjoint masks comes out.

The bundle is the unit the query API and the service work with.  It carries
its own provenance (which segmenter produced the masks, when, and whether the
build fell back to rectangular box-fill masks) so downstream consumers can
tell a degraded scene from a fully segmented one.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    BuildError,
    ParseError,
    ProtocolError,
    SchemaError,
    SegmenterTimeout,
    TransportError,
    ValidationError,
)
from .frames import FrameLexicon, render_caption, validate_situation
from .geometry import (
    BoundingBox,
    EntityMask,
    entities_from_json,
    entities_to_json,
    make_disjoint,
)
from .segmenter import BoxFillBackend, SegmentRequest, segment
from .swig_data import BLANK, MAX_ROLES, Annotation, Prediction

Clock = Callable[[], str]


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class SituationEntry:
    """One role slot: noun class (may be blank) and an optional box."""

    role: str
    noun: str = BLANK
    box: Optional[BoundingBox] = None


@dataclass(frozen=True)
class GroundedSituation:
    """A verb with its ordered, uniquely named role entries."""

    verb: str
    entries: tuple[SituationEntry, ...]

    def __post_init__(self):
        if not self.verb:
            raise ValidationError("situation needs a verb")
        if not 1 <= len(self.entries) <= MAX_ROLES:
            raise ValidationError(
                f"situation for {self.verb!r} has {len(self.entries)} roles, "
                f"expected 1..{MAX_ROLES}"
            )
        names = [e.role for e in self.entries]
        if len(set(names)) != len(names):
            raise ValidationError(f"situation for {self.verb!r} repeats a role")

    def nouns(self) -> dict:
        return {e.role: e.noun for e in self.entries}

    def boxed_entries(self) -> list[SituationEntry]:
        return [e for e in self.entries if e.box is not None]


@dataclass(frozen=True)
class Provenance:
    backend_id: str
    created_at: str
    degraded: bool = False
    segment_ms: Optional[float] = None


@dataclass
class SceneBundle:
    """Everything the query layer needs for one image, masks included."""

    image_id: str
    width: int
    height: int
    situation: GroundedSituation
    caption: str
    masks: list[EntityMask]
    provenance: Provenance
    displays: dict

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(
                f"{self.image_id}: bundle dimensions must be positive"
            )
        roles = {e.role for e in self.situation.entries}
        for em in self.masks:
            if em.role not in roles:
                raise ValidationError(
                    f"{self.image_id}: mask role {em.role!r} is not in the situation"
                )
            if em.mask.width != self.width or em.mask.height != self.height:
                raise ValidationError(
                    f"{self.image_id}: mask for {em.role!r} does not match image size"
                )

    def display_for(self, role: str) -> str:
        """Human wording for a role's noun, falling back to the raw class id."""
        if role in self.displays:
            return self.displays[role]
        for e in self.situation.entries:
            if e.role == role and e.noun != BLANK:
                return e.noun
        return role.lower()


def situation_from_annotation(ann: Annotation, annotator: int = 0) -> GroundedSituation:
    """Take one annotator's noun choices; boxes are shared across annotators."""
    if not 0 <= annotator < 3:
        raise ValueError(f"annotator index must be 0..2, got {annotator}")
    entries = tuple(
        SituationEntry(role=ra.role, noun=ra.nouns[annotator], box=ra.box)
        for ra in ann.roles
    )
    return GroundedSituation(verb=ann.verb, entries=entries)


def situation_from_prediction(
    pred: Prediction, source: str = "top1", gt_verb: Optional[str] = None
) -> GroundedSituation:
    """Build a situation from the top-1 frame or the ground-truth-verb frame.

    Prediction files do not repeat the ground-truth verb inside gt_frame, so
    the gt path needs it passed in (from the matching annotation).
    """
    if source == "top1":
        scored = pred.top5[0]
        verb, frame = scored.verb, scored.frame
    elif source == "gt":
        if pred.gt_conditioned is None:
            raise ValidationError(
                f"{pred.image_id}: prediction has no ground-truth-verb frame"
            )
        frame = pred.gt_conditioned
        verb = gt_verb or frame.verb or ""
        if not verb:
            raise ValidationError(
                f"{pred.image_id}: the gt-conditioned frame carries no verb; "
                "pass gt_verb from the annotation"
            )
    else:
        raise ValueError(f"source must be 'top1' or 'gt', got {source!r}")
    entries = tuple(
        SituationEntry(role=role, noun=pr.noun, box=pr.box)
        for role, pr in frame.entries.items()
    )
    return GroundedSituation(verb=verb, entries=entries)


def build_scene(
    source: Union[Annotation, Prediction, GroundedSituation],
    lexicon: FrameLexicon,
    backend=None,
    *,
    image_id: Optional[str] = None,
    width: Optional[int] = None,
    height: Optional[int] = None,
    image_ref: Optional[str] = None,
    annotator: int = 0,
    clock: Optional[Clock] = None,
) -> SceneBundle:
    """Validate, caption, segment, and de-overlap one scene.

    Segmenter transport or protocol failures do not abort the build: the
    boxes are filled in as rectangles and the bundle is flagged degraded.
    Situation-level problems (unknown verb, role set mismatch) raise
    BuildError because no sensible output exists for them.
    """
    if isinstance(source, Annotation):
        situation = situation_from_annotation(source, annotator=annotator)
        image_id = image_id or source.image_id
        width = width or source.width
        height = height or source.height
    elif isinstance(source, Prediction):
        situation = situation_from_prediction(source)
        image_id = image_id or source.image_id
    else:
        situation = source
    if image_id is None or width is None or height is None:
        raise BuildError(
            "image_id, width, and height are required unless building from an annotation"
        )

    report = validate_situation(lexicon, situation)
    if not report.ok:
        raise BuildError(
            f"{image_id}: situation fails validation: " + "; ".join(report.violations)
        )
    caption = render_caption(lexicon, situation.verb, situation.nouns())

    boxed = situation.boxed_entries()
    backend = backend if backend is not None else BoxFillBackend()
    degraded = False
    segment_ms: Optional[float] = None
    backend_id = backend.backend_id
    entities: list[EntityMask] = []
    if boxed:
        request = SegmentRequest(
            image_ref=image_ref or image_id,
            width=width,
            height=height,
            prompts=tuple((e.role, e.box) for e in boxed),
        )
        try:
            response = segment(request, backend)
            entities = response.entities
            backend_id = response.backend_id
            segment_ms = response.elapsed_ms
        except (TransportError, SegmenterTimeout, ProtocolError) as exc:
            warnings.warn(
                f"{image_id}: segmenter failed ({exc}); filling boxes instead",
                stacklevel=2,
            )
            fallback = BoxFillBackend()
            response = segment(request, fallback)
            entities = response.entities
            backend_id = fallback.backend_id
            segment_ms = response.elapsed_ms
            degraded = True

    masks = make_disjoint(entities) if entities else []
    displays = {
        e.role: lexicon.display(e.noun)
        for e in situation.entries
        if e.noun != BLANK
    }
    created_at = clock() if clock is not None else _utc_now()
    provenance = Provenance(
        backend_id=backend_id,
        created_at=created_at,
        degraded=degraded,
        segment_ms=segment_ms,
    )
    return SceneBundle(
        image_id=image_id,
        width=width,
        height=height,
        situation=situation,
        caption=caption,
        masks=masks,
        provenance=provenance,
        displays=displays,
    )


def mark_degraded(bundle: SceneBundle) -> SceneBundle:
    """Return the same bundle with the degraded provenance flag set."""
    bundle.provenance = replace(bundle.provenance, degraded=True)
    return bundle


def bundle_to_json(bundle: SceneBundle) -> dict:
    roles = []
    for e in bundle.situation.entries:
        rec: dict = {"role": e.role, "noun": e.noun}
        if e.role in bundle.displays:
            rec["display"] = bundle.displays[e.role]
        if e.box is not None:
            rec["box"] = e.box.as_list()
        roles.append(rec)
    prov: dict = {
        "backend_id": bundle.provenance.backend_id,
        "created_at": bundle.provenance.created_at,
        "degraded": bundle.provenance.degraded,
    }
    if bundle.provenance.segment_ms is not None:
        prov["segment_ms"] = bundle.provenance.segment_ms
    return {
        "image_id": bundle.image_id,
        "width": bundle.width,
        "height": bundle.height,
        "verb": bundle.situation.verb,
        "caption": bundle.caption,
        "roles": roles,
        "masks": entities_to_json(bundle.masks),
        "provenance": prov,
    }


def _check_disjoint(masks: list[EntityMask], image_id: str) -> None:
    if len(masks) < 2:
        return
    claimed = np.zeros(masks[0].mask.width * masks[0].mask.height, dtype=bool)
    for em in masks:
        grid = em.mask.decode().ravel()
        if np.any(claimed & grid):
            raise ValidationError(f"{image_id}: masks overlap; bundle is corrupt")
        claimed |= grid


def bundle_from_json(data: dict) -> SceneBundle:
    try:
        image_id = data["image_id"]
        width = int(data["width"])
        height = int(data["height"])
        verb = data["verb"]
        caption = data["caption"]
        role_recs = data["roles"]
        mask_data = data["masks"]
        prov_rec = data["provenance"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bundle record is missing {exc}") from exc
    entries = []
    displays = {}
    for rec in role_recs:
        box = BoundingBox(*rec["box"]) if rec.get("box") is not None else None
        entries.append(
            SituationEntry(role=rec["role"], noun=rec.get("noun", BLANK), box=box)
        )
        if "display" in rec:
            displays[rec["role"]] = rec["display"]
    situation = GroundedSituation(verb=verb, entries=tuple(entries))
    masks = entities_from_json(mask_data) if mask_data.get("entities") else []
    _check_disjoint(masks, image_id)
    provenance = Provenance(
        backend_id=prov_rec["backend_id"],
        created_at=prov_rec["created_at"],
        degraded=bool(prov_rec.get("degraded", False)),
        segment_ms=prov_rec.get("segment_ms"),
    )
    return SceneBundle(
        image_id=image_id,
        width=width,
        height=height,
        situation=situation,
        caption=caption,
        masks=masks,
        provenance=provenance,
        displays=displays,
    )


def save_bundle(bundle: SceneBundle, path) -> None:
    Path(path).write_text(json.dumps(bundle_to_json(bundle), indent=2) + "\n")


def load_bundle(source) -> SceneBundle:
    """Read a bundle file back, re-checking the invariants it was saved under."""
    try:
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            text = Path(source).read_text()
            data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bundle file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("bundle file must hold a JSON object")
    return bundle_from_json(data)
