"""Parse and validate SWiG-style annotation and prediction files.

Annotation file: one JSON object keyed by image_id, each record carrying
{width, height, verb, frames: [three role->noun maps], bb: role->[x1,y1,x2,y2]}
where [-1,-1,-1,-1] marks an ungrounded role and is normalized to "absent" at
parse time.  Prediction file: a JSON array of
{image_id, verbs: [{verb, score, frame?}], gt_frame?} with
frame = role->{noun, box?, box_absent?}.

Parsing is pure and order-stable; parse(serialize(x)) == x on the documented
schema.  Strict parsers raise on the first defect; the scan_* variants keep
good records and collect violation messages, because field dumps contain
defects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Union

from .errors import ParseError, SchemaError, ValidationError
from .geometry import BoundingBox

BLANK = ""  # blank noun sentinel: always an explicit empty string, never absence
ANNOTATORS = 3
MAX_ROLES = 6
MAX_TOP_VERBS = 5
_ABSENT_BOX = [-1, -1, -1, -1]

Source = Union[str, bytes, IO]


def _load_json(source: Source):
    try:
        if hasattr(source, "read"):
            return json.load(source)
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


@dataclass(frozen=True)
class RoleAnnotation:
    """One role of a ground-truth frame: three annotator nouns and a shared box."""

    role: str
    nouns: tuple[str, str, str]
    box: BoundingBox | None

    def __post_init__(self):
        if len(self.nouns) != ANNOTATORS:
            raise ValidationError(
                f"role {self.role!r}: expected {ANNOTATORS} annotator nouns, got {len(self.nouns)}"
            )


@dataclass(frozen=True)
class Annotation:
    """Ground truth for one image: verb plus per-role nouns and boxes."""

    image_id: str
    width: int
    height: int
    verb: str
    roles: tuple[RoleAnnotation, ...]

    def __post_init__(self):
        names = [r.role for r in self.roles]
        if not 1 <= len(names) <= MAX_ROLES:
            raise ValidationError(
                f"{self.image_id}: expected 1..{MAX_ROLES} roles, got {len(names)}"
            )
        if len(set(names)) != len(names):
            raise ValidationError(f"{self.image_id}: duplicate role identifiers")
        for r in self.roles:
            if r.box is not None and not (
                0 <= r.box.x1 and r.box.x2 <= self.width and 0 <= r.box.y1 and r.box.y2 <= self.height
            ):
                raise ValidationError(
                    f"{self.image_id}: role {r.role!r} box {r.box.as_list()} outside "
                    f"{self.width}x{self.height} image"
                )

    def role_names(self) -> tuple[str, ...]:
        return tuple(r.role for r in self.roles)


@dataclass(frozen=True)
class PredictedRole:
    """A predicted noun plus either a box or an explicit no-box declaration.

    box_declared_absent means the model asserted the role is ungrounded; a
    missing box without the declaration is just an absent prediction and never
    counts as a correct grounding.
    """

    noun: str
    box: BoundingBox | None = None
    box_declared_absent: bool = False

    def __post_init__(self):
        if self.box is not None and self.box_declared_absent:
            raise SchemaError("a predicted role cannot carry a box and declare it absent")


@dataclass(frozen=True)
class PredictedFrame:
    """Role -> PredictedRole for one verb; verb is None for gt-conditioned frames."""

    verb: str | None
    entries: dict[str, PredictedRole]

    def role_names(self) -> tuple[str, ...]:
        return tuple(self.entries)


@dataclass(frozen=True)
class ScoredVerb:
    verb: str
    score: float
    frame: PredictedFrame | None = None


@dataclass(frozen=True)
class Prediction:
    """One image's model output: top-5 scored verbs and an optional frame
    produced under the ground-truth verb."""

    image_id: str
    top5: tuple[ScoredVerb, ...]
    gt_conditioned: PredictedFrame | None = None

    def __post_init__(self):
        if not 1 <= len(self.top5) <= MAX_TOP_VERBS:
            raise SchemaError(
                f"{self.image_id}: expected 1..{MAX_TOP_VERBS} verbs, got {len(self.top5)}"
            )
        verbs = [sv.verb for sv in self.top5]
        if len(set(verbs)) != len(verbs):
            raise SchemaError(f"{self.image_id}: duplicate verb in top-5 list")
        scores = [sv.score for sv in self.top5]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise SchemaError(f"{self.image_id}: top-5 scores must be non-increasing")
        if self.top5[0].frame is None:
            raise SchemaError(f"{self.image_id}: the top-1 verb must carry a frame")


def _parse_box(raw, image_id: str, role: str) -> BoundingBox | None:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise ParseError(f"{image_id}: role {role!r} box must be [x1, y1, x2, y2], got {raw!r}")
    if all(v == -1 for v in raw):
        return None
    try:
        return BoundingBox(*(float(v) for v in raw))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{image_id}: role {role!r}: {exc}") from exc


def _parse_annotation(image_id: str, rec) -> Annotation:
    if not isinstance(rec, dict):
        raise ParseError(f"{image_id}: record must be an object")
    for key in ("width", "height", "verb", "frames", "bb"):
        if key not in rec:
            raise ParseError(f"{image_id}: missing field {key!r}")
    frames = rec["frames"]
    if not isinstance(frames, list) or len(frames) != ANNOTATORS:
        raise SchemaError(f"{image_id}: field 'frames' must list {ANNOTATORS} annotator maps")
    role_order = tuple(frames[0])
    for i, fr in enumerate(frames):
        if not isinstance(fr, dict) or set(fr) != set(role_order):
            raise SchemaError(f"{image_id}: annotator frame {i} has a different role set")
    bb = rec["bb"]
    if not isinstance(bb, dict) or set(bb) != set(role_order):
        raise SchemaError(f"{image_id}: field 'bb' must map exactly the frame roles")
    roles = tuple(
        RoleAnnotation(
            role=role,
            nouns=tuple(str(fr[role]) for fr in frames),
            box=_parse_box(bb[role], image_id, role),
        )
        for role in role_order
    )
    return Annotation(
        image_id=image_id,
        width=int(rec["width"]),
        height=int(rec["height"]),
        verb=str(rec["verb"]),
        roles=roles,
    )


def parse_annotations(source: Source) -> list[Annotation]:
    """Strict parse: raises on the first malformed or invalid record."""
    data = _load_json(source)
    if not isinstance(data, dict):
        raise ParseError("annotation file must be a JSON object keyed by image_id")
    return [_parse_annotation(image_id, rec) for image_id, rec in data.items()]


def scan_annotations(source: Source) -> tuple[list[Annotation], list[str]]:
    """Lenient parse: keep valid records, collect one message per bad record."""
    data = _load_json(source)
    if not isinstance(data, dict):
        raise ParseError("annotation file must be a JSON object keyed by image_id")
    good: list[Annotation] = []
    issues: list[str] = []
    for image_id, rec in data.items():
        try:
            good.append(_parse_annotation(image_id, rec))
        except (ParseError, SchemaError, ValidationError) as exc:
            issues.append(str(exc))
    return good, issues


def _parse_pred_frame(raw, image_id: str, verb: str | None) -> PredictedFrame:
    if not isinstance(raw, dict):
        raise ParseError(f"{image_id}: frame must be a role->entry object")
    entries: dict[str, PredictedRole] = {}
    for role, ent in raw.items():
        if not isinstance(ent, dict) or "noun" not in ent:
            raise ParseError(f"{image_id}: role {role!r} entry must carry a 'noun'")
        box = None
        declared_absent = bool(ent.get("box_absent", False))
        if "box" in ent:
            box = _parse_box(ent["box"], image_id, role)
            if box is None:  # -1 sentinel normalized to an explicit declaration
                declared_absent = True
        if box is not None and declared_absent:
            raise SchemaError(f"{image_id}: role {role!r} carries a box and box_absent")
        entries[role] = PredictedRole(
            noun=str(ent["noun"]), box=box, box_declared_absent=declared_absent
        )
    return PredictedFrame(verb=verb, entries=entries)


def _parse_prediction(rec) -> Prediction:
    if not isinstance(rec, dict) or "image_id" not in rec or "verbs" not in rec:
        raise ParseError("prediction record must carry 'image_id' and 'verbs'")
    image_id = str(rec["image_id"])
    raw_verbs = rec["verbs"]
    if not isinstance(raw_verbs, list) or not raw_verbs:
        raise ParseError(f"{image_id}: 'verbs' must be a non-empty array")
    if len(raw_verbs) > MAX_TOP_VERBS:
        raise SchemaError(f"{image_id}: more than {MAX_TOP_VERBS} verbs")
    top5 = []
    for rv in raw_verbs:
        if not isinstance(rv, dict) or "verb" not in rv or "score" not in rv:
            raise ParseError(f"{image_id}: each verb entry needs 'verb' and 'score'")
        verb = str(rv["verb"])
        frame = _parse_pred_frame(rv["frame"], image_id, verb) if "frame" in rv else None
        top5.append(ScoredVerb(verb=verb, score=float(rv["score"]), frame=frame))
    gt_frame = None
    if "gt_frame" in rec:
        gt_frame = _parse_pred_frame(rec["gt_frame"], image_id, None)
    return Prediction(image_id=image_id, top5=tuple(top5), gt_conditioned=gt_frame)


def parse_predictions(source: Source) -> list[Prediction]:
    """Strict parse of a prediction dump; order preserved."""
    data = _load_json(source)
    if not isinstance(data, list):
        raise ParseError("prediction file must be a JSON array")
    return [_parse_prediction(rec) for rec in data]


def scan_predictions(source: Source) -> tuple[list[Prediction], list[str]]:
    """Lenient variant of parse_predictions."""
    data = _load_json(source)
    if not isinstance(data, list):
        raise ParseError("prediction file must be a JSON array")
    good: list[Prediction] = []
    issues: list[str] = []
    for rec in data:
        try:
            good.append(_parse_prediction(rec))
        except (ParseError, SchemaError, ValidationError) as exc:
            issues.append(str(exc))
    return good, issues


def serialize_annotations(annotations: list[Annotation]) -> dict:
    """Inverse of parse_annotations over the documented schema."""
    out: dict = {}
    for ann in annotations:
        out[ann.image_id] = {
            "width": ann.width,
            "height": ann.height,
            "verb": ann.verb,
            "frames": [{r.role: r.nouns[a] for r in ann.roles} for a in range(ANNOTATORS)],
            "bb": {
                r.role: (r.box.as_list() if r.box is not None else list(_ABSENT_BOX))
                for r in ann.roles
            },
        }
    return out


def _serialize_pred_frame(frame: PredictedFrame) -> dict:
    out: dict = {}
    for role, ent in frame.entries.items():
        rec: dict = {"noun": ent.noun}
        if ent.box is not None:
            rec["box"] = ent.box.as_list()
        elif ent.box_declared_absent:
            rec["box_absent"] = True
        out[role] = rec
    return out


def serialize_predictions(predictions: list[Prediction]) -> list[dict]:
    """Inverse of parse_predictions over the documented schema."""
    out = []
    for pred in predictions:
        rec: dict = {"image_id": pred.image_id, "verbs": []}
        for sv in pred.top5:
            rv: dict = {"verb": sv.verb, "score": sv.score}
            if sv.frame is not None:
                rv["frame"] = _serialize_pred_frame(sv.frame)
            rec["verbs"].append(rv)
        if pred.gt_conditioned is not None:
            rec["gt_frame"] = _serialize_pred_frame(pred.gt_conditioned)
        out.append(rec)
    return out


@dataclass(frozen=True)
class DatasetStats:
    images: int
    verbs: int
    roles: int
    nouns: int
    boxes: int


def dataset_stats(annotations: list[Annotation]) -> DatasetStats:
    """Exact multiset counts; blank nouns do not count as a noun class."""
    verbs: set[str] = set()
    roles: set[str] = set()
    nouns: set[str] = set()
    boxes = 0
    for ann in annotations:
        verbs.add(ann.verb)
        for r in ann.roles:
            roles.add(r.role)
            nouns.update(n for n in r.nouns if n != BLANK)
            if r.box is not None:
                boxes += 1
    return DatasetStats(
        images=len(annotations),
        verbs=len(verbs),
        roles=len(roles),
        nouns=len(nouns),
        boxes=boxes,
    )
