"""The grounded-situation evaluation engine: per-sample correctness flags and
the five aggregate metrics under the three verb settings (14 numbers total).

Settings differ only in how the verb gates the rest: under top-1 the first
predicted verb must match, under top-5 the ground-truth verb must appear
anywhere in the scored list, and under the ground-truth-verb setting the verb
is given, so only the four noun/box metrics apply.  Whenever the verb is
wrong, every other flag for that sample is wrong too.

A predicted noun is correct when it equals at least one of the three annotator
nouns (blank matches blank).  Its grounding is correct when the noun is
correct and either both boxes exist with IoU at or above the threshold, or the
ground truth has no box and the prediction explicitly declares the box absent.

eval_sample is pure; samples may be evaluated in parallel and aggregated in a
deterministic fold.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal, Mapping, Sequence

from .errors import ValidationError
from .geometry import BoundingBox, box_iou
from .swig_data import Annotation, PredictedFrame, PredictedRole, Prediction

DEFAULT_IOU_THRESHOLD = 0.5

FrameMatch = Literal["any_annotator", "single_annotator"]


class Setting(str, Enum):
    TOP1 = "top1"
    TOP5 = "top5"
    GT_VERB = "gt"


SETTINGS_ORDER = (Setting.TOP1, Setting.TOP5, Setting.GT_VERB)

_SETTING_LABEL = {
    Setting.TOP1: "top-1-verb",
    Setting.TOP5: "top-5-verb",
    Setting.GT_VERB: "gt-verb",
}


@dataclass(frozen=True)
class SampleFlags:
    """Correctness flags for one (image, setting) pair.

    verb_correct is None under the ground-truth-verb setting.  The dicts hold
    one entry per ground-truth role, so aggregation can count role units even
    when everything is gated to wrong.
    """

    image_id: str
    setting: Setting
    verb_correct: bool | None
    value_correct: Mapping[str, bool]
    grounded_correct: Mapping[str, bool]
    value_all: bool
    grounded_all: bool

    def __post_init__(self):
        if self.setting is not Setting.GT_VERB and self.verb_correct is False:
            others = (
                any(self.value_correct.values())
                or any(self.grounded_correct.values())
                or self.value_all
                or self.grounded_all
            )
            if others:
                raise ValidationError(
                    f"{self.image_id}: a wrong verb must force all other flags false"
                )


def _all_wrong(gt: Annotation, setting: Setting, verb_correct: bool | None) -> SampleFlags:
    falses = {r.role: False for r in gt.roles}
    return SampleFlags(
        image_id=gt.image_id,
        setting=setting,
        verb_correct=verb_correct,
        value_correct=falses,
        grounded_correct=dict(falses),
        value_all=False,
        grounded_all=False,
    )


def _grounding_ok(gt_box: BoundingBox | None, entry: PredictedRole, threshold: float) -> bool:
    if gt_box is not None:
        return entry.box is not None and box_iou(gt_box, entry.box) >= threshold
    return entry.box_declared_absent


def eval_sample(
    gt: Annotation,
    pred: Prediction,
    setting: Setting,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    frame_match: FrameMatch = "any_annotator",
) -> SampleFlags:
    """Judge one prediction against its annotation under one setting.

    A required frame that is missing (e.g. no gt-conditioned frame under the
    ground-truth-verb setting) counts as wrong with a warning, never a crash.
    """
    if gt.image_id != pred.image_id:
        raise ValueError(f"image_id mismatch: {gt.image_id!r} vs {pred.image_id!r}")

    frame: PredictedFrame | None
    if setting is Setting.TOP1:
        verb_correct: bool | None = pred.top5[0].verb == gt.verb
        frame = pred.top5[0].frame
    elif setting is Setting.TOP5:
        verb_correct = any(sv.verb == gt.verb for sv in pred.top5)
        frame = next((sv.frame for sv in pred.top5 if sv.verb == gt.verb), None)
        if verb_correct and frame is None:
            warnings.warn(
                f"{gt.image_id}: matching top-5 verb {gt.verb!r} has no frame; counted wrong"
            )
    else:
        verb_correct = None
        frame = pred.gt_conditioned
        if frame is None:
            warnings.warn(f"{gt.image_id}: no gt-conditioned frame; counted wrong")

    if verb_correct is False or frame is None:
        return _all_wrong(gt, setting, verb_correct)

    value: dict[str, bool] = {}
    grounded: dict[str, bool] = {}
    for ra in gt.roles:
        entry = frame.entries.get(ra.role)
        if entry is None:
            value[ra.role] = False
            grounded[ra.role] = False
        else:
            v = entry.noun in ra.nouns
            value[ra.role] = v
            grounded[ra.role] = v and _grounding_ok(ra.box, entry, iou_threshold)

    value_all = all(value.values())
    grounded_all = all(grounded.values())
    if frame_match == "single_annotator":
        # Stricter frame-level reading: all nouns must come from one annotator.
        matches_one = any(
            all(
                ra.role in frame.entries and frame.entries[ra.role].noun == ra.nouns[a]
                for ra in gt.roles
            )
            for a in range(3)
        )
        groundings_ok = all(
            ra.role in frame.entries
            and _grounding_ok(ra.box, frame.entries[ra.role], iou_threshold)
            for ra in gt.roles
        )
        value_all = matches_one
        grounded_all = matches_one and groundings_ok

    return SampleFlags(
        image_id=gt.image_id,
        setting=setting,
        verb_correct=verb_correct,
        value_correct=value,
        grounded_correct=grounded,
        value_all=value_all,
        grounded_all=grounded_all,
    )


@dataclass(frozen=True)
class SettingAggregate:
    """Percentages for one setting; None marks undefined (no samples) or not
    applicable (verb under the ground-truth-verb setting)."""

    images: int
    role_units: int
    verb: float | None
    value: float | None
    value_all: float | None
    grounded: float | None
    grounded_all: float | None


@dataclass(frozen=True)
class EvalReport:
    """The table-row numbers: 5 + 5 + 4 metrics across the three settings."""

    settings: Mapping[Setting, SettingAggregate]

    def __post_init__(self):
        for setting, agg in self.settings.items():
            for name in ("verb", "value", "value_all", "grounded", "grounded_all"):
                v = getattr(agg, name)
                if v is not None and not 0.0 <= v <= 100.0:
                    raise ValidationError(f"{setting.value}.{name}={v} outside [0, 100]")


def aggregate(flags: Iterable[SampleFlags]) -> EvalReport:
    """Micro-average flags into the report.

    verb, value-all, and grounded-value-all average over images; value and
    grounded-value average over (image, role) units.  Percentages keep full
    precision here and are rounded only when formatted.
    """
    by_setting: dict[Setting, list[SampleFlags]] = {s: [] for s in SETTINGS_ORDER}
    for f in flags:
        by_setting[f.setting].append(f)

    out: dict[Setting, SettingAggregate] = {}
    for setting in SETTINGS_ORDER:
        group = by_setting[setting]
        images = len(group)
        role_units = sum(len(f.value_correct) for f in group)
        if images == 0:
            out[setting] = SettingAggregate(0, 0, None, None, None, None, None)
            continue
        verb = (
            None
            if setting is Setting.GT_VERB
            else 100.0 * sum(bool(f.verb_correct) for f in group) / images
        )
        value = 100.0 * sum(sum(f.value_correct.values()) for f in group) / role_units
        grounded = 100.0 * sum(sum(f.grounded_correct.values()) for f in group) / role_units
        value_all = 100.0 * sum(f.value_all for f in group) / images
        grounded_all = 100.0 * sum(f.grounded_all for f in group) / images
        out[setting] = SettingAggregate(
            images=images,
            role_units=role_units,
            verb=verb,
            value=value,
            value_all=value_all,
            grounded=grounded,
            grounded_all=grounded_all,
        )
    return EvalReport(settings=out)


def _cell(v: float | None) -> str:
    return "—" if v is None else f"{v:.2f}"


def format_report(report: EvalReport) -> str:
    """Fixed-width text table in the canonical column order:
    verb, value, val-all, grnd, grnd-all; one row per setting."""
    header = f"{'setting':<12}{'verb':>9}{'value':>9}{'val-all':>9}{'grnd':>9}{'grnd-all':>9}"
    lines = [header]
    for setting in SETTINGS_ORDER:
        agg = report.settings[setting]
        lines.append(
            f"{_SETTING_LABEL[setting]:<12}"
            f"{_cell(agg.verb):>9}{_cell(agg.value):>9}{_cell(agg.value_all):>9}"
            f"{_cell(agg.grounded):>9}{_cell(agg.grounded_all):>9}"
        )
    lines.append("")
    for setting in SETTINGS_ORDER:
        agg = report.settings[setting]
        lines.append(
            f"{_SETTING_LABEL[setting]:<12}images={agg.images}  role_units={agg.role_units}"
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: EvalReport) -> dict:
    """Machine-readable twin of format_report (same 2-decimal rounding)."""
    out: dict = {"settings": {}}
    for setting in SETTINGS_ORDER:
        agg = report.settings[setting]
        out["settings"][setting.value] = {
            "images": agg.images,
            "role_units": agg.role_units,
            "verb": None if agg.verb is None else round(agg.verb, 2),
            "value": None if agg.value is None else round(agg.value, 2),
            "value_all": None if agg.value_all is None else round(agg.value_all, 2),
            "grounded": None if agg.grounded is None else round(agg.grounded, 2),
            "grounded_all": None if agg.grounded_all is None else round(agg.grounded_all, 2),
        }
    return out


@dataclass(frozen=True)
class MatchInfo:
    """Pairing diagnostics from evaluate_dataset."""

    missing_predictions: tuple[str, ...]
    extra_predictions: tuple[str, ...]


def evaluate_dataset(
    annotations: Sequence[Annotation],
    predictions: Sequence[Prediction],
    settings: Sequence[Setting] = SETTINGS_ORDER,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    frame_match: FrameMatch = "any_annotator",
) -> tuple[EvalReport, MatchInfo]:
    """Pair by image_id and aggregate.

    Annotated images without a prediction count as all-wrong (with a warning);
    predictions without an annotation are ignored.  Both are listed in the
    MatchInfo so strict callers can reject the run.
    """
    by_id = {p.image_id: p for p in predictions}
    missing = tuple(a.image_id for a in annotations if a.image_id not in by_id)
    gt_ids = {a.image_id for a in annotations}
    extra = tuple(p.image_id for p in predictions if p.image_id not in gt_ids)
    if missing:
        warnings.warn(f"{len(missing)} annotated image(s) lack predictions; counted wrong")

    flags: list[SampleFlags] = []
    for ann in annotations:
        pred = by_id.get(ann.image_id)
        for setting in settings:
            if pred is None:
                verb_correct = None if setting is Setting.GT_VERB else False
                flags.append(_all_wrong(ann, setting, verb_correct))
            else:
                flags.append(eval_sample(ann, pred, setting, iou_threshold, frame_match))
    return aggregate(flags), MatchInfo(missing_predictions=missing, extra_predictions=extra)
