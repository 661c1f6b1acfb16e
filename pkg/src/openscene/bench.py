"""Pipeline latency benchmark on synthetic scenes.

Builds a seeded scene of overlapping boxes at a chosen resolution, then times
each pipeline stage (parse, segment, disjoint, caption, query) over several
repetitions.  The query stage is a burst of mask-mode point lookups, which is
the operation an interactive front end hammers.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from statistics import median

import numpy as np

from .frames import load_lexicon, render_caption
from .geometry import BoundingBox, make_disjoint
from .pipeline import Provenance, SceneBundle, situation_from_annotation
from .roi import resolve_point
from .segmenter import BoxFillBackend, SegmentRequest, segment
from .swig_data import Annotation, RoleAnnotation, parse_annotations, serialize_annotations

STAGES = ("parse", "segment", "disjoint", "caption", "query")


@dataclass(frozen=True)
class BenchRecord:
    stage: str
    rep: int
    elapsed_ms: float


@dataclass(frozen=True)
class BenchStageStats:
    stage: str
    median_ms: float
    p95_ms: float


@dataclass
class BenchReport:
    width: int
    height: int
    entities: int
    repeats: int
    queries: int
    records: list
    stages: list
    total_median_ms: float
    total_p95_ms: float


def synthetic_scene(width: int, height: int, entities: int, seed: int = 0):
    """A seeded one-image dataset plus the lexicon that captions it."""
    if not 1 <= entities <= 6:
        raise ValueError(f"entities must be 1..6, got {entities}")
    rng = np.random.default_rng(seed)
    roles = [f"Item{i}" for i in range(1, entities + 1)]
    nouns = [f"n{90000000 + i}" for i in range(1, entities + 1)]
    displays = {nid: f"thing{i}" for i, nid in enumerate(nouns, start=1)}

    template = "An {Item1}" + "".join(
        f" beside an {{Item{i}}}" for i in range(2, entities + 1)
    )
    noun_lines = [f"{nid}\t{disp}" for nid, disp in displays.items()]
    lexicon = load_lexicon(
        [f"arranging\t{','.join(roles)}\t{template}"], nouns=noun_lines
    )

    role_anns = []
    for role, noun in zip(roles, nouns):
        # Large boxes around random centers so most pairs overlap.
        cx = rng.uniform(0.3, 0.7) * width
        cy = rng.uniform(0.3, 0.7) * height
        w = rng.uniform(0.3, 0.6) * width
        h = rng.uniform(0.3, 0.6) * height
        box = BoundingBox(
            x1=max(0.0, cx - w / 2),
            y1=max(0.0, cy - h / 2),
            x2=min(float(width), cx + w / 2),
            y2=min(float(height), cy + h / 2),
        )
        role_anns.append(RoleAnnotation(role=role, nouns=(noun, noun, noun), box=box))
    ann = Annotation(
        image_id=f"bench_{width}x{height}.jpg",
        width=width,
        height=height,
        verb="arranging",
        roles=tuple(role_anns),
    )
    text = json.dumps(serialize_annotations([ann]))
    return text, lexicon


def _p95(values) -> float:
    return float(np.percentile(np.asarray(values, dtype=float), 95))


def run_pipeline_bench(
    width: int = 1042,
    height: int = 1042,
    entities: int = 5,
    repeats: int = 5,
    queries: int = 100,
    seed: int = 0,
) -> BenchReport:
    text, lexicon = synthetic_scene(width, height, entities, seed=seed)
    rng = np.random.default_rng(seed + 1)
    points = rng.uniform((0, 0), (width, height), size=(queries, 2))
    backend = BoxFillBackend()

    records: list[BenchRecord] = []
    totals: list[float] = []
    for rep in range(repeats):
        rep_total = 0.0

        t0 = time.perf_counter()
        anns = parse_annotations(text)
        dt = (time.perf_counter() - t0) * 1000.0
        records.append(BenchRecord("parse", rep, dt))
        rep_total += dt
        ann = anns[0]
        situation = situation_from_annotation(ann)

        request = SegmentRequest(
            image_ref=ann.image_id,
            width=width,
            height=height,
            prompts=tuple((e.role, e.box) for e in situation.boxed_entries()),
        )
        t0 = time.perf_counter()
        response = segment(request, backend)
        dt = (time.perf_counter() - t0) * 1000.0
        records.append(BenchRecord("segment", rep, dt))
        rep_total += dt

        t0 = time.perf_counter()
        disjoint = make_disjoint(response.entities)
        dt = (time.perf_counter() - t0) * 1000.0
        records.append(BenchRecord("disjoint", rep, dt))
        rep_total += dt

        t0 = time.perf_counter()
        caption = render_caption(lexicon, situation.verb, situation.nouns())
        dt = (time.perf_counter() - t0) * 1000.0
        records.append(BenchRecord("caption", rep, dt))
        rep_total += dt

        bundle = SceneBundle(
            image_id=ann.image_id,
            width=width,
            height=height,
            situation=situation,
            caption=caption,
            masks=disjoint,
            provenance=Provenance(backend_id=backend.backend_id, created_at="bench"),
            displays={e.role: lexicon.display(e.noun) for e in situation.entries},
        )
        t0 = time.perf_counter()
        for x, y in points:
            resolve_point(bundle, float(x), float(y), mode="mask")
        dt = (time.perf_counter() - t0) * 1000.0
        records.append(BenchRecord("query", rep, dt))
        rep_total += dt

        totals.append(rep_total)

    stage_stats = []
    for stage in STAGES:
        vals = [r.elapsed_ms for r in records if r.stage == stage]
        stage_stats.append(
            BenchStageStats(stage=stage, median_ms=median(vals), p95_ms=_p95(vals))
        )
    return BenchReport(
        width=width,
        height=height,
        entities=entities,
        repeats=repeats,
        queries=queries,
        records=records,
        stages=stage_stats,
        total_median_ms=median(totals),
        total_p95_ms=_p95(totals),
    )


def format_bench(report: BenchReport) -> str:
    lines = [
        f"pipeline bench: {report.width}x{report.height}, "
        f"{report.entities} entities, {report.repeats} reps, "
        f"{report.queries} queries per rep",
        f"{'stage':<10}{'median ms':>12}{'p95 ms':>12}",
    ]
    for s in report.stages:
        lines.append(f"{s.stage:<10}{s.median_ms:>12.3f}{s.p95_ms:>12.3f}")
    lines.append(
        f"{'total':<10}{report.total_median_ms:>12.3f}{report.total_p95_ms:>12.3f}"
    )
    return "\n".join(lines)


def bench_to_json(report: BenchReport) -> dict:
    return {
        "width": report.width,
        "height": report.height,
        "entities": report.entities,
        "repeats": report.repeats,
        "queries": report.queries,
        "stages": [
            {"stage": s.stage, "median_ms": s.median_ms, "p95_ms": s.p95_ms}
            for s in report.stages
        ],
        "total_median_ms": report.total_median_ms,
        "total_p95_ms": report.total_p95_ms,
    }
