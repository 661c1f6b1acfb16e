"""Seeded random annotation/prediction pairs with controlled corruption, used
by the metrics oracle-equivalence and gating tests."""

from __future__ import annotations

import numpy as np

from openscene.geometry import BoundingBox
from openscene.swig_data import (
    Annotation,
    PredictedFrame,
    PredictedRole,
    Prediction,
    RoleAnnotation,
    ScoredVerb,
)

VERB_POOL = [f"verb{i}" for i in range(12)]
ROLE_POOL = ["Agent", "Item", "Place", "Tool", "Source", "Destination",
             "Victim", "Vehicle"]
NOUN_POOL = [f"n{100 + i}" for i in range(30)]

WIDTH, HEIGHT = 640, 480


def random_box(rng: np.random.Generator) -> BoundingBox:
    x1 = rng.uniform(0, WIDTH - 20)
    y1 = rng.uniform(0, HEIGHT - 20)
    w = rng.uniform(10, WIDTH - x1)
    h = rng.uniform(10, HEIGHT - y1)
    return BoundingBox(x1, y1, min(x1 + w, WIDTH), min(y1 + h, HEIGHT))


def jitter_box(rng: np.random.Generator, box: BoundingBox) -> BoundingBox:
    """Shift a box by a random fraction of its size, so IoU against the
    original lands on both sides of 0.5."""
    dx = rng.uniform(-0.8, 0.8) * (box.x2 - box.x1)
    dy = rng.uniform(-0.8, 0.8) * (box.y2 - box.y1)
    x1 = min(max(0.0, box.x1 + dx), WIDTH - 1.0)
    y1 = min(max(0.0, box.y1 + dy), HEIGHT - 1.0)
    x2 = min(box.x2 + dx, float(WIDTH))
    y2 = min(box.y2 + dy, float(HEIGHT))
    if x2 <= x1:
        x2 = x1 + 1.0
    if y2 <= y1:
        y2 = y1 + 1.0
    return BoundingBox(x1, y1, x2, y2)


def random_annotation(rng: np.random.Generator, image_id: str) -> Annotation:
    n_roles = int(rng.integers(1, 7))
    roles = [str(r) for r in rng.choice(ROLE_POOL, size=n_roles, replace=False)]
    role_anns = []
    for role in roles:
        base = str(rng.choice(NOUN_POOL))
        nouns = []
        for _ in range(3):
            r = rng.random()
            if r < 0.6:
                nouns.append(base)
            elif r < 0.8:
                nouns.append(str(rng.choice(NOUN_POOL)))
            else:
                nouns.append("")
        box = random_box(rng) if rng.random() < 0.75 else None
        role_anns.append(RoleAnnotation(role=role, nouns=tuple(nouns), box=box))
    return Annotation(
        image_id=image_id,
        width=WIDTH,
        height=HEIGHT,
        verb=str(rng.choice(VERB_POOL)),
        roles=tuple(role_anns),
    )


def _predicted_role(rng: np.random.Generator, ra: RoleAnnotation) -> PredictedRole:
    r = rng.random()
    if r < 0.7:
        noun = str(rng.choice([n for n in ra.nouns]))
    else:
        noun = str(rng.choice(NOUN_POOL + [""]))
    if ra.box is not None:
        r = rng.random()
        if r < 0.6:
            return PredictedRole(noun=noun, box=jitter_box(rng, ra.box))
        if r < 0.8:
            return PredictedRole(noun=noun, box=random_box(rng))
        if r < 0.9:
            return PredictedRole(noun=noun, box_declared_absent=True)
        return PredictedRole(noun=noun)
    r = rng.random()
    if r < 0.6:
        return PredictedRole(noun=noun, box_declared_absent=True)
    if r < 0.8:
        return PredictedRole(noun=noun, box=random_box(rng))
    return PredictedRole(noun=noun)


def random_frame(rng: np.random.Generator, ann: Annotation, verb) -> PredictedFrame:
    entries = {}
    for ra in ann.roles:
        if rng.random() < 0.9:
            entries[ra.role] = _predicted_role(rng, ra)
    if rng.random() < 0.15:
        extra = str(rng.choice([r for r in ROLE_POOL if r not in entries]))
        entries[extra] = PredictedRole(noun=str(rng.choice(NOUN_POOL)))
    if not entries:
        ra = ann.roles[0]
        entries[ra.role] = _predicted_role(rng, ra)
    return PredictedFrame(verb=verb, entries=entries)


def random_prediction(rng: np.random.Generator, ann: Annotation) -> Prediction:
    top1_correct = rng.random() < 0.55
    in_top5 = top1_correct or rng.random() < 0.6
    n_verbs = int(rng.integers(1, 6))
    wrong_verbs = [v for v in VERB_POOL if v != ann.verb]
    verbs = list(rng.choice(wrong_verbs, size=n_verbs, replace=False))
    if top1_correct:
        verbs[0] = ann.verb
    elif in_top5 and n_verbs > 1:
        verbs[int(rng.integers(1, n_verbs))] = ann.verb

    scores = np.sort(rng.uniform(0, 1, size=n_verbs))[::-1]
    top5 = []
    for i, (verb, score) in enumerate(zip(verbs, scores)):
        wants_frame = i == 0 or rng.random() < 0.8
        frame = random_frame(rng, ann, verb) if wants_frame else None
        top5.append(ScoredVerb(verb=verb, score=float(score), frame=frame))
    # gt-conditioned frames carry no verb of their own in the file schema.
    gt_frame = random_frame(rng, ann, None) if rng.random() < 0.9 else None
    return Prediction(image_id=ann.image_id, top5=tuple(top5), gt_conditioned=gt_frame)


def random_dataset(seed: int, n_images: int):
    """n_images (annotation, prediction) pairs with varied corruption."""
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(n_images):
        ann = random_annotation(rng, f"img_{i:04d}.jpg")
        pairs.append((ann, random_prediction(rng, ann)))
    return pairs
