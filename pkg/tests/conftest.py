from __future__ import annotations

import json

import pytest

from openscene.frames import load_lexicon
from openscene.pipeline import build_scene
from openscene.swig_data import parse_annotations

LEXICON_LINES = [
    "riding\tAgent,Vehicle,Place\tAn {Agent} rides the {Vehicle} at a ~{Place}",
    "sitting\tAgent,Item,Place\tAn {Agent} sits on an {Item} at a ~{Place}",
    "jumping\tAgent,Obstacle,Place\tAn {Agent} jumps over an {Obstacle} at a ~{Place}",
]

NOUN_LINES = [
    "n10287213\tman",
    "n10787470\twoman",
    "n03790512\tmotorcycle",
    "n03001627\tchair",
    "n04096066\troad",
    "n03841666\toffice",
    "n02774630\tbag",
    "n03327234\tfence",
]

# The rider scene: three overlapping boxes; (300, 250) sits inside both the
# Agent and Vehicle boxes but above the Place box, and the Agent box is the
# smaller of the two, so mask mode must award that point to the Agent.
RIDER_ANNOTATION = {
    "riding_1.jpg": {
        "width": 640,
        "height": 480,
        "verb": "riding",
        "frames": [
            {"Agent": "n10287213", "Vehicle": "n03790512", "Place": "n04096066"},
            {"Agent": "n10287213", "Vehicle": "n03790512", "Place": "n04096066"},
            {"Agent": "n10287213", "Vehicle": "n03790512", "Place": "n04096066"},
        ],
        "bb": {
            "Agent": [200, 80, 420, 360],
            "Vehicle": [150, 220, 520, 460],
            "Place": [0, 300, 640, 480],
        },
    }
}

OVERLAP_POINT = (300.0, 250.0)

SITTER_ANNOTATION = {
    "sitting_2.jpg": {
        "width": 800,
        "height": 600,
        "verb": "sitting",
        "frames": [
            {"Agent": "n10787470", "Item": "n03001627", "Place": "n03841666"},
            {"Agent": "n10787470", "Item": "n03001627", "Place": "n03841666"},
            {"Agent": "n10787470", "Item": "n03001627", "Place": "n03841666"},
        ],
        "bb": {
            "Agent": [300, 100, 520, 430],
            "Item": [280, 240, 560, 520],
            "Place": [-1, -1, -1, -1],
        },
    }
}


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(LEXICON_LINES, nouns=NOUN_LINES)


@pytest.fixture(scope="session")
def rider_annotation():
    return parse_annotations(json.dumps(RIDER_ANNOTATION))[0]


@pytest.fixture(scope="session")
def sitter_annotation():
    return parse_annotations(json.dumps(SITTER_ANNOTATION))[0]


@pytest.fixture(scope="session")
def rider_bundle(lexicon, rider_annotation):
    return build_scene(
        rider_annotation, lexicon, clock=lambda: "2026-08-19T00:00:00+00:00"
    )


@pytest.fixture()
def bundle_dir(tmp_path, lexicon, rider_annotation, sitter_annotation):
    """Directory holding the two fixture bundles, for service tests."""
    from openscene.pipeline import save_bundle

    for ann in (rider_annotation, sitter_annotation):
        bundle = build_scene(ann, lexicon, clock=lambda: "2026-08-19T00:00:00+00:00")
        save_bundle(bundle, tmp_path / (ann.image_id.rsplit(".", 1)[0] + ".json"))
    return tmp_path
