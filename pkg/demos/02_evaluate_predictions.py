"""
Scoring predictions against annotated situations
================================================

Five metrics under three verb settings. The key rule: a wrong top-1 verb
makes every other top-1 number wrong for that image, no partial credit.
"""

import json

from openscene.metrics import evaluate_dataset, format_report
from openscene.swig_data import parse_annotations, parse_predictions

# Two annotated images. Three annotators pick a noun per role; one shared
# box per role, [-1,-1,-1,-1] meaning "this role has no box".
ANNOTATIONS = {
    "beach_1.jpg": {
        "width": 640, "height": 480, "verb": "surfing",
        "frames": [
            {"Agent": "n_surfer", "Tool": "n_board", "Place": "n_sea"},
            {"Agent": "n_surfer", "Tool": "n_board", "Place": "n_sea"},
            {"Agent": "n_person", "Tool": "n_board", "Place": "n_sea"},
        ],
        "bb": {"Agent": [100, 50, 300, 400], "Tool": [80, 300, 340, 460],
               "Place": [-1, -1, -1, -1]},
    },
    "park_2.jpg": {
        "width": 640, "height": 480, "verb": "jogging",
        "frames": [
            {"Agent": "n_runner", "Place": "n_park"},
            {"Agent": "n_runner", "Place": "n_park"},
            {"Agent": "n_runner", "Place": "n_park"},
        ],
        "bb": {"Agent": [200, 100, 360, 420], "Place": [-1, -1, -1, -1]},
    },
}

# The first prediction nails everything; the second gets the verb wrong,
# so its correct-looking roles cannot score under top-1 or top-5.
PREDICTIONS = [
    {
        "image_id": "beach_1.jpg",
        "verbs": [
            {"verb": "surfing", "score": 0.9, "frame": {
                "Agent": {"noun": "n_surfer", "box": [105, 48, 295, 405]},
                "Tool": {"noun": "n_board", "box": [82, 305, 338, 455]},
                "Place": {"noun": "n_sea", "box_absent": True},
            }},
            {"verb": "swimming", "score": 0.1},
        ],
        "gt_frame": {
            "Agent": {"noun": "n_surfer", "box": [105, 48, 295, 405]},
            "Tool": {"noun": "n_board", "box": [82, 305, 338, 455]},
            "Place": {"noun": "n_sea", "box_absent": True},
        },
    },
    {
        "image_id": "park_2.jpg",
        "verbs": [
            {"verb": "walking", "score": 0.8, "frame": {
                "Agent": {"noun": "n_runner", "box": [200, 100, 360, 420]},
                "Place": {"noun": "n_park", "box_absent": True},
            }},
            {"verb": "sprinting", "score": 0.2},
        ],
        "gt_frame": {
            "Agent": {"noun": "n_runner", "box": [200, 100, 360, 420]},
            "Place": {"noun": "n_park", "box_absent": True},
        },
    },
]

anns = parse_annotations(json.dumps(ANNOTATIONS))
preds = parse_predictions(json.dumps(PREDICTIONS))

report, match = evaluate_dataset(anns, preds)
print(format_report(report))

# park_2 still scores 100 under the gt-verb setting: its gt-conditioned
# frame is perfect, only the verb choice was bad.
