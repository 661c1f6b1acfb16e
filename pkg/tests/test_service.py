"""HTTP service over a bundle directory, exercised through the ASGI test
client so no socket is bound."""

import json

import pytest
from fastapi.testclient import TestClient

from conftest import OVERLAP_POINT
from openscene.errors import ValidationError
from openscene.geometry import BoundingBox
from openscene.pipeline import bundle_to_json, load_bundle, save_bundle
from openscene.roi import (
    ambiguity_report,
    ambiguity_to_json,
    region_hits_to_json,
    resolve_point,
    resolve_region,
    resolve_result_to_json,
)
from openscene.service import create_app


@pytest.fixture()
def client(bundle_dir):
    return TestClient(create_app(bundle_dir))


def test_list_scenes(client, rider_bundle):
    data = client.get("/scenes").json()
    ids = [s["id"] for s in data["scenes"]]
    assert ids == ["riding_1", "sitting_2"]
    rider = data["scenes"][0]
    assert rider["image_id"] == "riding_1.jpg"
    assert rider["verb"] == "riding"
    assert rider["caption"] == rider_bundle.caption
    assert rider["width"] == 640 and rider["height"] == 480
    assert rider["degraded"] is False


def test_get_scene_matches_bundle_json(client, bundle_dir):
    bundle = load_bundle(bundle_dir / "riding_1.json")
    expected = bundle_to_json(bundle)
    expected["id"] = "riding_1"
    assert client.get("/scenes/riding_1").json() == expected


def test_unknown_scene_404(client):
    resp = client.get("/scenes/nope")
    assert resp.status_code == 404
    assert resp.json() == {"error": "unknown scene: nope"}


def test_image_passthrough(client, bundle_dir):
    resp = client.get("/scenes/riding_1/image")
    assert resp.status_code == 404
    assert "no image stored" in resp.json()["error"]

    payload = b"\xff\xd8fake-jpeg-bytes"
    (bundle_dir / "riding_1.jpg").write_bytes(payload)
    resp = client.get("/scenes/riding_1/image")
    assert resp.status_code == 200
    assert resp.content == payload


def test_point_query_matches_roi(client, rider_bundle):
    x, y = OVERLAP_POINT
    resp = client.post("/scenes/riding_1/query",
                       json={"x": x, "y": y, "mode": "bbox"})
    assert resp.status_code == 200
    expected = resolve_result_to_json(resolve_point(rider_bundle, x, y, mode="bbox"))
    assert resp.json() == expected
    assert len(expected["hits"]) == 2

    resp = client.post("/scenes/riding_1/query", json={"x": x, "y": y})
    assert len(resp.json()["hits"]) == 1  # mask mode is the default


def test_region_query_matches_roi(client, rider_bundle):
    region = [150, 220, 520, 460]
    resp = client.post("/scenes/riding_1/query", json={"region": region})
    assert resp.status_code == 200
    hits = resolve_region(rider_bundle, BoundingBox(*map(float, region)))
    assert resp.json() == region_hits_to_json(hits)


def test_query_validation_errors(client):
    url = "/scenes/riding_1/query"
    cases = [
        ({"x": 1, "y": 2, "region": [0, 0, 1, 1]}, "not both"),
        ({}, "not both"),
        ({"region": [1, 2, 3]}, "region must be"),
        ({"region": [5, 5, 1, 1]}, "bad region"),
        ({"x": "left", "y": 2}, "numeric x and y"),
        ({"x": 1}, "numeric x and y"),
        ({"x": 99999, "y": 2}, "outside"),
        ({"x": 1, "y": 2, "mode": "psychic"}, "mode"),
    ]
    for payload, fragment in cases:
        resp = client.post(url, json=payload)
        assert resp.status_code == 400, payload
        assert fragment in resp.json()["error"], payload


def test_query_unknown_scene(client):
    resp = client.post("/scenes/ghost/query", json={"x": 1, "y": 2})
    assert resp.status_code == 404


def test_ambiguity_endpoint(client, rider_bundle):
    resp = client.get("/scenes/riding_1/ambiguity", params={"spacing": 16})
    assert resp.status_code == 200
    expected = ambiguity_to_json(ambiguity_report(rider_bundle, spacing=16))
    assert resp.json() == expected
    assert expected["mask"]["ambiguous"] == 0

    assert client.get("/scenes/riding_1/ambiguity", params={"spacing": 0}).status_code == 400
    assert client.get("/scenes/ghost/ambiguity").status_code == 404


def test_reload_disabled_by_default(client):
    resp = client.post("/reload")
    assert resp.status_code == 403
    assert "reload is disabled" in resp.json()["error"]


def test_reload_picks_up_new_bundles(bundle_dir, rider_bundle):
    client = TestClient(create_app(bundle_dir, allow_reload=True))
    assert len(client.get("/scenes").json()["scenes"]) == 2
    save_bundle(rider_bundle, bundle_dir / "copy_3.json")
    resp = client.post("/reload")
    assert resp.status_code == 200
    assert resp.json() == {"scenes": 3}
    ids = [s["id"] for s in client.get("/scenes").json()["scenes"]]
    assert "copy_3" in ids


def test_bad_bundle_files_are_skipped_with_warning(bundle_dir):
    (bundle_dir / "broken.json").write_text("{")
    with pytest.warns(UserWarning, match="skipping broken.json"):
        app = create_app(bundle_dir)
    client = TestClient(app)
    ids = [s["id"] for s in client.get("/scenes").json()["scenes"]]
    assert ids == ["riding_1", "sitting_2"]


def test_missing_bundle_dir_rejected(tmp_path):
    with pytest.raises(ValidationError, match="not readable"):
        create_app(tmp_path / "absent")


def test_static_ui_mount(bundle_dir, tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><p>viewer shell</p>")
    client = TestClient(create_app(bundle_dir, ui_dir=ui))
    resp = client.get("/ui/")
    assert resp.status_code == 200
    assert "viewer shell" in resp.text


def test_scene_json_is_json_clean(client):
    # The full payload must survive a strict serialize cycle.
    data = client.get("/scenes/riding_1").json()
    assert json.loads(json.dumps(data)) == data
    assert data["masks"]["entities"][0]["counts"][0] >= 0
