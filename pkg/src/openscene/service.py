"""Read-only HTTP service over a directory of pre-built scene bundles.

Scenes are loaded once at startup and swapped atomically on an explicit
reload, so the query path never takes a lock: many concurrent readers see an
immutable snapshot.  Scene ids are the bundle file stems.  All responses are
JSON except the image pass-through, which returns the stored bytes untouched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI
from fastapi.responses import FileResponse, JSONResponse

from .errors import RangeError, ToolkitError, ValidationError
from .geometry import BoundingBox
from .pipeline import SceneBundle, bundle_to_json, load_bundle
from .roi import (
    ambiguity_report,
    ambiguity_to_json,
    region_hits_to_json,
    resolve_point,
    resolve_region,
    resolve_result_to_json,
)


@dataclass(frozen=True)
class _Scene:
    scene_id: str
    bundle: SceneBundle
    path: Path


def _scan_bundles(bundle_dir: Path) -> dict:
    scenes: dict[str, _Scene] = {}
    for path in sorted(bundle_dir.glob("*.json")):
        try:
            bundle = load_bundle(path)
        except ToolkitError as exc:
            warnings.warn(f"skipping {path.name}: {exc}", stacklevel=2)
            continue
        scenes[path.stem] = _Scene(scene_id=path.stem, bundle=bundle, path=path)
    return scenes


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(
    bundle_dir,
    image_dir=None,
    ui_dir=None,
    allow_reload: bool = False,
) -> FastAPI:
    """Build the app for one bundle directory.

    image_dir defaults to the bundle directory; an image is served when a
    file named exactly like the bundle's image_id exists there.
    """
    bundle_dir = Path(bundle_dir)
    if not bundle_dir.is_dir():
        raise ValidationError(f"bundle directory not readable: {bundle_dir}")
    image_root = Path(image_dir) if image_dir is not None else bundle_dir

    app = FastAPI(title="openscene service", docs_url=None, redoc_url=None)
    app.state.scenes = _scan_bundles(bundle_dir)

    def lookup(scene_id: str) -> Optional[_Scene]:
        return app.state.scenes.get(scene_id)

    @app.get("/scenes")
    def list_scenes():
        items = []
        for sid in sorted(app.state.scenes):
            b = app.state.scenes[sid].bundle
            items.append(
                {
                    "id": sid,
                    "image_id": b.image_id,
                    "verb": b.situation.verb,
                    "caption": b.caption,
                    "width": b.width,
                    "height": b.height,
                    "degraded": b.provenance.degraded,
                }
            )
        return {"scenes": items}

    @app.get("/scenes/{scene_id}")
    def get_scene(scene_id: str):
        scene = lookup(scene_id)
        if scene is None:
            return _error(404, f"unknown scene: {scene_id}")
        data = bundle_to_json(scene.bundle)
        data["id"] = scene.scene_id
        return data

    @app.get("/scenes/{scene_id}/image")
    def get_image(scene_id: str):
        scene = lookup(scene_id)
        if scene is None:
            return _error(404, f"unknown scene: {scene_id}")
        path = image_root / scene.bundle.image_id
        if not path.is_file():
            return _error(404, f"no image stored for scene: {scene_id}")
        return FileResponse(path)

    @app.post("/scenes/{scene_id}/query")
    def query_scene(scene_id: str, payload: dict = Body(...)):
        scene = lookup(scene_id)
        if scene is None:
            return _error(404, f"unknown scene: {scene_id}")
        has_point = "x" in payload or "y" in payload
        has_region = "region" in payload
        if has_point == has_region:
            return _error(400, "query needs either x and y, or region, not both")
        try:
            if has_region:
                region = payload["region"]
                if not (isinstance(region, list) and len(region) == 4):
                    return _error(400, "region must be [x1, y1, x2, y2]")
                try:
                    box = BoundingBox(*[float(v) for v in region])
                except (TypeError, ValueError, ValidationError) as exc:
                    return _error(400, f"bad region: {exc}")
                hits = resolve_region(scene.bundle, box)
                return region_hits_to_json(hits)
            try:
                x = float(payload["x"])
                y = float(payload["y"])
            except (KeyError, TypeError, ValueError):
                return _error(400, "query needs numeric x and y")
            mode = payload.get("mode", "mask")
            result = resolve_point(scene.bundle, x, y, mode=mode)
            return resolve_result_to_json(result)
        except (RangeError, ValidationError, ValueError) as exc:
            return _error(400, str(exc))

    @app.get("/scenes/{scene_id}/ambiguity")
    def get_ambiguity(scene_id: str, spacing: int = 8):
        scene = lookup(scene_id)
        if scene is None:
            return _error(404, f"unknown scene: {scene_id}")
        try:
            report = ambiguity_report(scene.bundle, spacing=spacing)
        except ValueError as exc:
            return _error(400, str(exc))
        return ambiguity_to_json(report)

    @app.post("/reload")
    def reload_scenes():
        if not allow_reload:
            return _error(403, "reload is disabled; restart the service instead")
        app.state.scenes = _scan_bundles(bundle_dir)
        return {"scenes": len(app.state.scenes)}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(app: FastAPI, host: str, port: int) -> None:
    """Run until interrupted; a busy port surfaces as the usual bind error."""
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")
