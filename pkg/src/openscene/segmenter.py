"""Client for box-prompted segmentation backends.

Three interchangeable backends produce one mask per prompted box: an HTTP
backend speaking a small JSON protocol, a file-exchange backend for offline
batch runs, and a deterministic box-fill backend that needs no external
process at all.  The box-fill backend doubles as the fallback when a remote
segmenter is down, so a scene build never hard-fails on transport problems.
"""

from __future__ import annotations

import json
import random
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ProtocolError, SegmenterTimeout, TransportError, ValidationError
from .geometry import (
    BoundingBox,
    EntityMask,
    box_to_mask,
    entities_from_json,
)

DEFAULT_TIMEOUT = 10.0


@dataclass(frozen=True)
class SegmentRequest:
    """One image plus an ordered list of (role, box) prompts."""

    image_ref: str
    width: int
    height: int
    prompts: tuple = ()

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(
                f"request dimensions must be positive, got {self.width}x{self.height}"
            )
        if not self.prompts:
            raise ValidationError("segment request needs at least one prompt")
        for item in self.prompts:
            role, box = item
            if not role:
                raise ValidationError("every prompt needs a role label")
            if not isinstance(box, BoundingBox):
                raise ValidationError(f"prompt for {role!r} is not a bounding box")

    def to_json(self) -> dict:
        return {
            "image_ref": self.image_ref,
            "width": self.width,
            "height": self.height,
            "boxes": [
                {"role": role, "x1": b.x1, "y1": b.y1, "x2": b.x2, "y2": b.y2}
                for role, b in self.prompts
            ],
        }


@dataclass
class SegmentResponse:
    """Masks aligned one-to-one with the request prompts."""

    entities: list[EntityMask]
    backend_id: str
    elapsed_ms: float


@dataclass(frozen=True)
class Capabilities:
    """Result of probing a backend; `probe` never raises."""

    reachable: bool
    backend_id: str = ""
    max_prompts: Optional[int] = None


class BoxFillBackend:
    """Fills each prompted box with a rectangular mask.  Deterministic."""

    backend_id = "box-fill"

    def run(self, request: SegmentRequest) -> list[EntityMask]:
        return [
            EntityMask(role=role, mask=box_to_mask(box, request.width, request.height),
                       confidence=1.0)
            for role, box in request.prompts
        ]

    def probe(self) -> Capabilities:
        return Capabilities(reachable=True, backend_id=self.backend_id)


class HttpBackend:
    """Talks to a segmentation service over HTTP.

    POST {endpoint}/segment with the request JSON; the reply is the standard
    mask-file payload.  One retry with a short jitter delay on connection
    errors; timeouts are surfaced as their own error type so callers can
    distinguish a slow backend from a dead one.
    """

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT,
                 retries: int = 1, jitter: tuple = (0.05, 0.25), session=None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.jitter = jitter
        if session is None:
            import requests

            session = requests.Session()
        self._session = session
        self.backend_id = f"http:{self.endpoint}"

    def run(self, request: SegmentRequest) -> list[EntityMask]:
        import requests

        payload = request.to_json()
        attempts = self.retries + 1
        last_exc = None
        for attempt in range(attempts):
            try:
                resp = self._session.post(
                    f"{self.endpoint}/segment", json=payload, timeout=self.timeout
                )
            except requests.Timeout as exc:
                raise SegmenterTimeout(
                    f"segmenter at {self.endpoint} timed out after {self.timeout}s"
                ) from exc
            except requests.RequestException as exc:
                last_exc = exc
                if attempt + 1 < attempts:
                    time.sleep(random.uniform(*self.jitter))
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"segmenter returned HTTP {resp.status_code}: {resp.text[:200]}"
                )
            try:
                data = resp.json()
            except ValueError as exc:
                raise ProtocolError(f"segmenter reply is not JSON: {exc}") from exc
            advertised = data.get("backend_id")
            if advertised:
                self.backend_id = str(advertised)
            return entities_from_json(data)
        err = TransportError(
            f"segmenter at {self.endpoint} unreachable after {attempts} attempts: {last_exc}"
        )
        err.retries = self.retries
        raise err

    def probe(self) -> Capabilities:
        import requests

        try:
            resp = self._session.get(f"{self.endpoint}/probe", timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except (requests.RequestException, ValueError):
            return Capabilities(reachable=False, backend_id=self.backend_id)
        return Capabilities(
            reachable=True,
            backend_id=str(data.get("backend_id", self.backend_id)),
            max_prompts=data.get("max_prompts"),
        )


class FileBackend:
    """Exchanges request/response JSON files with a worker watching a directory.

    A request is written to request-<token>.json and the matching
    response-<token>.json is polled until `timeout` elapses.
    """

    def __init__(self, exchange_dir, timeout: float = DEFAULT_TIMEOUT,
                 poll_interval: float = 0.05):
        self.exchange_dir = Path(exchange_dir)
        self.timeout = timeout
        self.poll_interval = poll_interval
        self.backend_id = f"file:{self.exchange_dir}"

    def run(self, request: SegmentRequest) -> list[EntityMask]:
        self.exchange_dir.mkdir(parents=True, exist_ok=True)
        token = uuid.uuid4().hex
        req_path = self.exchange_dir / f"request-{token}.json"
        resp_path = self.exchange_dir / f"response-{token}.json"
        req_path.write_text(json.dumps(request.to_json(), indent=2))
        deadline = time.monotonic() + self.timeout
        while time.monotonic() < deadline:
            if resp_path.exists():
                try:
                    data = json.loads(resp_path.read_text())
                except ValueError as exc:
                    raise ProtocolError(f"response file is not JSON: {exc}") from exc
                return entities_from_json(data)
            time.sleep(self.poll_interval)
        raise SegmenterTimeout(
            f"no response for {req_path.name} within {self.timeout}s"
        )

    def probe(self) -> Capabilities:
        ok = self.exchange_dir.is_dir()
        return Capabilities(reachable=ok, backend_id=self.backend_id)


def segment(request: SegmentRequest, backend) -> SegmentResponse:
    """Run one request and verify the reply lines up with the prompts."""
    start = time.perf_counter()
    entities = backend.run(request)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    if len(entities) != len(request.prompts):
        raise ProtocolError(
            f"backend returned {len(entities)} masks for {len(request.prompts)} prompts"
        )
    for ent, (role, _box) in zip(entities, request.prompts):
        if ent.role != role:
            raise ProtocolError(
                f"mask order mismatch: expected role {role!r}, got {ent.role!r}"
            )
        if ent.mask.width != request.width or ent.mask.height != request.height:
            raise ProtocolError(
                f"mask for {role!r} is {ent.mask.width}x{ent.mask.height}, "
                f"image is {request.width}x{request.height}"
            )
    return SegmentResponse(
        entities=entities, backend_id=backend.backend_id, elapsed_ms=elapsed_ms
    )


def probe(backend) -> Capabilities:
    """Ask a backend what it can do.  Never raises; dead backends report unreachable."""
    try:
        return backend.probe()
    except Exception:
        return Capabilities(reachable=False, backend_id=getattr(backend, "backend_id", ""))
