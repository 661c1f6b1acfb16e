/**
 * Canned stand-in for the scene service.
 *
 * The payloads mirror the rider fixture the service emits for it: three
 * overlapping boxes where the point (300, 250) sits inside both the Agent
 * and Vehicle boxes, so bbox mode sees two candidates and mask mode one.
 */

import type { FetchLike } from "../src/api.js";
import type {
  AmbiguityPayload,
  PointResult,
  RegionResult,
  SceneListPayload,
  ScenePayload,
} from "../src/types.js";

/** Run counts for a filled box, the same scan layout the service encodes. */
export function boxRuns(
  width: number,
  height: number,
  box: [number, number, number, number],
): number[] {
  const [x1, y1, x2, y2] = box;
  const runs: number[] = [y1 * width + x1];
  for (let y = y1; y < y2; y++) {
    runs.push(x2 - x1);
    if (y + 1 < y2) {
      runs.push(width - (x2 - x1));
    }
  }
  runs.push(width - x2 + (height - y2) * width);
  return runs;
}

export const SCENE_LIST: SceneListPayload = {
  scenes: [
    {
      id: "riding_1",
      image_id: "riding_1.jpg",
      verb: "riding",
      caption: "A man rides the motorcycle at a road",
      width: 640,
      height: 480,
      degraded: false,
    },
  ],
};

// Box fills stand in for the service's disjoint masks; the tests never
// compare mask pixels against the canned query answers.
export const SCENE_DETAIL: ScenePayload = {
  id: "riding_1",
  image_id: "riding_1.jpg",
  width: 640,
  height: 480,
  verb: "riding",
  caption: "A man rides the motorcycle at a road",
  roles: [
    { role: "Agent", noun: "n10287213", display: "man", box: [200, 80, 420, 360] },
    { role: "Vehicle", noun: "n03790512", display: "motorcycle", box: [150, 220, 520, 460] },
    { role: "Place", noun: "n04096066", display: "road", box: [0, 300, 640, 480] },
  ],
  masks: {
    width: 640,
    height: 480,
    entities: [
      { role: "Agent", confidence: 1.0, counts: boxRuns(640, 480, [200, 80, 420, 360]) },
      { role: "Vehicle", confidence: 1.0, counts: boxRuns(640, 480, [150, 220, 520, 460]) },
      { role: "Place", confidence: 1.0, counts: boxRuns(640, 480, [0, 300, 640, 480]) },
    ],
  },
  provenance: {
    backend_id: "box-fill",
    created_at: "2026-08-19T00:00:00+00:00",
    degraded: false,
  },
};

export const POINT_BBOX: PointResult = {
  mode: "bbox",
  hits: [
    { role: "Agent", noun: "man", confidence: null },
    { role: "Vehicle", noun: "motorcycle", confidence: null },
  ],
  ambiguous: true,
  background: false,
  spoken_text: "man, the agent; motorcycle, the vehicle",
};

export const POINT_MASK: PointResult = {
  mode: "mask",
  hits: [{ role: "Agent", noun: "man", confidence: 1.0 }],
  ambiguous: false,
  background: false,
  spoken_text: "man, the agent",
};

export const POINT_BACKGROUND: PointResult = {
  mode: "mask",
  hits: [],
  ambiguous: false,
  background: true,
  spoken_text: "background",
};

export const REGION_SINGLE: RegionResult = {
  hits: [{ role: "Agent", noun: "man", fraction: 1.0 }],
};

export const REGION_DOUBLE: RegionResult = {
  hits: [
    { role: "Agent", noun: "man", fraction: 0.8148148148148148 },
    { role: "Vehicle", noun: "motorcycle", fraction: 0.18518518518518517 },
  ],
};

export const REGION_EMPTY: RegionResult = { hits: [] };

export const AMBIGUITY: AmbiguityPayload = {
  spacing: 8,
  points: 4800,
  mask: { ambiguous: 0, background: 2076, ambiguous_fraction: 0.0, background_fraction: 0.4325 },
  bbox: {
    ambiguous: 1200,
    background: 2076,
    ambiguous_fraction: 0.25,
    background_fraction: 0.4325,
  },
};

export function jsonResponse(payload: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => payload,
  } as unknown as Response;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface MockService {
  fetchFn: FetchLike;
  calls: RecordedCall[];
}

interface QueryBody {
  x?: number;
  y?: number;
  mode?: string;
  region?: number[];
}

function routeQuery(body: QueryBody): Response {
  if (body.region) {
    const key = body.region.join(",");
    if (key === "150,220,420,360") {
      return jsonResponse(REGION_DOUBLE);
    }
    if (key === "220,100,300,200") {
      return jsonResponse(REGION_SINGLE);
    }
    return jsonResponse(REGION_EMPTY);
  }
  if (body.x === undefined || body.y === undefined) {
    return jsonResponse({ error: "query needs either x and y, or region, not both" }, 400);
  }
  if (body.x === 300 && body.y === 250) {
    return jsonResponse(body.mode === "bbox" ? POINT_BBOX : POINT_MASK);
  }
  return jsonResponse(POINT_BACKGROUND);
}

export function createMockService(): MockService {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ url, method, body });
    if (method === "POST" && url.endsWith("/scenes/riding_1/query")) {
      return routeQuery(body as QueryBody);
    }
    if (url.endsWith("/scenes")) {
      return jsonResponse(SCENE_LIST);
    }
    if (url.endsWith("/scenes/riding_1")) {
      return jsonResponse(SCENE_DETAIL);
    }
    if (url.includes("/scenes/riding_1/ambiguity")) {
      return jsonResponse(AMBIGUITY);
    }
    return jsonResponse({ error: `no scene at ${url}` }, 404);
  };
  return { fetchFn, calls };
}
