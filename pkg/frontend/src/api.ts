/**
 * Thin typed client for the scene service.
 *
 * The fetch implementation is injectable so component tests can stand in
 * a canned service; nothing else in the viewer touches the network.
 */

import type {
  AmbiguityPayload,
  PointResult,
  QueryMode,
  RegionResult,
  SceneListPayload,
  ScenePayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  listScenes(): Promise<SceneListPayload> {
    return this.request("/scenes");
  }

  getScene(id: string): Promise<ScenePayload> {
    return this.request(`/scenes/${encodeURIComponent(id)}`);
  }

  imageUrl(id: string): string {
    return `${this.baseUrl}/scenes/${encodeURIComponent(id)}/image`;
  }

  queryPoint(id: string, x: number, y: number, mode: QueryMode): Promise<PointResult> {
    return this.post(id, { x, y, mode });
  }

  queryRegion(id: string, region: number[], mode: QueryMode): Promise<RegionResult> {
    return this.post(id, { region, mode });
  }

  ambiguity(id: string, spacing = 8): Promise<AmbiguityPayload> {
    return this.request(`/scenes/${encodeURIComponent(id)}/ambiguity?spacing=${spacing}`);
  }

  private post<T>(id: string, body: unknown): Promise<T> {
    return this.request(`/scenes/${encodeURIComponent(id)}/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let message = `service error (${response.status})`;
      try {
        const body: unknown = await response.json();
        const error = (body as { error?: unknown }).error;
        if (typeof error === "string") {
          message = error;
        }
      } catch {
        // not a JSON body; keep the status message
      }
      throw new ApiError(message, response.status);
    }
    return (await response.json()) as T;
  }
}
