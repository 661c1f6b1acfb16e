/**
 * View state and the query flow behind the panel.
 *
 * The controller owns one scene at a time.  Every request takes a ticket
 * from a sequence counter, and a response landing after a newer request
 * started is dropped, so the panel always reflects the latest action.
 */

import { ApiClient } from "./api.js";
import type {
  AmbiguityPayload,
  PointResult,
  QueryMode,
  RegionResult,
  ScenePayload,
} from "./types.js";

export type Rect = [number, number, number, number];

export interface LastQuery {
  kind: "point" | "region";
  mode: QueryMode;
  x?: number;
  y?: number;
  region?: Rect;
}

export interface ViewState {
  sceneId: string | null;
  scene: ScenePayload | null;
  mode: QueryMode;
  showMasks: boolean;
  showBoxes: boolean;
  lastQuery: LastQuery | null;
  pointResult: PointResult | null;
  regionResult: RegionResult | null;
  ambiguity: AmbiguityPayload | null;
  error: string | null;
}

export type StateListener = (state: ViewState) => void;

export class ViewerController {
  readonly state: ViewState = {
    sceneId: null,
    scene: null,
    mode: "mask",
    showMasks: true,
    showBoxes: true,
    lastQuery: null,
    pointResult: null,
    regionResult: null,
    ambiguity: null,
    error: null,
  };

  private seq = 0;
  private listeners: StateListener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: StateListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  async loadScene(id: string): Promise<void> {
    const ticket = ++this.seq;
    try {
      const scene = await this.api.getScene(id);
      const ambiguity = await this.api.ambiguity(id);
      if (ticket !== this.seq) {
        return;
      }
      this.state.sceneId = id;
      this.state.scene = scene;
      this.state.ambiguity = ambiguity;
      this.state.lastQuery = null;
      this.state.pointResult = null;
      this.state.regionResult = null;
      this.state.error = null;
    } catch (exc) {
      if (ticket !== this.seq) {
        return;
      }
      this.state.error = describe(exc);
    }
    this.emit();
  }

  /**
   * Switch between bbox and mask resolution.  A recorded query is re-sent
   * in the new mode, so the stored result always matches the mode shown on
   * screen and the flip itself demonstrates the two readings side by side.
   */
  setMode(mode: QueryMode): Promise<void> {
    if (mode === this.state.mode) {
      return Promise.resolve();
    }
    this.state.mode = mode;
    const last = this.state.lastQuery;
    if (last && last.kind === "point" && last.x !== undefined && last.y !== undefined) {
      return this.clickAt(last.x, last.y);
    }
    if (last && last.kind === "region" && last.region) {
      return this.dragRegion(last.region);
    }
    this.emit();
    return Promise.resolve();
  }

  toggleMasks(): void {
    this.state.showMasks = !this.state.showMasks;
    this.emit();
  }

  toggleBoxes(): void {
    this.state.showBoxes = !this.state.showBoxes;
    this.emit();
  }

  async clickAt(x: number, y: number): Promise<void> {
    const id = this.state.sceneId;
    if (!id) {
      return;
    }
    const mode = this.state.mode;
    const ticket = ++this.seq;
    try {
      const result = await this.api.queryPoint(id, x, y, mode);
      if (ticket !== this.seq) {
        return;
      }
      this.state.lastQuery = { kind: "point", mode, x, y };
      this.state.pointResult = result;
      this.state.regionResult = null;
      this.state.error = null;
    } catch (exc) {
      if (ticket !== this.seq) {
        return;
      }
      this.state.error = describe(exc);
    }
    this.emit();
  }

  async dragRegion(region: Rect): Promise<void> {
    const id = this.state.sceneId;
    if (!id) {
      return;
    }
    const [x1, y1, x2, y2] = region;
    if (x2 <= x1 || y2 <= y1) {
      return; // degenerate drag, nothing to ask
    }
    const mode = this.state.mode;
    const ticket = ++this.seq;
    try {
      const result = await this.api.queryRegion(id, region, mode);
      if (ticket !== this.seq) {
        return;
      }
      this.state.lastQuery = { kind: "region", mode, region };
      this.state.regionResult = result;
      this.state.pointResult = null;
      this.state.error = null;
    } catch (exc) {
      if (ticket !== this.seq) {
        return;
      }
      this.state.error = describe(exc);
    }
    this.emit();
  }
}

function describe(exc: unknown): string {
  return exc instanceof Error ? exc.message : String(exc);
}
