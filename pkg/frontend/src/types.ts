/**
 * Wire types for the scene service.
 *
 * Field names mirror the JSON the service emits, nothing is renamed or
 * derived, so a payload can be used straight off the fetch.
 */

export type QueryMode = "bbox" | "mask";

export interface SceneSummary {
  id: string;
  image_id: string;
  verb: string;
  caption: string;
  width: number;
  height: number;
  degraded: boolean;
}

export interface SceneListPayload {
  scenes: SceneSummary[];
}

export interface RoleEntry {
  role: string;
  noun: string;
  display?: string;
  box?: number[];
}

export interface MaskEntity {
  role: string;
  confidence: number;
  counts: number[];
}

export interface MaskSet {
  width: number;
  height: number;
  entities: MaskEntity[];
}

export interface Provenance {
  backend_id: string;
  created_at: string;
  degraded: boolean;
  segment_ms?: number;
}

export interface ScenePayload {
  id: string;
  image_id: string;
  width: number;
  height: number;
  verb: string;
  caption: string;
  roles: RoleEntry[];
  masks: MaskSet;
  provenance: Provenance;
}

export interface PointHit {
  role: string;
  noun: string;
  // null in bbox mode, where overlap carries no single winner
  confidence: number | null;
}

export interface PointResult {
  mode: QueryMode;
  hits: PointHit[];
  ambiguous: boolean;
  background: boolean;
  spoken_text: string;
}

export interface RegionHit {
  role: string;
  noun: string;
  fraction: number;
}

export interface RegionResult {
  hits: RegionHit[];
}

export interface AmbiguitySide {
  ambiguous: number;
  background: number;
  ambiguous_fraction: number;
  background_fraction: number;
}

export interface AmbiguityPayload {
  spacing: number;
  points: number;
  mask: AmbiguitySide;
  bbox: AmbiguitySide;
}
