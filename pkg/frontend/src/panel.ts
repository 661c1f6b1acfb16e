/**
 * Result panel rendering.
 *
 * Every piece of text that came from the service lands in an element
 * marked data-field and is copied verbatim.  The component tests walk
 * those elements and check no displayed string was invented here;
 * numbers rendered next to them (confidences, fractions) are formatted
 * locally and carry no such mark.
 */

import { cssColor, roleColor, roleIndex } from "./overlay.js";
import type {
  AmbiguityPayload,
  AmbiguitySide,
  PointResult,
  RegionResult,
  ScenePayload,
} from "./types.js";

function field(tag: string, text: string, className?: string): HTMLElement {
  const el = document.createElement(tag);
  el.textContent = text;
  el.setAttribute("data-field", "");
  if (className) {
    el.className = className;
  }
  return el;
}

function note(text: string): HTMLElement {
  const el = document.createElement("p");
  el.className = "empty-note";
  el.textContent = text;
  return el;
}

function swatch(scene: ScenePayload, role: string): HTMLElement {
  const el = document.createElement("span");
  el.className = "swatch";
  el.style.background = cssColor(roleColor(roleIndex(scene, role)));
  return el;
}

function heading(text: string): HTMLElement {
  const el = document.createElement("h2");
  el.textContent = text;
  return el;
}

export function renderSceneInfo(container: HTMLElement, scene: ScenePayload | null): void {
  container.replaceChildren();
  if (!scene) {
    return;
  }
  const caption = field("p", scene.caption, "caption");
  const verb = field("span", scene.verb, "verb");
  const line = document.createElement("p");
  line.className = "verb-line";
  line.append("verb: ", verb);
  container.append(caption, line);
}

export function renderLegend(container: HTMLElement, scene: ScenePayload | null): void {
  container.replaceChildren();
  if (!scene) {
    return;
  }
  container.append(heading("roles"));
  const list = document.createElement("ul");
  list.className = "legend";
  for (const entry of scene.roles) {
    const item = document.createElement("li");
    item.append(
      swatch(scene, entry.role),
      field("span", entry.display ?? entry.noun, "hit-noun"),
      field("span", entry.role, "hit-role"),
    );
    list.append(item);
  }
  container.append(list);
}

export function renderPointResult(
  container: HTMLElement,
  result: PointResult,
  scene: ScenePayload,
): void {
  container.append(heading(`point result (${result.mode})`));
  if (result.background) {
    container.append(field("p", result.spoken_text, "empty-note"));
    return;
  }
  const list = document.createElement("ul");
  list.className = "hits";
  for (const hit of result.hits) {
    const item = document.createElement("li");
    item.className = "hit";
    item.append(
      swatch(scene, hit.role),
      field("span", hit.noun, "hit-noun"),
      field("span", hit.role, "hit-role"),
    );
    if (hit.confidence !== null) {
      const score = document.createElement("span");
      score.className = "hit-score";
      score.textContent = hit.confidence.toFixed(2);
      item.append(score);
    }
    list.append(item);
  }
  container.append(list);
  if (result.ambiguous) {
    container.append(note(`${result.hits.length} overlapping candidates`));
  }
  const spoken = field("p", result.spoken_text, "spoken");
  container.append(spoken);
}

export function renderRegionResult(
  container: HTMLElement,
  result: RegionResult,
  scene: ScenePayload,
): void {
  container.append(heading("region result"));
  if (result.hits.length === 0) {
    container.append(note("nothing but background in the region"));
    return;
  }
  const list = document.createElement("ol");
  list.className = "hits";
  const ranked = [...result.hits].sort((a, b) => b.fraction - a.fraction);
  for (const hit of ranked) {
    const item = document.createElement("li");
    item.className = "hit";
    const share = document.createElement("span");
    share.className = "hit-score";
    share.textContent = `${(hit.fraction * 100).toFixed(1)}%`;
    item.append(
      swatch(scene, hit.role),
      field("span", hit.noun, "hit-noun"),
      field("span", hit.role, "hit-role"),
      share,
    );
    list.append(item);
  }
  container.append(list);
}

export function renderResult(
  container: HTMLElement,
  scene: ScenePayload | null,
  point: PointResult | null,
  region: RegionResult | null,
): void {
  container.replaceChildren();
  if (!scene) {
    return;
  }
  if (point) {
    renderPointResult(container, point, scene);
  } else if (region) {
    renderRegionResult(container, region, scene);
  } else {
    container.append(note("click the scene, or drag a region"));
  }
}

function sideRow(label: string, side: AmbiguitySide): HTMLTableRowElement {
  const row = document.createElement("tr");
  const cells = [
    label,
    String(side.ambiguous),
    `${(side.ambiguous_fraction * 100).toFixed(1)}%`,
    `${(side.background_fraction * 100).toFixed(1)}%`,
  ];
  for (const text of cells) {
    const cell = document.createElement("td");
    cell.textContent = text;
    row.append(cell);
  }
  return row;
}

export function renderAmbiguity(container: HTMLElement, payload: AmbiguityPayload | null): void {
  container.replaceChildren();
  if (!payload) {
    return;
  }
  container.append(heading("ambiguity, bbox vs mask"));
  const table = document.createElement("table");
  const caption = document.createElement("caption");
  caption.textContent = `${payload.points} probe points, spacing ${payload.spacing}px`;
  const head = document.createElement("tr");
  for (const text of ["mode", "ambiguous", "amb %", "bg %"]) {
    const cell = document.createElement("th");
    cell.textContent = text;
    head.append(cell);
  }
  table.append(caption, head, sideRow("bbox", payload.bbox), sideRow("mask", payload.mask));
  container.append(table);
}

export function renderError(banner: HTMLElement, message: string | null): void {
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}
