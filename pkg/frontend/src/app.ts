/**
 * Builds the viewer DOM inside a host element and wires it to the
 * controller.  Kept separate from the entry point so component tests can
 * assemble the whole app around a mocked fetch.
 */

import { ApiClient } from "./api.js";
import { SceneCanvas } from "./overlay.js";
import {
  renderAmbiguity,
  renderError,
  renderLegend,
  renderResult,
  renderSceneInfo,
} from "./panel.js";
import { ViewerController } from "./state.js";
import type { Rect } from "./state.js";
import type { QueryMode } from "./types.js";

// Real presses travel at least a little; anything shorter than this many
// image pixels on both axes counts as a click, not a drag.
const CLICK_SLOP = 3;

export interface AppElements {
  select: HTMLSelectElement;
  modeInputs: HTMLInputElement[];
  maskToggle: HTMLInputElement;
  boxToggle: HTMLInputElement;
  banner: HTMLElement;
  info: HTMLElement;
  result: HTMLElement;
  legend: HTMLElement;
  ambiguity: HTMLElement;
}

export interface App {
  controller: ViewerController;
  canvas: SceneCanvas;
  elements: AppElements;
  /** Resolves once the scene list is loaded and the first scene shown. */
  ready: Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  return node;
}

function modeInput(value: QueryMode, checked: boolean): [HTMLLabelElement, HTMLInputElement] {
  const label = el("label");
  const input = el("input");
  input.type = "radio";
  input.name = "mode";
  input.value = value;
  input.checked = checked;
  label.append(input, ` ${value}`);
  return [label, input];
}

export function buildApp(root: HTMLElement, api: ApiClient): App {
  const controller = new ViewerController(api);

  const wrap = el("div", "viewer");
  const title = el("h1");
  title.textContent = "OpenScene viewer";

  const toolbar = el("div", "toolbar");
  const sceneLabel = el("label");
  const select = el("select");
  sceneLabel.append("scene ", select);

  const modeSwitch = el("div", "mode-switch");
  const [maskLabel, maskInput] = modeInput("mask", true);
  const [bboxLabel, bboxInput] = modeInput("bbox", false);
  modeSwitch.append(maskLabel, bboxLabel);

  const toggles = el("div", "toggles");
  const maskToggle = el("input");
  maskToggle.type = "checkbox";
  maskToggle.checked = true;
  const boxToggle = el("input");
  boxToggle.type = "checkbox";
  boxToggle.checked = true;
  const maskToggleLabel = el("label");
  maskToggleLabel.append(maskToggle, " masks");
  const boxToggleLabel = el("label");
  boxToggleLabel.append(boxToggle, " boxes");
  toggles.append(maskToggleLabel, boxToggleLabel);

  toolbar.append(sceneLabel, modeSwitch, toggles);

  const banner = el("div", "error-banner");
  banner.hidden = true;

  const layout = el("div", "layout");
  const canvasWrap = el("div", "canvas-wrap");
  const canvasEl = el("canvas");
  const info = el("div", "scene-info");
  canvasWrap.append(canvasEl, info);

  const panel = el("div", "panel");
  const result = el("div", "result");
  const legend = el("div", "legend-box");
  const ambiguity = el("div", "ambiguity");
  panel.append(result, legend, ambiguity);

  layout.append(canvasWrap, panel);
  wrap.append(title, toolbar, banner, layout);
  root.append(wrap);

  const canvas = new SceneCanvas(canvasEl);
  const modeInputs = [maskInput, bboxInput];
  let dragStart: [number, number] | null = null;
  let dragRect: Rect | null = null;

  const redraw = () => {
    const state = controller.state;
    if (!state.scene) {
      return;
    }
    const highlight = new Set<string>();
    for (const hit of state.pointResult?.hits ?? []) {
      highlight.add(hit.role);
    }
    for (const hit of state.regionResult?.hits ?? []) {
      highlight.add(hit.role);
    }
    canvas.draw(state.scene, {
      showMasks: state.showMasks,
      showBoxes: state.showBoxes,
      highlight,
      marquee: dragRect ?? undefined,
    });
  };

  controller.subscribe((state) => {
    renderError(banner, state.error);
    renderSceneInfo(info, state.scene);
    renderLegend(legend, state.scene);
    renderResult(result, state.scene, state.pointResult, state.regionResult);
    renderAmbiguity(ambiguity, state.ambiguity);
    for (const input of modeInputs) {
      input.checked = input.value === state.mode;
    }
    maskToggle.checked = state.showMasks;
    boxToggle.checked = state.showBoxes;
    if (state.sceneId && select.value !== state.sceneId) {
      select.value = state.sceneId;
    }
    redraw();
  });

  select.addEventListener("change", () => {
    void controller.loadScene(select.value);
  });
  for (const input of modeInputs) {
    input.addEventListener("change", () => {
      if (input.checked) {
        void controller.setMode(input.value as QueryMode);
      }
    });
  }
  maskToggle.addEventListener("change", () => controller.toggleMasks());
  boxToggle.addEventListener("change", () => controller.toggleBoxes());

  canvasEl.addEventListener("mousedown", (event) => {
    if (!controller.state.scene) {
      return;
    }
    dragStart = canvas.toImagePoint(event, controller.state.scene);
  });
  canvasEl.addEventListener("mousemove", (event) => {
    if (!dragStart || !controller.state.scene) {
      return;
    }
    const [x, y] = canvas.toImagePoint(event, controller.state.scene);
    dragRect = normalize(dragStart, [x, y]);
    redraw();
  });
  canvasEl.addEventListener("mouseup", (event) => {
    if (!dragStart || !controller.state.scene) {
      return;
    }
    const [x, y] = canvas.toImagePoint(event, controller.state.scene);
    const rect = normalize(dragStart, [x, y]);
    const isClick = rect[2] - rect[0] < CLICK_SLOP && rect[3] - rect[1] < CLICK_SLOP;
    const [sx, sy] = dragStart;
    dragStart = null;
    dragRect = null;
    if (isClick) {
      void controller.clickAt(sx, sy);
    } else {
      void controller.dragRegion(rect);
    }
  });

  const ready = (async () => {
    try {
      const index = await api.listScenes();
      for (const summary of index.scenes) {
        const option = el("option");
        option.value = summary.id;
        option.textContent = summary.id;
        option.setAttribute("data-field", "");
        select.append(option);
      }
      if (index.scenes.length > 0) {
        await controller.loadScene(index.scenes[0].id);
      }
    } catch (exc) {
      renderError(banner, exc instanceof Error ? exc.message : String(exc));
    }
  })();

  return {
    controller,
    canvas,
    elements: {
      select,
      modeInputs,
      maskToggle,
      boxToggle,
      banner,
      info,
      result,
      legend,
      ambiguity,
    },
    ready,
  };
}

function normalize(a: [number, number], b: [number, number]): Rect {
  return [Math.min(a[0], b[0]), Math.min(a[1], b[1]), Math.max(a[0], b[0]), Math.max(a[1], b[1])];
}
