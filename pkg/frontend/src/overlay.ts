/**
 * Scene canvas: translucent mask fills, role boxes, and the drag marquee.
 *
 * Masks are decoded from their run counts right here in the client and
 * composed into a single ImageData, one palette color per role slot.
 */

import { decodeCounts, maskToRgba } from "./rle.js";
import type { MaskColor } from "./rle.js";
import type { Rect } from "./state.js";
import type { ScenePayload } from "./types.js";

export const ROLE_COLORS: MaskColor[] = [
  { r: 239, g: 83, b: 80, a: 110 },
  { r: 66, g: 165, b: 245, a: 110 },
  { r: 102, g: 187, b: 106, a: 110 },
  { r: 255, g: 202, b: 40, a: 110 },
  { r: 171, g: 71, b: 188, a: 110 },
  { r: 38, g: 198, b: 218, a: 110 },
];

/** Color for a role slot; a frame holds at most six roles, but wrap anyway. */
export function roleColor(index: number): MaskColor {
  return ROLE_COLORS[((index % ROLE_COLORS.length) + ROLE_COLORS.length) % ROLE_COLORS.length];
}

export function cssColor(color: MaskColor, alpha = 1): string {
  return `rgba(${color.r}, ${color.g}, ${color.b}, ${alpha})`;
}

/** Slot of a role name in the scene's role order, 0 if unknown. */
export function roleIndex(scene: ScenePayload, role: string): number {
  const at = scene.roles.findIndex((entry) => entry.role === role);
  return at < 0 ? 0 : at;
}

export interface DrawOptions {
  showMasks: boolean;
  showBoxes: boolean;
  highlight?: Set<string>;
  marquee?: Rect;
}

export class SceneCanvas {
  private ctx: CanvasRenderingContext2D | null;

  constructor(readonly canvas: HTMLCanvasElement) {
    // Some DOM implementations (happy-dom included) have no 2d context;
    // the viewer then keeps its state logic and skips the pixels.
    this.ctx = canvas.getContext("2d");
  }

  /** Map a mouse event to image pixel coordinates. */
  toImagePoint(event: { clientX: number; clientY: number }, scene: ScenePayload): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const sx = rect.width > 0 ? scene.width / rect.width : 1;
    const sy = rect.height > 0 ? scene.height / rect.height : 1;
    return [(event.clientX - rect.left) * sx, (event.clientY - rect.top) * sy];
  }

  draw(scene: ScenePayload, options: DrawOptions): void {
    if (this.canvas.width !== scene.width || this.canvas.height !== scene.height) {
      this.canvas.width = scene.width;
      this.canvas.height = scene.height;
    }
    const ctx = this.ctx;
    if (!ctx) {
      return;
    }
    ctx.clearRect(0, 0, scene.width, scene.height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, scene.width, scene.height);

    if (options.showMasks) {
      const { width, height, entities } = scene.masks;
      const rgba = new Uint8ClampedArray(width * height * 4);
      for (const entity of entities) {
        const flags = decodeCounts(entity.counts, width, height);
        maskToRgba(flags, roleColor(roleIndex(scene, entity.role)), rgba);
      }
      ctx.putImageData(new ImageData(rgba, width, height), 0, 0);
    }

    if (options.showBoxes) {
      for (let i = 0; i < scene.roles.length; i++) {
        const box = scene.roles[i].box;
        if (!box) {
          continue;
        }
        const hot = options.highlight?.has(scene.roles[i].role) ?? false;
        ctx.lineWidth = hot ? 4 : 2;
        ctx.strokeStyle = cssColor(roleColor(i), hot ? 1 : 0.8);
        ctx.strokeRect(box[0], box[1], box[2] - box[0], box[3] - box[1]);
      }
    }

    if (options.marquee) {
      const [x1, y1, x2, y2] = options.marquee;
      ctx.setLineDash([6, 4]);
      ctx.lineWidth = 1.5;
      ctx.strokeStyle = "rgba(255, 255, 255, 0.9)";
      ctx.strokeRect(x1, y1, x2 - x1, y2 - y1);
      ctx.setLineDash([]);
    }
  }
}
