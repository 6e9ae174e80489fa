// World rendering: exact level slices first, isometric canvas as an
// enhancement with automatic fallback. The slice view model is pure data
// so per-level counts can be checked against the verbalizer's histogram.

import type { BlockTuple, Color } from "./types.js";
import { SIZE_X, SIZE_Y, SIZE_Z } from "./world.js";

export interface SliceCell {
  x: number;
  z: number;
  color: Color | null;
  agent: boolean;
}

export type LevelSlice = SliceCell[][]; // [z][x]

export interface WorldViewModel {
  slices: LevelSlice[]; // index = level (y)
  counts: Array<Record<string, number>>; // per-level color histogram
  topLevel: number; // highest occupied level, -1 when empty
}

export function buildViewModel(
  blocks: BlockTuple[],
  agentPos: [number, number, number] | null,
): WorldViewModel {
  const slices: LevelSlice[] = [];
  const counts: Array<Record<string, number>> = [];
  for (let y = 0; y < SIZE_Y; y++) {
    const slice: LevelSlice = [];
    for (let z = 0; z < SIZE_Z; z++) {
      const row: SliceCell[] = [];
      for (let x = 0; x < SIZE_X; x++) {
        row.push({
          x, z, color: null,
          agent: agentPos !== null && agentPos[0] === x && agentPos[1] === y && agentPos[2] === z,
        });
      }
      slice.push(row);
    }
    slices.push(slice);
    counts.push({});
  }
  let top = -1;
  for (const [x, y, z, color] of blocks) {
    slices[y][z][x].color = color;
    counts[y][color] = (counts[y][color] ?? 0) + 1;
    if (y > top) top = y;
  }
  return { slices, counts, topLevel: top };
}

export function isoProject(
  x: number, y: number, z: number, scale = 14,
): { px: number; py: number } {
  // simple 2:1 dimetric projection; +x right-down, +z left-down, +y up
  return {
    px: (x - z) * scale,
    py: (x + z) * scale * 0.5 - y * scale,
  };
}

export type CellClickHandler = (level: number, x: number, z: number) => void;

/** Render the nine level slices into `container`; always succeeds. */
export function renderSlices(
  doc: Document,
  container: HTMLElement,
  view: WorldViewModel,
  onCellClick: CellClickHandler | null,
): void {
  container.textContent = "";
  for (let y = SIZE_Y - 1; y >= 0; y--) {
    const panel = doc.createElement("div");
    panel.className = "slice";
    const label = doc.createElement("div");
    label.className = "slice-label";
    label.textContent = `level ${y}`;
    panel.appendChild(label);
    const grid = doc.createElement("div");
    grid.className = "slice-grid";
    for (let z = 0; z < SIZE_Z; z++) {
      for (let x = 0; x < SIZE_X; x++) {
        const cell = view.slices[y][z][x];
        const el = doc.createElement("div");
        el.className = "cell" + (cell.color ? ` c-${cell.color}` : "") + (cell.agent ? " agent" : "");
        el.title = `(${x}, ${y}, ${z})`;
        if (onCellClick) {
          el.addEventListener("click", () => onCellClick(y, x, z));
        }
        grid.appendChild(el);
      }
    }
    panel.appendChild(grid);
    container.appendChild(panel);
  }
}

const ISO_FILL: Record<Color, string> = {
  blue: "#4878a8",
  green: "#5a9e6f",
  red: "#c64f4f",
  orange: "#d9913e",
  purple: "#8f6bb0",
  yellow: "#d8c24a",
};

/**
 * Draw an isometric projection onto the canvas. Returns false when a 2d
 * context is unavailable so the caller can fall back to slices only.
 */
export function renderIso(
  canvas: HTMLCanvasElement,
  blocks: BlockTuple[],
  agentPos: [number, number, number] | null,
): boolean {
  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    return false;
  }
  if (!ctx) return false;

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const originX = canvas.width / 2;
  const originY = 40;
  const scale = 13;

  // painter's order: far cells first
  const sorted = [...blocks].sort((a, b) => a[0] + a[2] - (b[0] + b[2]) || a[1] - b[1]);
  for (const [x, y, z, color] of sorted) {
    drawCube(ctx, originX, originY, x, y, z, scale, ISO_FILL[color]);
  }
  if (agentPos) {
    const { px, py } = isoProject(agentPos[0], agentPos[1], agentPos[2], scale);
    ctx.fillStyle = "#222";
    ctx.beginPath();
    ctx.arc(originX + px, originY + py + SIZE_Z * scale * 0.5, scale * 0.3, 0, Math.PI * 2);
    ctx.fill();
  }
  return true;
}

function drawCube(
  ctx: CanvasRenderingContext2D,
  originX: number, originY: number,
  x: number, y: number, z: number,
  s: number, fill: string,
): void {
  const { px, py } = isoProject(x, y, z, s);
  const cx = originX + px;
  const cy = originY + py + SIZE_Z * s * 0.5;
  const h = s * 0.5;
  ctx.fillStyle = fill;
  ctx.strokeStyle = "rgba(0,0,0,0.35)";
  // top face
  ctx.beginPath();
  ctx.moveTo(cx, cy - s);
  ctx.lineTo(cx + s, cy - s + h);
  ctx.lineTo(cx, cy - s + 2 * h);
  ctx.lineTo(cx - s, cy - s + h);
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
  // left face
  ctx.beginPath();
  ctx.moveTo(cx - s, cy - s + h);
  ctx.lineTo(cx, cy - s + 2 * h);
  ctx.lineTo(cx, cy + h);
  ctx.lineTo(cx - s, cy);
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
  // right face
  ctx.beginPath();
  ctx.moveTo(cx + s, cy - s + h);
  ctx.lineTo(cx, cy - s + 2 * h);
  ctx.lineTo(cx, cy + h);
  ctx.lineTo(cx + s, cy);
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
}
