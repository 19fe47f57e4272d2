/** Crop grid: selected samples in their assigned cells, with ground-truth and
 * prediction boxes drawn client-side over each crop. */

import type { GridCell, GridResponse } from "./api.js";
import { h, VNode } from "./vnode.js";

export interface GridHandlers {
  onCellClick?: (cell: GridCell) => void;
  cropUrl?: (relative: string) => string;
}

export type OverlayMode = "both" | "gt" | "pred";

const CELL_PX = 96;

function overlayRects(cell: GridCell, mode: OverlayMode): VNode[] {
  const boxes = [cell.gt?.box, cell.pred?.box].filter((b): b is [number, number, number, number] => !!b);
  if (boxes.length === 0) return [];
  const pad = 0.15;
  const x0 = Math.min(...boxes.map((b) => b[0]));
  const y0 = Math.min(...boxes.map((b) => b[1]));
  const x1 = Math.max(...boxes.map((b) => b[0] + b[2]));
  const y1 = Math.max(...boxes.map((b) => b[1] + b[3]));
  const w = x1 - x0;
  const hgt = y1 - y0;
  const originX = x0 - pad * w;
  const originY = y0 - pad * hgt;
  const scale = CELL_PX / Math.max(w * (1 + 2 * pad), hgt * (1 + 2 * pad));
  const out: VNode[] = [];
  const draw = (box: [number, number, number, number], cls: string, label: string) =>
    h("rect", {
      x: (box[0] - originX) * scale,
      y: (box[1] - originY) * scale,
      width: box[2] * scale,
      height: box[3] * scale,
      class: cls,
      fill: "none",
      "stroke-width": 2,
    }, h("title", {}, label));
  if (cell.gt?.box && mode !== "pred") {
    out.push(draw(cell.gt.box, "overlay overlay-gt", `gt: ${cell.gt.className}`));
  }
  if (cell.pred?.box && mode !== "gt") {
    out.push(draw(cell.pred.box, "overlay overlay-pred", `pred: ${cell.pred.className}`));
  }
  return out;
}

export function renderGrid(
  grid: GridResponse | null,
  handlers: GridHandlers = {},
  overlay: OverlayMode = "both",
): VNode {
  if (grid == null || grid.cells.length === 0) {
    return h("div", { class: "grid-empty" }, "No samples selected — click a matrix cell, glyph sector or subset row.");
  }
  const toUrl = handlers.cropUrl ?? ((u: string) => u);
  const byPosition = new Map<string, GridCell>();
  for (const cell of grid.cells) byPosition.set(`${cell.row}:${cell.col}`, cell);

  const cells: VNode[] = [];
  for (let r = 0; r < grid.rows; r++) {
    for (let c = 0; c < grid.cols; c++) {
      const cell = byPosition.get(`${r}:${c}`);
      if (!cell) {
        cells.push(h("div", { class: "grid-cell empty" }));
        continue;
      }
      const content: VNode[] = [];
      if (cell.cropUrl) {
        content.push(
          h("img", { src: toUrl(cell.cropUrl), class: "crop", alt: cell.objectKey, loading: "lazy" }),
        );
      }
      content.push(
        h("svg", { class: "grid-overlay", viewBox: `0 0 ${CELL_PX} ${CELL_PX}` }, ...overlayRects(cell, overlay)),
      );
      const caption = cell.pred
        ? `${cell.pred.className}${cell.pred.confidence != null ? " " + String(cell.pred.confidence) : ""}`
        : cell.gt
          ? `missed ${cell.gt.className}`
          : cell.objectKey;
      content.push(h("div", { class: "grid-caption" }, caption));
      cells.push(
        h(
          "div",
          {
            class: "grid-cell",
            "data-record": String(cell.recordId),
            onclick: () => handlers.onCellClick?.(cell),
          },
          ...content,
        ),
      );
    }
  }
  return h(
    "div",
    {
      class: "grid-view",
      style: `grid-template-columns: repeat(${grid.cols}, ${CELL_PX}px);`,
    },
    ...cells,
  );
}
