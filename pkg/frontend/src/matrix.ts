/** Matrix view: confusion heat cells, size-mode pie glyphs, direction-mode
 * arrow glyphs, plus an indented class column supporting drill-down. Every
 * number shown comes verbatim from the server response. */

import type { MatrixCell, MatrixResponse } from "./api.js";
import { h, VNode } from "./vnode.js";

export interface Palette {
  smaller: string;
  precise: string;
  larger: string;
}

export const DEFAULT_PALETTE: Palette = { smaller: "#4caf50", precise: "#9e9e9e", larger: "#f2c037" };
export const COLORBLIND_PALETTE: Palette = { smaller: "#0072b2", precise: "#9e9e9e", larger: "#e69f00" };

export const DIRECTION_NAMES = ["N", "NE", "E", "SE", "S", "SW", "W", "NW"] as const;
// y-down screen angles, degrees clockwise from east
const DIRECTION_ANGLES: Record<string, number> = {
  E: 0, SE: 45, S: 90, SW: 135, W: 180, NW: -135, N: -90, NE: -45,
};

export interface MatrixHandlers {
  onCellClick?: (gtName: string, predName: string) => void;
  onSectorClick?: (gtName: string, predName: string, sector: "smaller" | "precise" | "larger") => void;
  onArrowClick?: (gtName: string, predName: string, direction: string) => void;
  onCenterClick?: (gtName: string, predName: string) => void;
  onDrillDown?: (classId: number) => void;
}

const CELL = 42;
const LABEL_W = 120;
const LABEL_H = 70;

function cellLookup(matrix: MatrixResponse): (r: number, c: number) => MatrixCell | undefined {
  const byKey = new Map<string, MatrixCell>();
  for (const cell of matrix.cells) byKey.set(`${cell.r}:${cell.c}`, cell);
  return (r, c) => byKey.get(`${r}:${c}`);
}

function heatColor(fraction: number): string {
  // white -> blue ramp
  const level = Math.round(255 - 175 * Math.min(1, Math.max(0, fraction)));
  return `rgb(${level},${level + Math.round((255 - level) * 0.35)},255)`;
}

function confusionCell(cell: MatrixCell, maxCount: number, normalized: boolean): VNode[] {
  if (cell.zero) {
    return [
      h("text", { x: CELL / 2, y: CELL / 2 + 4, "text-anchor": "middle", class: "zero-dash", fill: "#cfcfcf" }, "–"),
    ];
  }
  const value = normalized ? cell.value ?? 0 : maxCount > 0 ? cell.count / maxCount : 0;
  const shown = normalized ? String(cell.value) : String(cell.count);
  return [
    h("rect", { x: 1, y: 1, width: CELL - 2, height: CELL - 2, fill: heatColor(value), class: "heat" }),
    h("title", {}, shown),
    h("text", {
      x: CELL / 2,
      y: CELL / 2 + 4,
      "text-anchor": "middle",
      class: "cell-count",
      fill: value > 0.6 ? "#ffffff" : "#1a1a1a",
    }, shown),
  ];
}

function pieSectorPath(cx: number, cy: number, radius: number, start: number, sweep: number): string {
  const a0 = (start * Math.PI) / 180;
  const a1 = ((start + sweep) * Math.PI) / 180;
  const x0 = cx + radius * Math.cos(a0);
  const y0 = cy + radius * Math.sin(a0);
  const x1 = cx + radius * Math.cos(a1);
  const y1 = cy + radius * Math.sin(a1);
  const large = sweep > 180 ? 1 : 0;
  return `M${cx},${cy} L${x0},${y0} A${radius},${radius} 0 ${large} 1 ${x1},${y1} Z`;
}

function sizeGlyph(
  cell: MatrixCell,
  maxPairs: number,
  palette: Palette,
  gtName: string,
  predName: string,
  handlers: MatrixHandlers,
): VNode[] {
  const [smaller, precise, larger] = cell.size;
  const total = smaller + precise + larger;
  if (total === 0) {
    return cell.zero
      ? [h("text", { x: CELL / 2, y: CELL / 2 + 4, "text-anchor": "middle", class: "zero-dash", fill: "#cfcfcf" }, "–")]
      : [];
  }
  const radius = (CELL / 2 - 3) * Math.sqrt(total / Math.max(1, maxPairs));
  const cx = CELL / 2;
  const cy = CELL / 2;
  const sectors: VNode[] = [];
  let angle = -90;
  const parts: ["smaller" | "precise" | "larger", number][] = [
    ["smaller", smaller],
    ["precise", precise],
    ["larger", larger],
  ];
  for (const [sector, count] of parts) {
    if (count === 0) continue;
    const sweep = (count / total) * 360;
    const shape =
      sweep >= 360
        ? h("circle", { cx, cy, r: radius, fill: palette[sector], class: `sector sector-${sector}` })
        : h("path", {
            d: pieSectorPath(cx, cy, radius, angle, sweep),
            fill: palette[sector],
            class: `sector sector-${sector}`,
          });
    shape.props.onclick = (event: Event) => {
      (event as { stopPropagation?: () => void }).stopPropagation?.();
      handlers.onSectorClick?.(gtName, predName, sector);
    };
    shape.children.push(h("title", {}, `${sector}: ${String(count)}`));
    sectors.push(shape);
    angle += sweep;
  }
  return sectors;
}

function directionGlyph(
  cell: MatrixCell,
  maxPairs: number,
  gtName: string,
  predName: string,
  handlers: MatrixHandlers,
): VNode[] {
  const counts = cell.dir;
  const total = counts.reduce((a, b) => a + b, 0);
  if (total === 0) {
    return cell.zero
      ? [h("text", { x: CELL / 2, y: CELL / 2 + 4, "text-anchor": "middle", class: "zero-dash", fill: "#cfcfcf" }, "–")]
      : [];
  }
  const cx = CELL / 2;
  const cy = CELL / 2;
  const maxLen = CELL / 2 - 3;
  const out: VNode[] = [];
  DIRECTION_NAMES.forEach((direction, i) => {
    const count = counts[i];
    if (count === 0) return;
    const length = maxLen * (count / Math.max(1, maxPairs));
    const angle = (DIRECTION_ANGLES[direction] * Math.PI) / 180;
    const x2 = cx + length * Math.cos(angle);
    const y2 = cy + length * Math.sin(angle);
    const arrow = h("line", {
      x1: cx, y1: cy, x2, y2,
      stroke: "#3465a4",
      "stroke-width": 2,
      class: `arrow arrow-${direction}`,
      "marker-end": "url(#arrowhead)",
    });
    arrow.props.onclick = (event: Event) => {
      (event as { stopPropagation?: () => void }).stopPropagation?.();
      handlers.onArrowClick?.(gtName, predName, direction);
    };
    arrow.children.push(h("title", {}, `${direction}: ${String(count)}`));
    out.push(arrow);
  });
  const centerCount = counts[8];
  if (centerCount > 0) {
    const radius = Math.max(2, (CELL / 6) * Math.sqrt(centerCount / Math.max(1, maxPairs)));
    const dot = h("circle", { cx, cy, r: radius, fill: "#555555", class: "direction-center" });
    dot.props.onclick = (event: Event) => {
      (event as { stopPropagation?: () => void }).stopPropagation?.();
      handlers.onCenterClick?.(gtName, predName);
    };
    dot.children.push(h("title", {}, `center: ${String(centerCount)}`));
    out.push(dot);
  }
  return out;
}

export function renderMatrix(
  matrix: MatrixResponse,
  handlers: MatrixHandlers = {},
  palette: Palette = DEFAULT_PALETTE,
): VNode {
  const lookup = cellLookup(matrix);
  const n = matrix.rows.length;
  const maxCount = Math.max(0, ...matrix.cells.map((c) => c.count));
  const maxPairs = Math.max(
    1,
    ...matrix.cells.map((c) => c.size[0] + c.size[1] + c.size[2]),
  );
  const width = LABEL_W + n * CELL;
  const height = LABEL_H + n * CELL;

  const children: VNode[] = [];
  // column labels
  matrix.cols.forEach((col, ci) => {
    children.push(
      h("text", {
        x: LABEL_W + ci * CELL + CELL / 2,
        y: LABEL_H - 8,
        class: "col-label",
        "text-anchor": "start",
        transform: `rotate(-45 ${LABEL_W + ci * CELL + CELL / 2} ${LABEL_H - 8})`,
      }, col.name),
    );
  });
  // row labels; super-classes are drillable
  matrix.rows.forEach((row, ri) => {
    const label = h("text", {
      x: LABEL_W - 8,
      y: LABEL_H + ri * CELL + CELL / 2 + 4,
      "text-anchor": "end",
      class: row.leaf === false ? "row-label drillable" : "row-label",
    }, row.leaf === false ? `▸ ${row.name}` : row.name);
    if (row.leaf === false) {
      label.props.onclick = () => handlers.onDrillDown?.(row.id);
    }
    children.push(label);
  });
  // cells
  matrix.rows.forEach((row, ri) => {
    matrix.cols.forEach((col, ci) => {
      const cell = lookup(ri, ci) ?? {
        r: ri, c: ci, count: 0, zero: true,
        size: [0, 0, 0] as [number, number, number],
        dir: [0, 0, 0, 0, 0, 0, 0, 0, 0] as MatrixCell["dir"],
      };
      let content: VNode[];
      if (matrix.mode === "size") {
        content = sizeGlyph(cell, maxPairs, palette, row.name, col.name, handlers);
      } else if (matrix.mode === "direction") {
        content = directionGlyph(cell, maxPairs, row.name, col.name, handlers);
      } else {
        content = confusionCell(cell, maxCount, matrix.normalization !== "none");
      }
      const group = h(
        "g",
        {
          transform: `translate(${LABEL_W + ci * CELL} ${LABEL_H + ri * CELL})`,
          class: "matrix-cell",
          "data-gt": row.name,
          "data-pred": col.name,
          onclick: () => handlers.onCellClick?.(row.name, col.name),
        },
        h("rect", { x: 0, y: 0, width: CELL, height: CELL, fill: "none", stroke: "#e0e0e0", class: "cell-frame" }),
        ...content,
      );
      children.push(group);
    });
  });

  return h(
    "svg",
    { width, height, viewBox: `0 0 ${width} ${height}`, class: `matrix matrix-${matrix.mode}` },
    ...children,
  );
}
