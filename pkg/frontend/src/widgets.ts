/** Scented-widget filters: small histograms over continuous variables, built
 * from marginal-table queries (never from raw records). Clicking a bar toggles
 * an interval condition on that variable. */

import type { Condition, MarginalRow } from "./api.js";
import { h, VNode } from "./vnode.js";

export interface WidgetSpec {
  variable: string;
  bins: number[]; // inner boundaries; bin i covers [edge_{i-1}, edge_i)
  lo: number;
  hi: number;
}

export function widgetBins(spec: WidgetSpec): [number, number][] {
  const edges = [spec.lo, ...spec.bins, spec.hi];
  const out: [number, number][] = [];
  for (let i = 0; i + 1 < edges.length; i++) out.push([edges[i], edges[i + 1]]);
  return out;
}

export function binCondition(spec: WidgetSpec, binIndex: number): Condition {
  const [lo, hi] = widgetBins(spec)[binIndex];
  return { var: spec.variable, op: "in", value: [lo, hi] };
}

export function isBinCondition(condition: Condition, spec: WidgetSpec, binIndex: number): boolean {
  const expected = binCondition(spec, binIndex);
  return (
    condition.var === expected.var &&
    condition.op === "in" &&
    JSON.stringify(condition.value) === JSON.stringify(expected.value)
  );
}

export interface WidgetHandlers {
  onToggleBin?: (spec: WidgetSpec, binIndex: number) => void;
}

export function renderWidget(
  spec: WidgetSpec,
  table: MarginalRow[],
  active: Condition[],
  handlers: WidgetHandlers = {},
): VNode {
  const counts = new Array(widgetBins(spec).length).fill(0);
  for (const row of table) {
    const idx = Number(row.values[0]);
    if (idx >= 0 && idx < counts.length) counts[idx] = row.count;
  }
  const max = Math.max(1, ...counts);
  const bars = counts.map((count, i) => {
    const selected = active.some((c) => isBinCondition(c, spec, i));
    return h(
      "div",
      {
        class: selected ? "widget-bar selected" : "widget-bar",
        style: `height:${Math.round((count / max) * 36) + 2}px`,
        "data-bin": String(i),
        onclick: () => handlers.onToggleBin?.(spec, i),
      },
      h("title", {}, String(count)),
    );
  });
  return h(
    "div",
    { class: "widget", "data-variable": spec.variable },
    h("div", { class: "widget-label" }, spec.variable),
    h("div", { class: "widget-bars" }, ...bars),
  );
}
