/** Ranked subset table: discrete predicates as text, continuous metrics as
 * bars whose printed values are the server's verbatim. Column headers sort on
 * click and combine into a weighted ranking when dragged onto each other. */

import type { SubsetRow } from "./api.js";
import type { SortKey } from "./state.js";
import { h, VNode } from "./vnode.js";

export const METRIC_COLUMNS = [
  "precision",
  "recall",
  "ap",
  "meanSize",
  "meanAspect",
  "meanConfidence",
] as const;

export interface TableHandlers {
  onSort?: (attribute: string) => void;
  onCombine?: (dragged: string, target: string) => void;
  onRowClick?: (row: SubsetRow) => void;
}

function headerCell(attribute: string, sortKeys: SortKey[], handlers: TableHandlers): VNode {
  const active = sortKeys.find((k) => k.attribute === attribute);
  const marker = active ? (active.descending ? " ↓" : " ↑") : "";
  return h(
    "th",
    {
      class: active ? "sortable active" : "sortable",
      draggable: "true",
      "data-attribute": attribute,
      onclick: () => handlers.onSort?.(attribute),
      ondragstart: (event: DragEvent) => {
        event.dataTransfer?.setData("text/attribute", attribute);
      },
      ondragover: (event: DragEvent) => event.preventDefault?.(),
      ondrop: (event: DragEvent) => {
        event.preventDefault?.();
        const dragged = event.dataTransfer?.getData("text/attribute");
        if (dragged) handlers.onCombine?.(dragged, attribute);
      },
    },
    attribute + marker,
  );
}

function metricBar(value: number | null, maxAbs: number): VNode {
  if (value == null) {
    return h("td", { class: "metric undefined" }, "–");
  }
  const fraction = maxAbs > 0 ? Math.min(1, Math.abs(value) / maxAbs) : 0;
  return h(
    "td",
    { class: "metric" },
    h(
      "div",
      { class: "bar-track" },
      h("div", { class: "bar-fill", style: `width:${(fraction * 100).toFixed(1)}%` }),
    ),
    h("span", { class: "metric-value" }, String(value)),
  );
}

export function renderSubsetTable(
  rows: SubsetRow[],
  sortKeys: SortKey[],
  handlers: TableHandlers = {},
): VNode {
  const maxima: Record<string, number> = {};
  for (const metric of METRIC_COLUMNS) {
    maxima[metric] = Math.max(
      0,
      ...rows.map((r) => Math.abs(r.metrics[metric] ?? 0)),
    );
  }
  const maxSupport = Math.max(0, ...rows.map((r) => r.support));

  const header = h(
    "tr",
    {},
    h("th", {}, "subset"),
    headerCell("support", sortKeys, handlers),
    ...METRIC_COLUMNS.map((m) => headerCell(m, sortKeys, handlers)),
  );

  const body = rows.map((row) =>
    h(
      "tr",
      { class: "subset-row", onclick: () => handlers.onRowClick?.(row) },
      h("td", { class: "predicates" }, row.label),
      metricBar(row.support, maxSupport),
      ...METRIC_COLUMNS.map((m) => metricBar(row.metrics[m] ?? null, maxima[m])),
    ),
  );

  return h(
    "table",
    { class: "subset-table" },
    h("thead", {}, header),
    h("tbody", {}, ...body),
  );
}
