/** All view state in one serializable object: every server request the app
 * makes is derived from it, so a URL hash round-trip reproduces the session. */

import type { Condition, GridRequest, MatrixRequest } from "./api.js";

export type MatrixMode = "confusion" | "size" | "direction";

export interface SortKey {
  attribute: string;
  weight: number;
  descending: boolean;
}

export interface ViewState {
  datasetId: string;
  mode: MatrixMode;
  subtreeRoot: number | null;
  normalization: "none" | "row" | "column";
  /** scented-widget and drill filters, conditions over distribution variables */
  filters: Condition[];
  /** conditions contributed by the selected cell / sector / arrow / subset row;
   * null = nothing selected (no grid), [] = explicit whole-dataset selection */
  selection: Condition[] | null;
  subsetClass: string | null;
  beta: number;
  sortKeys: SortKey[];
  gridSeed: number;
  gridLimit: number;
}

export function initialState(datasetId = ""): ViewState {
  return {
    datasetId,
    mode: "confusion",
    subtreeRoot: null,
    normalization: "none",
    filters: [],
    selection: null,
    subsetClass: null,
    beta: 0.1,
    sortKeys: [{ attribute: "support", weight: 1, descending: true }],
    gridSeed: 0,
    gridLimit: 400,
  };
}

export function encodeState(state: ViewState): string {
  return encodeURIComponent(JSON.stringify(state));
}

export function decodeState(hash: string): ViewState | null {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) return null;
  try {
    const parsed = JSON.parse(decodeURIComponent(raw));
    if (typeof parsed.datasetId !== "string") return null;
    return { ...initialState(parsed.datasetId), ...parsed };
  } catch {
    return null;
  }
}

export function allConditions(state: ViewState): Condition[] {
  return [...state.filters, ...(state.selection ?? [])];
}

export function matrixRequest(state: ViewState): MatrixRequest {
  return {
    mode: state.mode,
    subtreeRoot: state.subtreeRoot,
    normalization: state.normalization,
    where: state.filters,
  };
}

export function gridRequest(state: ViewState): GridRequest {
  return {
    where: allConditions(state),
    seed: state.gridSeed,
    limit: state.gridLimit,
  };
}

export function sortSpec(keys: SortKey[]): string {
  return keys
    .map((k) => `${k.attribute}:${k.descending ? "desc" : "asc"}:${k.weight}`)
    .join(",");
}

/** Selection conditions for a matrix cell; sector/direction refine further. */
export function cellSelection(
  gtName: string,
  predName: string,
  extra?: { sector?: string; direction?: string },
): Condition[] {
  const conditions: Condition[] = [
    { var: "Label_X", op: "=", value: gtName },
    { var: "Label_Y", op: "=", value: predName },
  ];
  if (extra?.sector) conditions.push({ var: "SizeSector", op: "=", value: extra.sector });
  if (extra?.direction) conditions.push({ var: "DirectionBin", op: "=", value: extra.direction });
  return conditions;
}

/** Subset-row predicates translated to distribution conditions. Mined
 * intervals are (lo, hi] with null meaning unbounded, so they become a strict
 * lower and an inclusive upper bound rather than the half-open "in" form. */
export function subsetSelection(
  predicates: { attribute: string; value?: unknown; interval?: [number | null, number | null] }[],
): Condition[] {
  return predicates.flatMap((p): Condition[] => {
    if (!p.interval) return [{ var: p.attribute, op: "=", value: p.value }];
    const [lo, hi] = p.interval;
    const out: Condition[] = [];
    if (lo != null && Number.isFinite(lo)) out.push({ var: p.attribute, op: ">", value: lo });
    if (hi != null && Number.isFinite(hi)) out.push({ var: p.attribute, op: "<=", value: hi });
    return out;
  });
}

/** Single-key toggle: clicking a header sorts by it, clicking again flips it. */
export function toggleSort(keys: SortKey[], attribute: string): SortKey[] {
  const current = keys.length === 1 ? keys[0] : null;
  if (current && current.attribute === attribute) {
    return [{ attribute, weight: 1, descending: !current.descending }];
  }
  return [{ attribute, weight: 1, descending: false }];
}

/** Drag one column header onto another: combine with equal weights. */
export function combineSort(keys: SortKey[], dragged: string, target: string): SortKey[] {
  if (dragged === target) return keys;
  const base = keys.some((k) => k.attribute === target)
    ? keys.filter((k) => k.attribute !== dragged)
    : [{ attribute: target, weight: 1, descending: false }];
  return [...base, { attribute: dragged, weight: 1, descending: false }];
}
