/** Application shell: owns the view state, derives every server request from
 * it, and re-renders from the latest responses. Stale in-flight responses are
 * dropped whenever the state advances. The client computes no statistics of
 * its own; everything shown is server-reported. */

import {
  ApiClient,
  type GridResponse,
  type MarginalRow,
  type MatrixResponse,
  type SubsetRow,
  type SubsetsResponse,
  type SummaryResponse,
} from "./api.js";
import { renderGrid, type OverlayMode } from "./grid.js";
import { COLORBLIND_PALETTE, DEFAULT_PALETTE, renderMatrix } from "./matrix.js";
import {
  cellSelection,
  combineSort,
  decodeState,
  encodeState,
  gridRequest,
  initialState,
  matrixRequest,
  sortSpec,
  subsetSelection,
  toggleSort,
  type MatrixMode,
  type ViewState,
} from "./state.js";
import { renderSubsetTable } from "./table.js";
import { binCondition, isBinCondition, renderWidget, widgetBins, type WidgetSpec } from "./widgets.js";
import { h, type VNode } from "./vnode.js";

export interface AppHost {
  present: (root: VNode) => void;
  getHash?: () => string;
  setHash?: (hash: string) => void;
}

const WIDGETS: WidgetSpec[] = [
  { variable: "Confidence_Y", bins: [0.2, 0.4, 0.6, 0.8], lo: 0, hi: 1 },
  { variable: "AspectRatio_X", bins: [0.2, 0.4, 0.6, 0.8], lo: 0, hi: 1 },
];

export class App {
  state: ViewState = initialState();
  summary: SummaryResponse | null = null;
  matrix: MatrixResponse | null = null;
  subsets: SubsetsResponse | null = null;
  grid: GridResponse | null = null;
  widgetTables: Record<string, MarginalRow[]> = {};
  overlay: OverlayMode = "both";
  colorblind = false;
  error: string | null = null;
  loading = 0;
  private generation = 0;

  constructor(private client: ApiClient, private host: AppHost) {}

  async start(): Promise<void> {
    const fromHash = this.host.getHash ? decodeState(this.host.getHash()) : null;
    if (fromHash) {
      this.state = fromHash;
    } else {
      const listing = await this.client.listDatasets();
      if (listing.datasets.length === 0) {
        this.error = "no datasets loaded";
        this.render();
        return;
      }
      this.state = initialState(listing.datasets[0].id);
    }
    await this.refreshAll();
  }

  private bump(): number {
    this.generation += 1;
    this.host.setHash?.(encodeState(this.state));
    return this.generation;
  }

  private async guarded<T>(generation: number, work: Promise<T>, apply: (value: T) => void): Promise<void> {
    this.loading += 1;
    try {
      const value = await work;
      if (generation === this.generation) {
        apply(value);
        this.error = null;
      }
    } catch (err) {
      if (generation === this.generation) {
        this.error = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.loading -= 1;
      this.render();
    }
  }

  async refreshAll(): Promise<void> {
    const generation = this.bump();
    this.render();
    const jobs = [
      this.guarded(generation, this.client.summary(this.state.datasetId), (v) => (this.summary = v)),
      this.refreshMatrix(generation),
      this.refreshGrid(generation),
      this.refreshWidgets(generation),
    ];
    if (this.state.subsetClass) jobs.push(this.refreshSubsets(generation));
    await Promise.all(jobs);
  }

  private refreshMatrix(generation: number): Promise<void> {
    return this.guarded(
      generation,
      this.client.matrix(this.state.datasetId, matrixRequest(this.state)),
      (v) => (this.matrix = v),
    );
  }

  private refreshSubsets(generation: number): Promise<void> {
    if (!this.state.subsetClass) {
      this.subsets = null;
      return Promise.resolve();
    }
    return this.guarded(
      generation,
      this.client.subsets(
        this.state.datasetId,
        this.state.subsetClass,
        this.state.beta,
        sortSpec(this.state.sortKeys),
      ),
      (v) => (this.subsets = v),
    );
  }

  private refreshGrid(generation: number): Promise<void> {
    if (this.state.selection === null) {
      this.grid = null;
      return Promise.resolve();
    }
    return this.guarded(
      generation,
      this.client.grid(this.state.datasetId, gridRequest(this.state)),
      (v) => (this.grid = v),
    );
  }

  private refreshWidgets(generation: number): Promise<void> {
    if (this.summary?.task === "classification") return Promise.resolve();
    const jobs = WIDGETS.map((spec) =>
      this.guarded(
        generation,
        this.client.query(this.state.datasetId, {
          keep: [{ var: spec.variable, bins: spec.bins }],
        }),
        (v) => (this.widgetTables[spec.variable] = v.table ?? []),
      ),
    );
    return Promise.all(jobs).then(() => undefined);
  }

  // ---- actions -------------------------------------------------------------

  setMode(mode: MatrixMode): Promise<void> {
    this.state = { ...this.state, mode };
    const generation = this.bump();
    this.render();
    return this.refreshMatrix(generation);
  }

  setNormalization(normalization: ViewState["normalization"]): Promise<void> {
    this.state = { ...this.state, normalization };
    const generation = this.bump();
    return this.refreshMatrix(generation);
  }

  drillDown(classId: number | null): Promise<void> {
    this.state = { ...this.state, subtreeRoot: classId, selection: null };
    const generation = this.bump();
    const jobs = [this.refreshMatrix(generation), this.refreshGrid(generation)];
    return Promise.all(jobs).then(() => undefined);
  }

  select(conditions: ReturnType<typeof cellSelection>): Promise<void> {
    this.state = { ...this.state, selection: conditions };
    const generation = this.bump();
    return this.refreshGrid(generation);
  }

  selectCell(gtName: string, predName: string): Promise<void> {
    return this.select(cellSelection(gtName, predName));
  }

  selectSector(gtName: string, predName: string, sector: "smaller" | "precise" | "larger"): Promise<void> {
    return this.select(cellSelection(gtName, predName, { sector }));
  }

  selectArrow(gtName: string, predName: string, direction: string): Promise<void> {
    return this.select(cellSelection(gtName, predName, { direction }));
  }

  selectCenter(gtName: string, predName: string): Promise<void> {
    return this.select(cellSelection(gtName, predName, { direction: "center" }));
  }

  openSubsets(className: string): Promise<void> {
    this.state = { ...this.state, subsetClass: className };
    const generation = this.bump();
    return this.refreshSubsets(generation);
  }

  sortBy(attribute: string): Promise<void> {
    this.state = { ...this.state, sortKeys: toggleSort(this.state.sortKeys, attribute) };
    const generation = this.bump();
    return this.refreshSubsets(generation);
  }

  combineSortWith(dragged: string, target: string): Promise<void> {
    this.state = { ...this.state, sortKeys: combineSort(this.state.sortKeys, dragged, target) };
    const generation = this.bump();
    return this.refreshSubsets(generation);
  }

  selectSubsetRow(row: SubsetRow): Promise<void> {
    this.state = { ...this.state, selection: subsetSelection(row.predicates) };
    const generation = this.bump();
    return this.refreshGrid(generation);
  }

  toggleWidgetBin(spec: WidgetSpec, binIndex: number): Promise<void> {
    const existing = this.state.filters.filter((c) => isBinCondition(c, spec, binIndex));
    const others = this.state.filters.filter(
      (c) => !(c.var === spec.variable && c.op === "in"),
    );
    const filters = existing.length > 0 ? others : [...others, binCondition(spec, binIndex)];
    this.state = { ...this.state, filters };
    return this.refreshAll();
  }

  clearSelection(): Promise<void> {
    this.state = { ...this.state, selection: null, filters: [] };
    return this.refreshAll();
  }

  togglePalette(): void {
    this.colorblind = !this.colorblind;
    this.render();
  }

  setOverlay(mode: OverlayMode): void {
    this.overlay = mode;
    this.render();
  }

  // ---- rendering -----------------------------------------------------------

  render(): void {
    this.host.present(this.view());
  }

  view(): VNode {
    const modeButton = (mode: MatrixMode) =>
      h(
        "button",
        {
          class: this.state.mode === mode ? "mode active" : "mode",
          "data-mode": mode,
          onclick: () => this.setMode(mode),
        },
        mode,
      );

    const normalizationSelect = h(
      "select",
      {
        class: "normalization",
        onchange: (event: Event) =>
          this.setNormalization(
            ((event.target as { value?: string })?.value ?? "none") as ViewState["normalization"],
          ),
      },
      ...["none", "row", "column"].map((n) =>
        h("option", this.state.normalization === n ? { value: n, selected: "selected" } : { value: n }, n),
      ),
    );

    const breadcrumb = h(
      "div",
      { class: "breadcrumb" },
      h("span", { class: "crumb", onclick: () => this.drillDown(null) }, "all classes"),
      this.state.subtreeRoot != null
        ? h("span", { class: "crumb-current" }, ` / class ${String(this.state.subtreeRoot)}`)
        : null,
    );

    const sidebar = h(
      "aside",
      { class: "sidebar" },
      h("h3", {}, "classes"),
      h(
        "ul",
        { class: "class-list" },
        ...(this.summary?.classes ?? []).map((c) =>
          h(
            "li",
            { class: "class-entry", "data-class": c.name, onclick: () => this.openSubsets(c.name) },
            h("span", { class: "class-name" }, c.name),
            h("span", { class: "class-stats" },
              ` p=${c.precision == null ? "–" : String(c.precision)}` +
              ` r=${c.recall == null ? "–" : String(c.recall)}` +
              ` ap=${c.ap == null ? "–" : String(c.ap)}` +
              ` n=${String(c.objectCount)}`),
          ),
        ),
      ),
      h("h3", {}, "filters"),
      ...WIDGETS.filter((w) => this.widgetTables[w.variable]).map((spec) =>
        renderWidget(spec, this.widgetTables[spec.variable], this.state.filters, {
          onToggleBin: (s, i) => this.toggleWidgetBin(s, i),
        }),
      ),
      h("button", { class: "clear", onclick: () => this.clearSelection() }, "clear filters"),
    );

    const matrixView = this.matrix
      ? renderMatrix(
          this.matrix,
          {
            onCellClick: (gt, pred) => this.selectCell(gt, pred),
            onSectorClick: (gt, pred, sector) => this.selectSector(gt, pred, sector),
            onArrowClick: (gt, pred, direction) => this.selectArrow(gt, pred, direction),
            onCenterClick: (gt, pred) => this.selectCenter(gt, pred),
            onDrillDown: (classId) => this.drillDown(classId),
          },
          this.colorblind ? COLORBLIND_PALETTE : DEFAULT_PALETTE,
        )
      : h("div", { class: "placeholder" }, "loading matrix…");

    const tableView = this.subsets
      ? renderSubsetTable(this.subsets.rows, this.state.sortKeys, {
          onSort: (attribute) => this.sortBy(attribute),
          onCombine: (dragged, target) => this.combineSortWith(dragged, target),
          onRowClick: (row) => this.selectSubsetRow(row),
        })
      : h("div", { class: "placeholder" }, "pick a class to mine subsets");

    const gridView = renderGrid(this.grid, {
      cropUrl: (u) => this.client.cropUrl(u),
    }, this.overlay);

    return h(
      "div",
      { class: "app" },
      this.error ? h("div", { class: "error-banner", role: "alert" }, this.error) : null,
      h(
        "header",
        { class: "topbar" },
        h("span", { class: "dataset" },
          this.summary
            ? `${this.summary.datasetId}: ${String(this.summary.images)} images, ` +
              `${String(this.summary.groundTruth)} objects, ${String(this.summary.predictions)} predictions, ` +
              `mAP ${this.summary.map == null ? "–" : String(this.summary.map)}`
            : "loading…"),
        modeButton("confusion"),
        modeButton("size"),
        modeButton("direction"),
        normalizationSelect,
        h("button", { class: "palette", onclick: () => this.togglePalette() },
          this.colorblind ? "default colors" : "color-blind safe"),
        h(
          "span",
          { class: "overlay-toggle" },
          ...(["both", "gt", "pred"] as const).map((m) =>
            h("button", {
              class: this.overlay === m ? "overlay active" : "overlay",
              "data-overlay": m,
              onclick: () => this.setOverlay(m),
            }, m),
          ),
        ),
        this.loading > 0 ? h("span", { class: "spinner" }, "⋯") : null,
      ),
      breadcrumb,
      h(
        "main",
        { class: "layout" },
        sidebar,
        h("section", { class: "matrix-pane" }, matrixView),
        h("section", { class: "table-pane" }, tableView),
        h("section", { class: "grid-pane" }, gridView),
      ),
    );
  }
}
