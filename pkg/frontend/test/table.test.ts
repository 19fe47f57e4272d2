import { describe, expect, it } from "vitest";

import type { SubsetRow } from "../src/api.js";
import { renderSubsetTable } from "../src/table.js";
import { findAll, findFirst, textOf } from "../src/vnode.js";
import { subsetsFixture } from "./helpers.js";

class FakeDataTransfer {
  private data: Record<string, string> = {};
  setData(key: string, value: string) {
    this.data[key] = value;
  }
  getData(key: string) {
    return this.data[key] ?? "";
  }
}

describe("subset table", () => {
  it("displays server metric values byte-for-byte", () => {
    const rows = subsetsFixture().rows;
    const view = renderSubsetTable(rows, []);
    const values = findAll(view, (n) => n.props.class === "metric-value").map(textOf);
    expect(values).toContain("0.42857142857142855");
    expect(values).toContain("211.5");
  });

  it("renders undefined metrics as a dash, not a number", () => {
    const row: SubsetRow = {
      predicates: [],
      label: "(all)",
      support: 3,
      metrics: { precision: null, recall: 0.5, ap: null, meanSize: null, meanAspect: null, meanConfidence: null },
    };
    const view = renderSubsetTable([row], []);
    const undefinedCells = findAll(view, (n) => n.props.class === "metric undefined");
    expect(undefinedCells.length).toBe(5);
  });

  it("click sorts, second click flips direction", () => {
    const sorted: string[] = [];
    const view = renderSubsetTable(subsetsFixture().rows, [], {
      onSort: (attribute) => sorted.push(attribute),
    });
    const header = findFirst(view, (n) => n.props["data-attribute"] === "recall");
    (header!.props.onclick as () => void)();
    expect(sorted).toEqual(["recall"]);
    const marked = renderSubsetTable(
      subsetsFixture().rows,
      [{ attribute: "recall", weight: 1, descending: true }],
    );
    const active = findFirst(marked, (n) => n.props["data-attribute"] === "recall");
    expect(textOf(active!)).toContain("↓");
  });

  it("dragging one header onto another requests a combined ranking", () => {
    const combos: [string, string][] = [];
    const view = renderSubsetTable(subsetsFixture().rows, [], {
      onCombine: (dragged, target) => combos.push([dragged, target]),
    });
    const source = findFirst(view, (n) => n.props["data-attribute"] === "meanAspect");
    const target = findFirst(view, (n) => n.props["data-attribute"] === "precision");
    const dataTransfer = new FakeDataTransfer();
    (source!.props.ondragstart as (e: object) => void)({ dataTransfer });
    (target!.props.ondrop as (e: object) => void)({ dataTransfer, preventDefault: () => {} });
    expect(combos).toEqual([["meanAspect", "precision"]]);
  });

  it("row click hands back the subset row", () => {
    const clicked: SubsetRow[] = [];
    const view = renderSubsetTable(subsetsFixture().rows, [], {
      onRowClick: (row) => clicked.push(row),
    });
    const row = findAll(view, (n) => n.props.class === "subset-row")[1];
    (row.props.onclick as () => void)();
    expect(clicked[0].label).toBe("Size_X∈(-inf, 120.5]");
  });
});
