import { describe, expect, it } from "vitest";

import { renderMatrix } from "../src/matrix.js";
import { findAll, findFirst, textOf, type VNode } from "../src/vnode.js";
import { matrixFixture } from "./helpers.js";

describe("matrix rendering", () => {
  it("renders a light dash for zero cells", () => {
    const view = renderMatrix(matrixFixture());
    const dashes = findAll(view, (n) => n.props.class === "zero-dash");
    expect(dashes.length).toBe(4);
    expect(textOf(dashes[0])).toBe("–");
  });

  it("shows raw counts verbatim in confusion mode", () => {
    const view = renderMatrix(matrixFixture());
    const counts = findAll(view, (n) => n.props.class === "cell-count").map(textOf);
    expect(counts).toContain("12");
    expect(counts).toContain("5");
  });

  it("shows normalized values verbatim when normalization is on", () => {
    const fixture = { ...matrixFixture(), normalization: "row" };
    const view = renderMatrix(fixture);
    const values = findAll(view, (n) => n.props.class === "cell-count").map(textOf);
    expect(values).toContain("0.75");
    expect(values).toContain("0.125");
  });

  it("cell clicks report the row and column class names", () => {
    const clicks: [string, string][] = [];
    const view = renderMatrix(matrixFixture(), {
      onCellClick: (gt, pred) => clicks.push([gt, pred]),
    });
    const cell = findFirst(
      view,
      (n) => n.props["data-gt"] === "mammal" && n.props["data-pred"] === "bird",
    );
    expect(cell).not.toBeNull();
    (cell!.props.onclick as () => void)();
    expect(clicks).toEqual([["mammal", "bird"]]);
  });

  it("size mode draws three-sector pies and sectors are clickable", () => {
    const sectors: [string, string, string][] = [];
    const fixture = { ...matrixFixture(), mode: "size" };
    const view = renderMatrix(fixture, {
      onSectorClick: (gt, pred, sector) => sectors.push([gt, pred, sector]),
    });
    const smaller = findFirst(view, (n) => String(n.props.class ?? "").includes("sector-smaller"));
    expect(smaller).not.toBeNull();
    (smaller!.props.onclick as (e: object) => void)({});
    expect(sectors).toEqual([["mammal", "mammal", "smaller"]]);
    // a full-precise cell renders a circle rather than paths
    const circles = findAll(view, (n) => n.tag === "circle" && String(n.props.class ?? "").includes("sector-precise"));
    expect(circles.length).toBeGreaterThan(0);
  });

  it("direction mode draws arrows plus a center dot and arrows are clickable", () => {
    const arrows: [string, string, string][] = [];
    const fixture = { ...matrixFixture(), mode: "direction" };
    const view = renderMatrix(fixture, {
      onArrowClick: (gt, pred, direction) => arrows.push([gt, pred, direction]),
    });
    const south = findFirst(view, (n) => String(n.props.class ?? "").includes("arrow-S") && !String(n.props.class).includes("SE"));
    expect(south).not.toBeNull();
    (south!.props.onclick as (e: object) => void)({});
    expect(arrows[0][2]).toBe("S");
    expect(findAll(view, (n) => n.props.class === "direction-center").length).toBeGreaterThan(0);
  });

  it("super-class rows are drillable, leaves are not", () => {
    const drills: number[] = [];
    const view = renderMatrix(matrixFixture(), { onDrillDown: (id) => drills.push(id) });
    const drillable = findAll(view, (n) => String(n.props.class ?? "").includes("drillable"));
    expect(drillable.length).toBe(1);
    (drillable[0].props.onclick as () => void)();
    expect(drills).toEqual([10]);
    const leafLabel = findFirst(view, (n) => n.props.class === "row-label" && textOf(n) === "bird");
    expect(leafLabel!.props.onclick).toBeUndefined();
  });
});
