/** Stubbed API transport and canned fixtures for the contract tests. */

import type {
  FetchLike,
  GridResponse,
  MatrixResponse,
  SubsetsResponse,
  SummaryResponse,
} from "../src/api.js";
import type { AppHost } from "../src/app.js";
import type { VNode } from "../src/vnode.js";

export interface RecordedRequest {
  method: string;
  path: string;
  search: Record<string, string>;
  body: unknown;
}

export class StubApi {
  requests: RecordedRequest[] = [];

  constructor(private routes: Record<string, (req: RecordedRequest) => unknown>) {}

  fetch: FetchLike = async (url, init) => {
    const u = new URL(url, "http://stub.local");
    const request: RecordedRequest = {
      method: init?.method ?? "GET",
      path: u.pathname,
      search: Object.fromEntries(u.searchParams.entries()),
      body: init?.body ? JSON.parse(String(init.body)) : null,
    };
    this.requests.push(request);
    for (const [suffix, handler] of Object.entries(this.routes)) {
      if (u.pathname.endsWith(suffix)) {
        return new Response(JSON.stringify(handler(request)), {
          status: 200,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no stub for ${u.pathname}` }), { status: 404 });
  };

  ofPath(suffix: string): RecordedRequest[] {
    return this.requests.filter((r) => r.path.endsWith(suffix));
  }
}

export class TestHost implements AppHost {
  views: VNode[] = [];
  hash = "";

  present = (root: VNode) => {
    this.views.push(root);
  };

  getHash = () => this.hash;
  setHash = (hash: string) => {
    this.hash = hash;
  };

  latest(): VNode {
    if (this.views.length === 0) throw new Error("nothing rendered");
    return this.views[this.views.length - 1];
  }
}

export function matrixFixture(): MatrixResponse {
  return {
    mode: "confusion",
    normalization: "none",
    rows: [
      { id: 10, name: "mammal", leaf: false },
      { id: 3, name: "bird", leaf: true },
      { id: 0, name: "background", leaf: true },
    ],
    cols: [
      { id: 10, name: "mammal", leaf: false },
      { id: 3, name: "bird", leaf: true },
      { id: 0, name: "background", leaf: true },
    ],
    order: [10, 3, 0],
    cells: [
      { r: 0, c: 0, count: 12, zero: false, size: [3, 6, 2], dir: [1, 0, 2, 0, 4, 0, 0, 0, 4], value: 0.75 },
      { r: 0, c: 1, count: 2, zero: false, size: [1, 0, 1], dir: [0, 0, 0, 0, 1, 0, 1, 0, 0], value: 0.125 },
      { r: 0, c: 2, count: 2, zero: false, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 0.125 },
      { r: 1, c: 0, count: 0, zero: true, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 0 },
      { r: 1, c: 1, count: 5, zero: false, size: [0, 5, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 5], value: 1.0 },
      { r: 1, c: 2, count: 0, zero: true, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 0 },
      { r: 2, c: 0, count: 1, zero: false, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 1.0 },
      { r: 2, c: 1, count: 0, zero: true, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 0 },
      { r: 2, c: 2, count: 0, zero: true, size: [0, 0, 0], dir: [0, 0, 0, 0, 0, 0, 0, 0, 0], value: 0 },
    ],
  };
}

export function summaryFixture(): SummaryResponse {
  return {
    datasetId: "stub",
    task: "detection",
    images: 12,
    groundTruth: 40,
    predictions: 39,
    records: 45,
    map: 0.10521962910576772,
    classes: [
      { classId: 1, name: "cat", precision: 0.42857142857142855, recall: 0.25, ap: 0.09592961, objectCount: 12 },
      { classId: 2, name: "dog", precision: 0.5, recall: 0.3333333333333333, ap: 0.11450963, objectCount: 15 },
    ],
  };
}

export function subsetsFixture(): SubsetsResponse {
  return {
    classId: 1,
    className: "cat",
    beta: 0.2,
    minSupport: 4,
    rows: [
      {
        predicates: [],
        label: "(all)",
        support: 18,
        metrics: { precision: 0.42857142857142855, recall: 0.25, ap: 0.09592961, meanSize: 211.5, meanAspect: 0.61, meanConfidence: 0.64 },
      },
      {
        predicates: [{ attribute: "Size_X", interval: [null, 120.5], index: 0 }],
        label: "Size_X∈(-inf, 120.5]",
        support: 6,
        metrics: { precision: 0.2, recall: 0.16, ap: 0.04, meanSize: 80.2, meanAspect: 0.55, meanConfidence: 0.58 },
      },
    ],
  };
}

export function gridFixture(n = 5): GridResponse {
  const side = Math.ceil(Math.sqrt(n));
  const cells = Array.from({ length: n }, (_, i) => ({
    objectKey: `pred:${i + 1}`,
    recordId: i,
    row: Math.floor(i / side),
    col: i % side,
    imageId: i + 1,
    cropUrl: `/api/images/${i + 1}/crop?x=0&y=0&w=10&h=10&pad=0.15`,
    gt: { box: [2, 2, 8, 8] as [number, number, number, number], classId: 1, className: "cat" },
    pred: { box: [3, 3, 8, 8] as [number, number, number, number], classId: 1, className: "cat", confidence: 0.9 },
  }));
  return { rows: side, cols: side, cost: 0.25, cells };
}

export function defaultRoutes(overrides: Record<string, (req: RecordedRequest) => unknown> = {}) {
  return {
    "/api/datasets": () => ({ datasets: [{ id: "stub", task: "detection", records: 45 }] }),
    "/summary": () => summaryFixture(),
    "/matrix": (req: RecordedRequest) => ({
      ...matrixFixture(),
      mode: (req.body as { mode?: string })?.mode ?? "confusion",
    }),
    "/query": () => ({ table: [
      { values: [0], count: 4, probability: 0.1 },
      { values: [1], count: 8, probability: 0.2 },
      { values: [2], count: 12, probability: 0.3 },
      { values: [3], count: 10, probability: 0.25 },
      { values: [4], count: 6, probability: 0.15 },
    ] }),
    "/subsets": () => subsetsFixture(),
    "/grid": () => gridFixture(9),
    ...overrides,
  };
}
