/** Typed client for the evaluation service; the UI's only data source. */

export interface Condition {
  var: string;
  op: "=" | "==" | "<" | "<=" | ">" | ">=" | "in";
  value: unknown;
}

export interface ClassRef {
  id: number;
  name: string;
  leaf?: boolean;
}

export interface MatrixCell {
  r: number;
  c: number;
  count: number;
  zero: boolean;
  size: [number, number, number];
  dir: [number, number, number, number, number, number, number, number, number];
  value?: number;
}

export interface MatrixResponse {
  mode: string;
  normalization: string;
  rows: ClassRef[];
  cols: ClassRef[];
  order: number[];
  cells: MatrixCell[];
}

export interface MatrixRequest {
  mode: "confusion" | "size" | "direction";
  subtreeRoot?: number | null;
  normalization?: "none" | "row" | "column";
  where?: Condition[];
}

export interface ClassSummary {
  classId: number;
  name: string;
  precision: number | null;
  recall: number | null;
  ap: number | null;
  objectCount: number;
}

export interface SummaryResponse {
  datasetId: string;
  task: string;
  images: number;
  groundTruth: number;
  predictions: number;
  records: number;
  map: number | null;
  classes: ClassSummary[];
}

export interface MarginalRow {
  values: unknown[];
  count: number;
  probability: number;
}

export interface QueryRequest {
  keep?: (string | { var: string; bins?: number[] })[];
  where?: Condition[];
  given?: Condition[];
}

export interface QueryResponse {
  probability?: number | null;
  table?: MarginalRow[] | null;
}

export interface SubsetPredicate {
  attribute: string;
  value?: unknown;
  interval?: [number | null, number | null];  // null bound = unbounded
  index?: number;
}

export interface SubsetRow {
  predicates: SubsetPredicate[];
  label: string;
  support: number;
  metrics: Record<string, number | null>;
}

export interface SubsetsResponse {
  classId: number;
  className: string;
  beta: number;
  minSupport: number;
  rows: SubsetRow[];
}

export interface GridRequest {
  records?: number[];
  where?: Condition[];
  seed?: number;
  limit?: number;
}

export interface ObjectOverlay {
  box: [number, number, number, number] | null;
  classId: number;
  className: string;
  confidence?: number | null;
}

export interface GridCell {
  objectKey: string;
  recordId: number;
  row: number;
  col: number;
  imageId: number;
  cropUrl: string | null;
  gt: ObjectOverlay | null;
  pred: ObjectOverlay | null;
}

export interface GridResponse {
  rows: number;
  cols: number;
  cost: number;
  cells: GridCell[];
}

export interface DatasetInfo {
  id: string;
  task: string;
  records: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = JSON.stringify(await response.json());
      } catch {
        /* body may not be JSON */
      }
      throw new ApiError(response.status, `${path}: ${detail}`);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listDatasets(): Promise<{ datasets: DatasetInfo[] }> {
    return this.request("/api/datasets");
  }

  summary(datasetId: string): Promise<SummaryResponse> {
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/summary`);
  }

  matrix(datasetId: string, spec: MatrixRequest): Promise<MatrixResponse> {
    return this.post(`/api/datasets/${encodeURIComponent(datasetId)}/matrix`, spec);
  }

  query(datasetId: string, query: QueryRequest): Promise<QueryResponse> {
    return this.post(`/api/datasets/${encodeURIComponent(datasetId)}/query`, query);
  }

  subsets(datasetId: string, className: string, beta: number, sort: string): Promise<SubsetsResponse> {
    const params = new URLSearchParams({ class: className, beta: String(beta), sort });
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/subsets?${params}`);
  }

  grid(datasetId: string, request: GridRequest): Promise<GridResponse> {
    return this.post(`/api/datasets/${encodeURIComponent(datasetId)}/grid`, request);
  }

  cropUrl(relative: string): string {
    return this.baseUrl + relative;
  }
}
