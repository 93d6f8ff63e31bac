/**
 * REST client for the extraction service.
 *
 * One method per endpoint, same names as the session workflow. All
 * responses are returned as the service sends them; nothing here
 * recomputes or reshapes numbers.
 */

export interface SessionCreated {
  id: string;
  state: string;
  snapshot: string;
  tables: number;
}

export interface TableInfo {
  name: string;
  row_count: number;
  key: string[];
  in_gor: boolean;
}

export interface Preset {
  name: string;
  master: string;
  tables: string[];
  available: string[];
}

export interface GorNode {
  name: string;
  distance: number;
  row_count?: number;
  category?: string;
}

export interface GorEdge {
  a: string;
  b: string;
  join_domain: string;
  join_fields: string[];
  manual: boolean;
}

export interface GorDoc {
  master: string;
  nodes: GorNode[];
  edges: GorEdge[];
  warnings?: string[];
}

export interface CategoryInfo {
  value: string;
  evidence: string[];
}

export interface DetailLinkInfo {
  detail_table: string;
  master_table: string;
  shared_key_fields: string[];
}

export interface ClassifyDoc {
  gor: GorDoc;
  categories: Record<string, CategoryInfo>;
  detail_links: DetailLinkInfo[];
}

export interface KeyFieldInfo {
  field: string;
  tables: string[];
}

export interface KeyValuesDoc {
  field: string;
  values: string[];
  truncated: boolean;
}

export interface SemanticRule {
  table: string;
  field: string;
  predicate: string;
  activity_name: string;
}

export interface FilterSpec {
  field: string;
  values: string[];
}

export interface PlanRequest {
  filters: FilterSpec[];
  change_strategy: string;
  semantic_rules: SemanticRule[];
  transitive_links: boolean;
}

export interface PlanDoc {
  gor: GorDoc;
  categories: Record<string, CategoryInfo>;
  detail_links: DetailLinkInfo[];
  filters: FilterSpec[];
  change_strategy: string;
  semantic_rules: SemanticRule[];
  timestamp_priority: string[][];
  object_blacklist: string[];
  transitive_links: boolean;
}

export interface ExtractProgress {
  tables_done?: number;
  tables_total?: number;
  events_emitted?: number;
}

export interface StatusDoc {
  state: string;
  progress: ExtractProgress;
  error?: string;
  diagnostics?: Record<string, number>;
}

export interface FlattenDoc {
  case_type: string;
  cases: number;
  dropped_events: number;
  convergence: { duplicated_events: number; duplication_factor: number };
  divergence: { diverging_pairs: number; affected_cases: number };
  csv: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ValidationItem {
  loc?: (string | number)[];
  msg?: string;
}

async function raiseFor(res: Response): Promise<never> {
  let code = `http_${res.status}`;
  let message = res.statusText || `request failed with ${res.status}`;
  try {
    const body = await res.json();
    const detail = body?.detail;
    if (Array.isArray(detail)) {
      // Request-body validation errors arrive as a list of field problems.
      code = "invalid_request";
      message = detail
        .map((d: ValidationItem) => `${(d.loc ?? []).join(".")}: ${d.msg ?? "invalid"}`)
        .join("; ");
    } else if (detail && typeof detail === "object") {
      code = detail.code ?? code;
      message = detail.message ?? message;
    } else if (typeof detail === "string") {
      message = detail;
    }
  } catch {
    // Non-JSON error body; keep the HTTP status text.
  }
  throw new ApiError(res.status, code, message);
}

/** The surface the wizard store depends on; fakes implement this in tests. */
export interface ServiceClient {
  createSession(snapshot: string): Promise<SessionCreated>;
  tables(sessionId: string): Promise<TableInfo[]>;
  presets(sessionId: string): Promise<Preset[]>;
  buildGor(sessionId: string, master: string, threshold: number, maxDistance: number): Promise<GorDoc>;
  extendGor(sessionId: string, add: string[]): Promise<GorDoc>;
  classify(sessionId: string, overrides: Record<string, string>): Promise<ClassifyDoc>;
  keys(sessionId: string): Promise<KeyFieldInfo[]>;
  keyValues(sessionId: string, field: string): Promise<KeyValuesDoc>;
  plan(sessionId: string, body: PlanRequest): Promise<PlanDoc>;
  extract(sessionId: string, jobs: number): Promise<{ state: string }>;
  status(sessionId: string): Promise<StatusDoc>;
  ocel(sessionId: string): Promise<Uint8Array>;
  flatten(sessionId: string, caseType: string): Promise<FlattenDoc>;
}

export class Client implements ServiceClient {
  constructor(private readonly base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (!res.ok) {
      await raiseFor(res);
    }
    return res.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(snapshot: string): Promise<SessionCreated> {
    return this.post("/sessions", { snapshot });
  }

  async tables(sessionId: string): Promise<TableInfo[]> {
    const doc = await this.json<{ tables: TableInfo[] }>(`/sessions/${sessionId}/tables`);
    return doc.tables;
  }

  async presets(sessionId: string): Promise<Preset[]> {
    const doc = await this.json<{ presets: Preset[] }>(`/sessions/${sessionId}/tables/presets`);
    return doc.presets;
  }

  buildGor(sessionId: string, master: string, threshold: number, maxDistance: number): Promise<GorDoc> {
    return this.post(`/sessions/${sessionId}/gor`, {
      master,
      threshold,
      max_distance: maxDistance,
    });
  }

  extendGor(sessionId: string, add: string[]): Promise<GorDoc> {
    return this.post(`/sessions/${sessionId}/gor/extend`, { add });
  }

  classify(sessionId: string, overrides: Record<string, string>): Promise<ClassifyDoc> {
    return this.post(`/sessions/${sessionId}/classify`, { overrides });
  }

  async keys(sessionId: string): Promise<KeyFieldInfo[]> {
    const doc = await this.json<{ fields: KeyFieldInfo[] }>(`/sessions/${sessionId}/keys`);
    return doc.fields;
  }

  keyValues(sessionId: string, field: string): Promise<KeyValuesDoc> {
    return this.json(`/sessions/${sessionId}/keys/${encodeURIComponent(field)}/values`);
  }

  plan(sessionId: string, body: PlanRequest): Promise<PlanDoc> {
    return this.post(`/sessions/${sessionId}/plan`, body);
  }

  extract(sessionId: string, jobs: number): Promise<{ state: string }> {
    return this.post(`/sessions/${sessionId}/extract`, { jobs });
  }

  status(sessionId: string): Promise<StatusDoc> {
    return this.json(`/sessions/${sessionId}/extract/status`);
  }

  async ocel(sessionId: string): Promise<Uint8Array> {
    // The log is kept as raw bytes end to end; parsing and re-serializing
    // here would break byte equality with the file the CLI writes.
    const res = await fetch(`${this.base}/sessions/${sessionId}/ocel`);
    if (!res.ok) {
      await raiseFor(res);
    }
    return new Uint8Array(await res.arrayBuffer());
  }

  flatten(sessionId: string, caseType: string): Promise<FlattenDoc> {
    return this.post(`/sessions/${sessionId}/flatten`, { case_type: caseType });
  }
}
