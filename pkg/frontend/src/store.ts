import {
  ApiError,
  ClassifyDoc,
  FlattenDoc,
  GorDoc,
  KeyFieldInfo,
  KeyValuesDoc,
  PlanDoc,
  Preset,
  SemanticRule,
  ServiceClient,
  SessionCreated,
  StatusDoc,
  TableInfo,
} from "./api";

export type StepId =
  | "connect"
  | "scope"
  | "classify"
  | "filters"
  | "plan"
  | "run"
  | "results";

export const STEP_ORDER: StepId[] = [
  "connect",
  "scope",
  "classify",
  "filters",
  "plan",
  "run",
  "results",
];

export const STEP_LABELS: Record<StepId, string> = {
  connect: "Snapshot",
  scope: "Graph",
  classify: "Classes",
  filters: "Key values",
  plan: "Strategy",
  run: "Extraction",
  results: "Results",
};

export const POLL_INTERVAL_MS = 1000;

export interface StepError {
  code: string;
  message: string;
  status: number | null;
}

export type RunState = "idle" | "extracting" | "done" | "failed";

export interface WizardState {
  step: StepId;
  busy: boolean;
  error: StepError | null;
  session: SessionCreated | null;
  tables: TableInfo[];
  presets: Preset[];
  master: string;
  threshold: number;
  maxDistance: number;
  checked: Set<string>;
  manualAdds: string[];
  gor: GorDoc | null;
  overrides: Record<string, string>;
  classification: ClassifyDoc | null;
  keyFields: KeyFieldInfo[];
  keyValues: Record<string, KeyValuesDoc>;
  filters: Record<string, string[]>;
  changeStrategy: string;
  semanticRules: SemanticRule[];
  transitive: boolean;
  jobs: number;
  plan: PlanDoc | null;
  runState: RunState;
  progress: StatusDoc["progress"];
  runError: string | null;
  diagnostics: Record<string, number> | null;
  ocelBytes: Uint8Array | null;
  objectTypes: string[];
  caseType: string;
  flattenResult: FlattenDoc | null;
}

function initialState(): WizardState {
  return {
    step: "connect",
    busy: false,
    error: null,
    session: null,
    tables: [],
    presets: [],
    master: "",
    threshold: 0,
    maxDistance: 3,
    checked: new Set(),
    manualAdds: [],
    gor: null,
    overrides: {},
    classification: null,
    keyFields: [],
    keyValues: {},
    filters: {},
    changeStrategy: "tcode",
    semanticRules: [],
    transitive: false,
    jobs: 1,
    plan: null,
    runState: "idle",
    progress: {},
    runError: null,
    diagnostics: null,
    ocelBytes: null,
    objectTypes: [],
    caseType: "",
    flattenResult: null,
  };
}

function toStepError(err: unknown): StepError {
  if (err instanceof ApiError) {
    return { code: err.code, message: err.message, status: err.status };
  }
  return { code: "client_error", message: String(err), status: null };
}

/**
 * Wizard state machine over the session endpoints.
 *
 * The store never computes a displayed number itself; every count, distance
 * and statistic in the state came out of a service response. Re-running an
 * earlier step clears the local copies of everything downstream, mirroring
 * the reset the service performs on its side.
 */
export class WizardStore {
  readonly state: WizardState = initialState();

  private listeners: (() => void)[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly api: ServiceClient) {}

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private async call<T>(work: () => Promise<T>): Promise<T | undefined> {
    this.state.busy = true;
    this.state.error = null;
    this.emit();
    try {
      return await work();
    } catch (err) {
      this.state.error = toStepError(err);
      return undefined;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  private sessionId(): string {
    if (!this.state.session) {
      throw new Error("no session yet");
    }
    return this.state.session.id;
  }

  /** Index of the furthest step the collected state supports. */
  reachableIndex(): number {
    const s = this.state;
    if (s.runState === "done") return STEP_ORDER.indexOf("results");
    if (s.runState !== "idle") return STEP_ORDER.indexOf("run");
    if (s.plan) return STEP_ORDER.indexOf("plan");
    if (s.classification) return STEP_ORDER.indexOf("plan");
    if (s.gor) return STEP_ORDER.indexOf("classify");
    if (s.session) return STEP_ORDER.indexOf("scope");
    return 0;
  }

  async goto(step: StepId): Promise<void> {
    const target = STEP_ORDER.indexOf(step);
    if (target < 0 || target > this.reachableIndex()) {
      return;
    }
    this.state.step = step;
    this.state.error = null;
    this.emit();
    if (step === "classify" && !this.state.classification) {
      await this.runClassify();
    }
    if (step === "filters" && this.state.keyFields.length === 0) {
      await this.loadKeys();
    }
  }

  async connect(snapshot: string): Promise<void> {
    await this.call(async () => {
      const session = await this.api.createSession(snapshot);
      const [tables, presets] = await Promise.all([
        this.api.tables(session.id),
        this.api.presets(session.id),
      ]);
      this.state.session = session;
      this.state.tables = tables;
      this.state.presets = presets;
      if (presets.length > 0) {
        this.state.master = presets[0].master;
      } else if (tables.length > 0) {
        this.state.master = tables[0].name;
      }
      this.state.step = "scope";
    });
  }

  setMaster(master: string): void {
    this.state.master = master;
    this.emit();
  }

  setThreshold(threshold: number): void {
    this.state.threshold = threshold;
    this.emit();
  }

  setMaxDistance(maxDistance: number): void {
    this.state.maxDistance = maxDistance;
    this.emit();
  }

  setChecked(table: string, on: boolean): void {
    if (on) {
      this.state.checked.add(table);
    } else {
      this.state.checked.delete(table);
    }
    this.emit();
  }

  applyPreset(name: string): void {
    const preset = this.state.presets.find((p) => p.name === name);
    if (!preset) {
      return;
    }
    this.state.master = preset.master;
    this.state.checked = new Set(preset.available);
    this.emit();
  }

  private clearFromClassify(): void {
    this.state.classification = null;
    this.state.overrides = {};
    this.state.keyFields = [];
    this.state.keyValues = {};
    this.state.filters = {};
    this.clearFromPlan();
  }

  private clearFromPlan(): void {
    this.state.plan = null;
    this.clearResults();
  }

  private clearResults(): void {
    this.stopPolling();
    this.state.runState = "idle";
    this.state.progress = {};
    this.state.runError = null;
    this.state.diagnostics = null;
    this.state.ocelBytes = null;
    this.state.objectTypes = [];
    this.state.flattenResult = null;
    this.state.caseType = "";
  }

  async buildGraph(): Promise<void> {
    await this.call(async () => {
      const id = this.sessionId();
      let gor = await this.api.buildGor(
        id,
        this.state.master,
        this.state.threshold,
        this.state.maxDistance,
      );
      const present = new Set(gor.nodes.map((n) => n.name));
      const add = [...this.state.checked].filter((t) => !present.has(t)).sort();
      if (add.length > 0) {
        gor = await this.api.extendGor(id, add);
      }
      this.state.gor = gor;
      this.state.manualAdds = add;
      this.state.checked = new Set(gor.nodes.map((n) => n.name));
      this.clearFromClassify();
    });
  }

  setOverride(table: string, category: string): void {
    if (category === "") {
      delete this.state.overrides[table];
    } else {
      this.state.overrides[table] = category;
    }
    this.emit();
  }

  async runClassify(): Promise<void> {
    await this.call(async () => {
      const result = await this.api.classify(this.sessionId(), this.state.overrides);
      this.state.classification = result;
      this.state.gor = result.gor;
      this.clearFromPlan();
      this.state.keyFields = [];
      this.state.keyValues = {};
    });
  }

  async loadKeys(): Promise<void> {
    await this.call(async () => {
      this.state.keyFields = await this.api.keys(this.sessionId());
    });
  }

  async loadKeyValues(field: string): Promise<void> {
    await this.call(async () => {
      this.state.keyValues[field] = await this.api.keyValues(this.sessionId(), field);
    });
  }

  setFilterValues(field: string, values: string[]): void {
    if (values.length === 0) {
      delete this.state.filters[field];
    } else {
      this.state.filters[field] = values;
    }
    this.emit();
  }

  setChangeStrategy(strategy: string): void {
    this.state.changeStrategy = strategy;
    this.emit();
  }

  setSemanticRules(rules: SemanticRule[]): void {
    this.state.semanticRules = rules;
    this.emit();
  }

  setTransitive(on: boolean): void {
    this.state.transitive = on;
    this.emit();
  }

  setJobs(jobs: number): void {
    this.state.jobs = jobs;
    this.emit();
  }

  setCaseType(caseType: string): void {
    this.state.caseType = caseType;
    this.emit();
  }

  async buildPlan(): Promise<void> {
    await this.call(async () => {
      const filters = Object.entries(this.state.filters)
        .sort(([a], [b]) => (a < b ? -1 : 1))
        .map(([field, values]) => ({ field, values }));
      const plan = await this.api.plan(this.sessionId(), {
        filters,
        change_strategy: this.state.changeStrategy,
        semantic_rules:
          this.state.changeStrategy === "semantic" ? this.state.semanticRules : [],
        transitive_links: this.state.transitive,
      });
      this.state.plan = plan;
      this.clearResults();
    });
  }

  async startExtraction(): Promise<void> {
    await this.call(async () => {
      await this.api.extract(this.sessionId(), this.state.jobs);
      this.state.runState = "extracting";
      this.state.progress = {};
      this.state.runError = null;
      this.state.step = "run";
      this.startPolling();
    });
  }

  private startPolling(): void {
    this.stopPolling();
    this.pollTimer = setInterval(() => {
      void this.pollStatus();
    }, POLL_INTERVAL_MS);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async pollStatus(): Promise<void> {
    let status: StatusDoc;
    try {
      status = await this.api.status(this.sessionId());
    } catch (err) {
      this.stopPolling();
      this.state.runState = "failed";
      this.state.runError = toStepError(err).message;
      this.emit();
      return;
    }
    this.state.progress = status.progress;
    if (status.state === "done") {
      this.stopPolling();
      this.state.diagnostics = status.diagnostics ?? {};
      await this.fetchLog();
      this.state.runState = "done";
      this.state.step = "results";
    } else if (status.state === "failed") {
      this.stopPolling();
      this.state.runState = "failed";
      this.state.runError = status.error ?? "extraction failed";
    }
    this.emit();
  }

  private async fetchLog(): Promise<void> {
    const bytes = await this.api.ocel(this.sessionId());
    this.state.ocelBytes = bytes;
    // The type list for the flatten picker is read from the downloaded
    // document itself; the bytes held for download stay untouched.
    try {
      const doc = JSON.parse(new TextDecoder().decode(bytes));
      const types = doc?.["ocel:global-log"]?.["ocel:object-types"];
      this.state.objectTypes = Array.isArray(types) ? types : [];
    } catch {
      this.state.objectTypes = [];
    }
    if (this.state.objectTypes.length > 0 && !this.state.caseType) {
      this.state.caseType = this.state.objectTypes[0];
    }
  }

  async runFlatten(): Promise<void> {
    await this.call(async () => {
      this.state.flattenResult = await this.api.flatten(
        this.sessionId(),
        this.state.caseType,
      );
    });
  }
}
