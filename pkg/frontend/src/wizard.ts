import { CategoryInfo, SemanticRule, TableInfo } from "./api";
import { bytesToBlob, saveBlob, textToBlob } from "./download";
import { renderGraph } from "./graph";
import { CATEGORY_COLORS, categoryColor, layoutGraph } from "./layout";
import { STEP_LABELS, STEP_ORDER, WizardState, WizardStore } from "./store";

type Child = Node | string | null | undefined | false | Child[];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, unknown> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value === undefined || value === null || value === false) {
      continue;
    }
    if (key === "class") {
      node.className = String(value);
    } else if (key.startsWith("on") && typeof value === "function") {
      (node as unknown as Record<string, unknown>)[key] = value;
    } else if (key === "value") {
      (node as unknown as { value: string }).value = String(value);
    } else if (key === "checked" || key === "disabled" || key === "selected") {
      (node as unknown as Record<string, boolean>)[key] = Boolean(value);
    } else {
      node.setAttribute(key, String(value));
    }
  }
  appendChildren(node, children);
  return node;
}

function appendChildren(node: HTMLElement, children: Child[]): void {
  for (const child of children) {
    if (child === null || child === undefined || child === false) {
      continue;
    }
    if (Array.isArray(child)) {
      appendChildren(node, child);
    } else if (typeof child === "string") {
      node.appendChild(document.createTextNode(child));
    } else {
      node.appendChild(child);
    }
  }
}

const CATEGORY_NAMES = Object.keys(CATEGORY_COLORS);

export function renderWizard(root: HTMLElement, store: WizardStore): void {
  const state = store.state;
  root.replaceChildren(
    buildHeader(state),
    buildStepper(store),
    el(
      "main",
      { class: "panel" },
      state.error &&
        el(
          "div",
          { class: "error-box", role: "alert" },
          el("strong", {}, state.error.code),
          " ",
          state.error.message,
        ),
      buildStep(store),
    ),
  );
}

function buildHeader(state: WizardState): HTMLElement {
  const bits: Child[] = [];
  if (state.session) {
    bits.push(
      el(
        "span",
        { class: "session-info" },
        `${state.session.snapshot} (${state.session.tables} tables)`,
      ),
    );
  }
  if (state.busy) {
    bits.push(el("span", { class: "busy-dot", "aria-live": "polite" }, "working"));
  }
  return el(
    "header",
    {},
    el("h1", {}, "ocelforge"),
    el("p", { class: "tagline" }, "Object-centric event log extraction"),
    ...bits,
  );
}

function buildStepper(store: WizardStore): HTMLElement {
  const reachable = store.reachableIndex();
  const items = STEP_ORDER.map((id, index) => {
    const classes = ["step"];
    if (id === store.state.step) {
      classes.push("current");
    }
    if (index > reachable) {
      classes.push("locked");
    }
    return el(
      "li",
      { class: classes.join(" ") },
      el(
        "button",
        {
          type: "button",
          disabled: index > reachable,
          onclick: () => void store.goto(id),
        },
        `${index + 1}. ${STEP_LABELS[id]}`,
      ),
    );
  });
  return el("nav", {}, el("ol", { class: "stepper" }, ...items));
}

function buildStep(store: WizardStore): HTMLElement {
  switch (store.state.step) {
    case "connect":
      return stepConnect(store);
    case "scope":
      return stepScope(store);
    case "classify":
      return stepClassify(store);
    case "filters":
      return stepFilters(store);
    case "plan":
      return stepPlan(store);
    case "run":
      return stepRun(store);
    case "results":
      return stepResults(store);
  }
}

let lastSnapshotPath = "";

function stepConnect(store: WizardStore): HTMLElement {
  const input = el("input", {
    type: "text",
    class: "wide",
    placeholder: "/path/to/snapshot",
    value: lastSnapshotPath,
    oninput: (ev: Event) => {
      lastSnapshotPath = (ev.target as HTMLInputElement).value;
    },
  });
  return el(
    "section",
    {},
    el("h2", {}, "Open a snapshot"),
    el(
      "p",
      {},
      "Point the wizard at a snapshot directory: one CSV per table plus the ",
      el("code", {}, "dd_fields.csv"),
      " and ",
      el("code", {}, "dd_domains.csv"),
      " metadata files.",
    ),
    el("label", {}, "Snapshot directory", input),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        disabled: store.state.busy,
        onclick: () => void store.connect(input.value.trim()),
      },
      "Connect",
    ),
  );
}

function tableLine(table: TableInfo): string {
  return `${table.name} (${table.row_count} rows, key ${table.key.join(", ")})`;
}

function stepScope(store: WizardStore): HTMLElement {
  const state = store.state;
  const inGor = new Set(state.gor?.nodes.map((n) => n.name) ?? []);
  const manual = new Set(state.manualAdds);
  const maxRows = Math.max(1, ...state.tables.map((t) => t.row_count));

  const thresholdOut = el("output", {}, String(state.threshold));
  const slider = el("input", {
    type: "range",
    min: "0",
    max: String(maxRows + 1),
    value: state.threshold,
    oninput: (ev: Event) => {
      thresholdOut.textContent = (ev.target as HTMLInputElement).value;
    },
    onchange: (ev: Event) => {
      store.setThreshold(Number((ev.target as HTMLInputElement).value));
      void store.buildGraph();
    },
  });

  const checklist = state.tables.map((table) => {
    const auto = inGor.has(table.name) && !manual.has(table.name);
    return el(
      "label",
      { class: "check-row" },
      el("input", {
        type: "checkbox",
        checked: state.checked.has(table.name) || inGor.has(table.name),
        disabled: auto,
        onchange: (ev: Event) =>
          store.setChecked(table.name, (ev.target as HTMLInputElement).checked),
      }),
      tableLine(table),
      auto ? el("span", { class: "muted" }, " reached from master") : null,
    );
  });

  return el(
    "section",
    {},
    el("h2", {}, "Graph of relations"),
    el(
      "div",
      { class: "preset-row" },
      "Presets: ",
      state.presets.length === 0
        ? el("span", { class: "muted" }, "none for this snapshot")
        : state.presets.map((preset) =>
            el(
              "button",
              {
                type: "button",
                onclick: () => store.applyPreset(preset.name),
              },
              `${preset.name} (${preset.available.length} tables)`,
            ),
          ),
    ),
    el(
      "div",
      { class: "controls" },
      el(
        "label",
        {},
        "Master table",
        el(
          "select",
          {
            onchange: (ev: Event) =>
              store.setMaster((ev.target as HTMLSelectElement).value),
          },
          ...state.tables.map((t) =>
            el("option", { value: t.name, selected: t.name === state.master }, t.name),
          ),
        ),
      ),
      el("label", {}, "Row threshold", slider, thresholdOut),
      el(
        "label",
        {},
        "Max distance",
        el("input", {
          type: "number",
          min: "1",
          max: "9",
          value: state.maxDistance,
          onchange: (ev: Event) =>
            store.setMaxDistance(Number((ev.target as HTMLInputElement).value)),
        }),
      ),
    ),
    el(
      "details",
      { open: state.gor === null },
      el("summary", {}, "Tables to include"),
      el("div", { class: "checklist" }, ...checklist),
    ),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        disabled: state.busy || !state.master,
        onclick: () => void store.buildGraph(),
      },
      "Build graph",
    ),
    state.gor && graphFigure(store, false),
    state.gor &&
      el(
        "button",
        {
          type: "button",
          onclick: () => void store.goto("classify"),
        },
        "Next: review classes",
      ),
  );
}

function graphFigure(store: WizardStore, colored: boolean): HTMLElement {
  const state = store.state;
  const doc = colored && state.classification ? state.classification.gor : state.gor;
  if (!doc) {
    return el("div", {});
  }
  const figure = el("figure", { class: "gor-figure" });
  figure.appendChild(renderGraph(layoutGraph(doc)));
  const caption = el(
    "figcaption",
    {},
    `${doc.nodes.length} tables, ${doc.edges.length} relations. ` +
      "The number inside a node is its distance from the master.",
  );
  figure.appendChild(caption);
  if (doc.warnings && doc.warnings.length > 0) {
    figure.appendChild(
      el("ul", { class: "warnings" }, ...doc.warnings.map((w) => el("li", {}, w))),
    );
  }
  return figure;
}

function legend(): HTMLElement {
  return el(
    "div",
    { class: "legend" },
    ...CATEGORY_NAMES.map((name) =>
      el(
        "span",
        { class: "legend-item" },
        el("span", {
          class: "swatch",
          style: `background:${categoryColor(name)}`,
        }),
        name,
      ),
    ),
  );
}

function stepClassify(store: WizardStore): HTMLElement {
  const state = store.state;
  if (!state.classification) {
    return el("section", {}, el("p", { class: "muted" }, "Classifying tables..."));
  }
  const categories = state.classification.categories;
  const links = state.classification.detail_links;

  const rows = Object.entries(categories).map(([table, info]) =>
    classificationRow(store, table, info, links),
  );

  return el(
    "section",
    {},
    el("h2", {}, "Table classes"),
    graphFigure(store, true),
    legend(),
    el(
      "table",
      { class: "class-table" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, "Table"),
          el("th", {}, "Class"),
          el("th", {}, "Evidence"),
        ),
      ),
      el("tbody", {}, ...rows),
    ),
    el(
      "button",
      {
        type: "button",
        disabled: state.busy,
        onclick: () => void store.runClassify(),
      },
      "Apply overrides",
    ),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        onclick: () => void store.goto("filters"),
      },
      "Next: key values",
    ),
  );
}

function classificationRow(
  store: WizardStore,
  table: string,
  info: CategoryInfo,
  links: { detail_table: string; master_table: string; shared_key_fields: string[] }[],
): HTMLElement {
  const override = store.state.overrides[table] ?? "";
  const evidence: string[] = [...info.evidence];
  for (const link of links) {
    if (link.detail_table === table) {
      evidence.push(
        `items of ${link.master_table} via ${link.shared_key_fields.join(", ")}`,
      );
    }
  }
  return el(
    "tr",
    {},
    el(
      "td",
      {},
      el("span", {
        class: "swatch",
        style: `background:${categoryColor(override || info.value)}`,
      }),
      table,
    ),
    el(
      "td",
      {},
      el(
        "select",
        {
          onchange: (ev: Event) =>
            store.setOverride(table, (ev.target as HTMLSelectElement).value),
        },
        el("option", { value: "", selected: override === "" }, `auto (${info.value})`),
        ...CATEGORY_NAMES.map((name) =>
          el("option", { value: name, selected: override === name }, name),
        ),
      ),
    ),
    el("td", { class: "muted" }, evidence.join("; ") || "no signals"),
  );
}

function stepFilters(store: WizardStore): HTMLElement {
  const state = store.state;
  return el(
    "section",
    {},
    el("h2", {}, "Pre-set key values"),
    el(
      "p",
      {},
      "Optional. A filter keeps only rows whose key matches one of the chosen " +
        "values, for every included table keyed on that field.",
    ),
    state.keyFields.length === 0
      ? el("p", { class: "muted" }, "Loading key fields...")
      : el(
          "div",
          {},
          ...state.keyFields.map((field) => filterBlock(store, field.field, field.tables)),
        ),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        onclick: () => void store.goto("plan"),
      },
      "Next: strategy",
    ),
  );
}

function filterBlock(store: WizardStore, field: string, tables: string[]): HTMLElement {
  const state = store.state;
  const selected = state.filters[field] ?? [];
  const values = state.keyValues[field];

  const children: Child[] = [
    el(
      "div",
      { class: "filter-head" },
      el("strong", {}, field),
      el("span", { class: "muted" }, ` keys ${tables.join(", ")}`),
      el(
        "button",
        {
          type: "button",
          disabled: state.busy,
          onclick: () => void store.loadKeyValues(field),
        },
        values ? "Reload values" : "Pick values",
      ),
    ),
  ];

  if (selected.length > 0) {
    children.push(
      el(
        "div",
        { class: "chips" },
        ...selected.map((value) =>
          el(
            "span",
            { class: "chip" },
            value,
            el(
              "button",
              {
                type: "button",
                class: "chip-x",
                onclick: () =>
                  store.setFilterValues(
                    field,
                    selected.filter((v) => v !== value),
                  ),
              },
              "x",
            ),
          ),
        ),
      ),
    );
  }

  if (values) {
    const picked = new Set(selected);
    children.push(
      el(
        "div",
        { class: "value-list" },
        ...values.values.map((value) =>
          el(
            "label",
            { class: "check-row" },
            el("input", {
              type: "checkbox",
              checked: picked.has(value),
              onchange: (ev: Event) => {
                const next = new Set(picked);
                if ((ev.target as HTMLInputElement).checked) {
                  next.add(value);
                } else {
                  next.delete(value);
                }
                store.setFilterValues(field, [...next].sort());
              },
            }),
            value,
          ),
        ),
      ),
    );
    if (values.truncated) {
      const free = el("input", { type: "text", placeholder: "other value" });
      children.push(
        el(
          "div",
          { class: "free-text" },
          el("span", { class: "muted" }, "List is cut off; add further values by hand: "),
          free,
          el(
            "button",
            {
              type: "button",
              onclick: () => {
                const value = free.value.trim();
                if (value) {
                  store.setFilterValues(field, [...new Set([...selected, value])].sort());
                }
              },
            },
            "Add",
          ),
        ),
      );
    }
  }

  return el("div", { class: "filter-block" }, ...children);
}

function parseRules(text: string): SemanticRule[] {
  const rules: SemanticRule[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) {
      continue;
    }
    const parts = line.split(":");
    if (parts.length < 4) {
      continue;
    }
    rules.push({
      table: parts[0],
      field: parts[1],
      predicate: parts[2],
      activity_name: parts.slice(3).join(":"),
    });
  }
  return rules;
}

function rulesToText(rules: SemanticRule[]): string {
  return rules
    .map((r) => `${r.table}:${r.field}:${r.predicate}:${r.activity_name}`)
    .join("\n");
}

function stepPlan(store: WizardStore): HTMLElement {
  const state = store.state;

  const strategyRadio = (value: string, label: string) =>
    el(
      "label",
      { class: "check-row" },
      el("input", {
        type: "radio",
        name: "strategy",
        value,
        checked: state.changeStrategy === value,
        onchange: () => store.setChangeStrategy(value),
      }),
      label,
    );

  const rulesArea = el(
    "textarea",
    {
      rows: "4",
      class: "wide",
      placeholder: "CDPOS:NETPR:nonempty:Reprice item",
      onchange: (ev: Event) =>
        store.setSemanticRules(parseRules((ev.target as HTMLTextAreaElement).value)),
    },
    rulesToText(state.semanticRules),
  );

  return el(
    "section",
    {},
    el("h2", {}, "Change strategy"),
    strategyRadio("tcode", "tcode: one activity per change header, named by transaction code"),
    strategyRadio("field", "field: one activity per changed field"),
    strategyRadio("semantic", "semantic: custom field rules, one per line as TABLE:FIELD:PREDICATE:NAME"),
    state.changeStrategy === "semantic" && rulesArea,
    el(
      "label",
      { class: "check-row" },
      el("input", {
        type: "checkbox",
        checked: state.transitive,
        onchange: (ev: Event) =>
          store.setTransitive((ev.target as HTMLInputElement).checked),
      }),
      "Follow object links beyond one hop when enriching events",
    ),
    el(
      "label",
      {},
      "Parallel table scans",
      el("input", {
        type: "number",
        min: "1",
        max: "16",
        value: state.jobs,
        onchange: (ev: Event) =>
          store.setJobs(Number((ev.target as HTMLInputElement).value)),
      }),
    ),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        disabled: state.busy,
        onclick: () => void store.buildPlan(),
      },
      "Build plan",
    ),
    state.plan && planSummary(store),
  );
}

function planSummary(store: WizardStore): HTMLElement {
  const plan = store.state.plan!;
  const tables = Object.entries(plan.categories).map(([table, info]) =>
    el(
      "li",
      {},
      el("span", {
        class: "swatch",
        style: `background:${categoryColor(info.value)}`,
      }),
      `${table} (${info.value})`,
    ),
  );
  return el(
    "div",
    { class: "plan-summary" },
    el("h3", {}, "Plan"),
    el("ul", { class: "plan-tables" }, ...tables),
    el(
      "p",
      {},
      plan.filters.length === 0
        ? "No key filters."
        : `Filters: ${plan.filters
            .map((f) => `${f.field} in {${f.values.join(", ")}}`)
            .join("; ")}`,
    ),
    el(
      "p",
      {},
      `Strategy ${plan.change_strategy}; ` +
        (plan.transitive_links ? "transitive links on." : "one-hop links."),
    ),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        disabled: store.state.busy,
        onclick: () => void store.startExtraction(),
      },
      "Start extraction",
    ),
  );
}

function stepRun(store: WizardStore): HTMLElement {
  const state = store.state;
  const done = state.progress.tables_done ?? 0;
  const total = state.progress.tables_total ?? 0;
  const events = state.progress.events_emitted ?? 0;
  return el(
    "section",
    {},
    el("h2", {}, "Extraction"),
    el("progress", { value: String(done), max: String(Math.max(total, 1)) }),
    el("p", {}, `${done} of ${total} tables scanned, ${events} events so far.`),
    state.runState === "extracting" && el("p", { class: "muted" }, "Running..."),
    state.runState === "failed" &&
      el(
        "div",
        { class: "error-box", role: "alert" },
        el("strong", {}, "extraction failed"),
        " ",
        state.runError ?? "",
      ),
    state.runState === "failed" &&
      el(
        "button",
        {
          type: "button",
          onclick: () => void store.goto("plan"),
        },
        "Back to the plan",
      ),
  );
}

function stepResults(store: WizardStore): HTMLElement {
  const state = store.state;
  const diag = state.diagnostics ?? {};
  const diagRows = Object.entries(diag).map(([key, value]) =>
    el(
      "tr",
      {},
      el("td", {}, key.replace(/_/g, " ")),
      el("td", { class: "num" }, String(value)),
    ),
  );

  return el(
    "section",
    {},
    el("h2", {}, "Results"),
    el("table", { class: "stats-table" }, el("tbody", {}, ...diagRows)),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        disabled: state.ocelBytes === null,
        onclick: () => {
          if (state.ocelBytes) {
            saveBlob(bytesToBlob(state.ocelBytes), `${state.master || "log"}.ocel.json`);
          }
        },
      },
      "Download OCEL",
    ),
    el("h3", {}, "Flatten to a case notion"),
    el(
      "div",
      { class: "controls" },
      el(
        "label",
        {},
        "Case object type",
        el(
          "select",
          {
            onchange: (ev: Event) =>
              store.setCaseType((ev.target as HTMLSelectElement).value),
          },
          ...state.objectTypes.map((t) =>
            el("option", { value: t, selected: t === state.caseType }, t),
          ),
        ),
      ),
      el(
        "button",
        {
          type: "button",
          disabled: state.busy || !state.caseType,
          onclick: () => void store.runFlatten(),
        },
        "Flatten",
      ),
    ),
    state.flattenResult && flattenPanel(store),
  );
}

function flattenPanel(store: WizardStore): HTMLElement {
  const flat = store.state.flattenResult!;
  const row = (label: string, value: number) =>
    el("tr", {}, el("td", {}, label), el("td", { class: "num" }, String(value)));
  return el(
    "div",
    { class: "flatten-panel" },
    el(
      "table",
      { class: "stats-table" },
      el(
        "tbody",
        {},
        row("cases", flat.cases),
        row("dropped events", flat.dropped_events),
        row("duplicated events (convergence)", flat.convergence.duplicated_events),
        row("duplication factor", flat.convergence.duplication_factor),
        row("diverging pairs (divergence)", flat.divergence.diverging_pairs),
        row("affected cases", flat.divergence.affected_cases),
      ),
    ),
    el(
      "button",
      {
        type: "button",
        onclick: () => saveBlob(textToBlob(flat.csv), `${flat.case_type}.flat.csv`),
      },
      "Download flat CSV",
    ),
  );
}
