import { vi } from "vitest";

import {
  ClassifyDoc,
  FlattenDoc,
  GorDoc,
  PlanDoc,
  Preset,
  ServiceClient,
  TableInfo,
} from "../src/api";

export const SESSION = { id: "s1", state: "new", snapshot: "/snap", tables: 4 };

export const TABLES: TableInfo[] = [
  { name: "CDHDR", row_count: 35, key: ["MANDT", "CHANGENR"], in_gor: false },
  { name: "EBAN", row_count: 30, key: ["MANDT", "BANFN"], in_gor: false },
  { name: "EKKO", row_count: 50, key: ["MANDT", "EBELN"], in_gor: false },
  { name: "EKPO", row_count: 120, key: ["MANDT", "EBELN", "EBELP"], in_gor: false },
];

export const PRESETS: Preset[] = [
  {
    name: "P2P",
    master: "EKKO",
    tables: ["EKKO", "EKPO", "EBAN"],
    available: ["EKKO", "EKPO", "EBAN"],
  },
];

export const GOR: GorDoc = {
  master: "EKKO",
  nodes: [
    { name: "EBAN", distance: 1, row_count: 30 },
    { name: "EKKO", distance: 0, row_count: 50 },
    { name: "EKPO", distance: 1, row_count: 120 },
  ],
  edges: [
    { a: "EKKO", b: "EKPO", join_domain: "EBELN", join_fields: ["EBELN"], manual: false },
    { a: "EBAN", b: "EKPO", join_domain: "BANFN", join_fields: ["BANFN"], manual: false },
  ],
};

export const GOR_EXT: GorDoc = {
  master: "EKKO",
  nodes: [...GOR.nodes, { name: "CDHDR", distance: 1, row_count: 35 }],
  edges: [
    ...GOR.edges,
    { a: "CDHDR", b: "EKKO", join_domain: "", join_fields: [], manual: true },
  ],
};

export const CLASSIFY: ClassifyDoc = {
  gor: {
    ...GOR,
    nodes: [
      { name: "EBAN", distance: 1, row_count: 30, category: "record" },
      { name: "EKKO", distance: 0, row_count: 50, category: "record" },
      { name: "EKPO", distance: 1, row_count: 120, category: "detail" },
    ],
  },
  categories: {
    EBAN: { value: "record", evidence: [] },
    EKKO: { value: "record", evidence: [] },
    EKPO: { value: "detail", evidence: ["key contains EKKO key (MANDT,EBELN)"] },
  },
  detail_links: [
    { detail_table: "EKPO", master_table: "EKKO", shared_key_fields: ["MANDT", "EBELN"] },
  ],
};

export const PLAN: PlanDoc = {
  gor: CLASSIFY.gor,
  categories: CLASSIFY.categories,
  detail_links: CLASSIFY.detail_links,
  filters: [],
  change_strategy: "tcode",
  semantic_rules: [],
  timestamp_priority: [["BUDAT"], ["BLDAT", "AEDAT"]],
  object_blacklist: ["MANDT"],
  transitive_links: false,
};

export const FLAT: FlattenDoc = {
  case_type: "EBELN-EBELN",
  cases: 50,
  dropped_events: 47,
  convergence: { duplicated_events: 30, duplication_factor: 1.7540322580645162 },
  divergence: { diverging_pairs: 64, affected_cases: 46 },
  csv: "case:concept:name,concept:name,time:timestamp,event:id\n",
};

export const OCEL_BYTES = new TextEncoder().encode(
  JSON.stringify({
    "ocel:global-log": { "ocel:object-types": ["EBELN-EBELN", "EBELP-EBELP"] },
    "ocel:events": {},
    "ocel:objects": {},
  }),
);

export function fakeApi(overrides: Partial<ServiceClient> = {}): ServiceClient {
  return {
    createSession: vi.fn().mockResolvedValue(SESSION),
    tables: vi.fn().mockResolvedValue(TABLES),
    presets: vi.fn().mockResolvedValue(PRESETS),
    buildGor: vi.fn().mockResolvedValue(GOR),
    extendGor: vi.fn().mockResolvedValue(GOR_EXT),
    classify: vi.fn().mockResolvedValue(CLASSIFY),
    keys: vi.fn().mockResolvedValue([
      { field: "EBELN", tables: ["EKKO", "EKPO"] },
      { field: "GJAHR", tables: ["RBKP"] },
    ]),
    keyValues: vi.fn().mockResolvedValue({ field: "GJAHR", values: ["2021"], truncated: false }),
    plan: vi.fn().mockResolvedValue(PLAN),
    extract: vi.fn().mockResolvedValue({ state: "extracting" }),
    status: vi.fn().mockResolvedValue({ state: "extracting", progress: {} }),
    ocel: vi.fn().mockResolvedValue(OCEL_BYTES.slice()),
    flatten: vi.fn().mockResolvedValue(FLAT),
    ...overrides,
  };
}
