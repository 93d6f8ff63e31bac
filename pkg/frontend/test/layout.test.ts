import { describe, expect, it } from "vitest";

import { GorDoc } from "../src/api";
import {
  CATEGORY_COLORS,
  UNCLASSIFIED_COLOR,
  categoryColor,
  layoutGraph,
  nodeRadius,
} from "../src/layout";

const DOC: GorDoc = {
  master: "EKKO",
  nodes: [
    { name: "EKKO", distance: 0, row_count: 50, category: "record" },
    { name: "EKPO", distance: 1, row_count: 120, category: "detail" },
    { name: "EKBE", distance: 2, row_count: 300, category: "transaction" },
    { name: "EBAN", distance: 1, row_count: 30, category: "record" },
    { name: "CDHDR", distance: 1, row_count: 35, category: "change" },
  ],
  edges: [
    { a: "EKKO", b: "EKPO", join_domain: "EBELN", join_fields: ["EBELN"], manual: false },
    { a: "EKPO", b: "EKBE", join_domain: "EBELN", join_fields: ["EBELN", "EBELP"], manual: false },
    { a: "EBAN", b: "EKPO", join_domain: "BANFN", join_fields: ["BANFN"], manual: false },
    { a: "CDHDR", b: "EKKO", join_domain: "", join_fields: [], manual: true },
  ],
};

describe("layoutGraph", () => {
  it("pins the master to the exact center", () => {
    const placed = layoutGraph(DOC, 800, 600);
    const master = placed.nodes.find((n) => n.master);

    expect(master).toBeDefined();
    expect(master!.x).toBe(400);
    expect(master!.y).toBe(300);
  });

  it("keeps every node inside the canvas", () => {
    const placed = layoutGraph(DOC, 760, 520);

    for (const node of placed.nodes) {
      expect(Number.isFinite(node.x)).toBe(true);
      expect(Number.isFinite(node.y)).toBe(true);
      expect(node.x).toBeGreaterThanOrEqual(0);
      expect(node.x).toBeLessThanOrEqual(760);
      expect(node.y).toBeGreaterThanOrEqual(0);
      expect(node.y).toBeLessThanOrEqual(520);
    }
  });

  it("is deterministic for the same document", () => {
    const first = layoutGraph(DOC, 760, 520);
    const second = layoutGraph(DOC, 760, 520);

    expect(second).toEqual(first);
  });

  it("spreads distinct nodes apart", () => {
    const placed = layoutGraph(DOC, 760, 520);

    for (let i = 0; i < placed.nodes.length; i++) {
      for (let j = i + 1; j < placed.nodes.length; j++) {
        const a = placed.nodes[i];
        const b = placed.nodes[j];
        const gap = Math.hypot(a.x - b.x, a.y - b.y);
        expect(gap).toBeGreaterThan(1);
      }
    }
  });

  it("carries every edge through with its manual flag", () => {
    const placed = layoutGraph(DOC, 760, 520);

    expect(placed.edges).toHaveLength(DOC.edges.length);
    const manual = placed.edges.find((e) => e.source === "CDHDR" && e.target === "EKKO");
    expect(manual?.manual).toBe(true);
  });

  it("drops edges whose endpoint is not in the node list", () => {
    const doc: GorDoc = {
      ...DOC,
      edges: [
        ...DOC.edges,
        { a: "EKKO", b: "GHOST", join_domain: "X", join_fields: ["X"], manual: false },
      ],
    };

    const placed = layoutGraph(doc, 760, 520);

    expect(placed.edges).toHaveLength(DOC.edges.length);
  });
});

describe("node appearance", () => {
  it("maps each class to its own color", () => {
    const seen = new Set(Object.values(CATEGORY_COLORS));
    expect(seen.size).toBe(Object.keys(CATEGORY_COLORS).length);
    expect(categoryColor("record")).toBe(CATEGORY_COLORS.record);
    expect(categoryColor("flow")).toBe(CATEGORY_COLORS.flow);
  });

  it("falls back to grey for unclassified nodes", () => {
    expect(categoryColor(undefined)).toBe(UNCLASSIFIED_COLOR);
    expect(categoryColor("weird")).toBe(UNCLASSIFIED_COLOR);
  });

  it("grows the radius with the row count without exploding", () => {
    expect(nodeRadius(null)).toBe(10);
    expect(nodeRadius(0)).toBe(10);
    expect(nodeRadius(10)).toBeGreaterThan(nodeRadius(1));
    expect(nodeRadius(100000)).toBeGreaterThan(nodeRadius(100));
    expect(nodeRadius(100000)).toBeLessThan(40);
  });
});
