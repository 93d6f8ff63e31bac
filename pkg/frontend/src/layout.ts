import {
  forceCenter,
  forceCollide,
  forceLink,
  forceManyBody,
  forceSimulation,
  SimulationNodeDatum,
} from "d3-force";

import { GorDoc } from "./api";

export interface PlacedNode {
  id: string;
  x: number;
  y: number;
  distance: number;
  rowCount: number | null;
  category: string | null;
  master: boolean;
  radius: number;
}

export interface PlacedEdge {
  source: string;
  target: string;
  manual: boolean;
  domain: string;
}

export interface PlacedGraph {
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: PlacedEdge[];
}

export const CATEGORY_COLORS: Record<string, string> = {
  record: "#2f855a",
  transaction: "#b7791f",
  detail: "#4a5568",
  change: "#6b46c1",
  flow: "#c53030",
};

export const UNCLASSIFIED_COLOR = "#a0aec0";

export function categoryColor(category: string | null | undefined): string {
  if (!category) {
    return UNCLASSIFIED_COLOR;
  }
  return CATEGORY_COLORS[category] ?? UNCLASSIFIED_COLOR;
}

// Log scale keeps a 3-row lookup and a 100k-row item table on one canvas.
export function nodeRadius(rowCount: number | null): number {
  if (rowCount === null || rowCount < 1) {
    return 10;
  }
  return 10 + 4 * Math.log10(rowCount);
}

// Plain LCG so the same graph lands on the same picture every render;
// the default Math.random source would shuffle nodes on every rebuild.
function seededRandom(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 4294967296;
  };
}

interface SimNode extends SimulationNodeDatum {
  id: string;
}

export function layoutGraph(doc: GorDoc, width = 760, height = 520): PlacedGraph {
  const simNodes: SimNode[] = doc.nodes.map((n) => ({ id: n.name }));
  const byId = new Map(simNodes.map((n) => [n.id, n]));

  const master = byId.get(doc.master);
  if (master) {
    master.fx = width / 2;
    master.fy = height / 2;
  }

  const links = doc.edges
    .filter((e) => byId.has(e.a) && byId.has(e.b))
    .map((e) => ({ source: e.a, target: e.b }));

  const simulation = forceSimulation(simNodes)
    .randomSource(seededRandom(42))
    .force(
      "link",
      forceLink<SimNode, { source: string; target: string }>(links)
        .id((d) => d.id)
        .distance(120)
        .strength(0.7),
    )
    .force("charge", forceManyBody().strength(-340))
    .force("center", forceCenter(width / 2, height / 2))
    .force("collide", forceCollide(34))
    .stop();

  for (let i = 0; i < 300; i += 1) {
    simulation.tick();
  }

  const pad = 40;
  const clampX = (x: number) => Math.min(Math.max(x, pad), width - pad);
  const clampY = (y: number) => Math.min(Math.max(y, pad), height - pad);

  const placed = doc.nodes.map((n) => {
    const sim = byId.get(n.name)!;
    const rowCount = n.row_count ?? null;
    return {
      id: n.name,
      x: n.name === doc.master ? width / 2 : clampX(sim.x ?? width / 2),
      y: n.name === doc.master ? height / 2 : clampY(sim.y ?? height / 2),
      distance: n.distance,
      rowCount,
      category: n.category ?? null,
      master: n.name === doc.master,
      radius: nodeRadius(rowCount),
    };
  });

  const edges = doc.edges
    .filter((e) => byId.has(e.a) && byId.has(e.b))
    .map((e) => ({
      source: e.a,
      target: e.b,
      manual: e.manual,
      domain: e.join_domain,
    }));

  return { width, height, nodes: placed, edges };
}
