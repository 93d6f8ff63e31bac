import { categoryColor, PlacedGraph } from "./layout";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

export function renderGraph(graph: PlacedGraph): SVGSVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${graph.width} ${graph.height}`,
    class: "gor-canvas",
    role: "img",
  });

  const pos = new Map(graph.nodes.map((n) => [n.id, n]));

  for (const edge of graph.edges) {
    const a = pos.get(edge.source);
    const b = pos.get(edge.target);
    if (!a || !b) {
      continue;
    }
    const line = svgEl("line", {
      x1: String(a.x),
      y1: String(a.y),
      x2: String(b.x),
      y2: String(b.y),
      class: edge.manual ? "gor-edge manual" : "gor-edge",
    });
    const hint = svgEl("title", {});
    hint.textContent = `${edge.source} - ${edge.target} on ${edge.domain}`;
    line.appendChild(hint);
    svg.appendChild(line);
  }

  for (const node of graph.nodes) {
    const group = svgEl("g", { class: node.master ? "gor-node master" : "gor-node" });
    const circle = svgEl("circle", {
      cx: String(node.x),
      cy: String(node.y),
      r: String(node.radius),
      fill: categoryColor(node.category),
    });
    const hint = svgEl("title", {});
    const rows = node.rowCount === null ? "row count unknown" : `${node.rowCount} rows`;
    const category = node.category ?? "unclassified";
    hint.textContent = `${node.id}: ${rows}, distance ${node.distance}, ${category}`;
    circle.appendChild(hint);
    group.appendChild(circle);

    const dist = svgEl("text", {
      x: String(node.x),
      y: String(node.y + 4),
      class: "gor-distance",
      "text-anchor": "middle",
    });
    dist.textContent = String(node.distance);
    group.appendChild(dist);

    const label = svgEl("text", {
      x: String(node.x),
      y: String(node.y + node.radius + 14),
      class: "gor-label",
      "text-anchor": "middle",
    });
    label.textContent =
      node.rowCount === null ? node.id : `${node.id} (${node.rowCount})`;
    group.appendChild(label);

    svg.appendChild(group);
  }

  return svg;
}
