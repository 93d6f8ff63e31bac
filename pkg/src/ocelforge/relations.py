"""Graph of relations: which snapshot tables join with which.

Tables are nodes; an edge means the two tables share a join domain that is
part of a primary key on at least one side. The graph is built outward from
a chosen master table with a row-count threshold and a hop limit, and can be
extended manually afterwards.
"""

from __future__ import annotations

from collections import defaultdict, deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations

from .catalog import CODE, Catalog
from .errors import UnknownMasterTable, UnknownTable


@dataclass(frozen=True)
class GorEdge:
    """Join relation between two tables, canonically ordered table_a < table_b.

    ``manual`` edges are synthetic attachments created for user-added tables
    with no shared join domain; their join_domain and join_fields are empty.
    """

    table_a: str
    table_b: str
    join_domain: str
    join_fields: tuple[str, str]
    manual: bool = False


@dataclass(frozen=True)
class GraphOfRelations:
    master: str
    nodes: frozenset[str]
    edges: frozenset[GorEdge]
    distance: dict[str, int]
    warnings: tuple[str, ...] = ()


def default_blacklist(catalog: Catalog) -> frozenset[str]:
    """Domains never used as join domains: client/fiscal-year plus everything
    that is not a code domain."""
    out = {"MANDT", "GJAHR"}
    for dom in catalog.domains.values():
        if dom.kind != CODE:
            out.add(dom.name)
    return frozenset(out)


def edge_candidates(
    catalog: Catalog, blacklist: Iterable[str] | None = None
) -> frozenset[GorEdge]:
    """All join edges the catalog supports.

    A domain qualifies for a pair of tables when it is a code domain outside
    the blacklist, sits in a primary-key column of at least one of the two
    tables, and in any column of the other. Each table pair contributes at
    most one edge: domains keyed on both sides win, then lexicographic order
    decides.
    """
    banned = frozenset(blacklist) if blacklist is not None else default_blacklist(catalog)
    # table -> domain -> (is_key, field); representative column prefers keys,
    # then the lowest position.
    rep: dict[str, dict[str, tuple[bool, str]]] = {}
    holders: dict[str, list[str]] = defaultdict(list)
    for name in sorted(catalog.tables):
        schema = catalog.tables[name]
        table_rep: dict[str, tuple[bool, str]] = {}
        for col in schema.columns:
            if col.domain in banned or catalog.column_kind(col) != CODE:
                continue
            known = table_rep.get(col.domain)
            if known is None or (col.is_key and not known[0]):
                table_rep[col.domain] = (col.is_key, col.field)
        rep[name] = table_rep
        for domain in table_rep:
            holders[domain].append(name)

    per_pair: dict[tuple[str, str], list[tuple[bool, str]]] = defaultdict(list)
    for domain in sorted(holders):
        for a, b in combinations(sorted(holders[domain]), 2):
            a_key = rep[a][domain][0]
            b_key = rep[b][domain][0]
            if a_key or b_key:
                per_pair[(a, b)].append((a_key and b_key, domain))

    edges = set()
    for (a, b), options in per_pair.items():
        options.sort(key=lambda opt: (not opt[0], opt[1]))
        _, domain = options[0]
        edges.add(
            GorEdge(
                table_a=a,
                table_b=b,
                join_domain=domain,
                join_fields=(rep[a][domain][1], rep[b][domain][1]),
            )
        )
    return frozenset(edges)


def _adjacency(edges: Iterable[GorEdge]) -> dict[str, list[tuple[str, GorEdge]]]:
    adj: dict[str, list[tuple[str, GorEdge]]] = defaultdict(list)
    for edge in sorted(edges, key=lambda e: (e.table_a, e.table_b, e.join_domain)):
        adj[edge.table_a].append((edge.table_b, edge))
        adj[edge.table_b].append((edge.table_a, edge))
    return adj


def _bfs(edges: Iterable[GorEdge], start: str) -> dict[str, int]:
    adj = _adjacency(edges)
    distance = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for neighbor, _ in adj[node]:
            if neighbor not in distance:
                distance[neighbor] = distance[node] + 1
                queue.append(neighbor)
    return distance


def build_gor(
    catalog: Catalog,
    master: str,
    row_threshold: int = 0,
    max_distance: int = 3,
    blacklist: Iterable[str] | None = None,
) -> GraphOfRelations:
    """Breadth-first graph around ``master``.

    Only tables with ``row_count >= row_threshold`` are traversed (the master
    itself is never filtered), and expansion stops ``max_distance`` hops out.
    A master without any edge candidate yields a single-node graph carrying a
    warning rather than an error.
    """
    if master not in catalog.tables:
        raise UnknownMasterTable(master)
    candidates = edge_candidates(catalog, blacklist)
    adj = _adjacency(candidates)
    warnings: tuple[str, ...] = ()
    if not adj.get(master):
        warnings = (f"no relations found for master table {master}",)

    distance = {master: 0}
    queue = deque([master])
    while queue:
        node = queue.popleft()
        if distance[node] >= max_distance:
            continue
        for neighbor, _ in adj[node]:
            if neighbor in distance:
                continue
            if catalog.tables[neighbor].row_count < row_threshold:
                continue
            distance[neighbor] = distance[node] + 1
            queue.append(neighbor)

    nodes = frozenset(distance)
    edges = frozenset(
        e for e in candidates if e.table_a in nodes and e.table_b in nodes
    )
    return GraphOfRelations(
        master=master, nodes=nodes, edges=edges, distance=distance, warnings=warnings
    )


def extend_gor(
    gor: GraphOfRelations,
    catalog: Catalog,
    add: Iterable[str],
    blacklist: Iterable[str] | None = None,
) -> GraphOfRelations:
    """Return a graph over ``gor.nodes | add`` with edges recomputed.

    Added tables ignore the row threshold. Tables that stay unconnected are
    attached to the master by a synthetic ``manual`` edge, so the invariant
    that the graph is connected survives. Existing nodes are never removed.
    """
    additions = set(add)
    for table in sorted(additions):
        if table not in catalog.tables:
            raise UnknownTable(table)
    nodes = set(gor.nodes) | additions
    candidates = {
        e
        for e in edge_candidates(catalog, blacklist)
        if e.table_a in nodes and e.table_b in nodes
    }
    reachable = _bfs(candidates, gor.master)
    manual = set()
    for table in sorted(nodes - set(reachable)):
        a, b = sorted((gor.master, table))
        manual.add(
            GorEdge(table_a=a, table_b=b, join_domain="", join_fields=("", ""), manual=True)
        )
    edges = frozenset(candidates | manual)
    return GraphOfRelations(
        master=gor.master,
        nodes=frozenset(nodes),
        edges=edges,
        distance=_bfs(edges, gor.master),
        warnings=gor.warnings,
    )


def gor_to_doc(
    gor: GraphOfRelations,
    catalog: Catalog | None = None,
    categories: Mapping[str, object] | None = None,
) -> dict:
    """Plain-data form of the graph (stable ordering, JSON-friendly)."""
    nodes = []
    for name in sorted(gor.nodes):
        node: dict[str, object] = {"name": name, "distance": gor.distance[name]}
        if catalog is not None and name in catalog.tables:
            node["row_count"] = catalog.tables[name].row_count
        if categories is not None and name in categories:
            category = categories[name]
            node["category"] = getattr(category, "value", category)
        nodes.append(node)
    edges = [
        {
            "a": e.table_a,
            "b": e.table_b,
            "join_domain": e.join_domain,
            "join_fields": list(e.join_fields),
            "manual": e.manual,
        }
        for e in sorted(gor.edges, key=lambda e: (e.table_a, e.table_b, e.join_domain))
    ]
    doc: dict[str, object] = {"master": gor.master, "nodes": nodes, "edges": edges}
    if gor.warnings:
        doc["warnings"] = list(gor.warnings)
    return doc


def gor_from_doc(doc: Mapping) -> GraphOfRelations:
    nodes = frozenset(node["name"] for node in doc["nodes"])
    distance = {node["name"]: int(node["distance"]) for node in doc["nodes"]}
    edges = frozenset(
        GorEdge(
            table_a=e["a"],
            table_b=e["b"],
            join_domain=e["join_domain"],
            join_fields=tuple(e["join_fields"]),
            manual=bool(e.get("manual", False)),
        )
        for e in doc["edges"]
    )
    return GraphOfRelations(
        master=doc["master"],
        nodes=nodes,
        edges=edges,
        distance=distance,
        warnings=tuple(doc.get("warnings", ())),
    )
