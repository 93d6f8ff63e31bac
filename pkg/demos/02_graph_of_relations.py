"""Build the graph of relations around the purchase order header.

Run 01_generate_snapshot.py first.
"""

from pathlib import Path

from ocelforge import build_gor, extend_gor, load_catalog

snapshot = Path(__file__).resolve().parent / "_out" / "snapshot"
catalog = load_catalog(snapshot)

gor = build_gor(catalog, "EKKO")
print(f"master {gor.master}: {len(gor.nodes)} tables reachable")
for table in sorted(gor.nodes, key=lambda t: (gor.distance[t], t)):
    print(f"  d={gor.distance[table]} {table}")

print()
for edge in sorted(gor.edges, key=lambda e: (e.table_a, e.table_b)):
    print(f"  {edge.table_a} -- {edge.table_b} via {edge.join_domain}")

# change documents key on OBJECTID, not on any document number domain,
# so they never join the graph on their own; pull them in by hand
gor = extend_gor(gor, catalog, ["CDHDR", "CDPOS", "VBFA"])
manual = [e for e in gor.edges if e.manual]
attached = sorted({e.table_a if e.table_b == "EKKO" else e.table_b for e in manual})
print()
print("manually attached:", ", ".join(attached))

# a row threshold prunes sparsely populated tables
small = build_gor(catalog, "EKKO", row_threshold=40)
print("with row_threshold=40 the graph keeps", len(small.nodes), "tables")
