"""Sort the reachable tables into the five behavioral classes.

Run 01_generate_snapshot.py first.
"""

from pathlib import Path

from ocelforge import build_gor, classify_to_fixpoint, extend_gor, load_catalog

snapshot = Path(__file__).resolve().parent / "_out" / "snapshot"
catalog = load_catalog(snapshot)

gor = build_gor(catalog, "EKKO")
gor = extend_gor(gor, catalog, ["CDHDR", "CDPOS", "VBFA"])

# the fixpoint step also drags in masters of detail tables that the
# distance cutoff missed, so every detail has its header available
gor, categories, links = classify_to_fixpoint(catalog, gor)

by_class = {}
for table, category in categories.items():
    by_class.setdefault(category.value, []).append(table)
for name in ("record", "transaction", "flow", "change", "detail"):
    print(f"{name:12}", ", ".join(sorted(by_class.get(name, []))))

print()
print("why is BKPF a transaction table?")
for line in categories["BKPF"].evidence:
    print("  -", line)

print()
print("detail tables and the masters their keys extend:")
for link in sorted(links, key=lambda l: (l.detail_table, l.master_table)):
    print(f"  {link.detail_table} -> {link.master_table}")
