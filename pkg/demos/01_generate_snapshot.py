"""Generate a synthetic purchase-to-pay snapshot and poke at the files."""

from pathlib import Path

from ocelforge import GenSpec, generate

out = Path(__file__).resolve().parent / "_out" / "snapshot"

spec = GenSpec(seed=42, n_orders=50, change_rate=0.3, flow_chains=4)
manifest = generate(spec, out)

print(f"snapshot in {out}")
for table, rows in sorted(manifest["tables"].items()):
    print(f"  {table:6} {rows:5} rows")

# the manifest records ground truth the generator chose, handy for checks
first = manifest["orders"][0]
print("first order:", first["ebeln"], "with", len(first["items"]), "items")
print("multi-item orders:", manifest["orders_with_multiple_items"], "of", spec.n_orders)

# data dictionary files describe every column and its domain
print((out / "dd_fields.csv").read_text().splitlines()[0])
print((out / "dd_fields.csv").read_text().splitlines()[1])
