"""Drive the HTTP session service through a whole extraction.

Talks to an in-process app via the test client, so no server needs to
be running. Run 01_generate_snapshot.py first. Against a live
``ocelforge serve`` the same calls work over any HTTP client.
"""

import time
from pathlib import Path

from fastapi.testclient import TestClient

from ocelforge.service import create_app

snapshot = Path(__file__).resolve().parent / "_out" / "snapshot"

client = TestClient(create_app())

session = client.post("/sessions", json={"snapshot": str(snapshot)}).json()
sid = session["id"]
print("session", sid, "on", session["tables"], "tables")

gor = client.post(f"/sessions/{sid}/gor", json={"master": "EKKO"}).json()
print("graph:", len(gor["nodes"]), "nodes")

client.post(f"/sessions/{sid}/gor/extend", json={"add": ["CDHDR", "CDPOS", "VBFA"]})
classified = client.post(f"/sessions/{sid}/classify", json={}).json()
for table, info in sorted(classified["categories"].items()):
    print(f"  {table:6} {info['value']}")

# key fields are what plan filters may target
keys = client.get(f"/sessions/{sid}/keys").json()["fields"]
print("filterable key fields:", ", ".join(f["field"] for f in keys))

client.post(f"/sessions/{sid}/plan", json={"change_strategy": "field"})
client.post(f"/sessions/{sid}/extract", json={"jobs": 2})

while True:
    status = client.get(f"/sessions/{sid}/extract/status").json()
    print("  state:", status["state"], status["progress"])
    if status["state"] in ("done", "failed"):
        break
    time.sleep(0.05)

ocel = client.get(f"/sessions/{sid}/ocel")
print("OCEL payload:", len(ocel.content), "bytes")

stats = client.post(
    f"/sessions/{sid}/flatten", json={"case_type": "EBELN-EBELN"}
).json()
print(
    "flattened to", stats["cases"], "order cases;",
    "divergence", stats["divergence"],
)
