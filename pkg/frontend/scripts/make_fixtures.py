"""Regenerate the engine-rendered fixtures used by the UI round-trip test.

Run from the repository root with the Python package installed:

    python3 frontend/scripts/make_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from lineglow import synth
from lineglow.service import Session, create_app

out = Path(__file__).resolve().parent.parent / "test" / "fixtures"
out.mkdir(parents=True, exist_ok=True)

lines = synth.clustered_dataset(16, 2, grid=96, seed=2)
session = Session(lines, 96, 96)
client = TestClient(create_app(session))

meta = client.get("/meta").json()
(out / "meta.json").write_text(json.dumps(meta, indent=1))

client.post("/params", json={"phi": -20.0})
epoch = client.post("/params", json={"sigma": 0.0}).json()["epoch"]
(out / "sigma0.png").write_bytes(client.get(f"/render.png?epoch={epoch}").content)
epoch = client.post("/params", json={"sigma": 1.0}).json()["epoch"]
(out / "sigma1.png").write_bytes(client.get(f"/render.png?epoch={epoch}").content)
print("fixtures written to", out)
