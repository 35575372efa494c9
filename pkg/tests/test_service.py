from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from lineglow import synth
from lineglow.service import Session, create_app


@pytest.fixture(scope="module")
def session():
    lines = synth.clustered_dataset(24, 2, grid=128)
    return Session(lines, 128, 128)


@pytest.fixture()
def client(session):
    return TestClient(create_app(session))


class TestMeta:
    def test_meta_shape(self, client, session):
        body = client.get("/meta").json()
        assert body["grid"] == [128, 128]
        assert body["lines"] == len(session.prep.lines)
        assert body["clusters"] == [0, 1]
        assert len(body["outlierness_histogram"]) == 20
        assert sum(body["outlierness_histogram"]) == body["lines"]
        assert set(body["params"]) >= {"mu", "sigma", "eta", "phi", "kernel", "bandwidth"}


class TestParams:
    def test_update_bumps_epoch(self, client):
        e0 = client.get("/meta").json()["epoch"]
        r = client.post("/params", json={"mu": 0.3})
        assert r.status_code == 200
        assert r.json()["epoch"] == e0 + 1

    @pytest.mark.parametrize(
        "delta,field",
        [
            ({"mu": 1.5}, "mu"),
            ({"sigma": -0.1}, "sigma"),
            ({"eta": 0.0}, "eta"),
            ({"phi": 5.0}, "phi"),
            ({"kernel": 4}, "kernel"),
            ({"bandwidth": -1.0}, "bandwidth"),
            ({"colormap": "rainbow"}, "colormap"),
            ({"nonsense": 1}, "nonsense"),
        ],
    )
    def test_out_of_range_rejected_with_field(self, client, delta, field):
        r = client.post("/params", json=delta)
        assert r.status_code == 400
        assert r.json()["field"] == field

    def test_param_changes_do_not_recompute_outlierness(self, client, session):
        runs = session.outlierness_runs
        for delta in ({"mu": 0.8}, {"sigma": 0.2}, {"eta": 2.0}, {"phi": -10.0},
                      {"lighting": "fixed:135:60"}, {"colormap": "multi"}):
            assert client.post("/params", json=delta).status_code == 200
        assert session.outlierness_runs == runs

    def test_bandwidth_change_recomputes_outlierness(self, client, session):
        runs = session.outlierness_runs
        assert client.post("/params", json={"bandwidth": 1.5}).status_code == 200
        assert session.outlierness_runs == runs + 1
        client.post("/params", json={"bandwidth": 1.0})


class TestRender:
    def test_render_current_epoch(self, client):
        e = client.post("/params", json={"sigma": 0.4}).json()["epoch"]
        r = client.get(f"/render.png?epoch={e}")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content.startswith(b"\x89PNG")

    def test_stale_epoch_409(self, client):
        e = client.post("/params", json={"sigma": 0.6}).json()["epoch"]
        r = client.get(f"/render.png?epoch={e - 1}")
        assert r.status_code == 409
        r = client.get(f"/render.png?epoch={e + 5}")
        assert r.status_code == 409

    def test_sigma_zero_matches_low_freq_only_render(self, client, session):
        from lineglow.pipeline import render
        from lineglow import pngio

        e = client.post("/params", json={"sigma": 0.0}).json()["epoch"]
        served = client.get(f"/render.png?epoch={e}").content
        direct = render(session.prep, session.params)
        assert served == pngio.encode_png(direct.image.pixels)
        assert not direct.selection.selected

    def test_layers_served(self, client):
        assert client.get("/layers/normals.png").status_code == 200
        assert client.get("/layers/intensity.png").status_code == 200


class TestLight:
    def test_unknown_cluster_404(self, client):
        r = client.post("/light", json={"cluster": 99, "azimuth": 100})
        assert r.status_code == 404

    def test_out_of_sector_400(self, client):
        r = client.post("/light", json={"cluster": 1, "azimuth": 200, "sector": 30, "center": 150})
        assert r.status_code == 400
        assert r.json()["field"] == "azimuth"

    def test_valid_light_accepted(self, client, session):
        r = client.post("/light", json={"cluster": 1, "azimuth": 160, "sector": 30, "center": 150})
        assert r.status_code == 200
        assert session.params.cluster_lights[1].azimuth == 160.0
        assert session.params.lighting == "per_cluster_manual"

    def test_light_does_not_recompute_outlierness(self, client, session):
        runs = session.outlierness_runs
        client.post("/light", json={"cluster": 0, "azimuth": 135})
        assert session.outlierness_runs == runs


class TestConcurrency:
    def test_hammering_params_and_renders_never_tears(self):
        import threading

        lines = synth.clustered_dataset(12, 2, grid=96, seed=5)
        session = Session(lines, 96, 96)
        client = TestClient(create_app(session))
        errors: list[str] = []

        def poster():
            for i in range(12):
                r = client.post("/params", json={"mu": (i % 10) / 10})
                if r.status_code != 200:
                    errors.append(f"params {r.status_code}")

        def renderer():
            for _ in range(12):
                epoch = session.epoch
                r = client.get(f"/render.png?epoch={epoch}")
                if r.status_code == 200:
                    if not r.content.startswith(b"\x89PNG"):
                        errors.append("non-png 200 response")
                elif r.status_code != 409:
                    errors.append(f"render {r.status_code}")

        threads = [threading.Thread(target=poster)] + [
            threading.Thread(target=renderer) for _ in range(3)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []


class TestDeterminism:
    SCRIPT = (
        {"mu": 0.7},
        {"sigma": 0.35},
        {"eta": 2.5},
        {"phi": -18.0},
        {"lighting": "adaptive"},
    )

    def _replay(self):
        lines = synth.clustered_dataset(18, 2, grid=96, seed=3)
        session = Session(lines, 96, 96)
        client = TestClient(create_app(session))
        blobs = []
        for delta in self.SCRIPT:
            e = client.post("/params", json=delta).json()["epoch"]
            blobs.append(client.get(f"/render.png?epoch={e}").content)
        blobs.append(client.get("/meta").content)
        return blobs

    def test_replayed_script_byte_identical(self):
        assert self._replay() == self._replay()
