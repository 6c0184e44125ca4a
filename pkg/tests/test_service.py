"""HTTP API tests: endpoint examples, error envelopes, registry behavior,
and equality between endpoint JSON and direct analytics results."""

from __future__ import annotations

import io

import numpy as np
import pytest
from fastapi.testclient import TestClient

from classlens import analytics
from classlens.analytics import ColorSpec, FilterSpec, SortSpec, build_dataset
from classlens.ingest import serialize_predictions, write_snapshot
from classlens.service import Registry, ServiceConfig, create_app, to_json_bytes
from conftest import T6_ROWS, random_dataset, t6_records

T6_CSV = (
    "instance_id,true_class,p0,p1,p2\n"
    + "".join(f"{i},{t}," + ",".join(map(str, p)) + "\n" for i, t, p in T6_ROWS)
)
T6_LABELS_CSV = (
    "class_id,label,hierarchy\n"
    "0,kit fox,animal/canine/fox\n"
    "1,red fox,animal/canine/fox\n"
    "2,grey whale,animal/cetacean\n"
)
T6_MANIFEST_CSV = "instance_id,image_url\ni0,https://img.example/i0.jpg\n"


@pytest.fixture
def client():
    return TestClient(create_app(ServiceConfig()))


def upload_t6(client, with_labels=True, name="t6"):
    files = {"predictions": ("t6.csv", T6_CSV.encode(), "text/csv")}
    if with_labels:
        files["labels"] = ("labels.csv", T6_LABELS_CSV.encode(), "text/csv")
        files["images"] = ("images.csv", T6_MANIFEST_CSV.encode(), "text/csv")
    resp = client.post("/api/datasets", files=files, data={"name": name})
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestUpload:
    def test_t6_descriptor(self, client):
        desc = upload_t6(client)
        assert desc["k"] == 3
        assert desc["n"] == 6
        assert desc["totals"] == {"correct": 3, "misclassified": 3}
        assert desc["name"] == "t6"

    def test_bad_row_is_400_with_line(self, client):
        bad = T6_CSV.replace("i3,1,0.4,0.4,0.2", "i3,1,0.4,0.4,0.1")
        resp = client.post("/api/datasets", files={"predictions": ("x.csv", bad.encode())})
        assert resp.status_code == 400
        err = resp.json()["error"]
        assert err["code"] == "SumTolerance"
        assert err["line"] == 5

    def test_two_uploads_are_isolated(self, client):
        a = upload_t6(client, name="a")
        b = upload_t6(client, name="b")
        assert a["dataset_id"] != b["dataset_id"]
        for d in (a, b):
            assert client.get(f"/api/datasets/{d['dataset_id']}/classes").status_code == 200

    def test_listing_is_newest_first(self, client):
        assert client.get("/api/datasets").json() == []
        first = upload_t6(client, name="first")
        second = upload_t6(client, name="second")
        names = [d["name"] for d in client.get("/api/datasets").json()]
        assert names == ["second", "first"]
        client.delete(f"/api/datasets/{first['dataset_id']}")
        assert [d["name"] for d in client.get("/api/datasets").json()] == ["second"]
        assert second["dataset_id"] == client.get("/api/datasets").json()[0]["dataset_id"]

    def test_k_limit_gives_413(self):
        app = create_app(ServiceConfig(max_classes=2))
        client = TestClient(app)
        resp = client.post("/api/datasets", files={"predictions": ("x.csv", T6_CSV.encode())})
        assert resp.status_code == 413

    def test_upload_size_limit_gives_413(self):
        app = create_app(ServiceConfig(max_upload_bytes=10))
        client = TestClient(app)
        resp = client.post("/api/datasets", files={"predictions": ("x.csv", T6_CSV.encode())})
        assert resp.status_code == 413


class TestClasses:
    def test_inbound_desc_order_and_values(self, client):
        did = upload_t6(client)["dataset_id"]
        rows = client.get(f"/api/datasets/{did}/classes?sort=inbound&order=desc").json()
        assert [r["class_id"] for r in rows] == [0, 1, 2]
        assert [(r["correct"], r["outbound"], r["inbound"]) for r in rows] == [
            (1, 1, 2), (1, 1, 1), (1, 1, 0),
        ]
        assert rows[0]["label"] == "kit fox"

    def test_index_asc_identity(self, client):
        did = upload_t6(client)["dataset_id"]
        rows = client.get(f"/api/datasets/{did}/classes").json()
        assert [r["class_id"] for r in rows] == [0, 1, 2]

    def test_bad_enum_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        resp = client.get(f"/api/datasets/{did}/classes?sort=banana")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "InvalidParameter"

    def test_unknown_dataset_is_404(self, client):
        resp = client.get("/api/datasets/nope/classes")
        assert resp.status_code == 404
        assert resp.json()["error"]["code"] == "UnknownDataset"


class TestOverview:
    def test_t6_bins2(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/overview?bins=2").json()
        assert body["bins"] == 2
        assert body["classes"][0]["histogram"] == [4, 2]

    def test_bins1_counts_everything(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/overview?bins=1").json()
        assert all(entry["histogram"] == [6] for entry in body["classes"])

    def test_bins0_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        assert client.get(f"/api/datasets/{did}/overview?bins=0").status_code == 400


class TestWindow:
    def test_defaults_clip_to_k(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/window").json()
        assert (body["from"], body["to"]) == (0, 2)
        assert len(body["instances"]) == 6
        assert [w["color_group"] for w in body["instances"]] == [7, 6, 8, 4, 5, 5]

    def test_filter_keeps_doughnuts(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/window?pred_min=0.75").json()
        assert [w["instance_id"] for w in body["instances"]] == ["i2"]
        assert [d["correct"] for d in body["doughnuts"]] == [1, 1, 1]
        assert body["total_matching"] == 1

    def test_inverted_range_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        resp = client.get(f"/api/datasets/{did}/window?from=5&to=2")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "InvalidRange"

    def test_window_too_large_is_400(self, client):
        rng = np.random.default_rng(0)
        records = []
        for i in range(80):
            v = rng.random(60) + 0.01
            v /= v.sum()
            records.append(analytics.PredictionRecord(f"x{i}", i % 60, v))
        registry = Registry()
        entry = registry.add(build_dataset(records), "wide")
        wide = TestClient(create_app(ServiceConfig(), registry))
        resp = wide.get(f"/api/datasets/{entry.dataset_id}/window?from=0&to=59")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "WindowTooLarge"

    def test_threshold_colors(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(
            f"/api/datasets/{did}/window?color_mode=threshold&lo=0.5&hi=0.6"
        ).json()
        # max preds 0.7 0.6 0.8 0.4 0.5 0.5 -> inside [0.5, 0.6]: i1, i4, i5
        assert [w["color_group"] for w in body["instances"]] == [0, 1, 0, 0, 1, 1]


class TestChord:
    def test_t6_pair(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/chord?classes=0,1").json()
        assert body["flows"] == [[0, 1], [1, 0]]
        assert body["examples"] == {"0->1": ["i1"], "1->0": ["i3"]}
        assert body["nodes"][0] == {
            "class_id": 0, "label": "kit fox", "outbound_within": 1, "inbound_within": 1,
        }

    def test_singleton(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/chord?classes=2").json()
        assert body["flows"] == [[0]]
        assert body["examples"] == {}

    def test_duplicate_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        resp = client.get(f"/api/datasets/{did}/chord?classes=0,0")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "DuplicateClassInSelection"

    def test_empty_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        assert client.get(f"/api/datasets/{did}/chord").status_code == 400

    def test_out_of_range_is_400(self, client):
        did = upload_t6(client)["dataset_id"]
        resp = client.get(f"/api/datasets/{did}/chord?classes=0,9")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "ClassOutOfRange"


class TestInstanceDetail:
    def test_t6_i3(self, client):
        did = upload_t6(client)["dataset_id"]
        body = client.get(f"/api/datasets/{did}/instances/i3").json()
        assert body["true_class"] == 1
        assert body["predicted_class"] == 0
        assert body["max_pred"] == pytest.approx(0.4, abs=1e-6)
        assert body["label"] == "red fox"
        assert body["hierarchy"] == ["animal", "canine", "fox"]
        assert len(body["probs"]) == 3

    def test_unknown_instance_is_404(self, client):
        did = upload_t6(client)["dataset_id"]
        resp = client.get(f"/api/datasets/{did}/instances/nope")
        assert resp.status_code == 404
        assert resp.json()["error"]["code"] == "UnknownInstance"

    def test_manifest_hit_and_placeholder(self, client):
        did = upload_t6(client)["dataset_id"]
        with_img = client.get(f"/api/datasets/{did}/instances/i0").json()
        assert with_img["image_url"] == "https://img.example/i0.jpg"
        without = client.get(f"/api/datasets/{did}/instances/i5").json()
        assert without["image_url"] == "/static/placeholder.svg"
        assert client.get("/static/placeholder.svg").status_code == 200


class TestDelete:
    def test_delete_then_404(self, client):
        did = upload_t6(client)["dataset_id"]
        assert client.delete(f"/api/datasets/{did}").status_code == 200
        assert client.get(f"/api/datasets/{did}/classes").status_code == 404
        assert client.delete(f"/api/datasets/{did}").status_code == 404

    def test_resolved_dataset_survives_delete(self, client):
        # immutability: a reader holding the dataset is unaffected by deletion
        did = upload_t6(client)["dataset_id"]
        app_registry = client.app.state.registry
        entry = app_registry.get(did)
        client.delete(f"/api/datasets/{did}")
        assert entry.dataset.total_correct == 3


class TestDemoAndSnapshots:
    def test_demo_endpoint(self, client):
        desc = client.post("/api/demo?classes=10&instances=200&seed=3").json()
        assert desc["k"] == 10
        assert desc["n"] == 200
        assert client.get(f"/api/datasets/{desc['dataset_id']}/overview").status_code == 200

    def test_snapshot_dir_persists_across_restart(self, tmp_path, t6):
        cfg = ServiceConfig(snapshot_dir=tmp_path / "snaps")
        client1 = TestClient(create_app(cfg))
        did = upload_t6(client1)["dataset_id"]
        assert (tmp_path / "snaps" / f"{did}.mcv1").exists()

        client2 = TestClient(create_app(ServiceConfig(snapshot_dir=tmp_path / "snaps")))
        listed = client2.get("/api/datasets").json()
        assert [d["dataset_id"] for d in listed] == [did]
        body = client2.get(f"/api/datasets/{did}/chord?classes=0,1").json()
        assert body["flows"] == [[0, 1], [1, 0]]
        # labels are not part of the snapshot format; defaults apply on reload
        rows = client2.get(f"/api/datasets/{did}/classes").json()
        assert rows[0]["label"] == "class-0"

    def test_delete_removes_snapshot_file(self, tmp_path):
        cfg = ServiceConfig(snapshot_dir=tmp_path / "snaps")
        c = TestClient(create_app(cfg))
        did = upload_t6(c)["dataset_id"]
        c.delete(f"/api/datasets/{did}")
        assert not (tmp_path / "snaps" / f"{did}.mcv1").exists()


class TestEndpointAnalyticsEquality:
    """Endpoint JSON equals direct analytics values, field for field."""

    def test_random_parameterizations(self):
        rng = np.random.default_rng(1234)
        d = random_dataset(77, max_k=8, max_n=120)
        registry = Registry()
        entry = registry.add(d, "rand")
        client = TestClient(create_app(ServiceConfig(), registry))
        did = entry.dataset_id

        for trial in range(30):
            key = str(rng.choice(list(analytics.SORT_KEYS)))
            order = str(rng.choice(["asc", "desc"]))
            rows = client.get(f"/api/datasets/{did}/classes?sort={key}&order={order}").json()
            expected_order = analytics.sort_classes(d, SortSpec(key, order))
            assert [r["class_id"] for r in rows] == expected_order
            for r in rows:
                s = d.summaries[r["class_id"]]
                assert (r["support"], r["correct"], r["outbound"], r["inbound"]) == (
                    s.support, s.correct, s.outbound, s.inbound,
                )
                assert r["mean_max_pred"] == s.mean_max_pred

            lo, hi = sorted(rng.random(2).tolist())
            to = int(rng.integers(0, d.num_classes))
            frm = int(rng.integers(0, to + 1))
            limit = int(rng.integers(0, 40))
            body = client.get(
                f"/api/datasets/{did}/window?from={frm}&to={to}"
                f"&pred_min={lo}&pred_max={hi}&limit={limit}"
            ).json()
            ws = analytics.window_slice(
                d, frm, to, FilterSpec(lo, hi), ColorSpec.bins(10), limit=limit
            )
            assert body["total_matching"] == ws.total_matching
            assert [w["instance_id"] for w in body["instances"]] == [
                w.instance_id for w in ws.instances
            ]
            assert [w["color_group"] for w in body["instances"]] == [
                w.color_group for w in ws.instances
            ]
            for got, want in zip(body["instances"], ws.instances):
                assert got["values"] == list(want.values)

            size = int(rng.integers(1, min(6, d.num_classes) + 1))
            sel = [int(c) for c in rng.permutation(d.num_classes)[:size]]
            flows = client.get(
                f"/api/datasets/{did}/chord?classes={','.join(map(str, sel))}"
            ).json()["flows"]
            cf = analytics.chord_flows(d, sel)
            assert flows == [list(r) for r in cf.flows]

            bins = int(rng.integers(1, 30))
            body = client.get(f"/api/datasets/{did}/overview?bins={bins}").json()
            for c in range(d.num_classes):
                assert body["classes"][c]["histogram"] == list(
                    analytics.prediction_histogram(d, c, bins).bins
                )


class TestDeterminism:
    def test_same_query_same_bytes(self, client):
        did = upload_t6(client)["dataset_id"]
        url = f"/api/datasets/{did}/window?from=0&to=2&colors=7&color_mode=bins"
        assert client.get(url).content == client.get(url).content
