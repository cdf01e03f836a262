import json
import threading

import pytest
from fastapi.testclient import TestClient

from cellulat.dsl import load_model, pretty_print
from cellulat.scenarios import ca2plus_scenario
from cellulat.scheduler import SimState, run
from cellulat.service import GCPolicy, LabService, create_app


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


@pytest.fixture()
def model_id(client):
    response = client.post("/models", content=ca2plus_scenario().text)
    assert response.status_code == 200
    return response.json()["model_id"]


def new_session(client, model_id, seed=7):
    response = client.post("/sessions", json={"model_id": model_id, "seed": seed})
    assert response.status_code == 200
    return response.json()["session_id"]


def stream_events(client, session_id, cursor=0):
    response = client.get(f"/sessions/{session_id}/events?cursor={cursor}&follow=false")
    assert response.status_code == 200
    events = []
    for line in response.text.splitlines():
        if line.startswith("data: "):
            events.append(json.loads(line[len("data: "):]))
    assert events[-1]["type"] == "stream_end"
    return events[:-1]


class TestModels:
    def test_upload_clean_model(self, client):
        response = client.post("/models", content=ca2plus_scenario().text)
        assert response.status_code == 200
        body = response.json()
        assert body["diagnostics"] == []
        assert body["model_id"].startswith("ca2plus-")

    def test_upload_invalid_model_422_with_diagnostics(self, client):
        response = client.post(
            "/models",
            content="model bad\nlevel c kind cytosol rank 0\ninit ghost at c amount 1.0\n",
        )
        assert response.status_code == 422
        diagnostics = response.json()["detail"]["diagnostics"]
        assert any(d["code"] == "unknown_species" and d["line"] == 3 for d in diagnostics)

    def test_model_summary_has_occupancy_and_columns(self, client, model_id):
        body = client.get(f"/models/{model_id}").json()
        assert body["name"] == "ca2plus"
        assert len(body["columns"]) == 1
        column = body["columns"][0]
        assert column["region"] == "gpcr_patch"
        assert {"GPCR", "Gprotein", "PLCbeta", "ERchannel", "PKC"} <= set(column["members"])
        assert {"GPCR", "Gprotein", "PLCbeta"} <= set(body["occupancy"]["membrane"]["affecting"])

    def test_unknown_model_404(self, client):
        assert client.get("/models/ghost").status_code == 404
        assert client.post("/sessions", json={"model_id": "ghost", "seed": 0}).status_code == 404


class TestSessions:
    def test_step_and_state(self, client, model_id):
        session = new_session(client, model_id)
        summaries = client.post(f"/sessions/{session}/step", json={"ticks": 5}).json()
        assert [s["tick"] for s in summaries] == [0, 1, 2, 3, 4]
        assert summaries[0]["firings"][0] == {
            "agent": "GPCR", "fired": True, "count": 1, "skip_reason": None,
        }
        state = client.get(f"/sessions/{session}/state").json()
        assert state["tick"] == 5 and state["status"] == "idle"
        signals = {(s["species"], s["level"]): s["quantity"] for s in state["signals"]}
        assert signals[("IP3", "cytosol")] == 3.0

    def test_unknown_session_404(self, client):
        assert client.post("/sessions/ghost/step", json={"ticks": 1}).status_code == 404
        assert client.get("/sessions/ghost/state").status_code == 404

    def test_commands_to_ended_session_409(self, client, model_id):
        session = new_session(client, model_id)
        assert client.post(f"/sessions/{session}/end").json() == {"status": "ended"}
        for call in (
            lambda: client.post(f"/sessions/{session}/step", json={"ticks": 1}),
            lambda: client.post(f"/sessions/{session}/fork"),
            lambda: client.post(
                f"/sessions/{session}/stimuli",
                json={"ligand": "L1", "amount": 1.0, "from_tick": 99, "to_tick": 100},
            ),
            lambda: client.post(
                f"/sessions/{session}/lesions", json={"kind": "knockout", "agent": "PKC", "at_tick": 99},
            ),
        ):
            assert call().status_code == 409
        # Reads still work.
        assert client.get(f"/sessions/{session}/state").status_code == 200

    def test_api_determinism(self, client, model_id):
        a = new_session(client, model_id, seed=3)
        b = new_session(client, model_id, seed=3)
        for _ in range(4):
            ra = client.post(f"/sessions/{a}/step", json={"ticks": 2}).json()
            rb = client.post(f"/sessions/{b}/step", json={"ticks": 2}).json()
            assert ra == rb
            sa = client.get(f"/sessions/{a}/state").json()
            sb = client.get(f"/sessions/{b}/state").json()
            for volatile in ("session_id",):
                sa.pop(volatile), sb.pop(volatile)
            assert sa == sb


class TestStimuli:
    def strip_stimuli_model(self, client):
        model = load_model(ca2plus_scenario().text)
        model.stimuli = []
        response = client.post("/models", content=pretty_print(model))
        return response.json()["model_id"]

    def test_future_stimulus_drives_the_chain(self, client):
        model_id = self.strip_stimuli_model(client)
        session = new_session(client, model_id)
        quiet = client.post(f"/sessions/{session}/step", json={"ticks": 3}).json()
        assert all(s["agenda"] == [] for s in quiet)
        ack = client.post(
            f"/sessions/{session}/stimuli",
            json={"ligand": "L1", "amount": 5.0, "from_tick": 3, "to_tick": 20},
        )
        assert ack.status_code == 200
        summaries = client.post(f"/sessions/{session}/step", json={"ticks": 1}).json()
        assert summaries[0]["firings"][0]["agent"] == "GPCR"

    def test_past_stimulus_rejected(self, client, model_id):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 5})
        response = client.post(
            f"/sessions/{session}/stimuli",
            json={"ligand": "L1", "amount": 1.0, "from_tick": 2, "to_tick": 9},
        )
        assert response.status_code == 422

    def test_unknown_ligand_rejected(self, client, model_id):
        session = new_session(client, model_id)
        response = client.post(
            f"/sessions/{session}/stimuli",
            json={"ligand": "LX", "amount": 1.0, "from_tick": 5, "to_tick": 9},
        )
        assert response.status_code == 422


class TestLesionsApi:
    def test_knockout_via_api_flattens_ip3(self, client, model_id):
        session = new_session(client, model_id)
        ack = client.post(
            f"/sessions/{session}/lesions",
            json={"kind": "knockout", "agent": "PLCbeta", "at_tick": 0},
        )
        assert ack.status_code == 200 and "lesion_id" in ack.json()
        client.post(f"/sessions/{session}/step", json={"ticks": 20})
        state = client.get(f"/sessions/{session}/state").json()
        assert all(s["species"] != "IP3" for s in state["signals"])
        assert state["lesions"][0]["in_force"] is True

    def test_clamp_via_api(self, client, model_id):
        session = new_session(client, model_id)
        ack = client.post(
            f"/sessions/{session}/lesions",
            json={
                "kind": "clamp", "species": "Ca2plus", "level": "cytosol",
                "region": "gpcr_patch", "value": 0.0, "at_tick": 0,
            },
        )
        assert ack.status_code == 200
        summaries = client.post(f"/sessions/{session}/step", json={"ticks": 30}).json()
        fired = {f["agent"] for s in summaries for f in s["firings"] if f["fired"]}
        assert "PKC" not in fired

    def test_invalid_lesion_422(self, client, model_id):
        session = new_session(client, model_id)
        response = client.post(
            f"/sessions/{session}/lesions",
            json={"kind": "knockout", "agent": "nobody", "at_tick": 0},
        )
        assert response.status_code == 422


class TestFork:
    def test_fork_preserves_history_and_determinism(self, client, model_id):
        parent = new_session(client, model_id)
        client.post(f"/sessions/{parent}/step", json={"ticks": 20})
        child = client.post(f"/sessions/{parent}/fork").json()["session_id"]

        child_state = client.get(f"/sessions/{child}/state").json()
        assert child_state["lineage"] == parent
        assert child_state["tick"] == 20

        parent_trace = client.get(f"/sessions/{parent}/trace").json()["rows"]
        child_trace = client.get(f"/sessions/{child}/trace").json()["rows"]
        assert parent_trace == child_trace

        client.post(f"/sessions/{parent}/step", json={"ticks": 5})
        client.post(f"/sessions/{child}/step", json={"ticks": 5})
        ps = client.get(f"/sessions/{parent}/state").json()
        cs = client.get(f"/sessions/{child}/state").json()
        assert ps["signals"] == cs["signals"] and ps["tick"] == cs["tick"]

    def test_fork_then_lesion_only_child_diverges(self, client, model_id):
        parent = new_session(client, model_id)
        client.post(f"/sessions/{parent}/step", json={"ticks": 10})
        child = client.post(f"/sessions/{parent}/fork").json()["session_id"]
        client.post(
            f"/sessions/{child}/lesions",
            json={"kind": "knockout", "agent": "PLCbeta", "at_tick": 10},
        )
        client.post(f"/sessions/{parent}/step", json={"ticks": 10})
        client.post(f"/sessions/{child}/step", json={"ticks": 10})
        ps = client.get(f"/sessions/{parent}/state").json()
        cs = client.get(f"/sessions/{child}/state").json()
        p_ip3 = [s for s in ps["signals"] if s["species"] == "IP3"][0]["quantity"]
        c_ip3 = [s for s in cs["signals"] if s["species"] == "IP3"][0]["quantity"]
        assert p_ip3 > c_ip3


class TestEventStream:
    def test_every_write_event_exactly_once_in_seq_order(self, client, model_id):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 6})
        events = stream_events(client, session)
        writes = [e for e in events if e["type"] == "write"]
        state = client.get(f"/sessions/{session}/state").json()
        assert len(writes) == state["event_count"]
        order = [(e["tick"], e["seq"]) for e in writes]
        assert order == sorted(order)
        assert len(set(order)) == len(order)
        # Oracle: an offline run of the same model and seed yields the same log.
        sim = SimState(load_model(ca2plus_scenario().text), seed=7)
        reports = run(sim, 6)
        offline = [
            (ev.tick, ev.seq, ev.actor, ev.species, ev.kind, ev.amount, ev.resulting)
            for r in reports for ev in r.events
        ]
        online = [
            (e["tick"], e["seq"], e["actor"], e["species"], e["kind"], e["amount"], e["resulting"])
            for e in writes
        ]
        assert online == offline

    def test_cursor_resumes_mid_journal(self, client, model_id):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 3})
        full = stream_events(client, session)
        tail = stream_events(client, session, cursor=10)
        assert tail == full[10:]

    def test_stream_includes_firings_emissions_and_tick_markers(self, client, model_id):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 7})
        events = stream_events(client, session)
        kinds = {e["type"] for e in events}
        assert {"write", "firing", "emission", "tick"} <= kinds

    def test_trace_from_filters_ticks(self, client, model_id):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 10})
        rows = client.get(f"/sessions/{session}/trace?from=8").json()["rows"]
        assert rows and all(r["tick"] >= 8 for r in rows)


class TestGc:
    def make_service(self, policy):
        clock = {"now": 0.0}
        service = LabService(gc_policy=policy, clock=lambda: clock["now"])
        record, _ = service.add_model(ca2plus_scenario().text)
        return service, record, clock

    def test_zero_sessions_zero_reclaimed(self):
        service, _, _ = self.make_service(GCPolicy())
        assert service.gc() == 0

    def test_idle_expiry(self):
        service, record, clock = self.make_service(GCPolicy(max_idle_seconds=10.0))
        session = service.create_session(record.id, 0)
        clock["now"] = 11.0
        assert service.gc() == 1
        assert session.id not in service.sessions

    def test_ended_sessions_reclaimed(self):
        service, record, _ = self.make_service(GCPolicy(max_idle_seconds=1e9))
        session = service.create_session(record.id, 0)
        session.status = "ended"
        assert service.gc() == 1

    def test_running_never_reclaimed_oldest_idle_evicted(self):
        service, record, clock = self.make_service(
            GCPolicy(max_idle_seconds=1e9, max_sessions=2)
        )
        oldest = service.create_session(record.id, 0)
        clock["now"] = 1.0
        busy = service.create_session(record.id, 0)
        busy.status = "running"
        clock["now"] = 2.0
        fresh = service.create_session(record.id, 0)
        assert service.gc() == 1
        assert oldest.id not in service.sessions
        assert busy.id in service.sessions and fresh.id in service.sessions


class TestConcurrency:
    def test_parallel_steps_serialize_to_a_straight_run(self, client, model_id):
        session = new_session(client, model_id, seed=9)
        errors = []

        def worker():
            try:
                for _ in range(5):
                    response = client.post(f"/sessions/{session}/step", json={"ticks": 1})
                    assert response.status_code == 200
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        state = client.get(f"/sessions/{session}/state").json()
        assert state["tick"] == 20

        solo = new_session(client, model_id, seed=9)
        client.post(f"/sessions/{solo}/step", json={"ticks": 20})
        solo_state = client.get(f"/sessions/{solo}/state").json()
        assert state["signals"] == solo_state["signals"]
        assert state["event_count"] == solo_state["event_count"]


class TestTracePersistence:
    def test_rows_appended_per_tick_when_configured(self, tmp_path):
        from cellulat.service import create_app as make_app

        with TestClient(make_app(trace_dir=tmp_path / "traces")) as client:
            model_id = client.post("/models", content=ca2plus_scenario().text).json()["model_id"]
            session = new_session(client, model_id)
            client.post(f"/sessions/{session}/step", json={"ticks": 4})
            client.post(f"/sessions/{session}/step", json={"ticks": 2})
            persisted = [
                json.loads(line)
                for line in (tmp_path / "traces" / f"{session}.jsonl").read_text().splitlines()
            ]
            served = client.get(f"/sessions/{session}/trace").json()["rows"]
            assert persisted == served
            assert {row["tick"] for row in persisted} == set(range(6))

    def test_disabled_by_default(self, client, model_id, tmp_path):
        session = new_session(client, model_id)
        client.post(f"/sessions/{session}/step", json={"ticks": 2})
        assert list(tmp_path.iterdir()) == []
