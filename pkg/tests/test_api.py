import numpy as np
import pytest
from fastapi.testclient import TestClient

from sparsepref.api import RegisteredDataset, create_app, register_dataset
from sparsepref.dataset import Direction, RawTable, load_table
from sparsepref.harness import gen_uniform
from sparsepref.preference import SimulatedUser, gen_sparse_utility, simulate_answer
from sparsepref.session import Session, SessionConfig
from conftest import drive_session


@pytest.fixture
def registry():
    reg: dict[str, RegisteredDataset] = {}
    register_dataset(reg, "uniform", gen_uniform(400, 20, np.random.default_rng(0)))
    raw = RawTable(("price", "size"),
                   (Direction.LOWER_BETTER, Direction.HIGHER_BETTER),
                   tuple((float(100 + 10 * i), float(50 - i)) for i in range(20)))
    register_dataset(reg, "homes", load_table(raw), raw)
    return reg


@pytest.fixture
def client(registry):
    return TestClient(create_app(registry))


def test_list_datasets(client):
    body = client.get("/datasets").json()
    names = {d["name"] for d in body["datasets"]}
    assert names == {"uniform", "homes"}


def test_create_session_defaults(client):
    r = client.post("/sessions", json={"dataset": "uniform"})
    assert r.status_code == 201
    q = r.json()
    assert q["type"] == "question"
    assert q["question_index"] == 0
    assert len(q["tuples"]) == 2
    assert len(q["attributes"]) <= 7
    assert set(q["allowed_actions"]) == {"choose", "opt_out", "quit"}


def test_create_session_config_override(client):
    r = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"m": 5, "seed": 1}})
    assert r.status_code == 201
    assert len(r.json()["attributes"]) <= 5


def test_unknown_dataset_404(client):
    assert client.post("/sessions", json={"dataset": "nope"}).status_code == 404


def test_invalid_config_422(client):
    r = client.post("/sessions", json={"dataset": "uniform", "config": {"s": 0}})
    assert r.status_code == 422


def test_unknown_session_404(client):
    assert client.get("/sessions/deadbeef/question").status_code == 404


def test_answer_flow_and_double_submit_409(client):
    q = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"seed": 5}}).json()
    sid = q["session_id"]
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": 0, "action": "choose", "choice": 0})
    assert r.status_code == 200
    assert r.json()["question_index"] == 1
    dup = client.post(f"/sessions/{sid}/answer",
                      json={"question_index": 0, "action": "choose", "choice": 1})
    assert dup.status_code == 409


def test_malformed_actions_422(client):
    q = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"seed": 6}}).json()
    sid = q["session_id"]
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": 0, "action": "choose", "choice": 9})
    assert r.status_code == 422
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": 0, "action": "sing"})
    assert r.status_code == 422
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": "zero", "action": "quit"})
    assert r.status_code == 422


def test_quit_on_first_question_returns_k_set(client):
    q = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"seed": 7, "K": 12}}).json()
    sid = q["session_id"]
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": 0, "action": "quit"})
    assert r.status_code == 200
    body = r.json()
    assert body["type"] == "result" and body["kind"] == "regret_set"
    assert len(body["tuples"]) == 12
    assert body["diagnostics"]["coverage"] is not None
    # Result endpoint agrees; question endpoint now serves the result too.
    assert client.get(f"/sessions/{sid}/result").json()["kind"] == "regret_set"
    assert client.get(f"/sessions/{sid}/question").json()["type"] == "result"


def test_result_409_while_in_progress(client):
    q = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"seed": 8}}).json()
    assert client.get(f"/sessions/{q['session_id']}/result").status_code == 409


def test_scripted_client_matches_in_process_engine(registry, client):
    X = registry["uniform"].dataset
    truth = gen_sparse_utility(X.d, 3, np.random.default_rng(11))
    user = SimulatedUser(truth)

    engine = Session(X, SessionConfig(seed=42))
    expected = drive_session(engine, user, X)

    body = client.post("/sessions", json={"dataset": "uniform",
                                          "config": {"seed": 42}}).json()
    sid = body["session_id"]
    name_to_dim = {n: i for i, n in enumerate(X.attribute_names)}
    steps = 0
    while body["type"] == "question":
        dims = tuple(name_to_dim[n] for n in body["attributes"])
        tuples = np.array(body["tuples"])
        full = np.zeros((len(tuples), X.d))
        full[:, list(dims)] = tuples
        ans = simulate_answer(user, dims, full)
        payload = {"question_index": body["question_index"],
                   "action": "choose" if ans.choice is not None else "opt_out"}
        if ans.choice is not None:
            payload["choice"] = int(ans.choice)
        body = client.post(f"/sessions/{sid}/answer", json=payload).json()
        steps += 1
        assert steps < 500
    assert body["kind"] == "favorite"
    assert body["favorite"]["origin_id"] == int(X.origin_ids[expected.favorite_row])
    assert body["diagnostics"]["questions_asked"] == expected.questions_asked
    assert body["diagnostics"]["identified_keys"] == \
        [X.attribute_names[i] for i in expected.identified_keys]


def test_raw_values_surface_for_csv_backed_datasets(client):
    q = client.post("/sessions", json={"dataset": "homes",
                                       "config": {"seed": 1, "K": 8}}).json()
    assert q["raw_tuples"] is not None
    assert len(q["raw_tuples"]) == len(q["tuples"])
    sid = q["session_id"]
    r = client.post(f"/sessions/{sid}/answer",
                    json={"question_index": 0, "action": "quit"}).json()
    assert all("raw_values" in t for t in r["tuples"])


def test_ttl_expiry_behaves_as_quit(registry):
    app = create_app(registry, ttl_seconds=0.0)
    client = TestClient(app)
    q = client.post("/sessions", json={"dataset": "uniform",
                                       "config": {"seed": 9, "K": 6}}).json()
    sid = q["session_id"]
    import time
    time.sleep(0.01)
    body = client.get(f"/sessions/{sid}/question").json()
    assert body["type"] == "result"
    assert body["kind"] == "regret_set"
    assert body["diagnostics"]["expired"] is True
    assert len(body["tuples"]) == 6
