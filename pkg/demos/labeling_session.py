"""Walkthrough: the interactive labeling session, driven by a script.

Starts the HTTP app in-process, opens a session on a small synthetic dataset,
answers every pairwise question from ground truth (standing in for a human),
and shows how the session survives a simulated server restart by replaying
its event log.

Run:  python3 demos/labeling_session.py
"""
import tempfile

from fastapi.testclient import TestClient

from superpac import SyntheticSpec, generate_uos
from superpac.server import create_app

CONFIG = {
    "dataset": {"synthetic": {"K": 3, "d": 2, "D": 20,
                              "points_per_cluster": 15, "sigma": 0.01}},
    "budget": 8,
    "seed": 1,
}

spec = dict(CONFIG["dataset"]["synthetic"])
spec["seed"] = CONFIG["seed"]
X, _ = generate_uos(SyntheticSpec(**spec))

sessions_dir = tempfile.mkdtemp(prefix="superpac-sessions-")
print(f"session event logs: {sessions_dir}\n")

with TestClient(create_app(sessions_dir=sessions_dir)) as client:
    sid = client.post("/sessions", json=CONFIG).json()["id"]
    print(f"opened session {sid}")
    for step in range(4):
        q = client.get(f"/sessions/{sid}/next").json()
        must = bool(X.truth[q["i"]] == X.truth[q["j"]])
        client.post(f"/sessions/{sid}/answers",
                    json={"query_id": q["query_id"], "must_link": must})
        print(f"  {q['query_id']}: points {q['i']} and {q['j']} -> "
              f"{'same' if must else 'different'} cluster")

print("\n-- simulated crash: new server process, same sessions directory --\n")

with TestClient(create_app(sessions_dir=sessions_dir)) as client:
    q = client.get(f"/sessions/{sid}/next").json()
    print(f"resumed at {q['query_id']} (the event log was replayed)")
    while not q.get("done"):
        must = bool(X.truth[q["i"]] == X.truth[q["j"]])
        client.post(f"/sessions/{sid}/answers",
                    json={"query_id": q["query_id"], "must_link": must})
        q = client.get(f"/sessions/{sid}/next").json()
    state = client.get(f"/sessions/{sid}/state").json()
    print(f"session finished: {state['queries_used']} queries, "
          f"final error {state['error']:.3f}")
