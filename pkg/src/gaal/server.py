"""HTTP bridge for live human labeling sessions.

Endpoints:
    POST /sessions                  create a session (JSON config overrides)
    GET  /sessions/{id}/pending     unanswered queries as base64 PNGs
    POST /sessions/{id}/labels      apply verdicts {-1, +1, "skip"}
    GET  /sessions/{id}/state       phase + counters + curve so far
    GET  /sessions/{id}/curve.csv   the learning curve as CSV

Each session appends every state change (created / gan / init / queries /
verdict / retrained / done) to a JSONL event log; replaying the log
reconstructs an equivalent session after a restart, so a long human
labeling run survives a crash. Counters advance only when a whole batch
resolves: clients never observe a half-applied batch.
"""

from __future__ import annotations

import base64
import dataclasses
import io
import json
import os
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
from PIL import Image

from gaal import experiment as exp
from gaal import rng
from gaal import strategies as strat
from gaal.config_io import CONFIG_VERSION, format_config, parse_config
from gaal.datasets import denormalize
from gaal.errors import ConfigError, GaalError
from gaal.gan import train_gan
from gaal.networks import GeneratorNet, load_network, save_network
from gaal.oracles import SKIP, OracleResponse, PendingQueue
from gaal.svm import accuracy, empty_labeled_set, svm_train
from gaal.synthesis import synthesize_queries

PHASES = ("training-gan", "awaiting-labels", "retraining", "done", "failed")


class HttpError(GaalError):
    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.body = {"error": message, **extra}


class Session:
    """One live active-learning loop suspended at the oracle boundary."""

    def __init__(self, sid: str, config: exp.ExperimentConfig, state_dir: str):
        if config.oracle != "human":
            raise ConfigError("sessions require oracle=human")
        if config.strategy == "supervised":
            raise ConfigError("strategy supervised has no labeling loop")
        config.validate()
        self.sid = sid
        self.config = config
        self.state_dir = state_dir
        self.lock = threading.RLock()
        self.phase = "training-gan"
        self.error: str | None = None

        self.pool_data, self.test_data, _ = exp.build_datasets(config.dataset)
        self.pool = strat.Pool(self.pool_data.instances, self.pool_data.labels)
        self.training = empty_labeled_set(self.pool_data.feature_dim)
        self.clf = None
        self.generator: GeneratorNet | None = None
        self.curve: list = []
        self.labeled = 0
        self.skipped = 0
        self.iteration = 0
        self.queue = PendingQueue()
        self.queries: dict[str, dict] = {}  # id -> {"x": array, "iteration": int}
        self.batch_ids: list[str] = []
        self.next_query = 0

        seed = config.seeds[0]
        seed_gan, seed_init, seed_iters = rng.split(seed, 3)
        self._seed_gan = int(rng.stream(seed_gan).integers(2**63 - 1))
        self._seed_init = seed_init
        self._iter_rng = rng.stream(seed_iters)

    # -- event log ----------------------------------------------------------

    @property
    def log_path(self) -> str:
        return os.path.join(self.state_dir, f"{self.sid}.log")

    def _log(self, event: str, **payload) -> None:
        record = {"event": event, **payload}
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        os.makedirs(self.state_dir, exist_ok=True)
        self._log("created", config=format_config(self.config))
        thread = threading.Thread(target=self._bootstrap, daemon=True)
        thread.start()

    def _bootstrap(self) -> None:
        try:
            checkpoint = self.config.gan.checkpoint
            if checkpoint:
                generator = load_network(checkpoint, GeneratorNet)
            else:
                gan_cfg = dataclasses.replace(self.config.gan, seed=self._seed_gan)
                generator, _, _ = train_gan(self.pool_data.instances, gan_cfg)
                checkpoint = os.path.join(self.state_dir, f"{self.sid}.generator.net")
                save_network(generator, checkpoint)
            with self.lock:
                self.generator = generator
                self._log("gan", checkpoint=checkpoint)
                self._initialize()
                self._issue_or_finish()
        except Exception as err:  # surfaced through get_state
            with self.lock:
                self.phase = "failed"
                self.error = str(err)

    def _initialize(self) -> None:
        # The initial labeled batch comes from the pool, whose labels are
        # known; the human only ever labels queried instances.
        batch = strat.select_random(self.pool, self.config.init_size, self._seed_init)
        indices = [item.index for item in batch.items]
        labels = [int(self.pool_data.labels[i]) for i in indices]
        self._log("init", indices=indices)
        self.training = self.training.add(
            self.pool_data.instances[indices], np.array(labels, dtype=float)
        )
        self.labeled = len(indices)
        self._retrain()

    def _retrain(self) -> None:
        self.clf = svm_train(self.training, self.config.svm)
        acc = accuracy(self.clf, self.test_data.instances, self.test_data.labels)
        self.curve.append((len(self.training), acc))
        self._log("retrained", labeled=len(self.training), accuracy=acc)

    def budget_remaining(self) -> int:
        return self.config.budget - self.labeled - self.skipped

    def _issue_or_finish(self) -> None:
        remaining = self.budget_remaining()
        if remaining <= 0:
            self.phase = "done"
            self._log("done")
            return
        k = min(self.config.batch_size, remaining)
        kind = (
            strat.mixed_schedule(self.iteration)
            if self.config.strategy == "mixed"
            else strat.StrategyKind(self.config.strategy)
        )
        sub_seed = int(self._iter_rng.integers(2**63 - 1))
        if kind == strat.StrategyKind.GAAL:
            synth_cfg = dataclasses.replace(self.config.synth, seed=sub_seed)
            batch = synthesize_queries(self.clf, self.generator, k, synth_cfg)
        elif kind == strat.StrategyKind.SIMPLE_GAN:
            batch = strat.select_simple_gan(self.generator, k, sub_seed)
        elif kind == strat.StrategyKind.SVM_ACTIVE:
            batch = strat.select_svm_active(self.clf, self.pool, k)
        else:
            batch = strat.select_random(self.pool, k, sub_seed)
        if not batch.items:
            self.phase = "done"
            self._log("done")
            return
        ids, xs, indices = [], [], []
        for item in batch.items:
            qid = f"q{self.next_query}"
            self.next_query += 1
            ids.append(qid)
            xs.append([float(v) for v in item.x])
            indices.append(getattr(item, "index", -1))
            self.queries[qid] = {"x": np.asarray(item.x, dtype=np.float64),
                                 "iteration": self.iteration}
            self.queue.issue(qid, self.queries[qid])
        self.batch_ids = ids
        self._log("queries", iteration=self.iteration, ids=ids, xs=xs, indices=indices)
        self.iteration += 1
        self.phase = "awaiting-labels"

    def apply_labels(self, responses: list[OracleResponse]) -> tuple[list, list]:
        with self.lock:
            if self.phase != "awaiting-labels":
                raise HttpError(409, f"session is {self.phase}, not awaiting-labels")
            applied, rejected = self.queue.apply(responses)
            for resp in applied:
                self._log("verdict", id=resp.query_id, verdict=resp.verdict)
            if len(self.queue) == 0 and applied:
                self.phase = "retraining"
                threading.Thread(target=self._advance, daemon=True).start()
            return [r.query_id for r in applied], rejected

    def _advance(self) -> None:
        try:
            with self.lock:
                self._fold_batch()
                self._issue_or_finish()
        except Exception as err:
            with self.lock:
                self.phase = "failed"
                self.error = str(err)

    def _fold_batch(self) -> None:
        xs, ys = [], []
        batch_skips = 0
        for qid in self.batch_ids:
            verdict = self.queue.resolved[qid]
            if verdict == SKIP:
                batch_skips += 1
            else:
                xs.append(self.queries[qid]["x"])
                ys.append(verdict)
        self.skipped += batch_skips
        self.labeled += len(xs)
        self.batch_ids = []
        if xs:
            self.training = self.training.add(np.array(xs), np.array(ys, dtype=float))
            self._retrain()

    # -- read-side snapshots --------------------------------------------------

    def pending_payload(self) -> dict:
        with self.lock:
            items = []
            for qid, query in self.queue.pending_items():
                items.append(
                    {
                        "query_id": qid,
                        "iteration": query["iteration"],
                        "image": _encode_png(query["x"], self.config.image_shape),
                    }
                )
            return {"phase": self.phase, "items": items}

    def state_payload(self) -> dict:
        with self.lock:
            payload = {
                "phase": self.phase,
                "labeled_count": self.labeled,
                "skipped_count": self.skipped,
                "budget": self.config.budget,
                "budget_remaining": self.budget_remaining(),
                "curve": [[count, acc] for count, acc in self.curve],
            }
            if self.error:
                payload["error"] = self.error
            return payload

    def curve_csv(self) -> str:
        with self.lock:
            lines = ["labeled_count,accuracy"]
            lines += [f"{count},{format(acc, '.17g')}" for count, acc in self.curve]
            return "\n".join(lines) + "\n"


def replay_session(sid: str, state_dir: str) -> Session:
    """Rebuild a session from its event log (same pending ids, same curve)."""
    path = os.path.join(state_dir, f"{sid}.log")
    if not os.path.exists(path):
        raise HttpError(404, f"unknown session {sid!r}")
    with open(path, "r", encoding="utf-8") as fh:
        events = [json.loads(line) for line in fh if line.strip()]
    if not events or events[0]["event"] != "created":
        raise HttpError(500, f"corrupt event log for session {sid!r}")

    config = parse_config(events[0]["config"])
    session = Session.__new__(Session)
    Session.__init__(session, sid, config, state_dir)
    done = False
    for event in events[1:]:
        kind = event["event"]
        if kind == "gan":
            session.generator = load_network(event["checkpoint"], GeneratorNet)
        elif kind == "init":
            indices = event["indices"]
            session.pool.mark_queried(indices)
            session.training = session.training.add(
                session.pool_data.instances[indices],
                session.pool_data.labels[np.asarray(indices, dtype=int)],
            )
            session.labeled = len(indices)
        elif kind == "queries":
            session.iteration = event["iteration"] + 1
            session.batch_ids = list(event["ids"])
            for qid, x, index in zip(event["ids"], event["xs"], event["indices"]):
                if index >= 0:
                    session.pool.mark_queried([index])
                session.queries[qid] = {
                    "x": np.asarray(x, dtype=np.float64),
                    "iteration": event["iteration"],
                }
                session.queue.issue(qid, session.queries[qid])
                session.next_query = max(session.next_query, int(qid[1:]) + 1)
        elif kind == "verdict":
            session.queue.apply([OracleResponse(event["id"], event["verdict"])])
        elif kind == "retrained":
            session.curve.append((event["labeled"], event["accuracy"]))
        elif kind == "done":
            done = True
    # fold any batch the crash interrupted after full resolution
    if session.batch_ids and len(session.queue) == 0:
        session._fold_batch()
        session._issue_or_finish()
    elif done:
        session.phase = "done"
    elif len(session.queue) > 0:
        # counters cover resolved-but-unfolded verdicts only at fold time
        session.clf = svm_train(session.training, session.config.svm)
        session.phase = "awaiting-labels"
    else:
        session.clf = svm_train(session.training, session.config.svm)
        session._issue_or_finish()
    if session.clf is None and len(session.training) > 0:
        session.clf = svm_train(session.training, session.config.svm)
    return session


def _encode_png(x: np.ndarray, image_shape) -> str:
    pixels = denormalize(x)
    if image_shape:
        h, w = image_shape
    else:
        h, w = 1, pixels.size
    img = Image.fromarray(pixels.reshape(h, w), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


# ---------------------------------------------------------------------------
# HTTP plumbing

_SESSION_RE = re.compile(r"^/sessions/([^/]+)/(pending|labels|state|curve\.csv)$")


class LabelingServer:
    def __init__(self, base_config: exp.ExperimentConfig, state_dir: str, port: int = 0):
        self.base_config = base_config
        self.state_dir = state_dir
        os.makedirs(state_dir, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        host = os.environ.get("GAAL_BIND", "127.0.0.1")
        handler = _make_handler(self)
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self.httpd.daemon_threads = True

    @property
    def address(self) -> tuple[str, int]:
        return self.httpd.server_address[:2]

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()

    # -- session registry ---------------------------------------------------

    def create_session(self, overrides: dict | None) -> Session:
        config = self._merged_config(overrides or {})
        try:
            session = Session(uuid.uuid4().hex[:12], config, self.state_dir)
        except ConfigError as err:
            raise HttpError(400, str(err), field=_guess_field(str(err)))
        session.start()
        with self.lock:
            self.sessions[session.sid] = session
        return session

    def _merged_config(self, overrides: dict) -> exp.ExperimentConfig:
        from gaal.config_io import _parse_lines

        pairs = _parse_lines(format_config(self.base_config))
        for key, value in overrides.items():
            pairs[str(key)] = str(value)
        pairs["config_version"] = CONFIG_VERSION
        text = "\n".join(f"{k}={v}" for k, v in pairs.items())
        try:
            return parse_config(text)
        except ConfigError as err:
            raise HttpError(400, str(err), field=_guess_field(str(err)))

    def get_session(self, sid: str) -> Session:
        with self.lock:
            if sid in self.sessions:
                return self.sessions[sid]
        session = replay_session(sid, self.state_dir)  # 404 if no log exists
        with self.lock:
            self.sessions.setdefault(sid, session)
            return self.sessions[sid]


_FIELD_WORDS = (
    "budget", "init_size", "batch_size", "strategy", "oracle", "seeds",
    "epochs", "learning_rate", "regularization", "restarts", "steps",
)


def _guess_field(message: str) -> str:
    for word in _FIELD_WORDS:
        if word in message:
            return word
    return ""


def _make_handler(server: LabelingServer):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # tests stay quiet
            pass

        def _send(self, status: int, body: dict | str, content_type="application/json"):
            raw = (
                json.dumps(body).encode("utf-8")
                if isinstance(body, dict)
                else body.encode("utf-8")
            )
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(raw)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(raw)

        def _read_json(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            try:
                return json.loads(self.rfile.read(length).decode("utf-8"))
            except json.JSONDecodeError as err:
                raise HttpError(400, f"invalid JSON body: {err}")

        def do_GET(self):
            try:
                match = _SESSION_RE.match(self.path)
                if not match:
                    raise HttpError(404, f"no route for {self.path}")
                session = server.get_session(match.group(1))
                tail = match.group(2)
                if tail == "pending":
                    self._send(200, session.pending_payload())
                elif tail == "state":
                    self._send(200, session.state_payload())
                elif tail == "curve.csv":
                    self._send(200, session.curve_csv(), content_type="text/csv")
                else:
                    raise HttpError(404, f"no route for {self.path}")
            except HttpError as err:
                self._send(err.status, err.body)

        def do_POST(self):
            try:
                if self.path == "/sessions":
                    body = self._read_json()
                    session = server.create_session(body.get("config"))
                    self._send(
                        201, {"session_id": session.sid, "phase": session.phase}
                    )
                    return
                match = _SESSION_RE.match(self.path)
                if not match or match.group(2) != "labels":
                    raise HttpError(404, f"no route for {self.path}")
                session = server.get_session(match.group(1))
                body = self._read_json()
                responses = []
                for entry in body.get("responses", []):
                    responses.append(
                        OracleResponse(str(entry.get("query_id")), entry.get("verdict"))
                    )
                applied, rejected = session.apply_labels(responses)
                self._send(200, {"applied": applied, "rejected": rejected,
                                 "rejected_ids": rejected})
            except HttpError as err:
                self._send(err.status, err.body)

    return Handler
