"""HTTP review service: rounds, sampled documents, label submission, reports.

Single process, stdlib server. All state access happens under one lock so a
request sees a consistent snapshot; label writes serialize per project. Long
operations (winnow, topics) run as background jobs polled at /jobs/{id}.
Responses are JSON except reports (the canonical TSV bytes, identical to the
CLI's report files) and document bodies (plain text).
"""

from __future__ import annotations

import json
import re
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import __version__
from .divergence import Metric
from .project import Project, ProjectError
from .winnow import Label, RoundClosedError, RoundStateError

VERSION_HEADER = "X-Winnower-Version"

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, kind: str) -> str:
        with self._lock:
            self._counter += 1
            job_id = f"job-{self._counter}"
            self._jobs[job_id] = {"job_id": job_id, "kind": kind, "status": "running"}
            return job_id

    def finish(self, job_id: str, result: dict) -> None:
        with self._lock:
            self._jobs[job_id].update(status="done", result=result)

    def fail(self, job_id: str, message: str) -> None:
        with self._lock:
            self._jobs[job_id].update(status="failed", error=message)

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job else None


class AppState:
    """Project plus the locks and job registry the handler threads share."""

    def __init__(self, project: Project, static_dir: str | Path | None = None):
        self.project = project
        self.lock = threading.RLock()
        self.jobs = JobRegistry()
        self.static_dir = Path(static_dir) if static_dir else None

    def run_job(self, kind: str, fn) -> str:
        job_id = self.jobs.create(kind)

        def target():
            try:
                with self.lock:
                    result = fn()
                self.jobs.finish(job_id, result)
            except Exception as exc:  # noqa: BLE001 - job boundary
                self.jobs.fail(job_id, str(exc))

        threading.Thread(target=target, daemon=True).start()
        return job_id


def _require_round(project: Project, round_id: int) -> None:
    if not project.rounds.exists(round_id):
        raise ApiError(404, "round_not_found", f"no round {round_id}")


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


# ---------------------------------------------------------------------------
# Route handlers. Each returns (status, content_type, body_bytes).
# ---------------------------------------------------------------------------


def _json_response(payload: dict, status: int = 200) -> tuple[int, str, bytes]:
    body = json.dumps(payload, sort_keys=True).encode("utf-8")
    return status, "application/json; charset=utf-8", body


def get_rounds(state: AppState) -> tuple[int, str, bytes]:
    project = state.project
    rounds = [project.round_summary(rid) for rid in project.rounds.round_ids()]
    return _json_response({"rounds": rounds})


def get_round(state: AppState, round_id: int) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    summary = project.round_summary(round_id)
    summary["tranches"] = [
        {
            "tranche_id": t.tranche_id,
            "low": t.low,
            "high": t.high,
            "sample_size": t.sample_size,
            "rng_seed": t.rng_seed,
        }
        for t in project.rounds.read_tranches(round_id)
    ]
    has_model = (project.reports_dir(round_id) / "topic_model.json").exists()
    summary["reports"] = ["histogram", "year-series", "ngrams"] + (["topics"] if has_model else [])
    return _json_response(summary)


def get_queue(state: AppState, round_id: int) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    store = project.rounds
    tranches = store.read_tranches(round_id)
    if not tranches:
        raise ApiError(404, "not_sampled", f"round {round_id} has no sampled tranches yet")
    scores = {s.doc_id: s.value for s in store.read_scores(round_id, seed_ref="pooled")}
    effective = store.effective_labels(round_id)
    corpus = project.corpus()
    items = []
    for t in tranches:
        for doc_id in t.sampled_doc_ids:
            doc = corpus.document(doc_id)
            label = effective.get(doc_id)
            items.append(
                {
                    "doc_id": doc_id,
                    "title": doc.title,
                    "year": doc.year,
                    "value": scores.get(doc_id),
                    "band": [t.low, t.high],
                    "label": ("relevant" if label.relevant else "irrelevant") if label else "unlabeled",
                }
            )
    items.sort(key=lambda it: (it["value"], it["doc_id"]))
    return _json_response({"round_id": round_id, "items": items})


def get_document(state: AppState, doc_id: str) -> tuple[int, str, bytes]:
    project = state.project
    try:
        text = project.document_text(doc_id)
    except KeyError:
        raise ApiError(404, "document_not_found", f"no document {doc_id}") from None
    return 200, "text/plain; charset=utf-8", text.encode("utf-8")


def post_labels(state: AppState, round_id: int, body: dict, annotator_header: str) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    doc_id = body.get("doc_id")
    relevant = body.get("relevant")
    if not isinstance(doc_id, str) or not isinstance(relevant, bool):
        raise ApiError(400, "bad_request", "body must carry doc_id (string) and relevant (boolean)")
    annotator = body.get("annotator") or annotator_header or "anonymous"
    timestamp = body.get("timestamp") or _utc_now_iso()
    label = Label(doc_id=doc_id, relevant=relevant, annotator=annotator, timestamp=timestamp, round_id=round_id)
    try:
        report = project.rounds.ingest_labels(round_id, [label])
    except RoundClosedError as exc:
        raise ApiError(409, "round_closed", str(exc)) from exc
    if report.rejected:
        _, reason = report.rejected[0]
        raise ApiError(409, "doc_not_in_round", f"{doc_id}: {reason}")
    effective = project.rounds.effective_labels(round_id)[doc_id]
    return _json_response(
        {
            "status": "ok",
            "effective": {
                "doc_id": effective.doc_id,
                "relevant": effective.relevant,
                "annotator": effective.annotator,
                "timestamp": effective.timestamp,
            },
            "overwritten": len(report.conflicts),
        }
    )


def post_reseed(state: AppState, round_id: int, body: dict) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    metric = Metric.from_string(body["metric"]) if body.get("metric") else None
    try:
        new_rid = project.reseed(round_id, metric=metric, rng_seed=int(body.get("rng_seed", 0)))
    except ValueError as exc:
        raise ApiError(409, "no_relevant_labels", str(exc)) from exc
    return _json_response({"status": "ok", "round_id": new_rid}, status=201)


def post_winnow(state: AppState, round_id: int, body: dict) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    try:
        metric = Metric.from_string(str(body["metric"]))
        percentile = str(body["percentile"])
    except (KeyError, ValueError) as exc:
        raise ApiError(400, "bad_request", f"body must carry metric and percentile: {exc}") from exc
    rng_seed = int(body.get("rng_seed", 0))

    def job():
        rid = project.advance_round(round_id, metric, percentile, rng_seed=rng_seed)
        return {"round_id": rid, "survivors": len(project.rounds.read_survivors(rid))}

    job_id = state.run_job("winnow", job)
    return _json_response({"status": "accepted", "job_id": job_id}, status=202)


def post_topics(state: AppState, round_id: int, body: dict) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    scope = body.get("scope", "survivors")
    k = body.get("k")
    iterations = body.get("iterations")
    rng_seed = int(body.get("rng_seed", 0))

    def job():
        model = project.train_topics(round_id, scope=scope, k=k, iterations=iterations, rng_seed=rng_seed)
        return {"round_id": round_id, "k": model.K, "total_tokens": model.total_tokens}

    job_id = state.run_job("topics", job)
    return _json_response({"status": "accepted", "job_id": job_id}, status=202)


def post_topic_names(state: AppState, round_id: int, body: dict) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    raw = body.get("names")
    if not isinstance(raw, dict) or not raw:
        raise ApiError(400, "bad_request", "body must carry names: {topic_id: name}")
    try:
        names = {int(k): str(v) for k, v in raw.items()}
    except (TypeError, ValueError) as exc:
        raise ApiError(400, "bad_request", f"topic ids must be integers: {exc}") from exc
    try:
        merged = project.set_topic_names(round_id, names)
    except ProjectError as exc:
        raise ApiError(409, "bad_topic_ids", str(exc)) from exc
    return _json_response({"status": "ok", "names": {str(k): v for k, v in merged.items()}})


def get_report(state: AppState, round_id: int, kind: str, query: dict) -> tuple[int, str, bytes]:
    project = state.project
    _require_round(project, round_id)
    kwargs: dict = {}
    if kind == "histogram":
        if "bins" in query:
            kwargs["bins"] = int(query["bins"])
        kwargs["per_seed"] = query.get("per_seed") in ("1", "true", "yes")
    elif kind == "year-series":
        if "percentile" in query:
            kwargs["percentile"] = query["percentile"]
    elif kind == "ngrams":
        if "top" in query:
            kwargs["n"] = int(query["top"])
        if "scope" in query:
            kwargs["scope"] = query["scope"]
    elif kind != "topics":
        raise ApiError(404, "unknown_report", f"no report kind {kind}")
    try:
        text = project.render_report(round_id, kind, **kwargs)
    except (ProjectError, RoundStateError, ValueError) as exc:
        raise ApiError(404, "report_unavailable", str(exc)) from exc
    return 200, "text/tab-separated-values; charset=utf-8", text.encode("utf-8")


def get_job(state: AppState, job_id: str) -> tuple[int, str, bytes]:
    job = state.jobs.get(job_id)
    if job is None:
        raise ApiError(404, "job_not_found", f"no job {job_id}")
    return _json_response(job)


def get_static(state: AppState, path: str) -> tuple[int, str, bytes]:
    if state.static_dir is None:
        raise ApiError(404, "not_found", "no UI assets configured; start serve with --static")
    rel = path.lstrip("/") or "index.html"
    target = (state.static_dir / rel).resolve()
    if not str(target).startswith(str(state.static_dir.resolve())) or not target.is_file():
        raise ApiError(404, "not_found", f"no asset {rel}")
    ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
    return 200, ctype, target.read_bytes()


# ---------------------------------------------------------------------------
# HTTP plumbing
# ---------------------------------------------------------------------------

_ROUTES_GET = [
    (re.compile(r"^/rounds$"), lambda st, m, q: get_rounds(st)),
    (re.compile(r"^/rounds/(\d+)$"), lambda st, m, q: get_round(st, int(m.group(1)))),
    (re.compile(r"^/rounds/(\d+)/queue$"), lambda st, m, q: get_queue(st, int(m.group(1)))),
    (
        re.compile(r"^/rounds/(\d+)/reports/(histogram|year-series|topics|ngrams)$"),
        lambda st, m, q: get_report(st, int(m.group(1)), m.group(2), q),
    ),
    (re.compile(r"^/documents/([^/]+)$"), lambda st, m, q: get_document(st, m.group(1))),
    (re.compile(r"^/jobs/([^/]+)$"), lambda st, m, q: get_job(st, m.group(1))),
]

_ROUTES_POST = [
    (re.compile(r"^/rounds/(\d+)/labels$"), lambda st, m, b, a: post_labels(st, int(m.group(1)), b, a)),
    (re.compile(r"^/rounds/(\d+)/reseed$"), lambda st, m, b, a: post_reseed(st, int(m.group(1)), b)),
    (re.compile(r"^/rounds/(\d+)/winnow$"), lambda st, m, b, a: post_winnow(st, int(m.group(1)), b)),
    (re.compile(r"^/rounds/(\d+)/topics$"), lambda st, m, b, a: post_topics(st, int(m.group(1)), b)),
    (re.compile(r"^/rounds/(\d+)/topics/names$"), lambda st, m, b, a: post_topic_names(st, int(m.group(1)), b)),
]


def make_handler(state: AppState):
    class Handler(BaseHTTPRequestHandler):
        server_version = f"winnower/{__version__}"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, status: int, content_type: str, body: bytes) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header(VERSION_HEADER, __version__)
            self.end_headers()
            self.wfile.write(body)

        def _send_error(self, err: ApiError) -> None:
            payload = json.dumps({"code": err.code, "message": str(err)}, sort_keys=True).encode("utf-8")
            self._send(err.status, "application/json; charset=utf-8", payload)

        def _query(self) -> tuple[str, dict]:
            path, _, raw_query = self.path.partition("?")
            query = {}
            if raw_query:
                for part in raw_query.split("&"):
                    key, _, value = part.partition("=")
                    query[key] = value
            return path, query

        def do_GET(self) -> None:
            path, query = self._query()
            try:
                for pattern, fn in _ROUTES_GET:
                    m = pattern.match(path)
                    if m:
                        with state.lock:
                            status, ctype, body = fn(state, m, query)
                        self._send(status, ctype, body)
                        return
                # anything else is a UI asset (or a 404)
                status, ctype, body = get_static(state, path)
                self._send(status, ctype, body)
            except ApiError as err:
                self._send_error(err)
            except BrokenPipeError:
                pass
            except Exception as exc:  # noqa: BLE001 - request boundary
                self._send_error(ApiError(500, "internal_error", str(exc)))

        def do_POST(self) -> None:
            path, _ = self._query()
            try:
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length) if length else b""
                if raw:
                    try:
                        body = json.loads(raw.decode("utf-8"))
                    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                        raise ApiError(400, "bad_request", f"malformed JSON body: {exc}") from exc
                    if not isinstance(body, dict):
                        raise ApiError(400, "bad_request", "body must be a JSON object")
                else:
                    body = {}
                annotator = self.headers.get("X-Annotator", "")
                for pattern, fn in _ROUTES_POST:
                    m = pattern.match(path)
                    if m:
                        if path.endswith(("/winnow", "/topics")):
                            # background jobs take the state lock themselves
                            status, ctype, resp = fn(state, m, body, annotator)
                        else:
                            with state.lock:
                                status, ctype, resp = fn(state, m, body, annotator)
                        self._send(status, ctype, resp)
                        return
                raise ApiError(404, "not_found", f"no POST route {path}")
            except ApiError as err:
                self._send_error(err)
            except BrokenPipeError:
                pass
            except Exception as exc:  # noqa: BLE001 - request boundary
                self._send_error(ApiError(500, "internal_error", str(exc)))

    return Handler


def make_server(project: Project, host: str = "127.0.0.1", port: int = 0, static_dir=None) -> ThreadingHTTPServer:
    state = AppState(project, static_dir=static_dir)
    server = ThreadingHTTPServer((host, port), make_handler(state))
    server.app_state = state  # handy for tests
    return server


def serve(project: Project, host: str, port: int, static_dir=None) -> None:
    with project.lock():
        server = make_server(project, host, port, static_dir=static_dir)
        addr = server.server_address
        print(f"winnower review API on http://{addr[0]}:{addr[1]}/ (version {__version__})")
        try:
            server.serve_forever()
        finally:
            server.server_close()
