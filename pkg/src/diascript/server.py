"""Session server: documents, execution scheduling, and the live protocol.

Transport-agnostic: ``handle_raw``/``handle`` take one client message and emit
responses and notifications through the injected ``send`` callable. One lock
serializes protocol handling; executions run on a worker pool outside the
lock, so requests (reveal, export, ...) are answered while a render is in
flight. Per document at most one execution runs at a time and at most one
snapshot waits behind it, newest wins - the rate-limiting contract that keeps
bursts of interaction updates from queueing up.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .diagnostics import Diagnostic
from .editing import (
    EditPlan,
    InteractionParams,
    NotEditable,
    UnknownElement,
    build_plan,
    diff_layouts,
    edits_between,
    patched_diagram,
)
from .interpreter import DEFAULT_STEP_BUDGET
from .layout import layout_diagram
from .pipeline import PipelineResult, run_pipeline
from .source import EditConflict, Span, TextEdit, apply_edits, SourceDocument

PROTOCOL_VERSION = 1

# json-rpc style error codes plus application codes
PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603
UNKNOWN_DOCUMENT = 1001
VERSION_MISMATCH = 1002
NOT_EDITABLE = 1003
SESSION_STALE = 1004
NO_ACTIVE_INTERACTION = 1005
UNKNOWN_ELEMENT = 1006
UNSUPPORTED_FORMAT = 1007
NO_RENDER = 1008
EDIT_CONFLICT = 1009
STALE_DOCUMENT = 1010
INTERACTION_ACTIVE = 1011


class _RequestError(Exception):
    def __init__(self, code: int, message: str, data: dict | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data


@dataclass
class _Rendered:
    """State of the last completed execution of a document version."""

    version: int
    result: PipelineResult
    seq: int | None = None  # set when this render was broadcast


@dataclass
class _Interaction:
    plan: EditPlan
    prev_texts: list[str] | None = None
    current_params: InteractionParams | None = None
    params_by_version: dict[int, InteractionParams] = field(default_factory=dict)
    ending: bool = False


@dataclass
class _Session:
    doc: SourceDocument
    subscribers: dict[str, None] = field(default_factory=dict)
    seq: int = 0
    executed: _Rendered | None = None  # last completed execution
    last_good: _Rendered | None = None  # last execution that produced a render
    in_flight: tuple[int, str] | None = None  # (version, text)
    pending: tuple[int, str] | None = None
    interaction: _Interaction | None = None
    interaction_stale: bool = False


def _span_json(span: Span | None):
    return None if span is None else [span.start, span.end]


def _diagnostics_json(diagnostics) -> list[dict]:
    return [
        {"severity": d.severity, "span": _span_json(d.span), "message": d.message}
        for d in diagnostics
    ]


class SessionServer:
    """Owns document sessions and speaks the JSON message protocol.

    ``send(client_id, message)`` must not block; transports enqueue.
    ``execution_delay`` artificially slows executions (scheduler tests).
    """

    def __init__(
        self,
        send: Callable[[str, dict], None],
        workers: int = 4,
        step_budget: int = DEFAULT_STEP_BUDGET,
        execution_delay: float = 0.0,
    ):
        self._send = send
        self._lock = threading.RLock()
        self._executor = ThreadPoolExecutor(max_workers=workers)
        self._sessions: dict[str, _Session] = {}
        self._step_budget = step_budget
        self.execution_delay = execution_delay
        self._in_flight_count = 0
        self._closed = False
        self.stats = {"executions": 0, "max_in_flight": 0}

    # transport surface

    def handle_raw(self, client: str, raw: str | bytes) -> None:
        try:
            message = json.loads(raw)
        except (ValueError, TypeError):
            self._send(client, {"id": None, "error": {"code": PARSE_ERROR, "message": "malformed JSON"}})
            return
        self.handle(client, message)

    def handle(self, client: str, message) -> None:
        if not isinstance(message, dict):
            self._send(client, {"id": None, "error": {"code": INVALID_REQUEST, "message": "message must be an object"}})
            return
        msg_id = message.get("id")
        method = message.get("method")
        params = message.get("params")
        if not isinstance(params, dict):
            params = {}
        if not isinstance(method, str):
            self._respond_error(client, msg_id, INVALID_REQUEST, "missing method")
            return
        handler = self._handlers().get(method)
        if handler is None:
            self._respond_error(client, msg_id, METHOD_NOT_FOUND, f"unknown method '{method}'")
            return
        try:
            with self._lock:
                result = handler(client, params)
        except _RequestError as err:
            self._respond_error(client, msg_id, err.code, err.message, err.data)
            return
        except Exception as err:  # protocol totality: never crash on a message
            self._respond_error(client, msg_id, INTERNAL_ERROR, f"{type(err).__name__}: {err}")
            return
        if msg_id is not None:
            self._send(client, {"id": msg_id, "result": result})

    def remove_client(self, client: str) -> None:
        with self._lock:
            for session in self._sessions.values():
                session.subscribers.pop(client, None)

    def close(self) -> None:
        with self._lock:
            self._closed = True
        self._executor.shutdown(wait=True)

    # helpers

    def _handlers(self):
        return {
            "document/open": self._on_open,
            "document/change": self._on_change,
            "document/subscribe": self._on_subscribe,
            "interaction/start": self._on_interaction_start,
            "interaction/update": self._on_interaction_update,
            "interaction/end": self._on_interaction_end,
            "source/reveal": self._on_reveal,
            "diagram/export": self._on_export,
        }

    def _respond_error(self, client: str, msg_id, code: int, message: str, data: dict | None = None) -> None:
        if msg_id is None:
            return
        error: dict = {"code": code, "message": message}
        if data:
            error["data"] = data
        self._send(client, {"id": msg_id, "error": error})

    def _session(self, params: dict) -> _Session:
        uri = params.get("uri")
        session = self._sessions.get(uri) if isinstance(uri, str) else None
        if session is None:
            raise _RequestError(UNKNOWN_DOCUMENT, f"document {uri!r} is not open")
        return session

    def _broadcast(self, session: _Session, message: dict) -> None:
        for client in session.subscribers:
            self._send(client, message)

    # document lifecycle

    def _on_open(self, client: str, params: dict):
        uri = params.get("uri")
        text = params.get("text")
        if not isinstance(uri, str) or not isinstance(text, str):
            raise _RequestError(INVALID_PARAMS, "document/open needs uri and text")
        session = self._sessions.get(uri)
        if session is None:
            session = _Session(doc=SourceDocument(uri, text, 0))
            self._sessions[uri] = session
        else:
            session.doc = SourceDocument(uri, text, 0)
            session.interaction = None
            session.interaction_stale = False
        self._schedule(uri, session)
        return {"version": session.doc.version}

    def _on_change(self, client: str, params: dict):
        session = self._session(params)
        version = params.get("version")
        if version != session.doc.version + 1:
            raise _RequestError(
                VERSION_MISMATCH,
                f"expected version {session.doc.version + 1}, got {version!r}",
            )
        edits = _parse_edits(params.get("edits"))
        try:
            session.doc = apply_edits(session.doc, edits)
        except EditConflict as err:
            raise _RequestError(EDIT_CONFLICT, str(err))
        if session.interaction is not None:
            # the text changed outside the plan's control: abort the interaction
            session.interaction = None
            session.interaction_stale = True
        self._schedule(params["uri"], session)
        return {"version": session.doc.version}

    def _on_subscribe(self, client: str, params: dict):
        session = self._session(params)
        session.subscribers[client] = None
        if session.last_good is not None and session.last_good.result.render_model is not None:
            self._send(client, _update_message(params["uri"], session.last_good))
            self._send(
                client,
                _diagnostics_message(params["uri"], session.last_good.version,
                                     session.last_good.result.diagnostics),
            )
        return {"seq": session.seq, "version": session.doc.version}

    # interactions

    def _on_interaction_start(self, client: str, params: dict):
        session = self._session(params)
        uri = params["uri"]
        element_id = params.get("elementId")
        kind = params.get("kind")
        if not isinstance(element_id, str) or not isinstance(kind, str):
            raise _RequestError(INVALID_PARAMS, "interaction/start needs elementId and kind")
        if session.interaction is not None:
            raise _RequestError(INTERACTION_ACTIVE, "an interaction is already active")
        rendered = session.last_good
        if rendered is None or rendered.result.layouted is None:
            raise _RequestError(NO_RENDER, "no rendered diagram yet")
        if rendered.version != session.doc.version:
            raise _RequestError(
                STALE_DOCUMENT,
                "the document changed since the last completed render; try again",
            )
        anchor = params.get("anchor") if params.get("anchor") in ("start", "end") else "end"
        result = rendered.result
        try:
            plan = build_plan(
                result.execution, result.layouted, result.diagram, session.doc,
                element_id, kind, anchor,
            )
        except NotEditable as err:
            raise _RequestError(NOT_EDITABLE, err.message, {"span": _span_json(err.span)})
        except UnknownElement as err:
            raise _RequestError(UNKNOWN_ELEMENT, f"unknown element {err.args[0]!r}")
        session.interaction = _Interaction(plan=plan)
        session.interaction_stale = False
        return {"elementId": plan.element_id, "kind": plan.kind}

    def _on_interaction_update(self, client: str, params: dict):
        session = self._session(params)
        uri = params["uri"]
        interaction = session.interaction
        if interaction is None:
            if session.interaction_stale:
                raise _RequestError(SESSION_STALE, "the interaction was aborted by a text edit")
            raise _RequestError(NO_ACTIVE_INTERACTION, "no interaction is active")
        plan = interaction.plan
        values = InteractionParams.from_dict(plan.kind, params.get("params") or {})
        edits, new_texts = edits_between(plan, interaction.prev_texts, values)
        if edits:
            session.doc = apply_edits(session.doc, edits)
            interaction.prev_texts = new_texts
            self._broadcast(session, {
                "method": "document/edit",
                "params": {
                    "uri": uri,
                    "version": session.doc.version,
                    "edits": [
                        {"span": [e.span.start, e.span.end], "newText": e.new_text} for e in edits
                    ],
                },
            })
        interaction.current_params = values
        interaction.params_by_version[session.doc.version] = values

        deltas = self._prediction(session, plan, values)
        self._broadcast(session, {
            "method": "diagram/incremental",
            "params": {"uri": uri, "basedOnSeq": session.seq, "deltas": deltas},
        })
        if edits:
            self._schedule(uri, session)
        return {"version": session.doc.version}

    def _prediction(self, session: _Session, plan: EditPlan, values: InteractionParams) -> list[dict]:
        rendered = session.last_good
        if rendered is None or rendered.result.diagram is None:
            return []
        result = rendered.result
        patched = patched_diagram(plan, result.diagram, values)
        predicted = layout_diagram(patched)
        return diff_layouts(result.layouted, predicted)

    def _on_interaction_end(self, client: str, params: dict):
        session = self._session(params)
        uri = params["uri"]
        interaction = session.interaction
        if interaction is None:
            session.interaction_stale = False
            return {}
        if interaction.current_params is not None:
            edits, new_texts = edits_between(
                interaction.plan, interaction.prev_texts, interaction.current_params
            )
            if edits:
                session.doc = apply_edits(session.doc, edits)
                interaction.prev_texts = new_texts
                interaction.params_by_version[session.doc.version] = interaction.current_params
                self._broadcast(session, {
                    "method": "document/edit",
                    "params": {
                        "uri": uri,
                        "version": session.doc.version,
                        "edits": [
                            {"span": [e.span.start, e.span.end], "newText": e.new_text}
                            for e in edits
                        ],
                    },
                })
                self._schedule(uri, session)
        rendered = session.last_good
        up_to_date = (
            rendered is not None
            and rendered.version == session.doc.version
            and session.in_flight is None
            and session.pending is None
        )
        if up_to_date:
            session.interaction = None
        else:
            interaction.ending = True
            if session.in_flight is None and session.pending is None:
                self._schedule(uri, session)
        return {}

    # queries

    def _on_reveal(self, client: str, params: dict):
        session = self._session(params)
        element_id = params.get("elementId")
        rendered = session.last_good
        if rendered is None or rendered.result.execution is None:
            raise _RequestError(NO_RENDER, "no rendered diagram yet")
        origins = rendered.result.execution.element_origins
        span = origins.get(element_id)
        if span is None:
            raise _RequestError(UNKNOWN_ELEMENT, f"unknown element {element_id!r}")
        return {"span": [span.start, span.end]}

    def _on_export(self, client: str, params: dict):
        session = self._session(params)
        fmt = params.get("format", "svg")
        if fmt != "svg":
            raise _RequestError(UNSUPPORTED_FORMAT, f"format {fmt!r} is not supported")
        rendered = session.last_good
        if rendered is None or rendered.result.svg is None:
            raise _RequestError(NO_RENDER, "no rendered diagram yet")
        return {"format": "svg", "content": rendered.result.svg}

    # execution scheduling (latest-wins coalescing, one in flight per document)

    def _schedule(self, uri: str, session: _Session) -> None:
        snapshot = (session.doc.version, session.doc.text)
        if session.in_flight is not None:
            session.pending = snapshot
            return
        self._start(uri, session, snapshot)

    def _start(self, uri: str, session: _Session, snapshot: tuple[int, str]) -> None:
        if self._closed:
            return
        session.in_flight = snapshot
        self._in_flight_count += 1
        self.stats["executions"] += 1
        self.stats["max_in_flight"] = max(self.stats["max_in_flight"], self._in_flight_count)
        self._executor.submit(self._execute, uri, snapshot)

    def _execute(self, uri: str, snapshot: tuple[int, str]) -> None:
        version, text = snapshot
        if self.execution_delay > 0:
            time.sleep(self.execution_delay)
        result = run_pipeline(text, uri, version=version, step_budget=self._step_budget)
        with self._lock:
            self._on_execution_done(uri, snapshot, result)

    def _on_execution_done(self, uri: str, snapshot: tuple[int, str], result: PipelineResult) -> None:
        session = self._sessions.get(uri)
        self._in_flight_count -= 1
        if session is None:
            return
        session.in_flight = None
        version = snapshot[0]
        rendered = _Rendered(version, result)
        session.executed = rendered
        if result.render_model is not None:
            session.seq += 1
            rendered.seq = session.seq
            session.last_good = rendered
            self._broadcast(session, _update_message(uri, rendered))
        self._broadcast(session, _diagnostics_message(uri, version, result.diagnostics))

        interaction = session.interaction
        if (
            interaction is not None
            and result.render_model is not None
            and version in interaction.params_by_version
        ):
            rendered_params = interaction.params_by_version[version]
            if interaction.current_params is not None and interaction.current_params != rendered_params:
                deltas = self._prediction(session, interaction.plan, interaction.current_params)
                self._broadcast(session, {
                    "method": "diagram/incremental",
                    "params": {"uri": uri, "basedOnSeq": session.seq, "deltas": deltas},
                })
        if (
            interaction is not None
            and interaction.ending
            and version == session.doc.version
        ):
            session.interaction = None

        if session.pending is not None:
            next_snapshot = session.pending
            session.pending = None
            self._start(uri, session, next_snapshot)


def _update_message(uri: str, rendered: _Rendered) -> dict:
    return {
        "method": "diagram/update",
        "params": {
            "uri": uri,
            "seq": rendered.seq,
            "version": rendered.version,
            "renderModel": rendered.result.render_model,
        },
    }


def _diagnostics_message(uri: str, version: int, diagnostics: list[Diagnostic]) -> dict:
    return {
        "method": "diagram/diagnostics",
        "params": {"uri": uri, "version": version, "items": _diagnostics_json(diagnostics)},
    }


def _parse_edits(raw) -> list[TextEdit]:
    if not isinstance(raw, list):
        raise _RequestError(INVALID_PARAMS, "edits must be a list")
    edits: list[TextEdit] = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise _RequestError(INVALID_PARAMS, "each edit must be an object")
        span = entry.get("span")
        new_text = entry.get("newText")
        if (
            not isinstance(span, list)
            or len(span) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in span)
            or not isinstance(new_text, str)
        ):
            raise _RequestError(INVALID_PARAMS, "each edit needs span [start, end] and newText")
        try:
            edits.append(TextEdit(Span(span[0], span[1]), new_text))
        except ValueError as err:
            raise _RequestError(INVALID_PARAMS, str(err))
    return edits
