"""Golden protocol conversation: requests, responses, and notifications.

The golden file freezes one full session (open, subscribe, drag, reveal,
export, errors) as exchanged JSON messages so protocol regressions show up as
diffs. Volatile payloads (render models, diagnostics) are summarized by
shape,: full byte-for-byte output stability is covered by the SVG goldens.

Regenerate with:  UPDATE_GOLDENS=1 pytest tests/test_protocol_golden.py
"""

import json
import os
from pathlib import Path

from test_server import SRC, Harness

from diascript.render_model import validate_render_model

GOLDEN = Path(__file__).parent / "golden" / "protocol" / "session.json"


def _summarize(message):
    """Replace bulky deterministic payloads with shape markers."""
    out = json.loads(json.dumps(message))
    params = out.get("params")
    if isinstance(params, dict) and "renderModel" in params:
        model = params["renderModel"]
        assert validate_render_model(model) == []
        params["renderModel"] = {
            "schemaVersion": model["schemaVersion"],
            "rootKind": model["root"]["kind"],
            "elementCount": _count(model["root"]),
        }
    if isinstance(params, dict) and "deltas" in params:
        params["deltas"] = [
            {k: d[k] for k in ("id", "ddx", "ddy", "x", "y")} for d in params["deltas"]
        ]
    result = out.get("result")
    if isinstance(result, dict) and "content" in result:
        result["content"] = f"<svg {len(result['content'])} bytes>"
    return out


def _count(node):
    return 1 + sum(_count(c) for c in node.get("children", ()))


def test_protocol_session_matches_golden():
    h = Harness()
    try:
        uri = "session.ds"
        h.result("document/open", uri=uri, text=SRC)
        h.wait_idle(uri)  # subscribe after the first render: replay is ordered
        h.result("document/subscribe", uri=uri)
        h.result("interaction/start", uri=uri, elementId="canvas0/canvasElement0",
                 kind="moveElement")
        h.result("interaction/update", uri=uri, params={"dx": 30.0, "dy": 0.0})
        h.wait_idle(uri)
        h.result("interaction/end", uri=uri)
        h.wait_idle(uri)
        h.result("source/reveal", uri=uri, elementId="canvas0/canvasElement0")
        h.result("diagram/export", uri=uri, format="svg")
        h.error("diagram/export", uri=uri, format="pdf")
        h.error("source/reveal", uri=uri, elementId="missing")
        h.server.handle("c1", {"id": 99, "method": "bogus", "params": {}})
        transcript = [
            {"client": client, "message": _summarize(message)}
            for client, message in h.snapshot()
        ]
    finally:
        h.close()

    if os.environ.get("UPDATE_GOLDENS"):
        GOLDEN.parent.mkdir(parents=True, exist_ok=True)
        GOLDEN.write_text(json.dumps(transcript, indent=1) + "\n", encoding="utf-8")
    assert GOLDEN.exists(), "golden missing; run with UPDATE_GOLDENS=1"
    assert transcript == json.loads(GOLDEN.read_text(encoding="utf-8"))
