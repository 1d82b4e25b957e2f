"""The stdio transport speaks the same ndjson protocol end to end."""

import json
import subprocess
import sys

SRC = 'classDiagram {\n    class("Menu") { layout { pos = apos(100, 200) } }\n}\n'


def test_stdio_round_trip():
    proc = subprocess.Popen(
        [sys.executable, "-m", "diascript.cli", "serve", "--stdio"],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        text=True,
    )

    def send(msg_id, method, **params):
        proc.stdin.write(json.dumps({"id": msg_id, "method": method, "params": params}) + "\n")
        proc.stdin.flush()

    def read_until(predicate, limit=200):
        for _ in range(limit):
            line = proc.stdout.readline()
            assert line, "server closed stdout early"
            message = json.loads(line)
            if predicate(message):
                return message
        raise AssertionError("expected message never arrived")

    try:
        send(1, "document/open", uri="s.ds", text=SRC)
        assert read_until(lambda m: m.get("id") == 1)["result"] == {"version": 0}
        send(2, "document/subscribe", uri="s.ds")
        read_until(lambda m: m.get("method") == "diagram/update")

        send(3, "source/reveal", uri="s.ds", elementId="canvas0/canvasElement0")
        span = read_until(lambda m: m.get("id") == 3)["result"]["span"]
        assert SRC[span[0] : span[1]].startswith('class("Menu")')

        send(4, "diagram/export", uri="s.ds", format="svg")
        assert read_until(lambda m: m.get("id") == 4)["result"]["content"].startswith("<?xml")

        send(5, "diagram/export", uri="s.ds", format="pdf")
        assert read_until(lambda m: m.get("id") == 5)["error"]["code"] == 1007

        proc.stdin.close()
        assert proc.wait(timeout=30) == 0
    finally:
        if proc.poll() is None:
            proc.kill()
