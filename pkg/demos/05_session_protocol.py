"""A complete protocol conversation against an in-process session server.

The same messages flow over websocket (`diascript serve --port N`) or stdio
(`diascript serve --stdio`); here the server is driven directly so the
transcript is easy to read.
"""

import json
import time

from diascript import SessionServer

SOURCE = """\
classDiagram {
    class("Menu") { layout { pos = apos(100, 200) } }
    class("Dish") { layout { pos = apos(320, 40) } }
    Menu --> Dish
}
"""

transcript = []
server = SessionServer(lambda client, message: transcript.append(message))


def say(msg_id, method, **params):
    server.handle("demo", {"id": msg_id, "method": method, "params": params})


def wait_idle():
    while True:
        with server._lock:
            session = server._sessions.get("demo.ds")
            if session and session.in_flight is None and session.pending is None:
                return
        time.sleep(0.01)


say(1, "document/open", uri="demo.ds", text=SOURCE)
wait_idle()
say(2, "document/subscribe", uri="demo.ds")
say(3, "interaction/start", uri="demo.ds",
    elementId="canvas0/canvasElement0", kind="moveElement")
say(4, "interaction/update", uri="demo.ds", params={"dx": 40.0, "dy": -15.0})
wait_idle()
say(5, "interaction/end", uri="demo.ds")
say(6, "source/reveal", uri="demo.ds", elementId="canvas0/canvasConnection0")
say(7, "diagram/export", uri="demo.ds", format="svg")
server.close()

for message in transcript:
    if "method" in message:
        params = dict(message["params"])
        if "renderModel" in params:
            params["renderModel"] = f"<model, {len(json.dumps(params['renderModel']))} bytes>"
        if "deltas" in params:
            params["deltas"] = f"<{len(params['deltas'])} element deltas>"
        print(f"notify  {message['method']:22s} {json.dumps(params)}")
    else:
        body = message.get("result", message.get("error"))
        rendered = json.dumps(body)
        if len(rendered) > 100:
            rendered = rendered[:97] + "..."
        print(f"reply#{message['id']:<2d} {'':22s} {rendered}")
