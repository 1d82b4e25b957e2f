"""Websocket and stdio transports around the session server.

Both speak the same JSON messages: websocket frames for browser clients,
newline-delimited JSON on stdio for editor embedding. The server may emit
from worker threads, so each transport funnels outbound messages through a
thread-safe queue.
"""

from __future__ import annotations

import asyncio
import json
import sys
import threading

from .server import SessionServer


async def serve_websocket(host: str = "127.0.0.1", port: int = 8787, ready=None,
                          announce: bool = False):
    """Run the websocket endpoint until cancelled.

    ``port`` 0 binds an ephemeral port; ``announce`` prints the bound address
    so callers (and tests) can discover it.
    """
    import websockets

    loop = asyncio.get_running_loop()
    queues: dict[str, asyncio.Queue] = {}
    counter = [0]

    def send(client: str, message: dict) -> None:
        queue = queues.get(client)
        if queue is not None:
            loop.call_soon_threadsafe(queue.put_nowait, json.dumps(message))

    server = SessionServer(send)

    async def handler(socket):
        counter[0] += 1
        client = f"ws-{counter[0]}"
        queue: asyncio.Queue = asyncio.Queue()
        queues[client] = queue

        async def pump() -> None:
            while True:
                payload = await queue.get()
                await socket.send(payload)

        pump_task = asyncio.create_task(pump())
        try:
            async for raw in socket:
                await loop.run_in_executor(None, server.handle_raw, client, raw)
        finally:
            pump_task.cancel()
            queues.pop(client, None)
            server.remove_client(client)

    async with websockets.serve(handler, host, port) as ws_server:
        bound = ws_server.sockets[0].getsockname()[1] if ws_server.sockets else port
        if ready is not None:
            ready.set_result(bound)
        if announce:
            print(f"listening on ws://{host}:{bound}", flush=True)
        await asyncio.Future()


def serve_stdio() -> int:
    """Newline-delimited JSON over stdin/stdout; returns on EOF."""
    write_lock = threading.Lock()

    def send(client: str, message: dict) -> None:
        with write_lock:
            sys.stdout.write(json.dumps(message) + "\n")
            sys.stdout.flush()

    server = SessionServer(send)
    try:
        for line in sys.stdin:
            line = line.strip()
            if line:
                server.handle_raw("stdio", line)
    finally:
        server.close()
    return 0
