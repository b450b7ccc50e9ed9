"""Transport bindings that carry Envelope JSON to and from a LabService.

Three bindings share one broker model: every envelope that reaches the bus —
whether published by a client or by the service — is forwarded to every
connected client, sender included.  Clients therefore see the full session,
which is also exactly what the transcript fixtures record.

* TCP: newline-delimited JSON, one envelope per line (default port 7070).
* stdio: the same NDJSON framing on stdin/stdout, for scripting.
* WebSocket: one envelope per text message on ws://host:port/bus (default
  port 7071), so browsers need no translation layer.
"""

from __future__ import annotations

import socketserver
import sys
import threading
from typing import Callable, Optional, TextIO

from .schemas import ProtocolError, envelope_from_json, envelope_to_json
from .service import InProcessBus, LabService
from .sim import Clock, WallClock

DEFAULT_TCP_PORT = 7070
DEFAULT_WS_PORT = 7071
WS_PATH = "/bus"


class _Fanout:
    """Registry of client send callbacks, each guarded against failure."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sinks: dict[int, Callable[[str], None]] = {}
        self._next = 0

    def add(self, send: Callable[[str], None]) -> int:
        with self._lock:
            handle = self._next
            self._next += 1
            self._sinks[handle] = send
            return handle

    def remove(self, handle: int) -> None:
        with self._lock:
            self._sinks.pop(handle, None)

    def broadcast(self, line: str) -> None:
        with self._lock:
            sinks = list(self._sinks.values())
        for send in sinks:
            try:
                send(line)
            except Exception:
                pass  # client went away; its reader loop will clean up


def _bus_with_service(clock: Clock) -> tuple[InProcessBus, LabService, _Fanout]:
    bus = InProcessBus()
    fanout = _Fanout()
    # clients subscribe before the service so a command reaches them
    # before the results it triggers
    bus.subscribe(lambda env: fanout.broadcast(envelope_to_json(env)))
    service = LabService(bus, clock=clock, threaded_execution=True)
    return bus, service, fanout


class TcpBridgeServer(socketserver.ThreadingTCPServer):
    """NDJSON broker plus service on one TCP port."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_TCP_PORT,
                 clock: Optional[Clock] = None):
        self.bus, self.service, self.fanout = _bus_with_service(clock or WallClock())
        super().__init__((host, port), _TcpClientHandler)


class _TcpClientHandler(socketserver.StreamRequestHandler):
    def handle(self):
        server: TcpBridgeServer = self.server
        write_lock = threading.Lock()

        def send(line: str) -> None:
            with write_lock:
                self.wfile.write(line.encode() + b"\n")
                self.wfile.flush()

        handle = server.fanout.add(send)
        try:
            for raw in self.rfile:
                line = raw.decode().strip()
                if not line:
                    continue
                try:
                    env = envelope_from_json(line)
                except ProtocolError as e:
                    server.service.error(str(e))
                    continue
                server.bus.publish(env)
        except (ConnectionError, OSError):
            pass  # abrupt disconnect: same as a clean close
        finally:
            server.fanout.remove(handle)


def serve_tcp(host: str = "127.0.0.1", port: int = DEFAULT_TCP_PORT,
              clock: Optional[Clock] = None) -> TcpBridgeServer:
    """Bind and return the server; call serve_forever() to run it."""
    return TcpBridgeServer(host, port, clock)


def serve_stdio(stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
                clock: Optional[Clock] = None) -> None:
    """Run the service over stdin/stdout NDJSON until EOF."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    bus = InProcessBus()

    def emit(env):
        stdout.write(envelope_to_json(env) + "\n")
        stdout.flush()

    bus.subscribe(emit)
    service = LabService(bus, clock=clock or WallClock())
    try:
        for raw in stdin:
            line = raw.strip()
            if not line:
                continue
            try:
                env = envelope_from_json(line)
            except ProtocolError as e:
                service.error(str(e))
                continue
            bus.publish(env)
    finally:
        service.close()


def serve_websocket(host: str = "127.0.0.1", port: int = DEFAULT_WS_PORT,
                    clock: Optional[Clock] = None):
    """WebSocket binding of the same envelope stream, for the browser IDE.

    Returns the websockets server object; call serve_forever() to run it.
    """
    from websockets.sync.server import serve

    bus, service, fanout = _bus_with_service(clock or WallClock())

    def handler(connection):
        if connection.request.path != WS_PATH:
            connection.close(code=1008, reason=f"connect to {WS_PATH}")
            return
        handle = fanout.add(connection.send)
        try:
            for message in connection:
                try:
                    env = envelope_from_json(message)
                except ProtocolError as e:
                    service.error(str(e))
                    continue
                bus.publish(env)
        finally:
            fanout.remove(handle)

    server = serve(handler, host, port)
    server.bus = bus
    server.service = service
    return server
