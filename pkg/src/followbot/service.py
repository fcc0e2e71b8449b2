"""Remote-assist transport: newline-delimited JSON over TCP.

The service owns a background simulation loop (paced to wall clock) and
any number of client connections.  Clients handshake with a
control/hello message carrying a valid token, then receive state
broadcasts; a single client at a time may claim control and inject
operator commands.  All world access happens on the loop thread: handler
threads only enqueue into the simulation inbox and wait for the reply.
"""
from __future__ import annotations

import socket
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from .fsm import RemoteRelease
from .protocol import (Message, OperatorCommand, ProtocolError, decode, encode)
from .runner import Simulation

DISCONNECT_GRACE = 2.0
COMMAND_TIMEOUT = 2.0


class _Reply:
    """Single-slot mailbox bridging the sim loop and a handler thread."""

    def __init__(self):
        self._event = threading.Event()
        self._value = None

    def append(self, value):
        self._value = value
        self._event.set()

    def wait(self, timeout: float):
        if not self._event.wait(timeout):
            return None
        return self._value


@dataclass
class _Client:
    conn: socket.socket
    session: str
    send_lock: threading.Lock = field(default_factory=threading.Lock)
    out_seq: int = 0
    last_in_seq: int = 0
    alive: bool = True

    def send(self, kind: str, payload: dict) -> None:
        with self.send_lock:
            self.out_seq += 1
            msg = Message(kind=kind, seq=self.out_seq, session=self.session,
                          payload=payload)
            try:
                self.conn.sendall(encode(msg))
            except OSError:
                self.alive = False


class RemoteService:
    """serve(): bind, accept clients, and pump the simulation in real time."""

    def __init__(self, sim: Simulation, tokens: set[str],
                 host: str = "127.0.0.1", port: int = 0,
                 broadcast_hz: float = 10.0, realtime: bool = True):
        self.sim = sim
        self.tokens = set(tokens)
        self.broadcast_hz = broadcast_hz
        self.realtime = realtime
        self._listener = socket.create_server((host, port))
        self._clients: dict[str, _Client] = {}
        self._clients_lock = threading.Lock()
        self._control_session: Optional[str] = None
        self._session_counter = 0
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    @property
    def address(self) -> tuple[str, int]:
        return self._listener.getsockname()

    def start(self) -> "RemoteService":
        for fn in (self._accept_loop, self._sim_loop):
            t = threading.Thread(target=fn, daemon=True)
            t.start()
            self._threads.append(t)
        return self

    def stop(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        with self._clients_lock:
            for c in self._clients.values():
                try:
                    c.conn.close()
                except OSError:
                    pass
        for t in self._threads:
            t.join(timeout=2.0)

    # ---- simulation loop thread ----

    def _sim_loop(self) -> None:
        dt = self.sim.config.dt
        broadcast_every = max(1, round(1.0 / (self.broadcast_hz * dt)))
        start = time.monotonic()
        while not self._stop.is_set():
            self.sim.step_once()
            if self.sim.step_index % broadcast_every == 0:
                payload = self.sim.state_update_payload()
                with self._clients_lock:
                    clients = list(self._clients.values())
                for c in clients:
                    if c.alive:
                        c.send("state", payload)
            if self.realtime:
                target = start + self.sim.step_index * dt
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)

    # ---- connection handling ----

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            t = threading.Thread(target=self._handle_client, args=(conn,),
                                 daemon=True)
            t.start()
            self._threads.append(t)

    def _next_session(self) -> str:
        self._session_counter += 1
        return f"s{self._session_counter}"

    def _handle_client(self, conn: socket.socket) -> None:
        reader = conn.makefile("rb")
        client: Optional[_Client] = None
        try:
            line = reader.readline()
            if not line:
                return
            try:
                hello = decode(line)
            except ProtocolError as e:
                self._send_raw_error(conn, str(e), e.fieldname)
                return
            if (hello.kind != "control"
                    or hello.payload.get("action") != "hello"):
                self._send_raw_error(conn, "first message must be control/hello",
                                     "kind")
                return
            token = hello.payload.get("token", "")
            if token not in self.tokens:
                self._send_raw_error(conn, "invalid token", "token")
                return

            client = _Client(conn=conn, session=self._next_session())
            client.last_in_seq = hello.seq
            with self._clients_lock:
                self._clients[client.session] = client
            client.send("ack", {"applied": hello.seq, "ok": True,
                                "session": client.session})

            for line in reader:
                if self._stop.is_set():
                    break
                self._handle_message(client, line)
                if not client.alive:
                    break
        finally:
            if client is not None:
                self._drop_client(client)
            try:
                conn.close()
            except OSError:
                pass

    def _send_raw_error(self, conn: socket.socket, message: str,
                        fieldname: str = "") -> None:
        msg = Message(kind="error", seq=1, session="",
                      payload={"field": fieldname, "message": message})
        try:
            conn.sendall(encode(msg))
            conn.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass

    def _handle_message(self, client: _Client, line: bytes) -> None:
        try:
            msg = decode(line)
        except ProtocolError as e:
            client.send("error", {"field": e.fieldname, "message": str(e)})
            return
        if msg.seq != client.last_in_seq + 1:
            client.send("error", {
                "field": "seq",
                "message": (f"out-of-order seq {msg.seq}, "
                            f"expected {client.last_in_seq + 1}"),
            })
            return
        client.last_in_seq = msg.seq

        if msg.kind == "control":
            self._handle_control(client, msg)
        elif msg.kind == "command":
            self._handle_command(client, msg)
        else:
            client.send("error", {"field": "kind",
                                  "message": f"unexpected kind {msg.kind!r}"})

    def _handle_control(self, client: _Client, msg: Message) -> None:
        action = msg.payload.get("action")
        if action == "claim":
            if self._control_session in (None, client.session):
                self._control_session = client.session
                client.send("ack", {"applied": msg.seq, "control": True,
                                    "ok": True})
            else:
                client.send("error", {"field": "action",
                                      "message": "control held"})
        elif action == "release":
            held = self._control_session == client.session
            if held:
                self._release_control()
            client.send("ack", {"applied": msg.seq, "control": False,
                                "ok": True, "released": held})
        else:
            client.send("error", {"field": "action",
                                  "message": f"unknown control action {action!r}"})

    def _handle_command(self, client: _Client, msg: Message) -> None:
        if self._control_session != client.session:
            client.send("error", {"field": "session",
                                  "message": "control not held"})
            return
        try:
            cmd = OperatorCommand.from_payload(msg.payload)
        except ProtocolError as e:
            client.send("error", {"field": e.fieldname, "message": str(e)})
            return
        box = _Reply()
        self.sim.inbox.append(("operator", (cmd, box)))
        result = box.wait(COMMAND_TIMEOUT)
        if result is None:
            client.send("error", {"field": "", "message": "command timed out"})
        elif result.get("ok"):
            client.send("ack", {"applied": msg.seq,
                                "clamped": bool(result.get("clamped")),
                                "ok": True})
        else:
            client.send("error", {"field": "",
                                  "message": result.get("error", "rejected")})

    def _release_control(self) -> None:
        self._control_session = None
        self.sim.inbox.append(("event", RemoteRelease()))

    def _drop_client(self, client: _Client) -> None:
        with self._clients_lock:
            self._clients.pop(client.session, None)
        if self._control_session == client.session:
            # grace period, then treat the disconnect as a release
            def _later():
                if self._stop.wait(DISCONNECT_GRACE):
                    return
                if self._control_session == client.session:
                    self._release_control()
            t = threading.Thread(target=_later, daemon=True)
            t.start()
            self._threads.append(t)
