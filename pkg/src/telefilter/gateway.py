"""Websocket gateway: operator commands in, telemetry out.

One asyncio event loop runs both the network handlers and the fixed-rate
control loop, so session state is never touched concurrently.  The first
connection to send a command (delta_pose or reset) becomes the operator;
other connections may watch telemetry read-only and get "session busy" if
they try to drive.  The session ends when the operator disconnects or a
shutdown is requested; the trajectory log is flushed to the configured path
either way.

Real-time mode paces ticks against the event-loop clock with drift-free
deadlines.  With realtime=False the loop free-runs at roughly 1 kHz wall
time regardless of control_hz (accelerated integration testing); the logged
timestamps are the logical tick clock in both modes.
"""

from __future__ import annotations

import asyncio
import logging
from websockets.asyncio.server import broadcast, serve
from websockets.exceptions import ConnectionClosed

from . import protocol
from .config import GatewayConfig
from .session import TeleopSession
from .trajlog import TrajectoryLog

log = logging.getLogger(__name__)


class GatewayServer:
    def __init__(self, config: GatewayConfig, *, realtime: bool = True):
        self.config = config
        self.realtime = realtime
        self.session = TeleopSession(config)
        self.operator = None
        self.watchers: set = set()
        self.stop_requested = asyncio.Event()
        self.port: int | None = None  # actual bound port, set when serving

    # -- connection handling ------------------------------------------------

    async def handler(self, ws) -> None:
        if ws.request is not None and ws.request.path != protocol.PATH:
            await ws.close(code=1008, reason=f"unknown path, use {protocol.PATH}")
            return
        self.watchers.add(ws)
        try:
            async for frame in ws:
                await self._handle_frame(ws, frame)
        except ConnectionClosed:
            pass
        finally:
            self.watchers.discard(ws)
            if ws is self.operator:
                self.operator = None
                if self.config.reconnect_grace_s > 0:
                    # leave the slot open for a reconnecting operator
                    asyncio.create_task(self._grace_countdown())
                else:
                    self.stop_requested.set()

    async def _grace_countdown(self) -> None:
        await asyncio.sleep(self.config.reconnect_grace_s)
        if self.operator is None:
            self.stop_requested.set()

    async def _handle_frame(self, ws, frame) -> None:
        try:
            kind, payload = protocol.parse_client_frame(frame)
        except protocol.ProtocolError as exc:
            await ws.send(protocol.dumps(protocol.build_reject("malformed", detail=str(exc))))
            return
        if kind == "describe":
            await ws.send(protocol.dumps(protocol.build_description(self.config)))
            return
        # delta_pose / reset claim the single operator slot
        if self.operator is None:
            self.operator = ws
        if ws is not self.operator:
            await ws.send(protocol.dumps(protocol.build_error("session busy")))
            return
        if kind == "reset":
            self.session.request_reset()
            return
        result = self.session.ingest_command(payload)
        if result.status == "rejected":
            reason = "stale" if result.reason == "stale" else "malformed"
            await ws.send(
                protocol.dumps(protocol.build_reject(reason, seq=payload.seq, detail=result.reason))
            )

    # -- control loop ---------------------------------------------------------

    async def control_loop(self) -> None:
        period = self.config.filter.control_period
        decimation = self.config.telemetry_decimation
        loop = asyncio.get_running_loop()
        deadline = loop.time() + period
        tick = 0
        while not self.stop_requested.is_set():
            if self.realtime:
                delay = deadline - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                elif delay < -0.1:
                    # fell far behind (e.g. suspended process): resynchronize
                    deadline = loop.time()
                deadline += period
            else:
                await asyncio.sleep(0.001)
            message = self.session.control_tick()
            if tick % decimation == 0 and self.watchers:
                broadcast(self.watchers, protocol.dumps(message))
            tick += 1

    # -- lifecycle --------------------------------------------------------------

    async def run(self, *, ready: asyncio.Event | None = None) -> TrajectoryLog:
        try:
            async with serve(
                self.handler,
                self.config.host,
                self.config.port,
                subprotocols=[protocol.SUBPROTOCOL],
            ) as server:
                self.port = server.sockets[0].getsockname()[1] if server.sockets else None
                if ready is not None:
                    ready.set()
                log.info("teleop gateway listening on ws://%s:%s%s",
                         self.config.host, self.port, protocol.PATH)
                loop_task = asyncio.create_task(self.control_loop())
                try:
                    await self.stop_requested.wait()
                finally:
                    self.stop_requested.set()
                    await loop_task
        finally:
            # flush whatever was recorded even if serving failed mid-session
            trajectory = self.session.finish()
            if self.config.log_path and len(trajectory):
                trajectory.save(self.config.log_path)
                log.info("trajectory log written to %s", self.config.log_path)
        return trajectory

    def shutdown(self) -> None:
        self.stop_requested.set()


async def run_session_async(
    config: GatewayConfig, *, realtime: bool = True, ready: asyncio.Event | None = None
) -> TrajectoryLog:
    """Serve one operator session; returns the completed trajectory log."""
    gateway = GatewayServer(config, realtime=realtime)
    return await gateway.run(ready=ready)


def run_session(config: GatewayConfig, *, realtime: bool = True) -> TrajectoryLog:
    """Blocking wrapper around run_session_async (installs signal handlers)."""

    async def _main() -> TrajectoryLog:
        import signal

        gateway = GatewayServer(config, realtime=realtime)
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, gateway.shutdown)
            except (NotImplementedError, RuntimeError):
                pass
        return await gateway.run()

    return asyncio.run(_main())
