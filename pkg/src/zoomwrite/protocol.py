"""Frame protocol server: newline-delimited ``verb {json}`` messages.

Strictly request-response, one client at a time:

    client:  hello {"protocol_version": 1}
    server:  welcome {"glyphs": [...], "params": {...}}
    client:  frame {"x": 0.7, "y": 0.4, "dt": 0.033}
    server:  render {"boxes": [...], "committed": "...", "delta": {...},
                     "metrics": {...}, "params": {...}}
    client:  config {"rate": 6.0, "crosshair_x": 0.5}   -> ok {...}
    client:  reset {"seed_context": "the "}             -> ok {}
    client:  bye {}                                     -> bye {}

A protocol version mismatch earns ``error {...}`` and the connection
closes. The server never mutates the model snapshot it was given.
"""

from __future__ import annotations

import json
import socket
from typing import Callable

from .alphabet import normalize_text
from .model import PpmModel
from .session import DynamicsParams, Pointer, Session

PROTOCOL_VERSION = 1


class ProtocolSession:
    """State machine behind one connection; transport-agnostic."""

    def __init__(self, model: PpmModel, params: DynamicsParams):
        self._base_model = model
        self._base_params = params
        self.params = DynamicsParams(**vars(params))
        self.session: Session | None = None
        self.closed = False

    def handle_line(self, line: str) -> str:
        verb, _, rest = line.strip().partition(" ")
        try:
            payload = json.loads(rest) if rest else {}
        except json.JSONDecodeError:
            return self._error("payload is not valid JSON")
        handler: Callable | None = getattr(self, f"_on_{verb}", None)
        if handler is None:
            return self._error(f"unknown message {verb!r}")
        try:
            return handler(payload)
        except Exception as exc:  # any fault ends the session with a report
            return self._error(str(exc))

    def _error(self, message: str) -> str:
        self.closed = True
        return "error " + json.dumps({"message": message})

    def _params_payload(self) -> dict:
        return {
            "rate": self.params.max_rate_bits_per_sec,
            "crosshair_x": self.params.crosshair_x,
            "protocol_version": PROTOCOL_VERSION,
        }

    def _fresh_session(self, seed_text: str = "") -> None:
        model = self._base_model.clone()
        seed = normalize_text(seed_text, model.alphabet)
        self.session = Session(model, self.params, seed)

    def _on_hello(self, payload: dict) -> str:
        version = payload.get("protocol_version")
        if version != PROTOCOL_VERSION:
            return self._error(
                f"protocol version {version!r} unsupported (server speaks {PROTOCOL_VERSION})"
            )
        self._fresh_session()
        alphabet = self._base_model.alphabet
        return "welcome " + json.dumps(
            {"glyphs": list(alphabet.symbols), "params": self._params_payload()}
        )

    def _on_config(self, payload: dict) -> str:
        if self.session is None:
            return self._error("config before hello")
        kwargs = {
            "max_rate_bits_per_sec": float(payload.get("rate", self.params.max_rate_bits_per_sec)),
            "crosshair_x": float(payload.get("crosshair_x", self.params.crosshair_x)),
            "min_view_width": self.params.min_view_width,
            "frame_dt_cap": self.params.frame_dt_cap,
        }
        self.params = DynamicsParams(**kwargs)
        self.session.params = self.params
        return "ok " + json.dumps({"params": self._params_payload()})

    def _on_reset(self, payload: dict) -> str:
        if self.session is None:
            return self._error("reset before hello")
        self._fresh_session(payload.get("seed_context", ""))
        return "ok " + json.dumps({})

    def _on_frame(self, payload: dict) -> str:
        if self.session is None:
            return self._error("frame before hello")
        result = self.session.step(
            Pointer(float(payload["x"]), float(payload["y"])), float(payload["dt"])
        )
        m = result.metrics
        return "render " + json.dumps(
            {
                "boxes": [
                    {
                        "x0": b.x0,
                        "y0": b.y0,
                        "x1": b.x1,
                        "y1": b.y1,
                        "glyph": b.glyph,
                        "depth": b.depth,
                    }
                    for b in result.boxes
                ],
                "committed": result.committed,
                "delta": {"removed": result.delta_removed, "added": result.delta_added},
                "metrics": {
                    "elapsed_s": m.elapsed_s,
                    "chars": m.committed_chars,
                    "wpm": m.words_per_min,
                },
                "params": self._params_payload(),
            }
        )

    def _on_bye(self, payload: dict) -> str:
        self.closed = True
        return "bye " + json.dumps({})


def serve_streams(model: PpmModel, params: DynamicsParams, rfile, wfile) -> None:
    """Run one protocol session over text streams (stdio or a socket file)."""
    handler = ProtocolSession(model, params)
    for line in rfile:
        if not line.strip():
            continue
        reply = handler.handle_line(line)
        wfile.write(reply + "\n")
        wfile.flush()
        if handler.closed:
            break


def serve_tcp(model: PpmModel, params: DynamicsParams, port: int, *,
              once: bool = False, ready_cb=None) -> None:
    """Accept one client at a time on localhost:port."""
    with socket.create_server(("127.0.0.1", port)) as server:
        if ready_cb is not None:
            ready_cb(server.getsockname()[1])
        while True:
            conn, _ = server.accept()
            with conn:
                rfile = conn.makefile("r", encoding="utf-8")
                wfile = conn.makefile("w", encoding="utf-8")
                serve_streams(model, params, rfile, wfile)
            if once:
                return
