"""HTTP gallery backend: serve candidate curves, accept one human selection.

Endpoints
---------
* ``GET /healthz`` — liveness probe.
* ``GET /candidates`` — JSON array of candidate metadata
  ``[{id, seed, points, tour_length_px, est_time_min}]``.
* ``GET /candidates/{id}.svg`` — the candidate's curve as SVG.
* ``POST /select`` with body ``{"id": <int>}`` — commit a choice. The
  first valid selection wins; later attempts get 409, invalid ids get
  400 and the server keeps waiting.
* ``GET /`` and static assets — the bundled gallery page, when present.

The server runs until a valid selection lands, then
:func:`serve_selection` returns the chosen id.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .pipeline import CandidateRecord
from .uncross import verify_jordan

logger = logging.getLogger("chitrakar")

DEFAULT_UI_DIR = Path(__file__).parent / "webui"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class SelectionState:
    """Once-only latch for the winning candidate id."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._selected: int | None = None
        self.event = threading.Event()

    def try_select(self, cand_id: int) -> bool:
        """Latch the id; False if a selection already won."""
        with self._lock:
            if self._selected is not None:
                return False
            self._selected = cand_id
            self.event.set()
            return True

    @property
    def selected(self) -> int | None:
        return self._selected


def _make_handler(records: list[CandidateRecord], state: SelectionState, ui_dir: Path | None):
    by_id = {rec.id: rec for rec in records}
    listing = json.dumps([rec.metadata() for rec in records]).encode()

    class GalleryHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # route through the package logger
            logger.debug("http: " + fmt, *args)

        def _send(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, payload: dict | list) -> None:
            self._send(status, json.dumps(payload).encode(), "application/json")

        def do_GET(self) -> None:
            path = self.path.split("?", 1)[0]
            if path == "/healthz":
                self._send(200, b"ok", "text/plain; charset=utf-8")
            elif path == "/candidates":
                self._send(200, listing, "application/json")
            elif path.startswith("/candidates/") and path.endswith(".svg"):
                name = path[len("/candidates/") : -len(".svg")]
                rec = by_id.get(int(name)) if name.isdigit() else None
                if rec is None:
                    self._send_json(404, {"error": f"no candidate {name!r}"})
                else:
                    self._send(200, rec.svg.encode(), "image/svg+xml")
            else:
                self._serve_static(path)

        def _serve_static(self, path: str) -> None:
            if ui_dir is None:
                self._send_json(404, {"error": "not found"})
                return
            name = "index.html" if path == "/" else path.lstrip("/")
            target = (ui_dir / name).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

        def do_POST(self) -> None:
            if self.path.split("?", 1)[0] != "/select":
                self._send_json(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                cand_id = payload["id"]
                if not isinstance(cand_id, int) or isinstance(cand_id, bool):
                    raise TypeError("id must be an integer")
            except (ValueError, TypeError, KeyError) as exc:
                self._send_json(400, {"error": f"bad selection request: {exc}"})
                return
            if cand_id not in by_id:
                self._send_json(400, {"error": f"candidate id {cand_id} out of range"})
                return
            if state.try_select(cand_id):
                self._send_json(200, {"status": "selected", "id": cand_id})
            else:
                self._send_json(409, {"status": "already-selected", "id": state.selected})

    return GalleryHandler


def build_server(
    records: list[CandidateRecord],
    port: int,
    host: str = "127.0.0.1",
    ui_dir: Path | None = DEFAULT_UI_DIR,
) -> tuple[ThreadingHTTPServer, SelectionState]:
    """Construct the gallery server without starting it (tests drive it directly)."""
    if not records:
        raise ValueError("no candidates to serve")
    for rec in records:
        crossings = verify_jordan(rec.curve.order, rec.curve.points)
        if crossings:
            raise ValueError(f"candidate {rec.id} is not a Jordan curve: {crossings[:3]}")
    if ui_dir is not None and not Path(ui_dir).is_dir():
        ui_dir = None
    state = SelectionState()
    server = ThreadingHTTPServer((host, port), _make_handler(records, state, ui_dir))
    return server, state


def serve_selection(
    records: list[CandidateRecord],
    port: int,
    host: str = "127.0.0.1",
    ui_dir: Path | None = DEFAULT_UI_DIR,
) -> int:
    """Serve the gallery until a valid selection arrives; return the chosen id."""
    server, state = build_server(records, port, host=host, ui_dir=ui_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    logger.info("gallery serving %d candidates on http://%s:%d/", len(records), host, port)
    try:
        state.event.wait()
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5.0)
    chosen = state.selected
    assert chosen is not None
    logger.info("human selected candidate %d", chosen)
    return chosen
