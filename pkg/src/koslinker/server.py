"""Read-only HTTP service for the link explorer.

Serves the exported link tree verbatim, live descriptor suggestions for a
set of selected classes, and the explorer's static assets. Everything is
loaded once at startup and never mutated, so concurrent requests see one
consistent snapshot; stdlib threading server, no framework needed.

Endpoints:
  GET /api/tree                     the link-tree document, byte-identical
                                    to the exported file
  GET /api/suggest?classes=C1,C2&k=N  {"descriptors": [{"label", "p"}]}
  GET /<path>                       static assets, when configured
"""

from __future__ import annotations

import json
import mimetypes
import posixpath
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .kos import ClassificationSystem, load_classification
from .links import DEFAULT_TOP_K, suggest_descriptors
from .plltm import TrainedModel, load_model

__all__ = ["LinkService", "make_server", "serve"]

_PLACEHOLDER = """<!doctype html>
<html><head><meta charset="utf-8"><title>koslinker</title></head>
<body><h1>koslinker link service</h1>
<p>No UI assets configured. API endpoints:</p>
<ul><li><code>GET /api/tree</code></li>
<li><code>GET /api/suggest?classes=CODE1,CODE2&amp;k=5</code></li></ul>
</body></html>
"""


@dataclass
class LinkService:
    """Immutable request-serving state."""

    tree_bytes: bytes
    model: TrainedModel | None = None
    classification: ClassificationSystem | None = None
    assets_dir: Path | None = None

    @classmethod
    def from_paths(cls, tree_path, model_path=None, classification_path=None,
                   assets_dir=None) -> "LinkService":
        tree_bytes = Path(tree_path).read_bytes()
        model = load_model(model_path) if model_path else None
        classification = (load_classification(classification_path)
                          if classification_path else None)
        assets = Path(assets_dir) if assets_dir else None
        if assets is not None and not assets.is_dir():
            raise FileNotFoundError(f"assets directory not found: {assets}")
        return cls(tree_bytes=tree_bytes, model=model,
                   classification=classification, assets_dir=assets)

    # ---- request handling ------------------------------------------------

    def handle(self, path: str, query: dict) -> tuple[int, str, bytes]:
        """Return (status, content_type, body) for a GET."""
        if path == "/api/tree":
            return 200, "application/json", self.tree_bytes
        if path == "/api/suggest":
            return self._suggest(query)
        return self._static(path)

    def _suggest(self, query: dict) -> tuple[int, str, bytes]:
        if self.model is None or self.classification is None:
            return self._error(503, "suggestions need a model and classification")
        raw = ",".join(query.get("classes", []))
        codes = [c.strip() for c in raw.split(",") if c.strip()]
        if not codes:
            return self._error(400, "missing or empty 'classes' parameter")
        try:
            k = int(query.get("k", [str(DEFAULT_TOP_K)])[0])
        except ValueError:
            return self._error(400, "'k' must be an integer")
        if k < 1:
            return self._error(400, "'k' must be >= 1")
        topics = []
        for code in codes:
            topic = self.classification.topic_index.get(code)
            if topic is None:
                return self._error(400, f"unknown class code {code!r}")
            topics.append(topic)
        ranked = suggest_descriptors(self.model, topics, k)
        body = json.dumps(
            {"descriptors": [
                {"label": label, "p": float(f"{p:.6g}")} for label, p in ranked
            ]},
            ensure_ascii=False, separators=(",", ":"),
        ).encode("utf-8")
        return 200, "application/json", body

    def _static(self, path: str) -> tuple[int, str, bytes]:
        if path in ("/", "/index.html") and self.assets_dir is None:
            return 200, "text/html; charset=utf-8", _PLACEHOLDER.encode("utf-8")
        if self.assets_dir is None:
            return self._error(404, "not found")
        rel = posixpath.normpath(path.lstrip("/")) or "index.html"
        if rel in (".", ""):
            rel = "index.html"
        if rel.startswith("..") or rel.startswith("/"):
            return self._error(404, "not found")
        target = (self.assets_dir / rel).resolve()
        if not str(target).startswith(str(self.assets_dir.resolve())):
            return self._error(404, "not found")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return self._error(404, "not found")
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        if ctype.startswith("text/") or ctype in ("application/javascript", "application/json"):
            ctype += "; charset=utf-8"
        return 200, ctype, target.read_bytes()

    @staticmethod
    def _error(status: int, message: str) -> tuple[int, str, bytes]:
        body = json.dumps({"error": message}, ensure_ascii=False).encode("utf-8")
        return status, "application/json", body


class _Handler(BaseHTTPRequestHandler):
    service: LinkService = None  # set on the subclass by make_server
    quiet = False

    def do_GET(self):
        parsed = urlparse(self.path)
        status, ctype, body = self.service.handle(parsed.path, parse_qs(parsed.query))
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):
        if not self.quiet:
            super().log_message(fmt, *args)


def make_server(service: LinkService, host: str = "127.0.0.1", port: int = 8080,
                quiet: bool = False) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service, "quiet": quiet})
    return ThreadingHTTPServer((host, port), handler)


def serve(service: LinkService, host: str = "127.0.0.1", port: int = 8080) -> None:
    with make_server(service, host, port) as httpd:
        actual = httpd.server_address[1]
        print(f"serving on http://{host}:{actual}/ (tree: {len(service.tree_bytes)} bytes, "
              f"suggestions: {'on' if service.model is not None else 'off'})")
        httpd.serve_forever()
