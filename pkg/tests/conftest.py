"""Shared test fixtures: the demo corpus on disk and an HTTP stub server."""

from __future__ import annotations

import copy
import json
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from convsr import fixtures as fx
from convsr.ingest import align_rewrites, load_canard, load_quac
from convsr.reader import ReaderBackend
from convsr.similarity import load_embeddings


@pytest.fixture(scope="session")
def demo_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    return fx.write_demo_files(out, num_dialogues=10)


@pytest.fixture(scope="session")
def demo_corpus(demo_files):
    return load_quac(demo_files["quac"])


@pytest.fixture(scope="session")
def demo_records(demo_files):
    return load_canard(demo_files["canard"])


@pytest.fixture(scope="session")
def demo_index(demo_corpus, demo_records):
    index, diagnostics = align_rewrites(demo_corpus, demo_records)
    assert not diagnostics
    return index


@pytest.fixture(scope="session")
def demo_sim(demo_files):
    return load_embeddings(demo_files["embeddings"])


@pytest.fixture()
def lexical_reader():
    return ReaderBackend()


def copy_dialogue(dialogue):
    return copy.deepcopy(dialogue)


class _StubHandler(BaseHTTPRequestHandler):
    routes = {}

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        handler = self.routes.get(self.path)
        if handler is None:
            self.send_response(404)
            self.end_headers()
            return
        status, payload = handler(body)
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@contextmanager
def stub_server(routes):
    """Serve ``{path: fn(body) -> (status, payload)}`` on an ephemeral port."""
    handler = type("Handler", (_StubHandler,), {"routes": routes})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join(timeout=5)
