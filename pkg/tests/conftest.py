import json
import shutil
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from gaslint.asm import assemble

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
CORPUS = TESTS / "corpus"
GOLDEN = TESTS / "golden"

sys.path.insert(0, str(TESTS))

Z3 = shutil.which("z3")
needs_z3 = pytest.mark.skipif(Z3 is None, reason="z3 executable not on PATH")


def fixture_code(name: str) -> bytes:
    return assemble((FIXTURES / f"{name}.asm").read_text())


@pytest.fixture
def code_of():
    return fixture_code


class _RpcHandler(BaseHTTPRequestHandler):
    codes: dict[str, str] = {}

    def do_POST(self):  # noqa: N802
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        self.server.requests.append(body)
        addr = body["params"][0]
        if addr == "0x" + "ee" * 20:
            reply = {"jsonrpc": "2.0", "id": body["id"], "error": {"code": -32000, "message": "header not found"}}
        elif addr == "0x" + "dd" * 20:
            reply = {"jsonrpc": "2.0", "id": body["id"], "result": "0xzz"}
        else:
            reply = {"jsonrpc": "2.0", "id": body["id"], "result": self.codes.get(addr, "0x")}
        data = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


BALLOT_ADDRESS = "0x" + "ab" * 20
EMPTY_ADDRESS = "0x" + "00" * 19 + "01"
ERROR_ADDRESS = "0x" + "ee" * 20
GARBLED_ADDRESS = "0x" + "dd" * 20


@pytest.fixture
def rpc_server():
    """A local JSON-RPC endpoint answering eth_getCode from fixture bytecode."""
    _RpcHandler.codes = {BALLOT_ADDRESS: "0x" + fixture_code("ballot").hex()}
    server = ThreadingHTTPServer(("127.0.0.1", 0), _RpcHandler)
    server.requests = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.server_address[1]}/"
    server.shutdown()
    server.server_close()
