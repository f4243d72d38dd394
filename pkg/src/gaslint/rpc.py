"""Fetch deployed bytecode from an Ethereum node over JSON-RPC."""

from __future__ import annotations

import itertools
import re

import requests

from .evm import InputError, parse_hex

_ADDRESS_RE = re.compile(r"^(0x)?[0-9a-fA-F]{40}$")
_ids = itertools.count(1)


class RpcError(RuntimeError):
    """Network or node failure; the request may be retried."""

    retriable = True


def normalize_address(address: str) -> str:
    address = address.strip()
    if not _ADDRESS_RE.match(address):
        raise InputError(f"malformed address {address!r}: expected 20 bytes of hex")
    return "0x" + address[-40:].lower()


def fetch_code(rpc_url: str, address: str, block: str = "latest", timeout: float = 10.0,
               session: requests.Session | None = None) -> bytes:
    """``eth_getCode`` at ``block``. An account without code yields ``b""``."""
    addr = normalize_address(address)
    payload = {"jsonrpc": "2.0", "id": next(_ids), "method": "eth_getCode", "params": [addr, block]}
    http = session or requests
    try:
        resp = http.post(rpc_url, json=payload, timeout=timeout)
        resp.raise_for_status()
        body = resp.json()
    except (requests.RequestException, ValueError) as exc:
        raise RpcError(f"eth_getCode request to {rpc_url} failed: {exc}") from exc
    if not isinstance(body, dict):
        raise RpcError(f"unexpected JSON-RPC response: {body!r}")
    if body.get("error"):
        err = body["error"]
        msg = err.get("message", err) if isinstance(err, dict) else err
        raise RpcError(f"node returned an error: {msg}")
    result = body.get("result")
    if not isinstance(result, str):
        raise RpcError(f"missing result in response: {body!r}")
    try:
        return parse_hex(result)
    except InputError as exc:
        raise RpcError(f"node returned malformed code: {exc}") from exc
