"""Shared HTTP POST-with-retries plumbing for remote providers.

Callers may inject a ``transport`` callable (url, payload, headers, timeout)
-> (status_code, parsed_json) so unit tests run without sockets; the default
transport uses ``requests``.
"""

from __future__ import annotations

import random
import time
from typing import Callable

import requests

from .errors import TransportError

Transport = Callable[[str, dict, dict, float], "tuple[int, dict]"]

BACKOFF_BASE_SECONDS = 0.5


def requests_transport(url: str, payload: dict, headers: dict, timeout: float) -> tuple[int, dict]:
    response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = {}
    return response.status_code, body


def post_json_with_retries(
    url: str,
    payload: dict,
    *,
    headers: dict | None = None,
    timeout: float = 30.0,
    max_retries: int = 3,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> dict:
    """POST JSON, retrying transient failures with jittered exponential backoff.

    ``max_retries`` counts additional attempts after the first.  Raises
    TransportError carrying the last status code and the attempt count.
    """
    transport = transport or requests_transport
    rng = rng or random.Random()
    headers = dict(headers or {})
    headers.setdefault("Content-Type", "application/json")

    attempts = 0
    last_status: int | None = None
    last_error = "no attempt made"
    for attempt in range(max_retries + 1):
        attempts = attempt + 1
        try:
            status, body = transport(url, payload, headers, timeout)
        except Exception as exc:  # connection errors, timeouts
            last_status = None
            last_error = str(exc)
        else:
            if 200 <= status < 300:
                return body
            last_status = status
            last_error = f"HTTP {status}"
        if attempt < max_retries:
            sleep(BACKOFF_BASE_SECONDS * (2**attempt) * (1.0 + rng.random()))
    raise TransportError(
        f"POST {url} failed after {attempts} attempt(s): {last_error}",
        status=last_status,
        attempts=attempts,
    )
