"""Small HTTP helper shared by the remote provider clients."""

from __future__ import annotations

import requests

from .errors import ProviderError


def post_json(url: str, payload: dict, timeout: float = 10.0):
    """POST a JSON payload and return the decoded JSON response.

    Any transport failure, non-2xx status, or non-JSON body becomes a
    :class:`ProviderError` so callers can fall back to built-in providers.
    """
    try:
        response = requests.post(url, json=payload, timeout=timeout)
        response.raise_for_status()
        return response.json()
    except (requests.RequestException, ValueError) as exc:
        raise ProviderError(f"request to {url} failed: {exc}") from exc
