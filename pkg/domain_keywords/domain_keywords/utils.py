"""Utility functions"""

import asyncio
import math
import re
from pathlib import Path

import aiohttp

from .constants import DEFAULT_HTTP_TIMEOUT
from .exceptions import ParseError
from .handlers import throw


def is_valid_url(url: str) -> bool:
    """Validates input is a valid URL

    Args:
        url (str): The input to validate

    Returns:
        bool: Validation result
    """
    pattern = r"^https?:\/\/[^\s/$.?#].[^\s]*$"
    return bool(re.match(pattern, url))


async def make_post_request(
    session: aiohttp.ClientSession,
    url: str,
    data: dict | None = None,
    headers: dict[str, str] | None = None,
) -> tuple[int, dict | str]:
    """Make an Asynchronous POST Request to specified URL

    Args:
        session (aiohttp.ClientSession): The session the request is issued on
        url (str): The URL
        data (dict | None, optional): Data to send to server. Defaults to None.
        headers (dict[str, str] | None, optional): Headers to set. Defaults to None.

    Returns:
        tuple[int, dict | str]: The response status and its decoded body
    """
    async with session.post(url, json=data, headers=headers) as response:
        if response.content_type == "application/json":
            return response.status, await response.json()

        return response.status, await response.text()


async def make_post_requests(
    url: str,
    payloads: list[dict],
    headers: dict[str, str] | None = None,
    timeout: float = DEFAULT_HTTP_TIMEOUT,
) -> list[tuple[int, dict | str]]:
    """Issues one POST per payload concurrently over a shared session.

    Args:
        url (str): The URL
        payloads (list[dict]): Request bodies, one request each
        headers (dict[str, str] | None, optional): Headers to set. Defaults to None.
        timeout (float, optional): Total seconds allowed per request. Defaults to DEFAULT_HTTP_TIMEOUT.

    Returns:
        list[tuple[int, dict | str]]: Responses in payload order
    """
    client_timeout = aiohttp.ClientTimeout(total=timeout)

    async with aiohttp.ClientSession(timeout=client_timeout) as session:
        return list(
            await asyncio.gather(
                *(
                    make_post_request(session, url, payload, headers)
                    for payload in payloads
                )
            )
        )


def read_lines_file(path: str | Path) -> list[str]:
    """Reads a UTF-8 list file: one entry per line, blank lines and `#` comments skipped

    Args:
        path (str | Path): The file to read

    Returns:
        list[str]: The stripped entries in file order
    """
    try:
        text = Path(path).read_text(encoding="utf-8")

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read {path}: {error}", ParseError)

    entries = []
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip()

        if entry:
            entries.append(entry)

    return entries


def ceil_fraction(p: float, n: int) -> int:
    """⌈p·n⌉ with a guard against float noise such as 0.1 * 30 = 3.0000000000000004"""
    return math.ceil(fraction_of(p, n))


def fraction_of(p: float, n: int) -> float:
    """p·n rounded clear of float noise, for strict threshold comparisons"""
    return round(p * n, 9)
