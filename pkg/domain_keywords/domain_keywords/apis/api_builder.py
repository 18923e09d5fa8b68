from __future__ import annotations

import asyncio
from typing import Callable

import aiohttp

from ..constants import DEFAULT_HTTP_TIMEOUT
from ..exceptions import BackendUnavailable
from ..handlers import throw
from ..logger import keyword_logger
from ..utils import make_post_requests


class BaseEndpointsBuilder:
    """Abstract Endpoints Builder class"""

    def __init__(self) -> None:
        self.error: str | Exception | None = None
        self._observers: list[ErrorObserver] = []

    def attach(self, observer: ErrorObserver) -> None:
        """Attach an observer

        Args:
            observer (ErrorObserver): The observer to attach
        """
        self._observers.append(observer)

    def notify(self) -> None:
        """Notify all attached observers."""
        for observer in self._observers:
            observer.update(self)


class ErrorObserver:
    """Error observer class."""

    def update(self, notifier: BaseEndpointsBuilder) -> None:
        """Reacts to event from notifier

        Args:
            notifier (BaseEndpointsBuilder): The event notifier object
        """
        if notifier.error:
            keyword_logger.debug("remote call failed", exc_info=True)
            throw(
                f"Embedding service unreachable: {notifier.error}",
                BackendUnavailable,
            )


class EndpointsBuilder(BaseEndpointsBuilder):
    """
    Endpoints Builder class.
    Harbours the communication with a remote embedding service: every payload
    is posted concurrently and responses are handed to the callbacks in
    payload order.
    """

    def __init__(self) -> None:
        super().__init__()

        self._url: str | None = None
        self._payloads: list[dict] = []
        self._headers: dict | None = None
        self._timeout: float = DEFAULT_HTTP_TIMEOUT
        self._success_callback_handler: Callable | None = None
        self._error_callback_handler: Callable | None = None

        self.attach(ErrorObserver())

    @property
    def url(self) -> str | None:
        """The remote address

        Returns:
            str | None: The remote address
        """
        return self._url

    @url.setter
    def url(self, new_url: str) -> None:
        self._url = new_url

    @property
    def payloads(self) -> list[dict]:
        """The request bodies, one request per entry

        Returns:
            list[dict]: The request data
        """
        return self._payloads

    @payloads.setter
    def payloads(self, new_payloads: list[dict]) -> None:
        self._payloads = list(new_payloads)

    @property
    def headers(self) -> dict | None:
        """The request headers

        Returns:
            dict | None: The request headers
        """
        return self._headers

    @headers.setter
    def headers(self, new_headers: dict) -> None:
        self._headers = new_headers

    @property
    def timeout(self) -> float:
        return self._timeout

    @timeout.setter
    def timeout(self, new_timeout: float) -> None:
        self._timeout = new_timeout

    @property
    def success_callback(self) -> Callable | None:
        """Function that handles success responses.
        It receives the decoded response body and the index of its payload.

        Returns:
            Callable | None: The function that handles success responses
        """
        return self._success_callback_handler

    @success_callback.setter
    def success_callback(self, callback: Callable[[dict, int], None]) -> None:
        self._success_callback_handler = callback

    @property
    def error_callback(self) -> Callable | None:
        """The function that handles non-2xx responses.
        It receives the status, the response body and the index of its payload.

        Returns:
            Callable | None: The function that handles error responses
        """
        return self._error_callback_handler

    @error_callback.setter
    def error_callback(self, callback: Callable[[int, dict | str, int], None]) -> None:
        self._error_callback_handler = callback

    def make_remote_call(self) -> None:
        """Posts every payload and dispatches each response to a callback."""
        if (
            self._url is None
            or self._headers is None
            or self._success_callback_handler is None
            or self._error_callback_handler is None
        ):
            throw(
                "Please check that all required request parameters are supplied. "
                "These include the url, headers, and success and error callbacks",
                title="Setup Error",
            )

        self.error = None

        try:
            responses = asyncio.run(
                make_post_requests(
                    self._url, self._payloads, self._headers, timeout=self._timeout
                )
            )

        except (
            aiohttp.ClientConnectorError,
            aiohttp.ClientOSError,
            aiohttp.ClientPayloadError,
            aiohttp.ContentTypeError,
            asyncio.TimeoutError,
        ) as error:
            self.error = error
            self.notify()

            return

        for index, (status, body) in enumerate(responses):
            if 200 <= status < 300 and isinstance(body, dict):
                self._success_callback_handler(body, index)

            else:
                self._error_callback_handler(status, body, index)
