import time
from typing import Optional


def make_bar(message: str = "", bar_length=40) -> str:
    message = " " + message.strip() + " "
    message = message.strip()
    dash_length = (bar_length - len(message)) // 2
    message = "-" * dash_length + message + "-" * dash_length
    return message


def str_to_bool(value: str) -> bool:
    """Convert string to boolean"""
    return value.lower() in {"true", "1", "t", "yes", "on"}


class Deadline:
    """Wall-clock budget measured with `time.perf_counter`.

    Args:
        seconds: Budget in seconds. ``None`` or a non-positive value means no deadline.
    """

    def __init__(self, seconds: Optional[float] = None):
        self.started = time.perf_counter()
        self._until = (
            self.started + seconds if seconds is not None and seconds > 0 else None
        )

    def expired(self) -> bool:
        return self._until is not None and time.perf_counter() > self._until

    def elapsed_us(self) -> int:
        return int((time.perf_counter() - self.started) * 1_000_000)
