import time


class SystemClock:
    def now(self) -> float:
        return time.time()


class SimClock:
    """Manually advanced clock for deterministic scenario runs."""

    def __init__(self, start=0):
        self._t = int(start)

    def now(self) -> int:
        return self._t

    def advance(self, seconds):
        self._t += int(seconds)
        return self._t
