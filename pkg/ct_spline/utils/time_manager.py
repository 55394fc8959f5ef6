from typing import Dict  # isort:skip
from time import perf_counter


class TimeManager:
    """
    Named wall-clock timers on ``time.perf_counter``; ``elapsed`` keeps
    the last duration of every timer, seconds.
    """
    def __init__(self):
        self._running: Dict[str, float] = {}
        self.elapsed: Dict[str, float] = {}

    def start(self, name: str) -> None:
        self._running[name] = perf_counter()

    def stop(self, name: str) -> float:
        """
        Returns:
            float: seconds since ``start(name)``
        """
        assert name in self._running, f"timer '{name}' is not running"
        self.elapsed[name] = perf_counter() - self._running.pop(name)
        return self.elapsed[name]

    def reset(self) -> None:
        self._running.clear()
        self.elapsed.clear()


__all__ = ["TimeManager"]
