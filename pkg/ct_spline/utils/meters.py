from typing import Tuple  # isort:skip

import numpy as np


class Meter:
    """
    Online statistic: ``add`` samples one at a time, read ``value``.
    """
    def reset(self) -> None:
        raise NotImplementedError()

    def add(self, value: float) -> None:
        raise NotImplementedError()

    def value(self):
        raise NotImplementedError()


class AverageValueMeter(Meter):
    """
    Running mean and sample standard deviation in one pass (Welford's
    update). ``value`` is ``(nan, nan)`` before the first sample and the
    deviation is ``inf`` after exactly one.
    """
    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self.n = 0
        self.mean = np.nan
        self._m2 = 0.0

    def add(self, value: float) -> None:
        value = float(value)
        self.n += 1
        if self.n == 1:
            self.mean = value
            self._m2 = 0.0
            return
        delta = value - self.mean
        self.mean += delta / self.n
        self._m2 += delta * (value - self.mean)

    @property
    def std(self) -> float:
        if self.n == 0:
            return np.nan
        if self.n == 1:
            return np.inf
        return float(np.sqrt(self._m2 / (self.n - 1)))

    def value(self) -> Tuple[float, float]:
        return self.mean, self.std


__all__ = ["Meter", "AverageValueMeter"]
