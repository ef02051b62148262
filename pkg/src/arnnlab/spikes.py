"""Spike-timing code for unit reals: digit positions become spike ticks.

The weight/spike power transfer is realised at the label level: a real
carried by a weight can instead be carried by when pulses fire, and its
degree label travels with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exact import UnitReal

__all__ = ["SpikeSchedule", "timing_decode", "timing_encode"]


@dataclass(frozen=True)
class SpikeSchedule:
    """Finite set of spike times within a window of ticks."""

    ticks: tuple[int, ...]
    window: int
    degree_label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ValueError("window must be nonnegative")
        previous = 0
        for t in self.ticks:
            if t <= previous:
                raise ValueError("spike ticks must be strictly increasing positives")
            if t > self.window:
                raise ValueError(f"spike at {t} outside window {self.window}")
            previous = t


def timing_encode(real: UnitReal, window: int) -> SpikeSchedule:
    """Spike at tick i iff binary digit i of the real is 1."""
    if real.base != 2:
        raise ValueError("timing code is defined on binary expansions")
    ticks = tuple(i for i in range(1, window + 1) if real.digit_at(i) == 1)
    return SpikeSchedule(ticks, window, degree_label=real.degree_label)


def timing_decode(schedule: SpikeSchedule) -> UnitReal:
    """Finite-horizon unit real whose 1-digits sit at the spike ticks."""
    spikes = set(schedule.ticks)
    digits = [1 if i in spikes else 0 for i in range(1, schedule.window + 1)]
    real = UnitReal.from_digits(digits, degree_label=schedule.degree_label)
    return real
