"""Synthetic emergency-braking time series.

Kinematics: the vehicle holds its initial speed through the driver
reaction time, then decelerates at a constant rate to rest.  Positions
are closed-form, so there is no integration error:

    x(t) = v0 * t                                   t <= t_react
    x(t) = v0 * t_react + v0 * s - decel * s**2 / 2  s = t - t_react
    x(t) = stopping distance                         t >= stop time

Corpora draw scenario parameters uniformly per series from configured
ranges, with one PCG64 stream derived per series index so parallel and
serial generation agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "BrakingScenario",
    "ScenarioRanges",
    "TimeSeries",
    "DEFAULT_RANGES",
    "simulate_braking",
    "generate_corpus",
    "flatten_positions",
]


@dataclass(frozen=True)
class BrakingScenario:
    """One braking maneuver: initial speed (m/s), driver reaction time (s),
    constant deceleration magnitude (m/s^2), and sample interval (s)."""

    v0: float
    t_react: float
    decel: float
    dt: float

    def __post_init__(self):
        vals = (self.v0, self.t_react, self.decel, self.dt)
        if not all(math.isfinite(v) for v in vals):
            raise DataError("scenario parameters must be finite")
        if self.v0 <= 0.0:
            raise DataError("initial speed must be positive")
        if self.t_react < 0.0:
            raise DataError("reaction time must be nonnegative")
        if self.decel <= 0.0:
            raise DataError("deceleration must be positive")
        if self.dt <= 0.0:
            raise DataError("sample interval must be positive")

    @property
    def stop_time(self) -> float:
        return self.t_react + self.v0 / self.decel

    @property
    def stopping_distance(self) -> float:
        return self.v0 * self.t_react + self.v0**2 / (2.0 * self.decel)


@dataclass(frozen=True)
class ScenarioRanges:
    """Uniform sampling intervals for corpus generation."""

    v0: tuple[float, float]
    t_react: tuple[float, float]
    decel: tuple[float, float]
    dt: float

    def __post_init__(self):
        for name, (lo, hi) in (("v0", self.v0), ("t_react", self.t_react), ("decel", self.decel)):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DataError(f"{name} range must be finite")
            if lo > hi:
                raise DataError(f"{name} range has min {lo!r} > max {hi!r}")
        # every drawable scenario must itself be valid
        if self.v0[0] <= 0.0:
            raise DataError("v0 range must be positive")
        if self.t_react[0] < 0.0:
            raise DataError("t_react range must be nonnegative")
        if self.decel[0] <= 0.0:
            raise DataError("decel range must be positive")
        if not math.isfinite(self.dt) or self.dt <= 0.0:
            raise DataError("dt must be positive")


# Chosen so the slowest scenario still stops beyond 65 m:
# min distance = 25 * 0.8 + 25**2 / (2 * 4.5) = 89.4 m.
DEFAULT_RANGES = ScenarioRanges(v0=(25.0, 35.0), t_react=(0.8, 1.5), decel=(3.5, 4.5), dt=0.01)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled longitudinal position trace: x starts at 0 and never
    decreases (the vehicle does not reverse)."""

    t: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if t.ndim != 1 or t.shape != x.shape or t.size < 2:
            raise DataError("t and x must be 1-d arrays of equal length >= 2")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x))):
            raise DataError("time series must be finite")
        if np.any(np.diff(t) < 0.0):
            raise DataError("sample times must be non-decreasing")
        if x[0] != 0.0:
            raise DataError("position trace must start at 0")
        if np.any(np.diff(x) < 0.0):
            raise DataError("position trace must be non-decreasing")
        t = t.copy()
        t.setflags(write=False)
        x = x.copy()
        x.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)

    def __len__(self) -> int:
        return self.t.size


def simulate_braking(scenario: BrakingScenario) -> TimeSeries:
    """Sample the maneuver at t = 0, dt, 2*dt, ... through the stop time.

    The final sample is the first one at or past the stop, so the series
    ends at the stopping distance (the vehicle is at rest).
    """
    steps = math.ceil(scenario.stop_time / scenario.dt)
    t = np.arange(steps + 1) * scenario.dt
    # Clamping the braking-phase offset at the stop keeps the sampled
    # positions monotone through the rest phase.
    s = np.clip(t - scenario.t_react, 0.0, scenario.v0 / scenario.decel)
    braking = scenario.v0 * scenario.t_react + scenario.v0 * s - 0.5 * scenario.decel * s**2
    x = np.where(t <= scenario.t_react, scenario.v0 * t, braking)
    return TimeSeries(t=t, x=x)


def generate_corpus(
    count: int,
    ranges: ScenarioRanges | None = None,
    seed: int = 0,
) -> list[TimeSeries]:
    """Generate ``count`` braking series with parameters drawn uniformly
    from ``ranges`` (default :data:`DEFAULT_RANGES`).

    Each series uses its own PCG64 stream seeded by ``(seed, index)``, so
    the corpus is reproducible and independent of generation order.
    """
    if int(count) < 1:
        raise DataError("count must be >= 1")
    if ranges is None:
        ranges = DEFAULT_RANGES
    series = []
    for index in range(int(count)):
        rng = np.random.default_rng((seed, index))
        scenario = BrakingScenario(
            v0=rng.uniform(*ranges.v0),
            t_react=rng.uniform(*ranges.t_react),
            decel=rng.uniform(*ranges.decel),
            dt=ranges.dt,
        )
        series.append(simulate_braking(scenario))
    return series


def flatten_positions(corpus: list[TimeSeries]) -> np.ndarray:
    """Concatenate all position samples of all series, the estimation
    input for density-over-position analysis."""
    if not corpus:
        raise DataError("corpus is empty")
    return np.concatenate([ts.x for ts in corpus])
