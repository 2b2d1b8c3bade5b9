"""A classical stochastic system read by an inaccurate meter.

The system takes route ``k`` with probability ``w_k``, which moves the pointer
by ``f_k``.  The pointer's starting position is Gaussian noise with the same
density ``|G|^2`` (variance ``df^2/4``) as the quantum pointer.  However broad
the noise, the mean reading is ``sum w_k f_k`` and the route spread can be
recovered by subtracting the known noise variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .meter import GaussianWindow


@dataclass(frozen=True)
class ClassicalRouteModel:
    values: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        w = tuple(float(x) for x in self.probabilities)
        if not v or len(v) != len(w):
            raise ValueError("need one probability per route value")
        if len(set(v)) != len(v):
            raise ValueError("route values must be distinct")
        if any(p < 0 for p in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"route probabilities must be non-negative and sum to 1, got {w}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probabilities", w)

    @classmethod
    def from_routes(cls, routes: Iterable[tuple[float, float]]) -> "ClassicalRouteModel":
        routes = list(routes)
        return cls(tuple(r[0] for r in routes), tuple(r[1] for r in routes))


@dataclass(frozen=True)
class TrialRecord:
    route: int  # 1-indexed
    reading: float


@dataclass(frozen=True)
class ClassicalMoments:
    mean: float
    second_moment: float
    recovered_sigma: float


def classical_reading_density(model: ClassicalRouteModel, window: GaussianWindow, f):
    """``sum_k w_k |G(f - f_k)|^2``, a normalised probability density."""
    f = np.asarray(f, dtype=float)
    return sum(w * window(f - a) ** 2 for a, w in zip(model.values, model.probabilities))


def classical_moments(model: ClassicalRouteModel, window: GaussianWindow) -> ClassicalMoments:
    v = np.asarray(model.values)
    w = np.asarray(model.probabilities)
    mean = float(w @ v)
    route_second = float(w @ (v * v))
    # variance computed about the mean so a single route gives exactly zero
    route_var = float(w @ (v - mean) ** 2)
    return ClassicalMoments(mean, route_second + window.density_variance, math.sqrt(route_var))


@dataclass(frozen=True)
class TrialSet:
    """Outcome of :func:`simulate_trials`; ``routes`` are 1-indexed."""

    routes: np.ndarray
    readings: np.ndarray
    noise_variance: float
    seed: int
    batch_size: int

    def __len__(self) -> int:
        return self.readings.size

    def records(self) -> Iterator[TrialRecord]:
        for r, x in zip(self.routes, self.readings):
            yield TrialRecord(int(r), float(x))

    @property
    def mean(self) -> float:
        return float(np.mean(self.readings))

    @property
    def mean_stderr(self) -> float:
        """Sample standard deviation over ``sqrt(n)``; ``nan`` for one trial."""
        n = len(self)
        if n < 2:
            return math.nan
        return float(np.std(self.readings, ddof=1) / math.sqrt(n))

    @property
    def recovered_variance(self) -> float:
        """Reading variance minus the known noise variance (may come out negative)."""
        if len(self) < 2:
            return 0.0
        return float(np.var(self.readings, ddof=1)) - self.noise_variance

    @property
    def recovered_sigma(self) -> float:
        return math.sqrt(max(self.recovered_variance, 0.0))

    @property
    def recovered_sigma_stderr(self) -> float:
        """Delta-method standard error of :attr:`recovered_sigma`."""
        n = len(self)
        if n < 4 or self.recovered_sigma == 0.0:
            return math.nan
        x = self.readings - self.readings.mean()
        m2 = float(np.mean(x * x))
        m4 = float(np.mean(x**4))
        var_se = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
        return var_se / (2.0 * self.recovered_sigma)


def simulate_trials(
    model: ClassicalRouteModel,
    window: GaussianWindow,
    n_trials: int,
    seed: int,
    *,
    batch_size: int = 1 << 18,
) -> TrialSet:
    """Draw ``n_trials`` (route, reading) pairs reproducibly.

    Batch ``b`` uses ``SeedSequence(seed).spawn(n_batches)[b]``, so the output
    is fixed by ``(seed, n_trials, batch_size)`` and the batches could be drawn
    in any order or in parallel.
    """
    if int(n_trials) != n_trials or n_trials < 1:
        raise ValueError(f"need at least one trial, got {n_trials!r}")
    n_trials = int(n_trials)
    n_batches = -(-n_trials // batch_size)
    children = np.random.SeedSequence(int(seed)).spawn(n_batches)
    values = np.asarray(model.values)
    probs = np.asarray(model.probabilities)
    noise_sd = window.delta_f / 2.0
    routes, readings = [], []
    for b, child in enumerate(children):
        rng = np.random.default_rng(child)
        size = min(batch_size, n_trials - b * batch_size)
        k = rng.choice(len(values), size=size, p=probs)
        routes.append(k + 1)
        readings.append(values[k] + rng.normal(0.0, noise_sd, size=size))
    return TrialSet(
        np.concatenate(routes), np.concatenate(readings), window.density_variance,
        int(seed), batch_size,
    )
