"""Discrete-time Feynman paths and the amplitude distribution of a path functional.

A path visits one eigenstate ``|a_k>`` of the measured observable at each of
the ``N + 1`` nodes ``t_j = j t / N``.  Its amplitude is the product of one-step
propagator matrix elements between consecutive eigenstates, capped by the
overlaps with the initial and final states.  Grouping paths by the value of a
linear functional ``F[path] = integral beta(t') a(t') dt'`` and summing their
amplitudes gives the amplitude distribution ``Phi(f)``.

Because every interior node sums over a complete basis, ``sum_f Phi(f)`` is the
exact transition amplitude ``<F|exp(-iHt)|I>`` for every ``N >= 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import EnumerationCapExceeded, ZeroNormalization
from .quantum import MeasuredObservable, PureState, QuantumSystem, propagator, transition_amplitude
from .quasidist import MERGE_TOL, QuasiDistribution, merge_support

#: Largest number of paths ``d**(N+1)`` that will be enumerated.
ENUMERATION_CAP = 10**7
DEFAULT_CHUNK = 1 << 18
# fractional node positions closer than this to an integer count as on-node
_NODE_SNAP = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    total_time: float
    slices: int

    def __post_init__(self):
        if not (math.isfinite(self.total_time) and self.total_time > 0):
            raise ValueError(f"total time must be positive, got {self.total_time!r}")
        if int(self.slices) != self.slices or self.slices < 1:
            raise ValueError(f"need at least one time slice, got {self.slices!r}")
        object.__setattr__(self, "slices", int(self.slices))

    @property
    def step(self) -> float:
        return self.total_time / self.slices

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.slices + 1) * self.step


@dataclass(frozen=True)
class Sampled:
    """``beta`` sampled once per slice, at the slice's left node.

    The functional is the left Riemann sum ``sum_j beta_j a(t_j) dt`` over
    ``j = 0 .. N-1``; ``values`` must therefore have length ``N``.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals or not all(math.isfinite(v) for v in vals):
            raise ValueError("sampled weight values must be finite and non-empty")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float, grid: TimeGrid) -> "Sampled":
        return cls((value,) * grid.slices)

    def node_weights(self, grid: TimeGrid) -> np.ndarray:
        if len(self.values) != grid.slices:
            raise ValueError(
                f"{len(self.values)} sampled weights for a grid of {grid.slices} slices"
            )
        return np.append(np.asarray(self.values) * grid.step, 0.0)


@dataclass(frozen=True)
class Impulse:
    """``beta(t') = delta(t' - time)``: reads the observable at one instant.

    On a node the path's value at that node is used; strictly inside a slice
    the slice's left node is used.
    """

    time: float

    def node_index(self, grid: TimeGrid) -> int:
        if not (0.0 < self.time < grid.total_time):
            raise ValueError(
                f"impulse time {self.time!r} must lie strictly inside (0, {grid.total_time!r})"
            )
        pos = self.time / grid.step
        nearest = round(pos)
        if abs(pos - nearest) < _NODE_SNAP * max(1.0, pos):
            return int(nearest)
        return int(math.floor(pos))

    def node_weights(self, grid: TimeGrid) -> np.ndarray:
        w = np.zeros(grid.slices + 1)
        w[self.node_index(grid)] = 1.0
        return w


WeightFunction = Union[Sampled, Impulse]
Path = Sequence[int]


@dataclass(frozen=True)
class AmplitudeDistribution:
    """Amplitudes ``Phi(f)`` on distinct functional values ``f`` (ascending).

    The metadata fields are ``None`` for distributions built directly with
    :meth:`from_pairs`.
    """

    values: np.ndarray
    amplitudes: np.ndarray
    system: QuantumSystem | None = field(default=None, compare=False, repr=False)
    observable: MeasuredObservable | None = field(default=None, compare=False, repr=False)
    initial: PureState | None = field(default=None, compare=False, repr=False)
    final: PureState | None = field(default=None, compare=False, repr=False)
    grid: TimeGrid | None = field(default=None, compare=False, repr=False)
    weight: WeightFunction | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        amps = np.array(self.amplitudes, dtype=complex)
        if values.ndim != 1 or values.shape != amps.shape or values.size == 0:
            raise ValueError("need matching, non-empty value and amplitude vectors")
        if values.size > 1 and np.min(np.diff(values)) < MERGE_TOL:
            raise ValueError("functional values must be ascending and distinct")
        values.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, complex]]) -> "AmplitudeDistribution":
        pairs = list(pairs)
        values, amps = merge_support([p[0] for p in pairs], [p[1] for p in pairs])
        return cls(values, amps)

    def entries(self) -> list[tuple[float, complex]]:
        return [(float(f), complex(a)) for f, a in zip(self.values, self.amplitudes)]

    def __len__(self) -> int:
        return self.values.size

    def total(self) -> complex:
        """``sum_f Phi(f)``: the transition amplitude with no meter."""
        return complex(np.sum(self.amplitudes))

    def interfering_probability(self) -> float:
        """``|sum_f Phi(f)|^2``, pathways interfering."""
        return abs(self.total()) ** 2

    def decohered_probability(self) -> float:
        """``sum_f |Phi(f)|^2``, interference between pathways destroyed."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def scaled(self, c: complex) -> "AmplitudeDistribution":
        return AmplitudeDistribution(self.values, c * self.amplitudes)

    def as_quasi(self) -> QuasiDistribution:
        if not np.any(self.amplitudes != 0):
            raise ZeroNormalization("every pathway amplitude vanishes: the final state is unreachable")
        return QuasiDistribution(
            tuple(float(f) for f in self.values), tuple(complex(a) for a in self.amplitudes)
        )


def _eigen_frame(system, observable, initial, final, grid):
    d = system.dimension
    if observable.dimension != d or initial.dimension != d or final.dimension != d:
        raise ValueError(
            f"dimension mismatch: H is {d}, observable {observable.dimension},"
            f" |I> {initial.dimension}, |F> {final.dimension}"
        )
    v = observable.eigenbasis
    step = v.conj().T @ propagator(system, grid.step) @ v
    return v.conj().T @ initial.amplitudes, v.conj().T @ final.amplitudes, step


def path_amplitude(
    system: QuantumSystem,
    observable: MeasuredObservable,
    initial: PureState,
    final: PureState,
    grid: TimeGrid,
    path: Path,
) -> complex:
    """Amplitude of a single path ``(k_1, ..., k_{N+1})`` (1-indexed)."""
    if len(path) != grid.slices + 1:
        raise ValueError(f"path has {len(path)} nodes, grid has {grid.slices + 1}")
    d = system.dimension
    if any(not 1 <= k <= d for k in path):
        raise IndexError(f"path {tuple(path)} has an index outside 1..{d}")
    i_a, f_a, step = _eigen_frame(system, observable, initial, final, grid)
    k = [int(x) - 1 for x in path]
    amp = i_a[k[0]]
    for j in range(grid.slices):
        amp *= step[k[j + 1], k[j]]
    return complex(np.conj(f_a[k[-1]]) * amp)


def functional_value(
    path: Path, observable: MeasuredObservable, grid: TimeGrid, weight: WeightFunction
) -> float:
    """``F[path] = integral beta(t') a(t') dt'`` on the grid."""
    if len(path) != grid.slices + 1:
        raise ValueError(f"path has {len(path)} nodes, grid has {grid.slices + 1}")
    a = observable.eigenvalues[np.asarray(path, dtype=int) - 1]
    return float(a @ weight.node_weights(grid))


def _block(prefix, i_a, step, node_w, eig, nodes):
    """Amplitudes and functional values of every path starting with `prefix`.

    The prefix is walked scalar by scalar; the remaining nodes are expanded
    as a tensor, one axis of size ``d`` per node.  The final-state overlap is
    left to the caller.
    """
    d = eig.size
    if prefix:
        amp = i_a[prefix[0]]
        for j in range(1, len(prefix)):
            amp = amp * step[prefix[j], prefix[j - 1]]
        amps = np.array([amp])
        fvals = np.array([float(eig[list(prefix)] @ node_w[: len(prefix)])])
        lasts = np.array([prefix[-1]])
    else:
        amps, fvals, lasts = i_a.copy(), node_w[0] * eig, np.arange(d)
    for j in range(max(len(prefix), 1), nodes):
        amps = (amps[:, None] * step[:, lasts].T).ravel()
        fvals = (fvals[:, None] + node_w[j] * eig[None, :]).ravel()
        lasts = np.tile(np.arange(d), lasts.size)
    return amps, fvals, lasts


def amplitude_distribution(
    system: QuantumSystem,
    observable: MeasuredObservable,
    initial: PureState,
    final: PureState,
    grid: TimeGrid,
    weight: WeightFunction,
    *,
    chunk_size: int = DEFAULT_CHUNK,
    cap: int = ENUMERATION_CAP,
) -> AmplitudeDistribution:
    """Enumerate every path, bin amplitudes by functional value and merge.

    Paths are split into blocks sharing their first few nodes, each holding at
    most ``max(chunk_size, d)`` paths.  Every block is binned on its own before
    the final merge, so the result does not depend on ``chunk_size`` beyond
    float reordering.

    Raises
    ------
    EnumerationCapExceeded
        If ``d**(N+1)`` exceeds ``cap``.
    """
    d = system.dimension
    nodes = grid.slices + 1
    if d**nodes > cap:
        raise EnumerationCapExceeded(d, grid.slices, cap)
    i_a, f_a, step = _eigen_frame(system, observable, initial, final, grid)
    node_w = weight.node_weights(grid)
    eig = observable.eigenvalues
    suffix = 1
    while suffix < nodes and d ** (suffix + 1) <= chunk_size:
        suffix += 1

    parts_f, parts_a = [], []
    for prefix in itertools.product(range(d), repeat=nodes - suffix):
        amps, fvals, lasts = _block(prefix, i_a, step, node_w, eig, nodes)
        fv, av = merge_support(fvals, amps * np.conj(f_a[lasts]))
        parts_f.append(fv)
        parts_a.append(av)
    values, amps = merge_support(np.concatenate(parts_f), np.concatenate(parts_a))
    return AmplitudeDistribution(
        values, amps, system=system, observable=observable, initial=initial,
        final=final, grid=grid, weight=weight,
    )


def exact_amplitude(dist: AmplitudeDistribution) -> complex:
    """``<F|exp(-iHt)|I>`` for the system a distribution was built from."""
    if dist.system is None:
        raise ValueError("distribution carries no system metadata")
    u = propagator(dist.system, dist.grid.total_time)
    return transition_amplitude(dist.final, u, dist.initial)
