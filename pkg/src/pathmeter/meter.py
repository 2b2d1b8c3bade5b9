"""The von Neumann pointer: Gaussian preparation, coarse graining and readings.

The pointer starts in the real, L2-normalised window

    G(f) = (2 / (pi df^2))**(1/4) * exp(-f^2 / df^2),

so ``|G|^2`` is a normal density of variance ``df^2 / 4``.  Coupling it to a
system whose amplitude distribution is ``Phi`` (finite support ``f_k``) leaves
it in ``Psi(f) = sum_k Phi(f_k) G(f - f_k)``, which is kept symbolically as the
list of centres and coefficients.  Every reading statistic then reduces to
products of two shifted windows,

    G(f - a) G(f - b) = S(a, b) * N(f; (a + b)/2, df^2/4),
    S(a, b) = exp(-(a - b)^2 / (2 df^2)),

and is evaluated in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateFit, VanishingPostSelection, ZeroNormalization
from .pathsum import AmplitudeDistribution
from .quasidist import statistics

#: Absolute floor on the arrival probability below which moments are refused.
ARRIVAL_FLOOR = 1e-300
#: Arrival probabilities below this fraction of sum |Phi|^2 trigger a warning.
ARRIVAL_WARN = 1e-12
#: Finite width standing in for the singular df -> 0 limit.
STRONG_DELTA_F = 1e-2


@dataclass(frozen=True)
class GaussianWindow:
    delta_f: float

    def __post_init__(self):
        if not (math.isfinite(self.delta_f) and self.delta_f > 0):
            raise ValueError(f"window width must be positive and finite, got {self.delta_f!r}")

    def __call__(self, f):
        df = self.delta_f
        return (2.0 / (math.pi * df * df)) ** 0.25 * np.exp(-np.square(f) / (df * df))

    @property
    def density_variance(self) -> float:
        """Variance of ``|G|^2``, i.e. ``int f^2 G^2 df / int G^2 df``."""
        return self.delta_f**2 / 4.0

    def overlap(self, a, b):
        """``int G(f - a) G(f - b) df``."""
        return np.exp(-np.square(np.subtract(a, b)) / (2.0 * self.delta_f**2))


@dataclass(frozen=True)
class PointerState:
    """``Psi(f) = sum_k c_k G(f - f_k)`` with distinct centres ``f_k``."""

    centers: np.ndarray
    coefficients: np.ndarray
    window: GaussianWindow

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        coeffs = np.array(self.coefficients, dtype=complex)
        if centers.ndim != 1 or centers.shape != coeffs.shape or centers.size == 0:
            raise ValueError("need matching, non-empty centre and coefficient vectors")
        if np.unique(centers).size != centers.size:
            raise ValueError("pointer centres must be distinct")
        if not np.any(coeffs != 0):
            raise ValueError("at least one coefficient must be nonzero")
        centers.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, f):
        f = np.asarray(f, dtype=float)
        out = np.zeros(f.shape, dtype=complex)
        for c, a in zip(self.coefficients, self.centers):
            out += c * self.window(f - a)
        return out

    def density(self, f):
        """Reading density ``|Psi(f)|^2`` (unnormalised)."""
        return np.abs(self(f)) ** 2

    def _pair_terms(self):
        c = self.coefficients
        a = self.centers
        gap = a[:, None] - a[None, :]
        # S - 1, kept separate so the weak limit does not cancel catastrophically
        s_minus_1 = np.expm1(-gap * gap / (2.0 * self.window.delta_f**2))
        weights = np.conj(c)[:, None] * c[None, :]
        mid = (a[:, None] + a[None, :]) / 2.0
        return weights, s_minus_1, mid

    def arrival_probability(self) -> float:
        """``int |Psi(f)|^2 df``."""
        w, e, _ = self._pair_terms()
        s0 = np.sum(self.coefficients)
        return float(abs(s0) ** 2 + np.sum(w * e).real)

    def raw_moments(self) -> tuple[float, float, float]:
        """``int f^n |Psi|^2 df`` for ``n = 0, 1, 2``."""
        c, a = self.coefficients, self.centers
        w, e, mid = self._pair_terms()
        s0, s1, s2 = np.sum(c), np.sum(c * a), np.sum(c * a * a)
        m0 = abs(s0) ** 2 + np.sum(w * e).real
        m1 = (np.conj(s0) * s1).real + np.sum(w * e * mid).real
        mid_sq = ((np.conj(s0) * s2).real + abs(s1) ** 2) / 2.0
        m2 = mid_sq + np.sum(w * e * mid * mid).real + self.window.density_variance * m0
        return float(m0), float(m1), float(m2)

    def binned_weights(self, edges: Sequence[float] | None = None) -> np.ndarray:
        """Probability mass of ``|Psi|^2`` between consecutive bin edges.

        By default the bins are split half-way between neighbouring centres and
        extend to +-infinity, one bin per centre.
        """
        if edges is None:
            a = np.sort(self.centers)
            edges = np.concatenate(([-np.inf], (a[1:] + a[:-1]) / 2.0, [np.inf]))
        edges = np.asarray(edges, dtype=float)
        w, e, mid = self._pair_terms()
        s = w * (1.0 + e)
        sd = self.window.delta_f / 2.0
        cdf = ndtr((edges[:, None, None] - mid[None]) / sd)
        return np.sum(s[None] * np.diff(cdf, axis=0), axis=(1, 2)).real


@dataclass(frozen=True)
class ReadingStatistics:
    arrival_probability: float
    mean: float
    second_moment: float
    weak_mean: complex | None
    weak_second_moment: complex | None
    shape_constant: float | None = None

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


def coarse_grain(phi: AmplitudeDistribution, window: GaussianWindow) -> PointerState:
    """Smear ``Phi`` with the window: one shifted ``G`` per functional value."""
    return PointerState(phi.values, phi.amplitudes, window)


def initial_pointer(window: GaussianWindow, initial_amplitude: complex = 1.0) -> PointerState:
    """The pointer before coupling, ``G(f)`` times the system amplitude."""
    return PointerState(np.array([0.0]), np.array([initial_amplitude]), window)


def _weak_from_terms(centers, coefficients):
    try:
        stats = statistics(AmplitudeDistribution(centers, coefficients).as_quasi())
    except ZeroNormalization:
        return None, None
    return stats.mean, stats.second_moment


def reading_moments(psi: PointerState) -> ReadingStatistics:
    """Arrival probability and the first two normalised reading moments.

    Raises
    ------
    VanishingPostSelection
        If the arrival probability is below ``ARRIVAL_FLOOR``.
    """
    m0, m1, m2 = psi.raw_moments()
    if not m0 > ARRIVAL_FLOOR:
        raise VanishingPostSelection(f"arrival probability {m0!r} is numerically zero")
    scale = float(np.sum(np.abs(psi.coefficients) ** 2))
    if m0 < ARRIVAL_WARN * scale:
        warnings.warn(
            f"arrival probability {m0:.3e} is tiny relative to {scale:.3e}; moments are"
            " dominated by rounding",
            RuntimeWarning,
            stacklevel=2,
        )
    weak_mean, weak_second = _weak_from_terms(psi.centers, psi.coefficients)
    return ReadingStatistics(m0, m1 / m0, m2 / m0, weak_mean, weak_second)


def reading_density(psi: PointerState, f):
    return psi.density(f)


def arrival_probability(psi: PointerState) -> float:
    return psi.arrival_probability()


def weak_value_moments(phi: AmplitudeDistribution) -> tuple[complex, complex]:
    """``(f_bar, f2_bar)``: first and second moments of ``Phi`` itself.

    These are amplitude-weighted averages and are free to lie far outside the
    range of ``f``.  Raises ``ZeroNormalization`` when ``sum Phi`` vanishes.
    """
    stats = statistics(phi.as_quasi())
    return stats.mean, stats.second_moment


def two_pathway_mean(a1: float, a2: float, delta_f: float) -> float:
    """Mean reading for real pathway amplitudes at ``f = 1`` and ``f = 2``.

    ``x = exp(-0.5 / df^2)`` is the overlap of the two shifted windows, and the
    mean is ``(a1^2 + 2 a2^2 + 3 a1 a2 x) / (a1^2 + a2^2 + 2 a1 a2 x)``.
    """
    x = math.exp(-0.5 / delta_f**2)
    return (a1 * a1 + 2 * a2 * a2 + 3 * a1 * a2 * x) / (a1 * a1 + a2 * a2 + 2 * a1 * a2 * x)


def shape_constant(phi: AmplitudeDistribution, delta_f: float) -> float:
    """Estimate ``C`` in the weak-limit second moment at one window width.

    ``C = (<f^2> - df^2/4 - |f_bar|^2) / (Re f2_bar - |f_bar|^2)``.  For a
    Gaussian window ``C -> 1/2`` as ``df -> infinity``.
    """
    f1, f2 = weak_value_moments(phi)
    denom = f2.real - abs(f1) ** 2
    if abs(denom) <= 1e-12 * max(1.0, abs(f2), abs(f1) ** 2):
        raise DegenerateFit(
            "Re f2_bar equals |f_bar|^2: the amplitude distribution has no interference"
            " spread to fit C against"
        )
    psi = coarse_grain(phi, GaussianWindow(delta_f))
    m0, _, m2 = psi.raw_moments()
    # pointer term removed before dividing by m0 to avoid cancelling against df^2/4
    excess = (m2 - psi.window.density_variance * m0) / m0
    return (excess - abs(f1) ** 2) / denom


@dataclass(frozen=True)
class SweepPoint:
    delta_f: float
    mean: float
    second_moment: float
    arrival_probability: float


def accuracy_sweep(phi: AmplitudeDistribution, delta_fs: Iterable[float]) -> list[SweepPoint]:
    """Mean reading and arrival probability for each window width, sorted by width."""
    out = []
    for df in sorted(float(x) for x in delta_fs):
        st = reading_moments(coarse_grain(phi, GaussianWindow(df)))
        out.append(SweepPoint(df, st.mean, st.second_moment, st.arrival_probability))
    return out


def log_grid(start: float, stop: float, per_decade: int = 10) -> np.ndarray:
    """Log-spaced widths including both endpoints."""
    n = int(round(per_decade * math.log10(stop / start))) + 1
    return np.logspace(math.log10(start), math.log10(stop), max(n, 2))


@dataclass(frozen=True)
class WeakAsymptoticsReport:
    delta_f: tuple[float, ...]
    weak_mean: complex
    weak_second_moment: complex
    means: tuple[float, ...]
    variances: tuple[float, ...]
    deviations: tuple[float, ...]
    bound_constant: float
    decreasing: bool
    within_bound: bool
    shape_constants: tuple[float, ...] | None

    @property
    def shape_constant(self) -> float | None:
        """The estimate at the widest window, or ``None`` if unidentifiable."""
        return None if self.shape_constants is None else self.shape_constants[-1]


def weak_asymptotics_check(
    phi: AmplitudeDistribution, delta_fs: Sequence[float]
) -> WeakAsymptoticsReport:
    """Check ``<f> -> Re f_bar`` as the window widens and estimate ``C``.

    ``bound_constant`` is the smallest ``c`` with ``deviation <= c / df`` on the
    grid.  When ``C`` cannot be identified the report carries ``None`` rather
    than a guess.
    """
    grid = [float(x) for x in delta_fs]
    if len(grid) < 3 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("need at least three strictly increasing window widths")
    f1, f2 = weak_value_moments(phi)
    stats = [reading_moments(coarse_grain(phi, GaussianWindow(df))) for df in grid]
    devs = [abs(s.mean - f1.real) for s in stats]
    c = max(d * df for d, df in zip(devs, grid))
    decreasing = all(b <= a for a, b in zip(devs, devs[1:]))
    within = all(d <= c / df * (1 + 1e-12) for d, df in zip(devs, grid))
    try:
        shapes = tuple(shape_constant(phi, df) for df in grid)
    except DegenerateFit:
        shapes = None
    return WeakAsymptoticsReport(
        delta_f=tuple(grid),
        weak_mean=f1,
        weak_second_moment=f2,
        means=tuple(s.mean for s in stats),
        variances=tuple(s.variance for s in stats),
        deviations=tuple(devs),
        bound_constant=c,
        decreasing=decreasing,
        within_bound=within,
        shape_constants=shapes,
    )
