"""Statistics of unnormalised, possibly signed or complex, discrete distributions.

A proper probability distribution has a mean inside its support and a real
standard deviation.  Once the weights are allowed to change sign, or become
complex, neither property survives: with rho(1) = -1.1 and rho(2) = 1 the
"mean" is -9 and the "standard deviation" is purely imaginary.

>>> stats = statistics(QuasiDistribution.from_pairs([(1, -1.1), (2, 1.0)]))
>>> round(stats.mean.real, 12), round(stats.std_dev.imag, 2)
(-9.0, 10.49)
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ZeroNormalization

#: Relative threshold on |sum(rho)| / sum(|rho|) below which the
#: normalisation is treated as zero.
EPS_NORM = 1e-12
#: Support values closer than this are merged into a single point.
MERGE_TOL = 1e-9


def merge_support(values: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Sort by value and sum the weights of values closer than `tol`.

    Consecutive values are chained, so a run of points each within `tol` of its
    neighbour collapses to one point located at the first (smallest) value.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=complex)
    if values.size == 0:
        return values, weights
    order = np.argsort(values, kind="stable")
    values = values[order]
    weights = weights[order]
    starts = np.concatenate(([True], np.diff(values) >= tol))
    idx = np.flatnonzero(starts)
    return values[idx], np.add.reduceat(weights, idx)


@dataclass(frozen=True)
class QuasiDistribution:
    """Finite support points with complex, unnormalised weights.

    Use :meth:`from_pairs` to build one; it merges near-duplicate support
    values and validates the invariants.
    """

    values: tuple[float, ...]
    weights: tuple[complex, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("a quasi-distribution needs at least one point")
        if len(self.values) != len(self.weights):
            raise ValueError("values and weights differ in length")
        if not all(np.isfinite(self.values)) or not all(np.isfinite(self.weights)):
            raise ValueError("values and weights must be finite")
        if all(w == 0 for w in self.weights):
            raise ValueError("at least one weight must be nonzero")
        v = np.sort(np.asarray(self.values))
        if v.size > 1 and np.min(np.diff(v)) < MERGE_TOL:
            raise ValueError("support values must be distinct; use from_pairs to merge")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, complex]]) -> "QuasiDistribution":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("a quasi-distribution needs at least one point")
        values, weights = merge_support(
            np.array([p[0] for p in pairs], dtype=float),
            np.array([p[1] for p in pairs], dtype=complex),
        )
        return cls(tuple(float(v) for v in values), tuple(complex(w) for w in weights))

    def scaled(self, c: complex) -> "QuasiDistribution":
        return QuasiDistribution(self.values, tuple(c * w for w in self.weights))

    @property
    def normalization(self) -> complex:
        return complex(np.sum(self.weights))

    def pairs(self) -> list[tuple[float, complex]]:
        return list(zip(self.values, self.weights))


@dataclass(frozen=True)
class QuasiStatistics:
    mean: complex
    second_moment: complex
    std_dev: complex
    normalization: complex


def _check_normalization(dist: QuasiDistribution) -> complex:
    total = dist.normalization
    scale = float(np.sum(np.abs(dist.weights)))
    if abs(total) < EPS_NORM * scale:
        raise ZeroNormalization(
            f"sum of weights {total!r} vanishes relative to their total magnitude {scale!r}"
        )
    return total


def normalize(dist: QuasiDistribution) -> list[tuple[float, complex]]:
    """Divide every weight by the (complex) sum of weights.

    The result sums to one.  Its real part is the first term of the
    decomposition w = w1 + i w2 with ``w1 = (A1 rho1 + A2 rho2) / (A1^2 + A2^2)``
    and ``w2 = (A1 rho2 - A2 rho1) / (A1^2 + A2^2)``, where ``A1 + i A2`` is the
    sum of weights; see :func:`decompose`.

    Raises
    ------
    ZeroNormalization
        If the sum of weights is below ``EPS_NORM`` times the sum of their moduli.
    """
    total = _check_normalization(dist)
    return [(f, w / total) for f, w in dist.pairs()]


def decompose(dist: QuasiDistribution) -> list[tuple[float, float, float]]:
    """Return ``(f, w1, w2)`` built explicitly from real and imaginary parts."""
    total = _check_normalization(dist)
    a1, a2 = total.real, total.imag
    denom = a1 * a1 + a2 * a2
    out = []
    for f, w in dist.pairs():
        r1, r2 = w.real, w.imag
        out.append((f, (a1 * r1 + a2 * r2) / denom, (a1 * r2 - a2 * r1) / denom))
    return out


def statistics(dist: QuasiDistribution) -> QuasiStatistics:
    """Mean, second moment and (principal-branch) standard deviation.

    ``std_dev`` is the principal square root of ``second_moment - mean**2``;
    for a negative real variance it is ``+i`` times a positive number.
    """
    total = _check_normalization(dist)
    f = np.asarray(dist.values)
    w = np.asarray(dist.weights)
    mean = complex(np.sum(f * w) / total)
    second = complex(np.sum(f * f * w) / total)
    # centred form: identical to second - mean**2, but non-negative term by
    # term for positive weights
    variance = complex(np.sum((f - mean) ** 2 * w) / total)
    if variance.imag == 0.0:
        variance = complex(variance.real, 0.0)
    return QuasiStatistics(mean, second, cmath.sqrt(variance), total)
