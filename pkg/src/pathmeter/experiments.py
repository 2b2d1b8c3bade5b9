"""The two-pathway spin experiment: a spin-1/2 as a double slit.

The spin precesses under ``H = omega_L sigma_x``, is prepared and post-selected
in ``|1>`` (up along z), and the meter asks which z state it occupied half-way,
at ``T/2``.  The two states play the part of two slits.  With
``omega_L T = arccos(1/203)`` the final state sits on a dark fringe and the
weak value of the slit number is -100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pathsum import AmplitudeDistribution, Impulse, TimeGrid, amplitude_distribution
from .quantum import MeasuredObservable, PureState, QuantumSystem, basis_state, spin_system

DARK_FRINGE_COS = 1.0 / 203.0


def dark_fringe_time(omega_larmor: float = 1.0) -> float:
    """``arccos(1/203) / omega_L``, about ``1.5659 / omega_L``."""
    return math.acos(DARK_FRINGE_COS) / omega_larmor


@dataclass(frozen=True)
class DoubleSlit:
    system: QuantumSystem
    observable: MeasuredObservable
    initial: PureState
    final: PureState
    grid: TimeGrid
    phi: AmplitudeDistribution

    @property
    def omega_larmor(self) -> float:
        return float(self.system.hamiltonian[0, 1].real)


def double_slit(
    omega_larmor: float = 1.0, total_time: float | None = None, slices: int = 2
) -> DoubleSlit:
    """Build the experiment and its amplitude distribution over slit numbers.

    ``slices`` must be even so that ``T/2`` falls on a node.
    """
    if total_time is None:
        total_time = dark_fringe_time(omega_larmor)
    if slices % 2:
        raise ValueError(f"slices must be even to put T/2 on a node, got {slices}")
    system = spin_system(omega_larmor)
    up = basis_state(2, 1)
    grid = TimeGrid(total_time, slices)
    phi = amplitude_distribution(
        system, system.observable, up, up, grid, Impulse(total_time / 2.0)
    )
    return DoubleSlit(system, system.observable, up, up, grid, phi)


def pathway_amplitudes(omega_larmor: float, total_time: float) -> tuple[float, float]:
    """Closed forms ``A(1) = cos^2(w T/2)`` and ``A(2) = -sin^2(w T/2)``."""
    half = omega_larmor * total_time / 2.0
    return math.cos(half) ** 2, -math.sin(half) ** 2
