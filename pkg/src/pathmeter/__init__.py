"""Simulated von Neumann measurements of Feynman-path functionals.

Pathway amplitudes of a finite-dimensional quantum system are grouped by the
value of a path functional, smeared by a Gaussian pointer of adjustable
accuracy and read out under post-selection, next to a classical
inaccurate-meter control.
"""

from .classical import (
    ClassicalRouteModel,
    TrialRecord,
    classical_moments,
    classical_reading_density,
    simulate_trials,
)
from .errors import (
    ConfigError,
    DegenerateFit,
    EnumerationCapExceeded,
    PathMeterError,
    VanishingPostSelection,
    ZeroNormalization,
)
from .experiments import dark_fringe_time, double_slit, pathway_amplitudes
from .meter import (
    GaussianWindow,
    PointerState,
    ReadingStatistics,
    accuracy_sweep,
    arrival_probability,
    coarse_grain,
    reading_density,
    reading_moments,
    shape_constant,
    two_pathway_mean,
    weak_asymptotics_check,
    weak_value_moments,
)
from .pathsum import (
    AmplitudeDistribution,
    Impulse,
    Sampled,
    TimeGrid,
    amplitude_distribution,
    functional_value,
    path_amplitude,
)
from .quantum import (
    MeasuredObservable,
    PureState,
    QuantumSystem,
    basis_state,
    propagator,
    spin_system,
    transition_amplitude,
)
from .quasidist import QuasiDistribution, QuasiStatistics, normalize, statistics

__version__ = "0.1.0"
