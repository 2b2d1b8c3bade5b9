"""Finite-dimensional states, Hamiltonians and exact propagators (hbar = 1).

Basis labels are 1-indexed: for the spin-1/2 system ``|1>`` is spin up and
``|2>`` spin down along z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
ORTHONORMAL_TOL = 1e-12
NORM_TOL = 1e-12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MeasuredObservable:
    """Eigenvalues ``a_k`` and orthonormal eigenvectors (columns) ``|a_k>``."""

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float)
        vals.setflags(write=False)
        basis = _frozen(self.eigenbasis)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise ValueError("eigenbasis must be a square matrix")
        if vals.shape != (basis.shape[1],):
            raise ValueError("need one eigenvalue per eigenvector")
        if not np.all(np.isfinite(vals)):
            raise ValueError("eigenvalues must be finite")
        gram = basis.conj().T @ basis
        if np.max(np.abs(gram - np.eye(len(vals)))) > ORTHONORMAL_TOL:
            raise ValueError("eigenbasis columns are not orthonormal")
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenbasis", basis)

    @classmethod
    def diagonal(cls, eigenvalues) -> "MeasuredObservable":
        """Observable diagonal in the computational basis."""
        return cls(np.asarray(eigenvalues, dtype=float), np.eye(len(eigenvalues)))

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def matrix(self) -> np.ndarray:
        v = self.eigenbasis
        return v @ np.diag(self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class QuantumSystem:
    """A time-independent Hamiltonian (angular-frequency units).

    ``observable`` is an optional canonical measured observable attached by
    preset constructors such as :func:`spin_system`.
    """

    hamiltonian: np.ndarray
    labels: tuple[str, ...] = ()
    observable: MeasuredObservable | None = field(default=None, compare=False)

    def __post_init__(self):
        h = _frozen(self.hamiltonian)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
            raise ValueError("hamiltonian must be a non-empty square matrix")
        if not np.all(np.isfinite(h)):
            raise ValueError("hamiltonian entries must be finite")
        if np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL:
            raise ValueError("hamiltonian is not Hermitian")
        object.__setattr__(self, "hamiltonian", h)
        labels = tuple(self.labels) or tuple(str(k) for k in range(1, h.shape[0] + 1))
        if len(labels) != h.shape[0]:
            raise ValueError("need one label per basis state")
        object.__setattr__(self, "labels", labels)
        if self.observable is not None and self.observable.dimension != h.shape[0]:
            raise ValueError("observable dimension does not match the hamiltonian")

    @property
    def dimension(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen(np.ravel(self.amplitudes))
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ValueError("state amplitudes must be finite and non-empty")
        if abs(np.linalg.norm(a) - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm {np.linalg.norm(a)!r})")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(a / np.linalg.norm(a))

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


def basis_state(dimension: int, k: int) -> PureState:
    """The 1-indexed computational basis state ``|k>``."""
    if not 1 <= k <= dimension:
        raise ValueError(f"basis index {k} outside 1..{dimension}")
    a = np.zeros(dimension, dtype=complex)
    a[k - 1] = 1.0
    return PureState(a)


def propagator(system: QuantumSystem, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the eigendecomposition of the Hermitian ``H``."""
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    energies, vecs = np.linalg.eigh(system.hamiltonian)
    return (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T


def transition_amplitude(final: PureState, unitary: np.ndarray, initial: PureState) -> complex:
    """``<F|U|I>``."""
    u = np.asarray(unitary)
    if u.shape != (final.dimension, initial.dimension):
        raise ValueError(
            f"dimension mismatch: U is {u.shape}, |I> has {initial.dimension},"
            f" |F> has {final.dimension}"
        )
    return complex(final.amplitudes.conj() @ u @ initial.amplitudes)


def spin_system(omega_larmor: float) -> QuantumSystem:
    """Spin-1/2 precessing about x: ``H = omega_L * sigma_x`` in the z basis.

    The attached observable is ``A = 1 |1><1| + 2 |2><2|``, which labels the
    two z states by "slit number".
    """
    if not (np.isfinite(omega_larmor) and omega_larmor > 0):
        raise ValueError(f"Larmor frequency must be positive, got {omega_larmor!r}")
    return QuantumSystem(
        omega_larmor * SIGMA_X,
        labels=("up", "down"),
        observable=MeasuredObservable.diagonal([1.0, 2.0]),
    )


def random_hermitian(dimension: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    return scale * (m + m.conj().T) / 2


def random_state(dimension: int, rng: np.random.Generator) -> PureState:
    return PureState.normalized(rng.normal(size=dimension) + 1j * rng.normal(size=dimension))


def random_unitary(dimension: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
