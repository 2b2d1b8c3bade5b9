import itertools
import math
from collections import defaultdict

import numpy as np
import pytest

from pathmeter.errors import EnumerationCapExceeded
from pathmeter.experiments import dark_fringe_time, pathway_amplitudes
from pathmeter.pathsum import (
    AmplitudeDistribution,
    Impulse,
    Sampled,
    TimeGrid,
    amplitude_distribution,
    exact_amplitude,
    functional_value,
    path_amplitude,
)
from pathmeter.quantum import (
    MeasuredObservable,
    QuantumSystem,
    basis_state,
    propagator,
    random_hermitian,
    random_state,
    random_unitary,
    spin_system,
    transition_amplitude,
)

T = dark_fringe_time()
SPIN = spin_system(1.0)
OBS = SPIN.observable
UP = basis_state(2, 1)


def test_single_step_path():
    amp = path_amplitude(SPIN, OBS, UP, UP, TimeGrid(T, 1), (1, 1))
    assert amp == pytest.approx(math.cos(T), abs=1e-15)


def test_two_step_paths():
    grid = TimeGrid(T, 2)
    a1, a2 = pathway_amplitudes(1.0, T)
    assert path_amplitude(SPIN, OBS, UP, UP, grid, (1, 1, 1)) == pytest.approx(a1, abs=1e-15)
    assert path_amplitude(SPIN, OBS, UP, UP, grid, (1, 2, 1)) == pytest.approx(a2, abs=1e-15)
    assert a1 == pytest.approx(102 / 203, abs=1e-15)
    assert a2 == pytest.approx(-101 / 203, abs=1e-15)


def test_path_index_out_of_range():
    with pytest.raises(IndexError):
        path_amplitude(SPIN, OBS, UP, UP, TimeGrid(T, 2), (1, 3, 1))
    with pytest.raises(ValueError):
        path_amplitude(SPIN, OBS, UP, UP, TimeGrid(T, 2), (1, 1))


def test_functional_constant_beta():
    grid = TimeGrid(2.5, 5)
    for k, a in ((1, 1.0), (2, 2.0)):
        val = functional_value((k,) * 6, OBS, grid, Sampled.constant(1.0, grid))
        assert val == pytest.approx(a * 2.5, abs=1e-14)


def test_functional_impulse_midpoint():
    grid = TimeGrid(T, 2)
    assert functional_value((1, 2, 1), OBS, grid, Impulse(T / 2)) == 2
    assert functional_value((2, 1, 2), OBS, grid, Impulse(T / 2)) == 1


def test_impulse_node_rules():
    grid = TimeGrid(1.0, 4)
    assert Impulse(0.5).node_index(grid) == 2
    assert Impulse(0.3).node_index(grid) == 1  # inside slice -> left node
    assert Impulse(0.25 + 1e-13).node_index(grid) == 1
    with pytest.raises(ValueError):
        Impulse(1.0).node_index(grid)
    with pytest.raises(ValueError):
        Impulse(0.0).node_index(grid)


def test_sampled_length_must_match_grid():
    with pytest.raises(ValueError):
        Sampled((1.0, 2.0)).node_weights(TimeGrid(1.0, 3))


def test_double_slit_distribution():
    phi = amplitude_distribution(SPIN, OBS, UP, UP, TimeGrid(T, 2), Impulse(T / 2))
    assert list(phi.values) == [1.0, 2.0]
    np.testing.assert_allclose(phi.amplitudes, [102 / 203, -101 / 203], atol=1e-12)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_refinement_independence(n):
    # resolving the identity at the extra interior nodes leaves the two pathways
    # unchanged, so every even N reproduces the N = 2 amplitudes
    phi = amplitude_distribution(SPIN, OBS, UP, UP, TimeGrid(T, n), Impulse(T / 2))
    np.testing.assert_allclose(phi.values, [1.0, 2.0])
    np.testing.assert_allclose(phi.amplitudes, [102 / 203, -101 / 203], atol=1e-10)


def test_one_level_system():
    sys1 = QuantumSystem(np.array([[0.7]]))
    obs = MeasuredObservable.diagonal([3.0])
    s = basis_state(1, 1)
    grid = TimeGrid(2.0, 4)
    beta = Sampled((0.5, 1.0, 1.5, 2.0))
    phi = amplitude_distribution(sys1, obs, s, s, grid, beta)
    assert len(phi) == 1
    assert phi.values[0] == pytest.approx(3.0 * (0.5 + 1.0 + 1.5 + 2.0) * 0.5)
    assert phi.amplitudes[0] == pytest.approx(np.exp(-0.7j * 2.0), abs=1e-14)


def _brute_force(system, obs, i, f, grid, beta):
    d = system.dimension
    bins = defaultdict(complex)
    for path in itertools.product(range(1, d + 1), repeat=grid.slices + 1):
        key = round(functional_value(path, obs, grid, beta), 9)
        bins[key] += path_amplitude(system, obs, i, f, grid, path)
    return bins


def test_matches_explicit_enumeration():
    rng = np.random.default_rng(3)
    system = QuantumSystem(random_hermitian(3, rng))
    obs = MeasuredObservable(rng.normal(size=3).round(1), random_unitary(3, rng))
    i, f = random_state(3, rng), random_state(3, rng)
    grid = TimeGrid(1.3, 4)
    beta = Sampled((0.2, -1.0, 0.5, 1.0))
    phi = amplitude_distribution(system, obs, i, f, grid, beta)
    bins = _brute_force(system, obs, i, f, grid, beta)
    assert len(bins) == len(phi)
    for val, amp in phi.entries():
        assert amp == pytest.approx(bins[round(val, 9)], abs=1e-13)


def _random_setup(rng, d, n):
    system = QuantumSystem(random_hermitian(d, rng))
    obs = MeasuredObservable(rng.integers(-2, 3, size=d).astype(float), random_unitary(d, rng))
    i, f = random_state(d, rng), random_state(d, rng)
    grid = TimeGrid(float(rng.uniform(0.1, 3.0)), n)
    if rng.random() < 0.5:
        beta = Impulse(float(rng.uniform(0.01, 0.99)) * grid.total_time)
    else:
        beta = Sampled(tuple(rng.normal(size=n)))
    return system, obs, i, f, grid, beta


def test_conservation_every_n():
    rng = np.random.default_rng(5)
    for d in (2, 3):
        for n in range(1, 7):
            for _ in range(3):
                system, obs, i, f, grid, beta = _random_setup(rng, d, n)
                phi = amplitude_distribution(system, obs, i, f, grid, beta)
                exact = transition_amplitude(f, propagator(system, grid.total_time), i)
                assert abs(phi.total() - exact) < 1e-10
                assert exact_amplitude(phi) == pytest.approx(exact, abs=1e-15)


def test_chunking_does_not_change_result():
    rng = np.random.default_rng(9)
    system, obs, i, f, grid, beta = _random_setup(rng, 3, 6)
    beta = Sampled(tuple(rng.integers(-2, 3, size=6).astype(float)))
    ref = amplitude_distribution(system, obs, i, f, grid, beta)
    for chunk in (1, 7, 100, 3**7):
        phi = amplitude_distribution(system, obs, i, f, grid, beta, chunk_size=chunk)
        np.testing.assert_allclose(phi.values, ref.values, atol=1e-12)
        np.testing.assert_allclose(phi.amplitudes, ref.amplitudes, atol=1e-12)


def test_probability_dichotomy():
    phi = amplitude_distribution(SPIN, OBS, UP, UP, TimeGrid(T, 4), Impulse(T / 2))
    half = propagator(SPIN, T / 2)
    # interfering: |<1|U(T)|1>|^2; decohered: sum over mid-time states of |<1|U|k><k|U|1>|^2
    assert phi.interfering_probability() == pytest.approx(1 / 41209, rel=1e-9)
    decohered = sum(abs(half[0, k] * half[k, 0]) ** 2 for k in range(2))
    assert phi.decohered_probability() == pytest.approx(decohered, rel=1e-12)
    assert decohered == pytest.approx(math.cos(T / 2) ** 4 + math.sin(T / 2) ** 4, rel=1e-12)


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded) as info:
        amplitude_distribution(SPIN, OBS, UP, UP, TimeGrid(T, 30), Impulse(T / 2))
    assert (info.value.dimension, info.value.slices) == (2, 30)
    with pytest.raises(EnumerationCapExceeded):
        amplitude_distribution(SPIN, OBS, UP, UP, TimeGrid(T, 4), Impulse(T / 2), cap=16)


def test_from_pairs_merges_and_sorts():
    phi = AmplitudeDistribution.from_pairs([(2.0, 1.0), (1.0, 0.5j), (2.0 + 1e-12, 1.0)])
    assert list(phi.values) == [1.0, 2.0]
    np.testing.assert_allclose(phi.amplitudes, [0.5j, 2.0])
