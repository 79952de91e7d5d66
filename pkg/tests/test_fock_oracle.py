"""Truncated Fock space: ladder algebra, coherent states, small-state limit."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from emergence_lab import fock_oracle as fo
from emergence_lab.spectral import Lattice, build_klein_gordon, diagonalize


@pytest.fixture(scope="module")
def spec6():
    return diagonalize(build_klein_gordon(1.0, Lattice((6,))))


# ---------------------------------------------------------------------------
# space construction
# ---------------------------------------------------------------------------

def test_single_mode_ladder_entries(spec6):
    space = fo.build_fock(spec6, (0,), n_max=2)
    a = space.lowering[0].toarray()
    assert_allclose(a, [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]])
    adag = space.raising(0).toarray()
    assert_allclose(adag, a.T)


def test_two_mode_dimensions(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=3)
    assert space.dim == 16
    assert space.nmodes == 2


def test_occupations_c_order(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=1)
    assert_allclose(fo.occupations(space), [[0, 0], [0, 1], [1, 0], [1, 1]])


@pytest.mark.parametrize(
    "modes,n_max",
    [((), 4), ((0, 1, 2, 3), 4), ((0, 0), 4), ((99,), 4), ((0,), 0)],
)
def test_build_rejects_bad_modes(spec6, modes, n_max):
    with pytest.raises(ValueError):
        fo.build_fock(spec6, modes, n_max=n_max)


def test_build_rejects_huge_dimension(spec6):
    with pytest.raises(ValueError):
        fo.build_fock(spec6, (0, 1, 2), n_max=99)


def test_commutator_truncation_defect(spec6):
    # [a, adag] = I everywhere except the cut edge, where the defect is -n_max
    space = fo.build_fock(spec6, (0,), n_max=2)
    a = space.lowering[0]
    comm = (a @ space.raising(0) - space.raising(0) @ a).toarray()
    assert_allclose(np.diag(comm), [1.0, 1.0, -2.0])


# ---------------------------------------------------------------------------
# vacuum and one-particle states
# ---------------------------------------------------------------------------

def test_vacuum_is_ground_state(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=4)
    vac = fo.vacuum(space)
    assert vac.norm() == 1.0
    h = fo.fock_hamiltonian(space)
    assert abs(fo.expectation(vac, h)) < 1e-15


def test_one_particle_norm_equals_direction_norm(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=4)
    direction = np.array([0.3, 0.4j])
    state = fo.one_particle(space, direction)
    assert_allclose(state.norm(), np.linalg.norm(direction), atol=1e-12)


def test_one_particle_energy(spec6):
    space = fo.build_fock(spec6, (2,), n_max=4)
    state = fo.one_particle(space, np.array([1.0]))
    h = fo.fock_hamiltonian(space)
    assert fo.expectation(state, h).real == pytest.approx(spec6.frequencies[2])


def test_expectation_rejects_zero_state(spec6):
    space = fo.build_fock(spec6, (0,), n_max=2)
    zero = fo.FockVector(space=space, amplitudes=np.zeros(3, dtype=complex))
    with pytest.raises(ValueError):
        fo.expectation(zero, fo.number_operator(space))


# ---------------------------------------------------------------------------
# coherent states and displacement
# ---------------------------------------------------------------------------

def test_coherent_coefficients_match_closed_form(spec6):
    space = fo.build_fock(spec6, (0,), n_max=10)
    alpha = 0.4 - 0.3j
    coh = fo.coherent_state(space, np.array([alpha]))
    n = np.arange(11)
    expected = np.exp(-0.5 * abs(alpha) ** 2) * alpha**n / np.sqrt(
        [math.factorial(int(k)) for k in n]
    )
    assert_allclose(coh.vector.amplitudes, expected, atol=1e-15)


def test_coherent_lowering_eigenvalue(spec6):
    space = fo.build_fock(spec6, (0,), n_max=14)
    coh = fo.coherent_state(space, np.array([0.5]))
    mean_a = fo.expectation(coh.vector, space.lowering[0].tocsr())
    assert_allclose(mean_a, 0.5, atol=1e-12)
    assert coh.guard_ok
    assert coh.tail_bound < 1e-12


def test_coherent_norm_within_tail_bound(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=8)
    alphas = np.array([0.9, 0.4 + 0.6j])
    coh = fo.coherent_state(space, alphas)
    lost = abs(1.0 - coh.vector.norm() ** 2)
    assert lost <= coh.tail_bound


def test_coherent_guard_flags_large_amplitude(spec6):
    space = fo.build_fock(spec6, (0,), n_max=4)
    coh = fo.coherent_state(space, np.array([2.0]))
    assert not coh.guard_ok


def test_displacement_equals_coherent_product(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=12)
    direction = np.array([0.6, 0.8j])
    z = 0.4 + 0.2j
    disp = fo.displacement(space, direction, z)
    coh = fo.coherent_state(space, z * direction)
    assert_allclose(disp.amplitudes, coh.vector.amplitudes, atol=1e-13)


def test_displacement_requires_unit_direction(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=4)
    with pytest.raises(ValueError):
        fo.displacement(space, np.array([1.0, 1.0]), 0.1)


def test_displacement_is_unitary_on_vacuum(spec6):
    space = fo.build_fock(spec6, (0,), n_max=14)
    disp = fo.displacement(space, np.array([1.0]), 0.3j)
    assert disp.norm() == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

def test_evolution_preserves_norm_and_phases(spec6):
    space = fo.build_fock(spec6, (0, 1), n_max=6)
    coh = fo.coherent_state(space, np.array([0.4, 0.3j]))
    evolved = fo.evolve_fock(coh.vector, 2.5)
    assert evolved.norm() == pytest.approx(coh.vector.norm(), abs=1e-14)


def test_coherent_state_keeps_its_shape(spec6):
    # evolution maps a coherent state to the coherent state of rotated alphas
    space = fo.build_fock(spec6, (0, 2), n_max=10)
    alphas = np.array([0.5, 0.2 - 0.4j])
    t = 1.7
    evolved = fo.evolve_fock(fo.coherent_state(space, alphas).vector, t)
    rotated = fo.coherent_state(space, alphas * np.exp(-1j * space.frequencies * t))
    assert_allclose(evolved.amplitudes, rotated.vector.amplitudes, atol=1e-13)


def test_one_particle_evolution_is_a_phase(spec6):
    space = fo.build_fock(spec6, (1,), n_max=3)
    state = fo.one_particle(space, np.array([1.0]))
    t = 0.9
    evolved = fo.evolve_fock(state, t)
    phase = np.exp(-1j * space.frequencies[0] * t)
    assert_allclose(evolved.amplitudes, phase * state.amplitudes, atol=1e-14)


# ---------------------------------------------------------------------------
# small-state limit
# ---------------------------------------------------------------------------

def test_small_state_quadratic_residual(spec6):
    space = fo.build_fock(spec6, (0,), n_max=14)
    report = fo.small_state_limit_check(
        space, np.array([1.0]), np.geomspace(0.02, 0.2, 8)
    )
    assert abs(report.exponent - 2.0) < 0.1
    # the second-order term has norm sqrt(3)/2 * lambda^2 exactly
    ratio = report.residuals[-1] / report.lams[-1] ** 2
    assert abs(ratio - np.sqrt(3.0) / 2.0) < 0.02


def test_small_state_rejects_large_lambda(spec6):
    space = fo.build_fock(spec6, (0,), n_max=8)
    with pytest.raises(ValueError):
        fo.small_state_limit_check(space, np.array([1.0]), np.array([0.5]))
    with pytest.raises(ValueError):
        fo.small_state_limit_check(space, np.array([1.0]), np.array([-0.1]))
