"""Tests for continuum kernel asymptotics and the lattice comparison."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from emergence_lab.asymptotics import (
    BranchStructure,
    SymbolPolynomial,
    branch_cut_kernel,
    direct_radial_integral,
    find_branch_points,
    kernel_decay_rate,
    lattice_vs_continuum,
    predict_compton,
    rescale_symbol,
    self_energy,
)
from emergence_lab.spectral import AxiomError

KG = SymbolPolynomial.klein_gordon(1.0)
TWO_FACTOR = SymbolPolynomial(coeffs=(4.0, 5.0, 1.0))  # (s + 1)(s + 4)


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------


def test_klein_gordon_symbol():
    sym = SymbolPolynomial.klein_gordon(2.5)
    assert sym.coeffs == (6.25, 1.0)
    assert sym.degree == 1
    assert sym(3.0) == pytest.approx(9.25)


def test_symbol_derivative():
    assert TWO_FACTOR.derivative(2.0) == pytest.approx(5.0 + 4.0)


def test_symbol_validation():
    with pytest.raises(ValueError, match="degree"):
        SymbolPolynomial(coeffs=(1.0,))
    with pytest.raises(ValueError, match="leading"):
        SymbolPolynomial(coeffs=(1.0, 0.0))
    with pytest.raises(AxiomError, match="positive at k = 0"):
        SymbolPolynomial(coeffs=(0.0, 1.0))
    with pytest.raises(AxiomError, match="mass"):
        SymbolPolynomial.klein_gordon(0.0)


def test_self_energy_values():
    np.testing.assert_allclose(
        self_energy(KG, np.array([0.0, 1.0, 2.0])), [1.0, 2.0, 5.0]
    )


@pytest.mark.parametrize("c", [0.5, 2.0, 3.0])
def test_rescale_moves_compton_exactly(c):
    assert predict_compton(rescale_symbol(KG, c)) == pytest.approx(c, rel=1e-14)


def test_rescale_coefficient_law():
    scaled = rescale_symbol(TWO_FACTOR, 2.0)
    assert scaled.coeffs == (4.0, 20.0, 16.0)


def test_rescale_rejects_nonpositive():
    with pytest.raises(ValueError, match="scale"):
        rescale_symbol(KG, 0.0)


# ---------------------------------------------------------------------------
# branch structure
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("mass", [0.5, 1.0, 2.5])
def test_single_branch_point_at_i_mass(mass):
    bs = find_branch_points(SymbolPolynomial.klein_gordon(mass))
    assert bs.zeros.shape == (1,)
    assert bs.zeros[0] == pytest.approx(1j * mass)
    assert bs.compton == pytest.approx(1.0 / mass, rel=1e-14)


def test_two_factor_dominant_is_lighter():
    bs = find_branch_points(TWO_FACTOR)
    imags = sorted(z.imag for z in bs.zeros)
    np.testing.assert_allclose(imags, [1.0, 2.0], rtol=1e-12)
    assert bs.zeros[bs.dominant].imag == pytest.approx(1.0)
    assert bs.compton == pytest.approx(1.0)


def test_real_zero_violates_axioms():
    # (s - 1)(s - 4) is positive at s = 0 but vanishes on the real k axis
    with pytest.raises(AxiomError, match="real nonnegative zero"):
        find_branch_points(SymbolPolynomial(coeffs=(4.0, -5.0, 1.0)))


def test_branch_structure_is_plain_data():
    bs = find_branch_points(KG)
    assert isinstance(bs, BranchStructure)
    assert bs.s_roots[0] == pytest.approx(-1.0)


# ---------------------------------------------------------------------------
# kernels against closed forms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("mass,r", [(1.0, 3.0), (1.0, 7.0), (2.0, 4.0)])
def test_inverse_sqrt_kernel_is_bessel(mass, r):
    # (-Lap + m^2)^{-1/2} in three dimensions: m K1(m r) / (2 pi^2 r)
    sym = SymbolPolynomial.klein_gordon(mass)
    got = branch_cut_kernel(sym, -0.5, r)
    want = mass * special.k1(mass * r) / (2.0 * math.pi**2 * r)
    assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("mass,r", [(1.0, 2.0), (1.5, 5.0)])
def test_inverse_kernel_is_yukawa(mass, r):
    # lambda = -1 collapses to the residue at the pole: exp(-m r) / (4 pi r)
    sym = SymbolPolynomial.klein_gordon(mass)
    got = branch_cut_kernel(sym, -1.0, r)
    want = math.exp(-mass * r) / (4.0 * math.pi * r)
    assert got == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("sym", [KG, TWO_FACTOR], ids=["kg", "two-factor"])
@pytest.mark.parametrize("lam", [-0.5, -1.0])
@pytest.mark.parametrize("r", [2.0, 4.0, 8.0])
def test_contour_and_direct_routes_agree(sym, lam, r):
    a = branch_cut_kernel(sym, lam, r)
    b = direct_radial_integral(sym, lam, r)
    assert a == pytest.approx(b, rel=1e-4)
    # both routes are far better than the gate in practice
    assert abs(a - b) <= 1e-8 * abs(b)


def test_divergent_exponent_rejected():
    with pytest.raises(ValueError, match="diverges"):
        branch_cut_kernel(KG, 0.5, 1.0)
    with pytest.raises(ValueError, match="diverges"):
        direct_radial_integral(KG, 0.5, 1.0)


def test_other_negative_integers_not_implemented():
    with pytest.raises(NotImplementedError):
        branch_cut_kernel(KG, -2.0, 1.0)


def test_nonpositive_radius_rejected():
    with pytest.raises(ValueError, match="radius"):
        branch_cut_kernel(KG, -0.5, 0.0)
    with pytest.raises(ValueError, match="radius"):
        direct_radial_integral(KG, -0.5, -1.0)


def test_kernel_positive_and_decreasing():
    values = [branch_cut_kernel(KG, -0.5, r) for r in np.linspace(1.0, 12.0, 12)]
    assert all(v > 0 for v in values)
    assert all(b < a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# decay rates
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "sym,lam,rate",
    [
        (KG, -0.5, 1.004037),
        (KG, -1.0, 1.0),
        (SymbolPolynomial.klein_gordon(2.0), -0.5, 2.008074),
        (TWO_FACTOR, -0.5, 1.007870),
        (TWO_FACTOR, -1.0, 0.999632),
    ],
    ids=["kg-sqrt", "kg-yukawa", "kg-m2-sqrt", "two-sqrt", "two-yukawa"],
)
def test_decay_rate_matches_branch_point(sym, lam, rate):
    fit = kernel_decay_rate(sym, lam)
    assert fit.ok
    assert fit.rel_dev <= 0.01
    assert fit.rate == pytest.approx(rate, rel=1e-4)
    # the removed algebraic prefactor is r^(lam + 2)
    assert fit.prefactor_power == lam + 2.0


def test_decay_rate_window_default():
    fit = kernel_decay_rate(SymbolPolynomial.klein_gordon(2.0), -1.0)
    assert fit.window == (2.5, 7.5)
    assert fit.expected == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# lattice refinement
# ---------------------------------------------------------------------------


def test_lattice_approaches_continuum():
    cmp = lattice_vs_continuum(1.0)
    assert cmp.ok
    assert cmp.monotone
    assert cmp.continuum_length == 1.0
    devs = [res.deviation for res in cmp.results]
    # frozen: refining a=1.0 -> 0.5 shrinks the deviation about 3.5x
    assert devs[0] == pytest.approx(0.0412, rel=0.02)
    assert devs[1] == pytest.approx(0.0118, rel=0.02)
    assert cmp.results[0].nsites == 512
    assert cmp.results[1].nsites == 1024


def test_lattice_too_small_rejected():
    with pytest.raises(ValueError, match="too small"):
        lattice_vs_continuum(0.05)
