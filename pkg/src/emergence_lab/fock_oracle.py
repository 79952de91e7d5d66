"""Brute-force Fock-space oracle on a few selected modes.

Everything here is deliberately naive: occupation-number bases, explicit
sparse ladder matrices, truncated exponential series. The point is to have an
independent slow path whose only approximation is the occupation cutoff
``n_max`` (with a computable tail bound), so that closed-form expressions used
elsewhere in the package can be checked against direct matrix algebra.

States live on a subset of at most three modes of a Spectrum; the basis is
the tensor product of per-mode number states 0..n_max, first selected mode
outermost (C order).
"""
from __future__ import annotations

import dataclasses
import math
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .spectral import Spectrum

MAX_MODES = 3
MAX_DIM = 100_000
SERIES_RTOL = 1e-18
MAX_SERIES_TERMS = 400
GUARD_FRACTION = 0.25  # |alpha| above n_max * this triggers the truncation flag


@dataclasses.dataclass(frozen=True)
class FockSpace:
    """Truncated multi-mode oscillator Hilbert space."""

    spectrum: Spectrum
    mode_indices: tuple[int, ...]
    n_max: int
    frequencies: np.ndarray
    lowering: tuple[sp.csr_matrix, ...]

    @property
    def nmodes(self) -> int:
        return len(self.mode_indices)

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** self.nmodes

    def raising(self, j: int) -> sp.csr_matrix:
        return self.lowering[j].T.tocsr()


@dataclasses.dataclass(frozen=True)
class FockVector:
    """State vector in a FockSpace occupation basis."""

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.shape != (self.space.dim,):
            raise ValueError(f"{a.shape[0]} amplitudes for dimension {self.space.dim}")
        object.__setattr__(self, "amplitudes", a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def build_fock(spec: Spectrum, mode_indices: tuple[int, ...], n_max: int = 14) -> FockSpace:
    """Assemble ladder matrices for the selected modes.

    The per-mode lowering matrix has entries a[n-1, n] = sqrt(n); multi-mode
    operators are Kronecker products with identities on the other factors.
    """
    modes = tuple(int(k) for k in mode_indices)
    if not 1 <= len(modes) <= MAX_MODES:
        raise ValueError(f"oracle supports 1..{MAX_MODES} modes, got {len(modes)}")
    if len(set(modes)) != len(modes):
        raise ValueError(f"repeated mode indices {modes}")
    if not all(0 <= k < spec.nmodes for k in modes):
        raise ValueError(f"mode indices {modes} out of range for {spec.nmodes} modes")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    dim = (n_max + 1) ** len(modes)
    if dim > MAX_DIM:
        raise ValueError(f"truncated dimension {dim} exceeds {MAX_DIM}")
    single = sp.diags(np.sqrt(np.arange(1.0, n_max + 1)), 1, format="csr")
    eye = sp.identity(n_max + 1, format="csr")
    lowering = []
    for j in range(len(modes)):
        factors = [eye] * len(modes)
        factors[j] = single
        lowering.append(reduce(lambda a, b: sp.kron(a, b, format="csr"), factors))
    return FockSpace(
        spectrum=spec,
        mode_indices=modes,
        n_max=n_max,
        frequencies=spec.frequencies[list(modes)].copy(),
        lowering=tuple(lowering),
    )


def occupations(space: FockSpace) -> np.ndarray:
    """Integer table (dim, nmodes): occupation of each mode per basis state."""
    shape = (space.n_max + 1,) * space.nmodes
    idx = np.unravel_index(np.arange(space.dim), shape)
    return np.stack(idx, axis=1)


def vacuum(space: FockSpace) -> FockVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(space=space, amplitudes=amps)


def _mode_coefficients(alpha: complex, n_max: int) -> np.ndarray:
    """Coefficients of a single-mode coherent state, exp(-|a|^2/2) a^n/sqrt(n!)."""
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_tail_bound(space: FockSpace, alphas: np.ndarray) -> float:
    """Upper bound on the squared norm lost to the occupation cutoff.

    Per mode the dropped weight is exp(-|a|^2) sum_{n>n_max} |a|^{2n}/n!,
    bounded by the first dropped term times e^{|a|^2}; summing the per-mode
    first terms is the bound reported here.
    """
    total = 0.0
    for a in np.asarray(alphas, dtype=complex):
        x = abs(a) ** 2
        if x == 0.0:
            continue
        log_term = -x + (space.n_max + 1) * math.log(x) - math.lgamma(space.n_max + 2)
        total += math.exp(log_term + x)  # geometric-tail safety factor e^x
    return total


@dataclasses.dataclass(frozen=True)
class CoherentState:
    """Truncated coherent state plus honesty metadata about the cutoff."""

    vector: FockVector
    tail_bound: float
    guard_ok: bool


def coherent_state(space: FockSpace, alphas: np.ndarray) -> CoherentState:
    """Product coherent state with per-mode amplitudes ``alphas``.

    guard_ok is False when any |alpha_k| exceeds n_max/4; the state is still
    returned, with the tail bound quantifying how much norm the cutoff lost.
    """
    a = np.asarray(alphas, dtype=complex).reshape(-1)
    if a.shape != (space.nmodes,):
        raise ValueError(f"{a.shape[0]} amplitudes for {space.nmodes} modes")
    vecs = [_mode_coefficients(ak, space.n_max) for ak in a]
    amps = reduce(np.kron, vecs)
    guard_ok = bool(np.all(np.abs(a) <= GUARD_FRACTION * space.n_max))
    return CoherentState(
        vector=FockVector(space=space, amplitudes=amps),
        tail_bound=coherent_tail_bound(space, a),
        guard_ok=guard_ok,
    )


def one_particle(space: FockSpace, direction: np.ndarray) -> FockVector:
    """sum_k alpha_k adag_k |0>; squared norm is sum |alpha_k|^2 exactly."""
    a = np.asarray(direction, dtype=complex).reshape(-1)
    if a.shape != (space.nmodes,):
        raise ValueError(f"{a.shape[0]} amplitudes for {space.nmodes} modes")
    vac = vacuum(space).amplitudes
    out = np.zeros_like(vac)
    for k, ak in enumerate(a):
        if ak != 0:
            out += ak * (space.raising(k) @ vac)
    return FockVector(space=space, amplitudes=out)


def displacement(space: FockSpace, direction: np.ndarray, z: complex) -> FockVector:
    """Displaced vacuum exp(z A - conj(z) A^dag ... )|0> for A^dag = sum alpha_k adag_k.

    ``direction`` must be normalized (sum |alpha_k|^2 = 1). Acting on the
    vacuum the operator reduces to exp(-|z|^2/2) exp(z A^dag)|0>, evaluated
    as a plain power series until terms fall below SERIES_RTOL.
    """
    a = np.asarray(direction, dtype=complex).reshape(-1)
    if a.shape != (space.nmodes,):
        raise ValueError(f"{a.shape[0]} amplitudes for {space.nmodes} modes")
    nrm = float(np.linalg.norm(a))
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"direction norm {nrm} is not 1; normalize it first")
    adag = sum(
        complex(z) * ak * space.raising(k) for k, ak in enumerate(a) if ak != 0
    )
    amps = vacuum(space).amplitudes
    term = amps.copy()
    for n in range(1, MAX_SERIES_TERMS + 1):
        term = (adag @ term) / n
        amps = amps + term
        if np.linalg.norm(term) < SERIES_RTOL * np.linalg.norm(amps):
            break
    return FockVector(space=space, amplitudes=math.exp(-0.5 * abs(z) ** 2) * amps)


def number_operator(space: FockSpace, mode: int | None = None) -> sp.csr_matrix:
    """adag_k a_k for one mode, or the total number operator."""
    if mode is not None:
        return (space.raising(mode) @ space.lowering[mode]).tocsr()
    total = sum(space.raising(k) @ space.lowering[k] for k in range(space.nmodes))
    return total.tocsr()


def field_operator(space: FockSpace, site: int, which: str = "phi") -> sp.csr_matrix:
    """Field operator at one site, restricted to the oracle's modes.

    phi(x) = sum_k f_k(x)/sqrt(2 w_k) (a_k + adag_k)
    pi(x)  = sum_k sqrt(w_k/2) f_k(x) i (adag_k - a_k)

    With only a mode subset these satisfy the canonical commutator up to the
    missing modes' completeness defect.
    """
    basis = space.spectrum.basis
    op = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for j, k in enumerate(space.mode_indices):
        f = basis[site, k]
        w = space.frequencies[j]
        if which == "phi":
            op = op + (f / math.sqrt(2.0 * w)) * (space.lowering[j] + space.raising(j))
        elif which == "pi":
            op = op + math.sqrt(w / 2.0) * f * (1j * (space.raising(j) - space.lowering[j]))
        else:
            raise ValueError(f"unknown field {which!r}; use 'phi' or 'pi'")
    return op.tocsr()


def fock_hamiltonian(space: FockSpace) -> sp.csr_matrix:
    """H = sum_k w_k adag_k a_k (normal ordered; vacuum energy dropped)."""
    h = sum(
        space.frequencies[k] * (space.raising(k) @ space.lowering[k])
        for k in range(space.nmodes)
    )
    return h.tocsr()


def evolve_fock(state: FockVector, t: float) -> FockVector:
    """Exact evolution by the diagonal Hamiltonian: phases exp(-i E_n t)."""
    energies = occupations(state.space) @ state.space.frequencies
    return FockVector(
        space=state.space,
        amplitudes=state.amplitudes * np.exp(-1j * energies * t),
    )


def expectation(state: FockVector, op: sp.spmatrix) -> complex:
    """Normalized matrix element <s|op|s> / <s|s>."""
    n2 = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if n2 < 1e-300:
        raise ValueError("cannot take an expectation in a zero state")
    return complex(np.vdot(state.amplitudes, op @ state.amplitudes)) / n2


@dataclasses.dataclass(frozen=True)
class SmallStateReport:
    """Residuals of D(lambda)|0> against |0> + lambda |particle>."""

    lams: np.ndarray
    residuals: np.ndarray
    exponent: float
    coefficient: float


def small_state_limit_check(
    space: FockSpace, direction: np.ndarray, lams: np.ndarray
) -> SmallStateReport:
    """Measure how fast the displaced vacuum approaches vacuum + particle.

    The residual norm scales as coefficient * lambda^exponent; the exponent
    is fitted in log-log. Quadratic scaling is what makes single particles
    dominate weakly excited states.
    """
    lams = np.asarray(lams, dtype=float).reshape(-1)
    if np.any(lams <= 0) or np.any(lams > 0.3):
        raise ValueError("lambdas must lie in (0, 0.3]")
    vac = vacuum(space).amplitudes
    part = one_particle(space, direction).amplitudes
    residuals = np.empty_like(lams)
    for i, lam in enumerate(lams):
        disp = displacement(space, direction, lam).amplitudes
        residuals[i] = np.linalg.norm(disp - (vac + lam * part))
    slope, intercept = np.polyfit(np.log(lams), np.log(residuals), 1)
    return SmallStateReport(
        lams=lams,
        residuals=residuals,
        exponent=float(slope),
        coefficient=float(np.exp(intercept)),
    )
