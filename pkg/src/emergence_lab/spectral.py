"""Operator calculus on periodic lattices.

Builds the spatial operator R of the linear field equation ``phi_tt + R phi = 0``
as a dense symmetric matrix over lattice sites, exposes its spectral
decomposition, arbitrary real powers R^lambda, and tools to measure how fast
the kernels of those powers decay with distance.

Conventions
-----------
* Matrices act in "application form": ``(R u)(x) = sum_y matrix[x, y] u(y)``.
  The integral kernel against the lattice measure is ``matrix / spacing**dim``.
* Eigenbases are real and orthonormal under the discrete L2 product
  ``sum_x f_j(x) f_k(x) spacing**dim = delta_jk``.
* All lengths (distances, decay lengths, spacings) are in the same length
  units as ``Lattice.spacing``.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

# Eigenvalues below POSITIVITY_FLOOR * lambda_max are treated as violations of
# strict positivity rather than numerical noise.
POSITIVITY_FLOOR = 1e-10
SYMMETRY_RTOL = 1e-12
DISTANCE_BIN = 1e-9


class AxiomError(ValueError):
    """The operator violates a structural requirement (symmetry/positivity)."""


class LatticeMismatchError(ValueError):
    """Two objects that must share a lattice do not."""


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Lattice:
    """Periodic rectangular lattice in 1, 2 or 3 dimensions.

    Parameters
    ----------
    shape : tuple of int
        Site count per axis.
    spacing : float
        Lattice spacing (length units), identical on every axis.
    """

    shape: tuple[int, ...]
    spacing: float = 1.0

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "shape", shape)
        if not 1 <= len(shape) <= 3:
            raise ValueError(f"lattice dimension must be 1..3, got {len(shape)}")
        if any(n < 1 for n in shape):
            raise ValueError(f"site counts must be positive, got {shape}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def nsites(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell(self) -> float:
        """Volume of one lattice cell, spacing**ndim (the quadrature weight)."""
        return float(self.spacing) ** self.ndim

    def site_coords(self) -> np.ndarray:
        """Integer coordinates of all sites, shape (nsites, ndim), C order."""
        grids = np.indices(self.shape).reshape(self.ndim, -1).T
        return grids

    def index_of(self, coord) -> int:
        """Flat index of an integer coordinate tuple (C order)."""
        return int(np.ravel_multi_index(tuple(int(c) for c in coord), self.shape))

    def min_image_deltas(self, i: int, j=None) -> np.ndarray:
        """Minimum-image coordinate differences from site i (integer units).

        With ``j=None`` returns deltas to every site, shape (nsites, ndim).
        """
        coords = self.site_coords()
        ref = coords[i]
        other = coords if j is None else coords[np.atleast_1d(j)]
        delta = other - ref
        for ax, n in enumerate(self.shape):
            d = delta[:, ax]
            d += n // 2
            np.mod(d, n, out=d)
            d -= n // 2
        return delta

    def distances_from(self, i: int) -> np.ndarray:
        """Minimum-image Euclidean distance from site i to all sites."""
        delta = self.min_image_deltas(i)
        return np.sqrt((delta.astype(float) ** 2).sum(axis=1)) * self.spacing

    def distance(self, i: int, j: int) -> float:
        return float(self.distances_from(i)[j])


# ---------------------------------------------------------------------------
# the operator R and its spectrum
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class ROperator:
    """Dense symmetric operator over lattice sites (application form).

    ``stencil_radius`` is the locality radius in integer site steps when the
    operator came from a differential stencil; None when unknown.
    """

    lattice: Lattice
    matrix: np.ndarray
    stencil_radius: int | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        n = self.lattice.nsites
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match {n} sites")
        scale = np.abs(m).max()
        if scale > 0 and np.abs(m - m.T).max() > SYMMETRY_RTOL * scale:
            raise AxiomError("operator matrix is not symmetric")
        object.__setattr__(self, "matrix", m)

    def apply(self, field: np.ndarray) -> np.ndarray:
        return self.matrix @ field

    def kernel(self) -> np.ndarray:
        """Integral kernel R(x, y) = matrix / cell volume."""
        return self.matrix / self.lattice.cell


@dataclasses.dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of an ROperator.

    ``basis`` columns are the eigenfunctions f_k, orthonormal under the
    discrete L2 product; ``eigenvalues`` (omega_k^2) ascend and are strictly
    positive; ``frequencies`` are their positive square roots.
    """

    operator: ROperator
    eigenvalues: np.ndarray
    frequencies: np.ndarray
    basis: np.ndarray

    @property
    def lattice(self) -> Lattice:
        return self.operator.lattice

    @property
    def nmodes(self) -> int:
        return len(self.eigenvalues)

    def project(self, field: np.ndarray) -> np.ndarray:
        """L2 coefficients <f_k, field> for every mode."""
        return (self.basis.T @ field) * self.lattice.cell

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Field sum_k coeffs[k] f_k."""
        return self.basis @ coeffs

    def apply_power(self, exponent: float, field: np.ndarray) -> np.ndarray:
        """Apply R^exponent to a field through the eigenbasis."""
        w = self.eigenvalues ** exponent
        return self.synthesize(w * self.project(field))


def _laplacian_matrix(lattice: Lattice) -> np.ndarray:
    """Second-order central-difference Laplacian with periodic wrap."""
    n = lattice.nsites
    lap = np.zeros((n, n))
    inv_a2 = 1.0 / lattice.spacing**2
    coords = lattice.site_coords()
    for ax, extent in enumerate(lattice.shape):
        step = np.zeros(lattice.ndim, dtype=int)
        step[ax] = 1
        plus = (coords + step) % lattice.shape
        minus = (coords - step) % lattice.shape
        plus_idx = np.ravel_multi_index(plus.T, lattice.shape)
        minus_idx = np.ravel_multi_index(minus.T, lattice.shape)
        rows = np.arange(n)
        lap[rows, plus_idx] += inv_a2
        lap[rows, minus_idx] += inv_a2
        lap[rows, rows] -= 2.0 * inv_a2
    return lap


def build_klein_gordon(mass: float, lattice: Lattice) -> ROperator:
    """R = mass^2 - Laplacian (3-point central stencil per axis, periodic).

    Raises AxiomError for mass <= 0: the constant mode would then have a
    nonpositive eigenvalue, breaking strict positivity.
    """
    if not mass > 0:
        raise AxiomError(
            f"mass must be strictly positive (got {mass}); the constant mode "
            "would violate strict positivity of R"
        )
    matrix = mass**2 * np.eye(lattice.nsites) - _laplacian_matrix(lattice)
    return ROperator(lattice=lattice, matrix=matrix, stencil_radius=1)


def build_variable_coefficient(mass_field: np.ndarray, lattice: Lattice) -> ROperator:
    """KG stencil with a site-dependent mass: diagonal m(x)^2 + 2*ndim/spacing^2."""
    m = np.asarray(mass_field, dtype=float).reshape(-1)
    if m.shape[0] != lattice.nsites:
        raise ValueError(
            f"mass_field has {m.shape[0]} samples for {lattice.nsites} sites"
        )
    if np.any(m <= 0):
        raise AxiomError("mass_field must be strictly positive everywhere")
    matrix = np.diag(m**2) - _laplacian_matrix(lattice)
    return ROperator(lattice=lattice, matrix=matrix, stencil_radius=1)


def klein_gordon_symbol_eigenvalues(mass: float, lattice: Lattice) -> np.ndarray:
    """Closed-form circulant eigenvalues m^2 + sum_ax (2 - 2 cos(2 pi j/N))/a^2.

    Returned in ascending order; used as an independent cross-check on the
    dense eigensolver.
    """
    coords = lattice.site_coords()
    vals = np.full(lattice.nsites, mass**2)
    for ax, n in enumerate(lattice.shape):
        k = 2.0 * np.pi * coords[:, ax] / n
        vals += (2.0 - 2.0 * np.cos(k)) / lattice.spacing**2
    return np.sort(vals)


def diagonalize(op: ROperator) -> Spectrum:
    """Full eigendecomposition; raises AxiomError if strict positivity fails.

    Eigenvalues ascend; eigenvectors are L2-orthonormalized. Degenerate
    subspaces come back with the (deterministic) basis the dense solver picks.
    """
    vals, vecs = np.linalg.eigh(op.matrix)
    floor = POSITIVITY_FLOOR * max(vals[-1], 0.0)
    if vals[0] <= floor:
        raise AxiomError(
            f"smallest eigenvalue {vals[0]:.3e} is not strictly positive "
            f"(floor {floor:.3e}); operator violates strict positivity"
        )
    basis = vecs / math.sqrt(op.lattice.cell)
    return Spectrum(
        operator=op,
        eigenvalues=vals,
        frequencies=np.sqrt(vals),
        basis=basis,
    )


def _is_nonneg_integer(x: float) -> bool:
    return x >= 0 and abs(x - round(x)) < 1e-12


def fractional_power(spec: Spectrum, exponent: float) -> ROperator:
    """Dense R^exponent.

    Nonnegative integer exponents are computed by repeated multiplication of
    the original matrix so strict locality is exact (entries beyond
    stencil_radius * exponent are identical zeros). Everything else goes
    through the spectral sum sum_k omega_k^(2 exponent) f_k f_k^T.
    """
    lattice = spec.lattice
    if _is_nonneg_integer(exponent):
        n = int(round(exponent))
        matrix = np.linalg.matrix_power(spec.operator.matrix, n)
        base_radius = spec.operator.stencil_radius
        radius = None if base_radius is None else base_radius * n
        return ROperator(lattice=lattice, matrix=matrix, stencil_radius=radius)
    weights = spec.eigenvalues**exponent
    matrix = (spec.basis * weights) @ spec.basis.T * lattice.cell
    matrix = 0.5 * (matrix + matrix.T)
    return ROperator(lattice=lattice, matrix=matrix, stencil_radius=None)


# ---------------------------------------------------------------------------
# kernel decay diagnostics
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class KernelProfile:
    """|R^lambda(source, y)| against minimum-image distance.

    Distances are binned (1e-9 rounding); each bin keeps its maximum
    magnitude, which is the conservative choice for decay fits.
    """

    source: int
    exponent: float
    distances: np.ndarray
    values: np.ndarray


@dataclasses.dataclass(frozen=True)
class DecayFit:
    """Log-linear decay fit: |kernel| ~ exp(-d / length).

    quality_ok is set when the fit succeeded (negative slope, enough samples)
    and the RMS residual of the log values stays below 0.5.
    """

    length: float
    window: tuple[float, float]
    rms_log_residual: float
    quality_ok: bool
    nsamples: int
    slope: float


def bin_by_distance(distances: np.ndarray, values: np.ndarray):
    """Group values by rounded distance, keeping max |value| per bin."""
    keys = np.round(np.asarray(distances, dtype=float) / DISTANCE_BIN).astype(np.int64)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    mags = np.abs(np.asarray(values))[order]
    uniq, starts = np.unique(keys, return_index=True)
    out_d = uniq.astype(float) * DISTANCE_BIN
    out_v = np.maximum.reduceat(mags, starts)
    return out_d, out_v


def kernel_profile(
    op: ROperator,
    exponent: float,
    source: int,
    spectrum: Spectrum | None = None,
) -> KernelProfile:
    """Profile of the R^exponent kernel as seen from one source site."""
    lattice = op.lattice
    if _is_nonneg_integer(exponent):
        power = fractional_power(spectrum or diagonalize(op), exponent)
        column = power.matrix[:, source] / lattice.cell
    else:
        spec = spectrum or diagonalize(op)
        weights = spec.eigenvalues**exponent
        # one kernel column: sum_k omega^(2 exponent) f_k(y) f_k(source)
        column = spec.basis @ (weights * spec.basis[source, :])
    dists = lattice.distances_from(source)
    out_d, out_v = bin_by_distance(dists, column)
    return KernelProfile(
        source=source, exponent=exponent, distances=out_d, values=out_v
    )


def fit_decay_length(
    distances: np.ndarray, values: np.ndarray, window: tuple[float, float]
) -> DecayFit:
    """Least-squares fit of ln|values| vs distance over the window.

    Returns a failed fit (quality_ok False, length nan) rather than raising
    when there are fewer than 6 strictly positive samples or the slope is
    nonnegative.
    """
    d_min, d_max = window
    distances = np.asarray(distances, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (distances >= d_min) & (distances <= d_max) & (values > 0)
    d = distances[mask]
    v = values[mask]
    if d.size < 6:
        return DecayFit(
            length=float("nan"),
            window=(float(d_min), float(d_max)),
            rms_log_residual=float("nan"),
            quality_ok=False,
            nsamples=int(d.size),
            slope=float("nan"),
        )
    logv = np.log(v)
    slope, intercept = np.polyfit(d, logv, 1)
    resid = logv - (slope * d + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    ok = slope < 0 and rms < 0.5
    length = -1.0 / slope if slope < 0 else float("nan")
    return DecayFit(
        length=float(length),
        window=(float(d_min), float(d_max)),
        rms_log_residual=rms,
        quality_ok=bool(ok),
        nsamples=int(d.size),
        slope=float(slope),
    )
