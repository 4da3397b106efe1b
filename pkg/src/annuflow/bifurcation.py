"""Center-manifold reduction at the critical viscosity.

Builds the leading eigenpair of the generalized problem
mu Delta_1^2 Psi = lambda Delta_1 Psi, solves the quadratic manifold
coefficient G11, assembles the cubic (Lyapunov) coefficient l of the
reduced amplitude equation

    dz/dt = lambda_1 z + l z |z|^2,

classifies the pitchfork, and constructs the bifurcated streamfunction

    psi_s = s Psi_1 e^{i theta} + c.c. + s^2 G11 e^{2 i theta} + c.c.

with |s| = sqrt(-lambda_1 / l) when the branch exists.

The eigenfunction is normalized to unit L^2(r dr) norm with Psi_1'(a) > 0;
l scales with the square of the normalization, but the physical bifurcated
field does not, and only normalization-invariant quantities are asserted.

The projection onto the critical mode is taken in the velocity (energy)
pairing <u, v> = int grad-pairing, which for profiles vanishing at both
radii reduces to -int (Delta_n F) conj(G) r dr. The linearized operator is
self-adjoint in that pairing, so it is the one in which the critical-mode
projection is exact; the plain-L^2 variant is kept as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .domain import DomainParams, ModalField, PhysicalField, synthesize_physical, theta_lattice
from .errors import DegenerateCoefficient, EigSolverFailure, GridMismatch
from .spectral import (
    BoundaryConditionSet,
    ModalOperator,
    RadialGrid,
    bilaplacian_n,
    dirichlet_bcs,
    generalized_eig,
    laplacian_n,
    navier_slip_bcs,
    radial_integral,
    solve_bvp,
)


def eig_cap(params: DomainParams, mu: float) -> float:
    """Spurious-eigenvalue cutoff for row-replaced generalized problems."""
    return 1e6 * mu / (params.b - params.a) ** 2


@dataclass(frozen=True)
class EigenResult:
    """Leading growth rate and its unit-norm mode-1 eigenfunction."""

    lambda1: float
    psi1: ModalField
    mu: float


def energy_rayleigh(params: DomainParams, mu: float, psi: np.ndarray,
                    grid: RadialGrid, n: int = 1) -> float:
    """Variational growth rate of a mode-n profile.

    lambda = (-mu E1 + (alpha - mu/a) E2) / E3 with E3 the kinetic energy,
    E1 the gradient energy plus the outer-boundary tangential term, and E2
    the inner-boundary tangential term. For an eigenfunction this is the
    eigenvalue, accurate to second order in the eigenvector error (the
    operator is self-adjoint in this pairing), so it is used to polish the
    value returned by the dense eigensolver.
    """
    r = grid.nodes
    d1 = grid.d1
    vr = -1j * n * psi / r
    vt = d1 @ psi
    E3 = (grid.weights @ (np.abs(vr) ** 2 + np.abs(vt) ** 2)).real
    g1 = d1 @ vr
    g2 = d1 @ vt
    g3 = (1j * n * vr - vt) / r
    g4 = (1j * n * vt + vr) / r
    E1 = (grid.weights @ (np.abs(g1) ** 2 + np.abs(g2) ** 2
                          + np.abs(g3) ** 2 + np.abs(g4) ** 2)).real
    E1 += np.abs(vt[0]) ** 2
    E2 = params.a * np.abs(vt[-1]) ** 2
    return float((-mu * E1 + (params.alpha - mu / params.a) * E2) / E3)


def leading_eigenpair(params: DomainParams, mu: float, grid: RadialGrid) -> EigenResult:
    """Largest-real-part eigenpair of mu Delta_1^2 Psi = lambda Delta_1 Psi.

    Boundary rows are the Dirichlet pair plus the slip/stress-free pair
    with alpha/mu evaluated at the requested viscosity. The eigenvalue is
    polished by the variational quotient of the computed eigenvector.
    """
    bcs = navier_slip_bcs(grid, params, mu=mu)
    L1 = laplacian_n(grid, 1)
    A = ModalOperator(n=1, matrix=mu * bilaplacian_n(grid, 1).matrix, order=2)
    pairs = generalized_eig(A, L1, bcs, cap=eig_cap(params, mu))
    lam, vec = pairs[0]
    if abs(lam.imag) > 1e-8 * (1.0 + abs(lam.real)):
        raise EigSolverFailure(f"leading eigenvalue is not real: {lam}")
    psi = _normalize(vec.values, grid)
    polished = energy_rayleigh(params, mu, psi, grid)
    scale = params.a * params.alpha / (grid.b - grid.a) ** 2
    if abs(polished - lam.real) > 1e-2 * (abs(lam.real) + scale):
        raise EigSolverFailure(
            f"eigenvalue {lam.real} inconsistent with its variational "
            f"quotient {polished}")
    return EigenResult(lambda1=polished, psi1=ModalField(1, psi), mu=mu)


def _normalize(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Unit L^2(r dr) norm, phase rotated so Psi'(a) is real positive."""
    v = values / np.sqrt(radial_integral(grid, np.abs(values) ** 2).real)
    slope = grid.d1[grid.N, :] @ v
    if abs(slope) > 0:
        v = v * (np.conj(slope) / abs(slope))
    return v


def interaction(f: ModalField, g: ModalField, grid: RadialGrid) -> ModalField:
    """Advection bilinear form on modal profiles.

    G(f, g) at wavenumber n_f + n_g with radial profile
    i (n_f F / r (Delta_{n_g} G)' - n_g F' / r Delta_{n_g} G).
    Vanishes identically when G is Delta_{n_g}-harmonic.
    """
    if len(f) != grid.N + 1 or len(g) != grid.N + 1:
        raise GridMismatch("interaction operands on different grids")
    r = grid.nodes
    F, G = f.values, g.values
    om = laplacian_n(grid, g.n).matrix @ G
    profile = 1j * (f.n * F / r * (grid.d1 @ om) - g.n * (grid.d1 @ F) / r * om)
    return ModalField(f.n + g.n, profile)


def ainv(fld: ModalField, grid: RadialGrid) -> ModalField:
    """Invert the modal Laplacian with homogeneous Dirichlet data.

    This is the streamfunction-space A^{-1}: for n != 0 the phase-space
    constraint at the radii forces the profile to vanish there.
    """
    op = laplacian_n(grid, fld.n)
    return solve_bvp(op, fld, dirichlet_bcs(grid))


@dataclass(frozen=True)
class ManifoldCoeffs:
    """Quadratic center-manifold coefficient; g12 = 0 and g22 = conj(g11)."""

    g11: ModalField


def solve_G11(params: DomainParams, mu: float, eig: EigenResult,
              grid: RadialGrid) -> ManifoldCoeffs:
    """Solve mu Delta_2^2 G11 - 2 lambda_1 Delta_2 G11 = -G(psi1, psi1)
    with the same four boundary rows at wavenumber 2."""
    quad = interaction(eig.psi1, eig.psi1, grid)
    rhs = ModalField(2, -quad.values)
    L2 = laplacian_n(grid, 2).matrix
    shifted = ModalOperator(n=2, matrix=mu * (L2 @ L2) - 2.0 * eig.lambda1 * L2, order=2)
    g11 = solve_bvp(shifted, rhs, navier_slip_bcs(grid, params, mu=mu))
    return ManifoldCoeffs(g11=g11)


def lyapunov_coeff(params: DomainParams, mu: float, eig: EigenResult,
                   mc: ManifoldCoeffs, grid: RadialGrid) -> float:
    """Cubic coefficient of the reduced amplitude equation (real part)."""
    l, _ = lyapunov_coeff_full(params, mu, eig, mc, grid)
    return l


def lyapunov_coeff_full(params: DomainParams, mu: float, eig: EigenResult,
                        mc: ManifoldCoeffs, grid: RadialGrid) -> tuple[float, float]:
    """Lyapunov coefficient and its (diagnostic) imaginary residue.

    l = <A^{-1} G(conj(psi1), g11) + A^{-1} G(g11, conj(psi1)), psi1>
        / <psi1, psi1>
    in the velocity pairing; integrating by parts against the eigenfunction
    (which vanishes at both radii) turns the numerator into a plain
    r-weighted integral of the interaction profiles, with
    <psi1, psi1> = -int (Delta_1 Psi_1) conj(Psi_1) r dr.
    """
    psi1 = eig.psi1
    t1 = interaction(psi1.conj(), mc.g11, grid)
    t2 = interaction(mc.g11, psi1.conj(), grid)
    total = t1.values + t2.values
    num = -radial_integral(grid, total * np.conj(psi1.values))
    L1 = laplacian_n(grid, 1).matrix
    den = -radial_integral(grid, (L1 @ psi1.values) * np.conj(psi1.values))
    val = num / den
    return float(val.real), float(val.imag)


def lyapunov_coeff_plain(params: DomainParams, mu: float, eig: EigenResult,
                         mc: ManifoldCoeffs, grid: RadialGrid) -> float:
    """Diagnostic variant using the plain L^2(r dr) pairing for the projection."""
    psi1 = eig.psi1
    t1 = ainv(interaction(psi1.conj(), mc.g11, grid), grid)
    t2 = ainv(interaction(mc.g11, psi1.conj(), grid), grid)
    num = radial_integral(grid, (t1.values + t2.values) * np.conj(psi1.values))
    den = radial_integral(grid, np.abs(psi1.values) ** 2)
    return float((num / den).real)


class Classification(str, Enum):
    SUPERCRITICAL = "Supercritical"
    SUBCRITICAL = "Subcritical"
    DEGENERATE = "Degenerate"


def degeneracy_tol(params: DomainParams) -> float:
    """Dead zone for sign(l): 1e-10 of the natural coefficient scale."""
    return 1e-10 * params.a * params.alpha / (params.b - params.a) ** 4


@dataclass(frozen=True)
class BifurcationReport:
    """Pitchfork classification with the bifurcated-state constructor."""

    lambda1: float
    l: float
    classification: Classification
    amplitude: float | None
    mu: float
    psi1: ModalField = field(repr=False)
    g11: ModalField = field(repr=False)

    def modal_state(self, s: complex) -> list[ModalField]:
        """Modal coefficients of psi_s at phase point s (explicit +/- pairs)."""
        m1 = ModalField(1, s * self.psi1.values)
        m2 = ModalField(2, s**2 * self.g11.values)
        return [m1, m1.conj(), m2, m2.conj()]

    def psi_s(self, s: complex, ntheta: int = 128) -> PhysicalField:
        """Bifurcated streamfunction on the physical lattice at phase s."""
        return synthesize_physical(self.modal_state(s), ntheta)

    def velocity(self, s: complex, grid: RadialGrid,
                 ntheta: int = 128) -> tuple[np.ndarray, np.ndarray]:
        """Polar velocity components (v_r, v_theta) of the bifurcated state."""
        theta = theta_lattice(ntheta)
        vr = np.zeros((grid.N + 1, ntheta))
        vt = np.zeros((grid.N + 1, ntheta))
        for n, prof in ((1, s * self.psi1.values), (2, s**2 * self.g11.values)):
            phase = np.exp(1j * n * theta)
            vr += 2.0 * np.real(np.outer(-1j * n * prof / grid.nodes, phase))
            vt += 2.0 * np.real(np.outer(grid.d1 @ prof, phase))
        return vr, vt


def classify_and_build(params: DomainParams, mu: float, eig: EigenResult,
                       l: float, mc: ManifoldCoeffs) -> BifurcationReport:
    """Classify the pitchfork by sign(l) and attach the branch constructor.

    The amplitude |s| = sqrt(-lambda_1 / l) is defined only when lambda_1
    and l have opposite signs (the side of mu_c where the branch lives).
    """
    tol = degeneracy_tol(params)
    if abs(l) <= tol:
        raise DegenerateCoefficient(f"|l| = {abs(l)} below tolerance {tol}")
    cls = Classification.SUPERCRITICAL if l < 0 else Classification.SUBCRITICAL
    amplitude = None
    if eig.lambda1 != 0.0 and np.sign(eig.lambda1) != np.sign(l):
        amplitude = float(np.sqrt(-eig.lambda1 / l))
    return BifurcationReport(lambda1=eig.lambda1, l=l, classification=cls,
                             amplitude=amplitude, mu=mu,
                             psi1=eig.psi1, g11=mc.g11)


def bifurcation_report(params: DomainParams, mu: float,
                       grid: RadialGrid) -> BifurcationReport:
    """One-call pipeline: eigenpair, G11, l, classification."""
    eig = leading_eigenpair(params, mu, grid)
    mc = solve_G11(params, mu, eig, grid)
    l = lyapunov_coeff(params, mu, eig, mc, grid)
    return classify_and_build(params, mu, eig, l, mc)
