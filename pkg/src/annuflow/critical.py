"""Critical viscosity: closed form, determinant oracle, and the gamma_n constants.

The zero-eigenvalue problem Delta_1^2 Psi = 0 has the general solution
Psi = a1 r + a2 r ln r + a3 / r + a4 r^3; requiring the four boundary
conditions to admit a nontrivial combination gives a 4x4 determinant that
vanishes exactly at the critical viscosity. The determinant is transcribed
verbatim (it is affine in mu, so it brackets a single root); the closed form

    mu_c = a alpha (1 + 3 s^4 - 4 s^2 - 4 s^4 ln s) / (2 (s^4 - 1 - 4 s^4 ln s)),
    s = b / a,

must agree with the bracketed root to 1e-8 relative, which is the primary
cross-check between the two routes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import DomainParams
from .errors import NoBracket
from .spectral import RadialGrid, laplacian_n

#: bisection/secant iteration counts for the determinant root
_BISECT_STEPS = 80
_SECANT_STEPS = 5


def mu_c_closed(params: DomainParams) -> float:
    """Closed-form critical viscosity; the mu field of params is ignored."""
    a, alpha = params.a, params.alpha
    s = params.sigma
    ls = np.log(s)
    num = a * alpha * (1.0 + 3.0 * s**4 - 4.0 * s**2 - 4.0 * s**4 * ls)
    den = 2.0 * (s**4 - 1.0 - 4.0 * s**4 * ls)
    return num / den


def det_condition(params: DomainParams, mu: float) -> float:
    """Determinant whose zero marks a nontrivial zero-eigenvalue solution.

    Rows: Psi(a) = 0, Psi(b) = 0, the stress-free row at b, and the
    Navier-slip row at a, each evaluated on the basis
    {r, r ln r, 1/r, r^3} and scaled as printed.
    """
    a, b, alpha = params.a, params.b, params.alpha
    la, lb = np.log(a), np.log(b)
    m = np.array([
        [a**2, a**2 * la, 1.0, a**4],
        [b**2, b**2 * lb, 1.0, b**4],
        [b**2, b**2 * (2.0 + lb), 1.0, 9.0 * b**4],
        [-a**2 * mu + alpha * a**3,
         a**3 * alpha - a**2 * mu * la + a**3 * alpha * la,
         3.0 * mu - a * alpha,
         3.0 * a**5 * alpha + 3.0 * a**4 * mu],
    ])
    return float(np.linalg.det(m))


def mu_c_oracle(params: DomainParams) -> float:
    """Critical viscosity by bracketed bisection of the determinant.

    Searches (1e-6 a alpha, 10 a alpha) for a sign change, bisects, then
    polishes with a few secant steps. Independent of the closed form.
    """
    lo = 1e-6 * params.a * params.alpha
    hi = 10.0 * params.a * params.alpha
    grid = np.linspace(lo, hi, 256)
    vals = [det_condition(params, m) for m in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        raise NoBracket("determinant has no sign change in (1e-6 a alpha, 10 a alpha)")
    x0, x1 = bracket
    f0, f1 = det_condition(params, x0), det_condition(params, x1)
    for _ in range(_BISECT_STEPS):
        xm = 0.5 * (x0 + x1)
        fm = det_condition(params, xm)
        if fm == 0.0:
            return float(xm)
        if np.sign(fm) == np.sign(f0):
            x0, f0 = xm, fm
        else:
            x1, f1 = xm, fm
    for _ in range(_SECANT_STEPS):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1, f1 = x2, det_condition(params, x2)
    return float(x1)


def gamma_n(params: DomainParams, n: int, grid: RadialGrid) -> float:
    """Variational constant: minimum of int r (Delta_n Psi)^2 dr / Psi'(a)^2
    over profiles vanishing at both radii.

    The quadratic form restricted to the Dirichlet subspace is positive
    definite, and the denominator is rank one, so the minimum is
    1 / (d^T M^{-1} d) with d the Psi'(a) functional.
    """
    if n < 1:
        raise ValueError("gamma_n is defined for n >= 1")
    N = grid.N
    B = laplacian_n(grid, n).matrix[:, 1:N]  # interior columns: Psi(a)=Psi(b)=0
    M = B.T @ (grid.weights[:, None] * B)
    d = grid.d1[N, 1:N]
    y = np.linalg.solve(M, d)
    return float(1.0 / (d @ y))


@dataclass(frozen=True)
class CriticalResult:
    """Closed-form and oracle critical viscosities plus gamma_1..gamma_nmax."""

    mu_c_closed: float
    mu_c_oracle: float
    gamma: tuple[float, ...]

    @property
    def discrepancy(self) -> float:
        return abs(self.mu_c_closed - self.mu_c_oracle) / abs(self.mu_c_closed)


def critical_result(params: DomainParams, grid: RadialGrid,
                    n_max: int = 5) -> CriticalResult:
    return CriticalResult(
        mu_c_closed=mu_c_closed(params),
        mu_c_oracle=mu_c_oracle(params),
        gamma=tuple(gamma_n(params, n, grid) for n in range(1, n_max + 1)),
    )
