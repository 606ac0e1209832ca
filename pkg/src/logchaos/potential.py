"""Potential theory of the kernel ln(T/|x-y|) on the unit ball.

Closed forms and quadratures for the scale thresholds that govern the
kernel on B(0,1):

* pd_threshold(d)            -- smallest T making the kernel positive
                                definite on the ball (closed form);
* boundary_threshold(d)      -- exp of the uniform log-potential at a
                                boundary point, the comparison value in
                                the positive-spatial-mean criterion;
* uniform_energy_threshold(d)-- exp of the uniform-uniform log energy,
                                below which the spatial field mean has
                                negative "variance";

plus the variance of the spatial mean, the cell-averaged Gram matrix
eigenvalue test, and the exponent threshold used by the mean-splitting
argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import betainc, gamma as gammafn

from .boxlog import pair_log_mean_table
from .errors import DegenerateCaseError, ParameterError, QuadratureError
from .params import ModelParams


def ball_volume(d: int) -> float:
    """Lebesgue volume of the unit ball in R^d."""
    return math.pi ** (d / 2) / gammafn(d / 2 + 1)


def _check_dim(d) -> int:
    if int(d) != d or d < 1:
        raise ParameterError(f"dimension must be a positive integer, got {d}")
    return int(d)


def pd_threshold(d: int) -> float:
    """Smallest kernel scale T at which ln(T/|x-y|) is positive definite
    on the unit ball of R^d.  Closed form, four cases."""
    d = _check_dim(d)
    if d == 1:
        return 0.5
    if d == 2:
        return 1.0
    if d % 2 == 0:
        # even d > 2: exp(1/2 + 1/4 + ... + 1/(d-2))
        return math.exp(sum(1.0 / k for k in range(2, d - 1, 2)))
    # odd d > 2: (1/2) exp(1 + 1/3 + ... + 1/(d-2))
    return 0.5 * math.exp(sum(1.0 / k for k in range(1, d - 1, 2)))


def cap_area(d: int, r: float) -> float:
    """Surface area of the sphere {|x - e| = r} inside B(0,1), |e| = 1.

    The intersection is a spherical cap of half-angle arccos(r/2); for
    d in {3, 4, 5} closed forms are used, otherwise the angular integral
    is done by adaptive quadrature.
    """
    d = _check_dim(d)
    if d < 2:
        raise ParameterError("cap areas need d >= 2")
    if not 0.0 <= r <= 2.0:
        raise ParameterError(f"cap radius must lie in [0, 2], got {r}")
    if r == 0.0:
        return 0.0
    phi = math.acos(r / 2.0)
    if d == 3:
        return 2.0 * math.pi * (r**2 - r**3 / 2.0)
    if d == 4:
        return 2.0 * math.pi * r**3 * (phi - (r / 2.0) * math.sqrt(1.0 - r * r / 4.0))
    if d == 5:
        return 2.0 * math.pi**2 * r**4 * (2.0 / 3.0 - r / 2.0 + r**3 / 24.0)
    coef = 2.0 * math.pi ** ((d - 1) / 2) / gammafn((d - 1) / 2)
    inner, _ = quad(lambda th: math.sin(th) ** (d - 2), 0.0, phi, epsabs=1e-13)
    return coef * r ** (d - 1) * inner


def _sin_power_integral(m: int, phi: float) -> float:
    # int_0^phi sin^m t dt, standard reduction, exact for integer m
    if m == 0:
        return phi
    if m == 1:
        return 1.0 - math.cos(phi)
    return (
        -math.cos(phi) * math.sin(phi) ** (m - 1)
        + (m - 1) * _sin_power_integral(m - 2, phi)
    ) / m


def log_potential_ball(d: int, x, tol: float = 1e-10) -> float:
    """Average of ln|x - y| over y uniform in the unit ball.

    x may be a point of R^d or a scalar radius (the value only depends
    on |x|).  The radial decomposition keeps the integrand bounded: the
    sphere {|y - x| = s} sits entirely inside the ball for s <= 1-|x|
    (closed-form piece) and is a cap beyond that.
    """
    d = _check_dim(d)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    rho = float(np.linalg.norm(xv)) if xv.size > 1 else float(abs(xv[0]))
    if rho > 1.0 + 1e-12:
        raise ParameterError(f"point must lie in the closed unit ball, |x| = {rho}")
    rho = min(rho, 1.0)

    if d == 1:
        if rho == 1.0:
            return math.log(2.0) - 1.0
        return (
            (1.0 + rho) * math.log1p(rho) + (1.0 - rho) * math.log1p(-rho)
        ) / 2.0 - 1.0

    vol = ball_volume(d)
    if rho == 0.0:
        return -1.0 / d

    if rho == 1.0:
        # boundary point: integrate ln s against the in-ball cap area
        f = lambda s: math.log(s) * cap_area(d, s)
        i1, e1 = quad(f, 0.0, 1.0, epsabs=tol / 4, epsrel=1e-12, limit=200)
        i2, e2 = quad(f, 1.0, 2.0, epsabs=tol / 4, epsrel=1e-12, limit=200)
        if e1 + e2 > max(tol, 1e-9):
            raise QuadratureError(
                f"boundary log-potential quadrature error {e1 + e2:.2e} at d={d}"
            )
        return (i1 + i2) / vol

    omega_full = d * vol  # surface area of the unit sphere
    big_r = 1.0 - rho
    inner = omega_full * (big_r**d * math.log(big_r) / d - big_r**d / (d * d))
    coef = 2.0 * math.pi ** ((d - 1) / 2) / gammafn((d - 1) / 2)
    j_total = _sin_power_integral(d - 2, math.pi)

    def f(s):
        c = (1.0 - rho * rho - s * s) / (2.0 * rho * s)
        c = min(1.0, max(-1.0, c))
        psi = math.acos(c)
        return (
            math.log(s)
            * coef
            * s ** (d - 1)
            * (j_total - _sin_power_integral(d - 2, psi))
        )

    i2, e2 = quad(f, big_r, 1.0 + rho, epsabs=tol / 2, epsrel=1e-12, limit=200)
    if e2 > max(tol, 1e-9):
        raise QuadratureError(
            f"interior log-potential quadrature error {e2:.2e} at d={d}, rho={rho}"
        )
    return (inner + i2) / vol


def boundary_threshold(d: int, tol: float = 1e-10) -> float:
    """exp of the mean of ln|e - y| over the unit ball, |e| = 1.

    The kernel mean ln T - (this log) at a boundary point changes sign
    at T equal to this threshold; it sits below pd_threshold for d >= 3
    and above it for d = 1.
    """
    d = _check_dim(d)
    e = np.zeros(d)
    e[0] = 1.0
    return math.exp(log_potential_ball(d, e, tol))


def uniform_energy_threshold(d: int, tol: float = 1e-10) -> float:
    """exp of the double average of ln|x - y| over two uniform points of
    the unit ball.  At T equal to this value the spatial mean of the
    field has zero variance."""
    d = _check_dim(d)
    if d == 1:
        # closed form: the interval average evaluates to ln 2 - 3/2
        return math.exp(math.log(2.0) - 1.5)

    # density of |x - y| for x, y uniform in B(0,1):
    #   f(r) = d r^{d-1} I_{1 - r^2/4}((d+1)/2, 1/2),  r in [0, 2]
    def f(r):
        return (
            math.log(r)
            * d
            * r ** (d - 1)
            * betainc((d + 1) / 2, 0.5, 1.0 - r * r / 4.0)
        )

    i1, e1 = quad(f, 0.0, 1.0, epsabs=tol / 4, epsrel=1e-12, limit=200)
    i2, e2 = quad(f, 1.0, 2.0, epsabs=tol / 4, epsrel=1e-12, limit=200)
    if e1 + e2 > max(tol, 1e-9):
        raise QuadratureError(
            f"uniform log-energy quadrature error {e1 + e2:.2e} at d={d}"
        )
    return math.exp(i1 + i2)


def spatial_mean_variance(params: ModelParams, tol: float = 1e-10) -> float:
    """Variance of the integral of the field over the unit ball:
    |B|^2 (ln T - ln T0) with T0 the uniform-energy threshold.  Negative
    when T sits below that threshold (reported as such)."""
    vol = ball_volume(params.d)
    t0 = uniform_energy_threshold(params.d, tol)
    return vol * vol * (math.log(params.T) - math.log(t0))


def mean_weight_profile(params: ModelParams, x, tol: float = 1e-10) -> float:
    """Kernel mean against the uniform ball measure, normalized by the
    spatial-mean variance.  Its infimum over the closed ball sits at the
    boundary; its uniform average equals 1."""
    v = spatial_mean_variance(params, tol)
    if v <= 0:
        raise DegenerateCaseError(
            f"spatial mean has nonpositive variance {v:.3e}; profile undefined"
        )
    u = log_potential_ball(params.d, x, tol)
    return ball_volume(params.d) * (math.log(params.T) - u) / v


def mean_split_exponent(params: ModelParams, tol: float = 1e-10) -> float:
    """Threshold exponent from splitting off the spatial mean of the
    field: (ln T - ln T0) / (2 gamma^2 (ln T - ln T*)^2), valid for
    d >= 3 and T above the boundary threshold T*.  Any coefficient
    strictly above this value bounds -ln P(mass <= delta) / (ln delta)^2
    from above for small delta."""
    if params.d < 3:
        raise ParameterError("mean-split exponent needs d >= 3")
    ln_t = math.log(params.T)
    ln_star = math.log(boundary_threshold(params.d, tol))
    if ln_t <= ln_star:
        raise DegenerateCaseError(
            f"T={params.T} not above the boundary threshold exp({ln_star:.6f})"
        )
    ln_zero = math.log(uniform_energy_threshold(params.d, tol))
    return (ln_t - ln_zero) / (2.0 * params.gamma**2 * (ln_t - ln_star) ** 2)


@dataclass
class PdReport:
    """Eigenvalue certificate for the cell-averaged kernel Gram matrix."""

    dim: int
    T: float
    cells: int
    min_eigenvalue: float
    violating_density: np.ndarray | None = None
    repair_magnitude: float = 0.0

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "T": self.T,
            "cells": self.cells,
            "minEigenvalue": self.min_eigenvalue,
            "repairMagnitude": self.repair_magnitude,
        }
        if self.violating_density is not None:
            out["violatingDensity"] = [float(v) for v in self.violating_density]
        return out


def pd_min_eigenvalue(
    params: ModelParams,
    cells: int,
    tol: float = 1e-8,
    max_cells: int = 4096,
) -> PdReport:
    """Minimum eigenvalue of the Gram matrix of exact cell averages of
    ln(T/|x-y|) over a regular partition of B(0,1).

    cells is a target total count; the grid uses round(cells^(1/d))
    cells per axis and keeps the cubes whose centers fall in the open
    ball.  Entries are exact pair averages of the kernel over the two
    cells (finite on the diagonal, unlike point evaluation), so the test
    probes the kernel's action on piecewise-constant signed densities.
    When the minimum eigenvalue drops below -tol the corresponding
    unit-norm eigenvector is returned as the violating density.
    """
    if cells < 2:
        raise ParameterError("need at least 2 cells")
    d, T = params.d, params.T
    cpa = max(2, round(cells ** (1.0 / d)))
    if cpa**d > max_cells:
        raise ParameterError(
            f"{cpa ** d} cells exceed the {max_cells}-cell eigensolve cap"
        )
    h = 2.0 / cpa
    axes = [np.arange(cpa)] * d
    idx = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    centers = -1.0 + (idx + 0.5) * h
    keep = (centers**2).sum(axis=1) < 1.0
    idx = idx[keep]
    m = idx.shape[0]

    table = pair_log_mean_table((cpa,) * d)
    gram = np.empty((m, m))
    base = math.log(T) - math.log(h)
    block = 512
    for start in range(0, m, block):
        delta = np.abs(idx[start : start + block, None, :] - idx[None, :, :])
        flat = np.ravel_multi_index(
            tuple(delta[..., j] for j in range(d)), (cpa,) * d
        )
        gram[start : start + block] = base - table.ravel()[flat]
    gram = 0.5 * (gram + gram.T)

    w, v = np.linalg.eigh(gram)
    min_eig = float(w[0])
    witness = None
    if min_eig < -tol:
        witness = v[:, 0] / np.linalg.norm(v[:, 0])
    return PdReport(dim=d, T=T, cells=m, min_eigenvalue=min_eig, violating_density=witness)
