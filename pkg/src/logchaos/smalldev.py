"""Small-deviation probabilities and lognormal-exponent fits.

For chaos masses, -ln P(M <= delta) grows like c (ln delta)^2 as delta
shrinks; this module estimates P(M <= delta) with exact binomial
confidence intervals, fits the quadratic exponent c by weighted least
squares in ln delta (with a linear term, since the subleading behavior
is linear), fits the matching quadratic exponent of -ln E exp(-e^x M)
in x, and compares the two.

A curve whose confidence half-widths are all zero is treated as exact
(synthetic oracle data): the binomial usability filter and delta-method
weights are replaced by plain least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as beta_dist

from .errors import ParameterError
from .gmc import SampleBank
from .laplace import laplace_curve


@dataclass
class SmallDevCurve:
    deltas: np.ndarray  # decreasing
    probs: np.ndarray
    ci_half_widths: np.ndarray
    N: int


def smalldev_prob(bank: SampleBank, delta: float) -> tuple[float, float]:
    """Empirical P(mass <= delta) with an exact (Clopper-Pearson) 95%
    confidence half-width.  Zero- and full-count cells carry the
    one-sided exact bound 1 - 0.05^(1/N)."""
    if delta <= 0:
        raise ParameterError("delta must be positive")
    n = bank.n_samples
    k = int((bank.masses <= delta).sum())
    p = k / n
    if k == 0 or k == n:
        return p, 1.0 - 0.05 ** (1.0 / n)
    lo = beta_dist.ppf(0.025, k, n - k + 1)
    hi = beta_dist.ppf(0.975, k + 1, n - k)
    return p, float((hi - lo) / 2.0)


def smalldev_curve(bank: SampleBank, deltas) -> SmallDevCurve:
    ds = np.sort(np.asarray(deltas, dtype=float))[::-1]
    probs = np.empty(ds.size)
    cis = np.empty(ds.size)
    for i, d in enumerate(ds):
        probs[i], cis[i] = smalldev_prob(bank, d)
    return SmallDevCurve(deltas=ds, probs=probs, ci_half_widths=cis, N=bank.n_samples)


def exact_curve(deltas, probs) -> SmallDevCurve:
    """Wrap exactly known probabilities (e.g. a closed-form law) as a
    curve; zero half-widths mark it exact for the fitting routines."""
    ds = np.asarray(deltas, dtype=float)
    order = np.argsort(ds)[::-1]
    return SmallDevCurve(
        deltas=ds[order],
        probs=np.asarray(probs, dtype=float)[order],
        ci_half_widths=np.zeros(ds.size),
        N=0,
    )


@dataclass
class ExponentFit:
    c: float  # coefficient of the squared log variable
    linear: float
    intercept: float
    r_squared: float
    window: tuple
    c_std_error: float
    n_points: int
    lognormal_like: bool
    weights_note: str

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "linear": self.linear,
            "intercept": self.intercept,
            "rSquared": self.r_squared,
            "window": list(self.window),
            "cStdError": self.c_std_error,
            "nPoints": self.n_points,
            "lognormalLike": self.lognormal_like,
            "weights": self.weights_note,
        }


def _wls_quadratic(t, y, variances):
    """Weighted LS of y on [t^2, t, 1].  variances=None means unit
    weights with residual-estimated errors; otherwise the variances are
    taken as known (delta method) and the coefficient covariance is
    (X' W X)^{-1}."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    design = np.column_stack([t * t, t, np.ones_like(t)])
    if variances is None:
        w = np.ones_like(y)
    else:
        w = 1.0 / np.asarray(variances, dtype=float)
    a = (design.T * w) @ design
    coeffs = np.linalg.solve(a, (design.T * w) @ y)
    cov = np.linalg.inv(a)
    resid = y - design @ coeffs
    if variances is None and y.size > 3:
        cov = cov * float((resid**2).sum() / (y.size - 3))
    ybar = float((w * y).sum() / w.sum())
    ss_res = float((w * resid**2).sum())
    ss_tot = float((w * (y - ybar) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return coeffs, cov, r2


def fit_lognormal_exponent(
    curve: SmallDevCurve, min_hits: int = 30, max_p: float = 0.5
) -> ExponentFit:
    """Fit -ln p = c (ln delta)^2 + linear * ln delta + intercept.

    Monte Carlo curves keep only points with at least min_hits hits and
    p <= max_p, weighted by the delta-method variance of -ln p-hat,
    (1 - p)/(N p).  Exact curves (zero half-widths) use every point with
    0 < p <= max_p, unweighted."""
    p = curve.probs
    exact = bool(np.all(curve.ci_half_widths == 0.0))
    if exact:
        usable = (p > 0.0) & (p <= max_p)
    else:
        hits = np.rint(p * curve.N)
        usable = (hits >= min_hits) & (p <= max_p) & (p > 0.0)
    if usable.sum() < 4:
        raise ParameterError(
            f"only {int(usable.sum())} usable points; need at least 4"
        )
    d = curve.deltas[usable]
    pu = p[usable]
    t = np.log(d)
    y = -np.log(pu)
    variances = None if exact else (1.0 - pu) / (curve.N * pu)
    coeffs, cov, r2 = _wls_quadratic(t, y, variances)
    c = float(coeffs[0])
    c_se = float(math.sqrt(max(cov[0, 0], 0.0)))
    return ExponentFit(
        c=c,
        linear=float(coeffs[1]),
        intercept=float(coeffs[2]),
        r_squared=r2,
        window=(float(d.min()), float(d.max())),
        c_std_error=c_se,
        n_points=int(usable.sum()),
        lognormal_like=bool(c > 0.0 and c > 2.0 * c_se),
        weights_note="unit (exact curve)" if exact else "1/Var(-ln p), delta method",
    )


def fit_laplace_exponent(xs, estimates, std_errors) -> ExponentFit:
    """Fit -ln Q(x) = c x^2 + linear * x + intercept for a Laplace curve
    Q(x) = E exp(-e^x M), weighting by the delta-method variance
    (SE/Q)^2.  Zero (or None) standard errors mean an exact curve."""
    xs = np.asarray(xs, dtype=float)
    q = np.asarray(estimates, dtype=float)
    if std_errors is None:
        se = np.zeros_like(q)
    else:
        se = np.asarray(std_errors, dtype=float)
    exact = bool(np.all(se == 0.0))
    usable = q > 0.0
    if not exact:
        usable &= se / np.maximum(q, 1e-300) <= 0.5
    if usable.sum() < 4:
        raise ParameterError(
            f"only {int(usable.sum())} usable points; need at least 4"
        )
    x = xs[usable]
    y = -np.log(q[usable])
    variances = None if exact else (se[usable] / q[usable]) ** 2
    coeffs, cov, r2 = _wls_quadratic(x, y, variances)
    c = float(coeffs[0])
    c_se = float(math.sqrt(max(cov[0, 0], 0.0)))
    return ExponentFit(
        c=c,
        linear=float(coeffs[1]),
        intercept=float(coeffs[2]),
        r_squared=r2,
        window=(float(x.min()), float(x.max())),
        c_std_error=c_se,
        n_points=int(usable.sum()),
        lognormal_like=bool(c > 0.0 and c > 2.0 * c_se),
        weights_note="unit (exact curve)" if exact else "(SE/Q)^2, delta method",
    )


def laplace_vs_smalldev(
    bank: SampleBank, x_grid, stream_key: int = 0, deltas=None
) -> dict:
    """Fit the quadratic exponent on both sides -- -ln Q along x_grid
    and -ln P(M <= delta) along a delta grid -- and check the transfer
    direction: the Laplace exponent should not exceed the distribution
    exponent beyond combined fit noise."""
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.size < 4:
        raise ParameterError("need at least 4 Laplace grid points")
    ests = laplace_curve(bank, bank.radius, x_grid, stream_key)
    lap = fit_laplace_exponent(
        [e.x for e in ests], [e.estimate for e in ests], [e.std_error for e in ests]
    )
    if deltas is None:
        lo = float(np.quantile(bank.masses, 3e-4))
        hi = float(np.quantile(bank.masses, 0.4))
        deltas = np.geomspace(lo, hi, 12)
    dist = fit_lognormal_exponent(smalldev_curve(bank, deltas))
    sigma = math.sqrt(lap.c_std_error**2 + dist.c_std_error**2)
    return {
        "laplace": lap,
        "distribution": dist,
        "gap": dist.c - lap.c,
        "sigma": sigma,
        "directionOk": bool(lap.c <= dist.c + 3.0 * sigma),
    }
