"""Laplace functionals of chaos masses and their factorizations.

Writing Q_r(x) = E exp(-e^x M_r), an exact change of variables turns
Q_r into a Gaussian mixture over an independent unit exponential, and
from there into

    Q_r(x) = Cr * exp(-a x^2 + b x) * K(4a, 4a x)

where K(s, z) -- the "heat factor" -- solves a backward heat equation
in (s, z) and carries all dependence on the mass law.  A companion
factor K2 plays the same role for E exp(-e^x / M_r).  Both have Monte
Carlo estimators over a sample bank and exact quadrature forms for a
deterministic point mass, which is what the tight PDE-residual checks
run on.  The module also evaluates the lower envelope and the
band coefficients that bracket ln Q_r, and the generic transfer between
distribution bounds P(xi <= eps) and Laplace bounds E exp(-t xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gammafn, ndtr

from . import rng
from .errors import DegenerateCaseError, ParameterError, QuadratureError
from .gmc import SampleBank, sample_scaled_masses, scaling_constants
from .params import ModelParams


@dataclass
class LaplaceEstimate:
    x: float
    estimate: float
    std_error: float
    N: int
    method: str


def _mass_vector(bank: SampleBank, r: float, stream_key: int):
    if bank.radius == r:
        return bank.masses, "direct-bank"
    if bank.radius == 1.0 and 0.0 < r < 1.0:
        return sample_scaled_masses(bank, r, stream_key), "scaled-bank"
    raise ParameterError(
        f"bank radius {bank.radius} serves neither direct nor scaled estimation at r={r}"
    )


def estimate_Q(bank: SampleBank, r: float, x: float, stream_key: int = 0) -> LaplaceEstimate:
    """Sample mean of exp(-e^x m) over bank masses m (scaled to radius r
    when the bank lives on the unit ball)."""
    masses, method = _mass_vector(bank, r, stream_key)
    with np.errstate(over="ignore"):
        vals = np.exp(-math.exp(x) * masses)
    return LaplaceEstimate(
        x=x,
        estimate=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / math.sqrt(vals.size)),
        N=vals.size,
        method=method,
    )


def laplace_curve(bank: SampleBank, r: float, xs, stream_key: int = 0):
    """estimate_Q along a grid of x values, sharing one set of masses so
    the reported curve is exactly monotone in x."""
    masses, method = _mass_vector(bank, r, stream_key)
    out = []
    for x in np.asarray(xs, dtype=float):
        with np.errstate(over="ignore"):
            vals = np.exp(-math.exp(x) * masses)
        out.append(
            LaplaceEstimate(
                x=float(x),
                estimate=float(vals.mean()),
                std_error=float(vals.std(ddof=1) / math.sqrt(vals.size)),
                N=vals.size,
                method=method,
            )
        )
    return out


def exponential_mixture_estimate(
    bank: SampleBank,
    params: ModelParams,
    r: float,
    t: float,
    stream_key: int = 0,
    proposal_rate: float = 1.0,
) -> LaplaceEstimate:
    """E exp(-t M_r) written as a Gaussian mixture over an independent
    unit exponential U paired with the unit-ball masses:

        Cr * t^b * E[ U^{-1-b} M^b exp(-(ln U - ln t - ln M)^2
                                        / (2 gamma^2 ln(1/r))) ]

    Valid for t > 1.  proposal_rate != 1 draws U from a different
    exponential rate and reweights (importance sampling); the estimate
    is unchanged in expectation.
    """
    if not t > 1.0:
        raise ParameterError(f"mixture form needs t > 1, got {t}")
    if bank.radius != 1.0:
        raise ParameterError("mixture estimate needs a unit-ball bank")
    if proposal_rate <= 0:
        raise ParameterError("proposal rate must be positive")
    consts = scaling_constants(params, r)
    b = consts.b
    g2 = params.gamma**2
    log_inv = math.log(1.0 / r)

    u = rng.exponentials(stream_key, bank.n_samples) / proposal_rate
    log_u = np.log(u)
    log_m = np.log(bank.masses)
    expo = (
        -(1.0 + b) * log_u
        + b * log_m
        - (log_u - math.log(t) - log_m) ** 2 / (2.0 * g2 * log_inv)
    )
    if proposal_rate != 1.0:
        # density ratio Exp(1)/Exp(rate) at u
        expo += -u * (1.0 - proposal_rate) - math.log(proposal_rate)
    vals = np.exp(expo)
    pref = consts.Cr * t**b
    return LaplaceEstimate(
        x=math.log(t),
        estimate=float(pref * vals.mean()),
        std_error=float(pref * vals.std(ddof=1) / math.sqrt(vals.size)),
        N=vals.size,
        method="exp-mixture",
    )


@dataclass
class HeatFactorPoint:
    s: float
    z: float
    value: float
    std_error: float
    mode: str
    tail_flag: bool = False
    region_note: str | None = None


def heat_factor_mc(
    bank: SampleBank, params: ModelParams, s: float, z: float, stream_key: int = 0
) -> HeatFactorPoint:
    """Monte Carlo heat factor over the bank:
    E[(1/M) exp((z/2 - b - 1) ln(U/M) - (s/4) ln^2(U/M))] with U a unit
    exponential paired with each mass.  Needs s > 0 and z > 2b + 2."""
    b = params.b
    if not s > 0:
        raise ParameterError(f"need s > 0, got {s}")
    if not z > 2.0 * b + 2.0:
        raise ParameterError(f"need z > 2b + 2 = {2 * b + 2}, got {z}")
    u = rng.exponentials(stream_key, bank.n_samples)
    w = np.log(u) - np.log(bank.masses)
    expo = (0.5 * z - b - 1.0) * w - 0.25 * s * w * w - np.log(bank.masses)
    vals = np.exp(expo)
    return HeatFactorPoint(
        s=s,
        z=z,
        value=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / math.sqrt(vals.size)),
        mode="monte-carlo",
    )


def inverse_heat_factor_mc(
    bank: SampleBank, params: ModelParams, s: float, z: float, stream_key: int = 0
) -> HeatFactorPoint:
    """Heat factor of the inverse mass:
    E[M exp((z/2 + b - 1) ln(M U) - (s/4) ln^2(M U))].

    Evaluates at any z > 0 for s > 0 (the Gaussian factor tames the
    moments); z outside (0, 2(q - b)) is outside the PDE region and gets
    a note.  A tail flag fires when the top 0.1% of samples carry more
    than 20% of the mean."""
    b, q = params.b, params.q
    if not s > 0:
        raise ParameterError(f"need s > 0 in Monte Carlo mode, got {s}")
    if not z > 0:
        raise ParameterError(f"need z > 0, got {z}")
    u = rng.exponentials(stream_key, bank.n_samples)
    v = np.log(bank.masses) + np.log(u)
    expo = (0.5 * z + b - 1.0) * v - 0.25 * s * v * v + np.log(bank.masses)
    vals = np.exp(expo)
    total = vals.sum()
    top = np.sort(vals)[-max(1, vals.size // 1000) :].sum()
    note = None
    if not 0.0 < z < 2.0 * (q - b):
        note = f"z={z} outside the PDE region (0, {2 * (q - b):.6g})"
    return HeatFactorPoint(
        s=s,
        z=z,
        value=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / math.sqrt(vals.size)),
        mode="monte-carlo",
        tail_flag=bool(total > 0 and top > 0.2 * total),
        region_note=note,
    )


def _degenerate_integral(alpha: float, s: float, lam: float, tol: float) -> float:
    # int_{-inf}^{inf} exp(alpha w - (s/4) w^2 - lam e^w) dw
    if s < 0:
        raise ParameterError("need s >= 0")
    if lam <= 0:
        raise ParameterError("need a positive point mass")
    if s == 0:
        if alpha <= 0:
            raise ParameterError(
                f"s = 0 integral needs a positive drift exponent, got {alpha}"
            )
        return float(gammafn(alpha) * lam ** (-alpha))

    def f(w):
        with np.errstate(over="ignore"):
            return float(np.exp(alpha * w - 0.25 * s * w * w - lam * np.exp(w)))

    val, err = quad(f, -np.inf, np.inf, epsabs=tol, epsrel=1e-13, limit=400)
    if err > max(100.0 * tol, 1e-10):
        raise QuadratureError(f"degenerate heat-factor quadrature error {err:.2e}")
    return val


def heat_factor_exact(
    s: float, z: float, b: float, m: float = 1.0, tol: float = 1e-13
) -> HeatFactorPoint:
    """Heat factor for the deterministic mass law M = m, by quadrature.
    Accepts s = 0 (gamma-function closed form) and z >= 2b + 2."""
    if not z >= 2.0 * b + 2.0:
        raise ParameterError(f"need z >= 2b + 2 = {2 * b + 2}, got {z}")
    val = _degenerate_integral(0.5 * z - b, s, m, tol)
    return HeatFactorPoint(s=s, z=z, value=val, std_error=0.0, mode="degenerate-quadrature")


def inverse_heat_factor_exact(
    s: float, z: float, b: float, m: float = 1.0, tol: float = 1e-13
) -> HeatFactorPoint:
    """Inverse-mass heat factor for M = m; at s = 0 this is
    Gamma(z/2 + b) m^{z/2 + b}."""
    if not z > 0:
        raise ParameterError(f"need z > 0, got {z}")
    val = _degenerate_integral(0.5 * z + b, s, 1.0 / m, tol)
    return HeatFactorPoint(s=s, z=z, value=val, std_error=0.0, mode="degenerate-quadrature")


def heat_residual(fn, s: float, z: float, h: float = 1e-3) -> dict:
    """Central-difference residual of the backward heat equation
    d/ds fn + d^2/dz^2 fn at (s, z), with a half-step Richardson check.
    fn is any (s, z) -> value callable."""
    if s - h <= 0:
        raise ParameterError("stencil leaves the s > 0 half-plane")

    def resid(hh):
        ds = (fn(s + hh, z) - fn(s - hh, z)) / (2.0 * hh)
        dzz = (fn(s, z + hh) - 2.0 * fn(s, z) + fn(s, z - hh)) / (hh * hh)
        return ds + dzz

    return {
        "value": fn(s, z),
        "residual": resid(h),
        "residual_half": resid(h / 2.0),
    }


def heat_drift_gap(fn, s: float, z: float, h: float = 1e-3) -> float:
    """value/4 - (d/ds + d/dz) fn; nonnegative (up to noise) for the
    bank heat factor."""
    ds = (fn(s + h, z) - fn(s - h, z)) / (2.0 * h)
    dz = (fn(s, z + h) - fn(s, z - h)) / (2.0 * h)
    return fn(s, z) / 4.0 - ds - dz


def envelope_constant(bank: SampleBank, params: ModelParams, r: float):
    """Empirical mass-concentration constant of the lower envelope:
    P(|ln M| <= b/(4a)) times the width of the exponential gap it
    certifies.  Returns (value, standard error)."""
    consts = scaling_constants(params, r)
    theta = consts.b / (4.0 * consts.a)
    log_m = np.log(bank.masses)
    hits = np.abs(log_m) <= theta
    phat = float(hits.mean())
    se = math.sqrt(max(phat * (1.0 - phat), 0.0) / bank.n_samples)
    gap = math.exp(-math.exp(-theta)) - math.exp(-math.exp(theta))
    return phat * gap, gap * se


def envelope_valid_from(params: ModelParams, r: float) -> float:
    """Smallest x at which the lower envelope applies: (b+1)/(2a)."""
    consts = scaling_constants(params, r)
    return (consts.b + 1.0) / (2.0 * consts.a)


def laplace_lower_envelope(
    bank: SampleBank, params: ModelParams, r: float, x: float
) -> float:
    """Pointwise lower bound on Q_r(x) = E exp(-e^x M_r):

        Cr * chat * exp(-a x^2 + b^2/(2a))   for  x >= (b+1)/(2a),

    with chat the empirical envelope constant from the bank."""
    consts = scaling_constants(params, r)
    x_min = (consts.b + 1.0) / (2.0 * consts.a)
    if x < x_min:
        raise ParameterError(f"envelope applies for x >= {x_min:.6g}, got {x}")
    chat, _ = envelope_constant(bank, params, r)
    if chat == 0.0:
        raise DegenerateCaseError(
            "no bank mass falls in the envelope window; bank too small"
        )
    return consts.Cr * chat * math.exp(
        -consts.a * x * x + consts.b**2 / (2.0 * consts.a)
    )


def laplace_band_coefficients(
    params: ModelParams, r: float, c0: float, p: float
) -> tuple[float, float]:
    """Quadratic coefficients (lower, upper) of the band holding ln Q_r:

        -a x^2 - C1 x  <=  ln Q_r(x)  <=  -(a c0/(p a + c0)) x^2 + C1 x

    where c0 is any valid quadratic rate for the unit-ball transform and
    p > 1 a free exponent; the linear slack C1 is fitted by callers."""
    if not p > 1:
        raise ParameterError(f"need p > 1, got {p}")
    if not c0 > 0:
        raise ParameterError(f"need c0 > 0, got {c0}")
    consts = scaling_constants(params, r)
    a = consts.a
    return (-a, -a * c0 / (p * a + c0))


class LognormalLaw:
    """Law of exp(sigma xi), xi standard normal; exact distribution and
    Laplace transform for transfer tests."""

    def __init__(self, sigma: float = 1.0):
        if sigma <= 0:
            raise ParameterError("sigma must be positive")
        self.sigma = sigma

    def prob_below(self, eps: float) -> float:
        if eps <= 0:
            return 0.0
        return float(ndtr(math.log(eps) / self.sigma))

    def laplace(self, t: float) -> float:
        if t <= 0:
            raise ParameterError("transform argument must be positive")
        sig = self.sigma

        def g(u):
            return -t * math.exp(sig * u) - 0.5 * u * u

        # the integrand concentrates near the root of t sig e^{sig u} = -u;
        # recentring and rescaling by the peak value keeps the quadrature
        # honest at any t (the raw values underflow already around t ~ e^30)
        lo, hi = -1.0, 1.0
        for _ in range(200):
            if t * sig * math.exp(sig * lo) + lo < 0.0:
                break
            lo *= 2.0
        else:  # pragma: no cover - t would have to overflow the exp above
            raise QuadratureError("no bracket for the integrand peak")
        from scipy.optimize import brentq

        u_star = brentq(lambda u: t * sig * math.exp(sig * u) + u, lo, hi, xtol=1e-13)
        peak = g(u_star)
        width = 1.0 / math.sqrt(1.0 + abs(u_star) * sig)
        span = 40.0 * max(width, 1.0)

        def f(u):
            with np.errstate(over="ignore"):
                return float(np.exp(g(u) - peak))

        val, err = quad(
            f, u_star - span, u_star + span, epsabs=1e-15, epsrel=1e-12, limit=300
        )
        if err > 1e-8 * max(abs(val), 1e-300):
            raise QuadratureError(f"lognormal Laplace quadrature error {err:.2e}")
        return math.exp(peak) * val / math.sqrt(2.0 * math.pi)


class DegenerateLaw:
    """Deterministic mass at m."""

    def __init__(self, m: float = 1.0):
        if m <= 0:
            raise ParameterError("mass must be positive")
        self.m = m

    def prob_below(self, eps: float) -> float:
        return 1.0 if eps >= self.m else 0.0

    def laplace(self, t: float) -> float:
        return math.exp(-t * self.m)


def transfer_check(
    law,
    c: float,
    C1: float,
    eps0: float,
    kappa_slack: float = 0.5,
    t_grid=None,
    direction: str = "both",
) -> dict:
    """Numerical check of the transfer between small-value distribution
    bounds and Laplace-transform bounds for a nonnegative law.

    Upper direction: if P(xi <= eps) <= C1 exp(-c ln^2 eps) for
    eps <= eps0, then for t with (ln t)^{2+k} <= eps0 t,

      E e^{-t xi} <= C1 exp(-c (ln t - (2+k) ln ln t)^2) + exp(-(ln t)^{2+k}).

    Lower direction: if P(xi <= eps) >= C1 exp(-c ln^2 eps) for
    eps <= eps0, then for t >= max(1, 1/eps0),

      E e^{-t xi} >= (C1/2) e^{-1} exp(-c (ln t + ln 2)^2).

    The report verifies the hypothesis on an eps grid and the conclusion
    on the t grid; failures are itemized, not raised.
    """
    if t_grid is None:
        t_grid = np.geomspace(10.0, 1e4, 13)
    t_grid = np.asarray(t_grid, dtype=float)
    eps_grid = np.geomspace(eps0 * 1e-6, eps0, 40)
    k = kappa_slack
    report = {"c": c, "C1": C1, "eps0": eps0, "kappaSlack": k}

    def dist_bound(eps):
        return C1 * math.exp(-c * math.log(eps) ** 2)

    if direction in ("upper", "both"):
        hyp = [law.prob_below(e) <= dist_bound(e) * (1.0 + 1e-12) for e in eps_grid]
        pts = []
        for t in t_grid:
            lt = math.log(t)
            if lt <= 1.0 or lt ** (2.0 + k) > eps0 * t:
                continue  # outside the regime the upper transfer covers
            lhs = law.laplace(t)
            rhs = C1 * math.exp(
                -c * (lt - (2.0 + k) * math.log(lt)) ** 2
            ) + math.exp(-(lt ** (2.0 + k)))
            pts.append({"t": float(t), "lhs": lhs, "rhs": rhs, "ok": lhs <= rhs * (1.0 + 1e-9)})
        report["upper"] = {
            "hypothesis_ok": all(hyp),
            "points": pts,
            "ok": all(hyp) and all(p["ok"] for p in pts) and len(pts) > 0,
        }

    if direction in ("lower", "both"):
        hyp = [law.prob_below(e) >= dist_bound(e) * (1.0 - 1e-12) for e in eps_grid]
        pts = []
        for t in t_grid:
            if t < max(1.0, 1.0 / eps0):
                continue
            lhs = law.laplace(t)
            rhs = 0.5 * C1 * math.exp(-1.0) * math.exp(-c * (math.log(t) + math.log(2.0)) ** 2)
            pts.append({"t": float(t), "lhs": lhs, "rhs": rhs, "ok": lhs >= rhs * (1.0 - 1e-9)})
        report["lower"] = {
            "hypothesis_ok": all(hyp),
            "points": pts,
            "ok": all(hyp) and all(p["ok"] for p in pts) and len(pts) > 0,
        }

    keys = [k_ for k_ in ("upper", "lower") if k_ in report]
    report["ok"] = all(report[k_]["ok"] for k_ in keys)
    return report
