"""One-shot verification pipeline.

Runs the full acceptance suite and returns a JSON-able report with one
entry per criterion: measured values, the gates, pass/fail.  The
criteria pin their own model parameters (they are cross-checks of the
library against known values and internal identities, not experiments
on the user's model); the RunConfig supplies the scale knobs -- sample
count, base grid resolution, repair gate, stream keys, bank ids -- so a
small config gives a fast smoke run and the default config reproduces
the reference scale.

Everything here is deterministic given the config: all Monte Carlo is
driven by counter-based streams, so re-running -- with any worker
count -- rebuilds the payload byte for byte.  For that reason the
payload carries no timestamps and no timings.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np
from scipy.stats import ks_2samp

from . import bounds as bounds_mod
from . import laplace as lap
from . import potential as pot
from . import smalldev as sd
from .config import RunConfig
from .gmc import create_bank, sample_scaled_masses, scaling_constants
from .params import ModelParams

# ---------------------------------------------------------------------------
# frozen references and calibration constants
# ---------------------------------------------------------------------------

# closed-form positive-definiteness thresholds, d = 1..8
_T_CLOSED = [
    0.5,
    1.0,
    math.e / 2.0,
    math.exp(0.5),
    math.exp(4.0 / 3.0) / 2.0,
    math.exp(0.75),
    math.exp(23.0 / 15.0) / 2.0,
    math.exp(11.0 / 12.0),
]

# boundary-threshold references: d -> (ln T*, tolerance)
_LN_STAR_REFS = {
    1: (math.log(2.0) - 1.0, 1e-9),
    3: (0.1098, 5e-4),
    4: (0.1666, 5e-4),
    5: (0.2014, 5e-4),
}

# 99% two-sample Kolmogorov-Smirnov quantile constant
_KS_C99 = 1.628

# identity test points for the exponential-mixture form
_MIXTURE_TS = (3.0, 10.0, 30.0)

# (s, z) stencils for the degenerate-mode heat-equation residuals; the
# forward factor needs z above 2b + 2 = 5 at b = 3/2, the inverse one
# only z > 0
_STENCIL_B = 1.5
_KAPPA_STENCIL = [(s, z) for s in (0.5, 1.0, 2.0) for z in (6.0, 7.0, 8.0)]
_KAPPA2_STENCIL = [(s, z) for s in (0.5, 1.0, 2.0) for z in (1.0, 2.0, 3.0)]

# Monte Carlo property checks run at these points (unit bank, b = 3/2)
_MC_PROP_S = (0.5, 1.0, 1.5, 2.0)
_MC_PROP_Z = 6.0

# test windows, chosen so the last point still has usable relative
# standard error at the reference sample counts
_KAPPA_XS = np.linspace(2.0, 3.5, 5)  # forward identity, gamma = 1
_KAPPA2_XS = np.linspace(1.0, 3.0, 5)  # inverse identity, gamma = 1.2
_ENVELOPE_XS_OFFSET = np.linspace(0.2, 1.8, 10)  # added to (b+1)/(2a)
_UNIT_FIT_XS = np.linspace(0.8, 2.8, 10)  # unit-ball curve for c0
_D3_FIT_XS = np.linspace(2.2, 4.2, 10)  # scaled d=3 curve
# free exponent of the band construction; the curve windows above are
# pre-asymptotic, and p = 3 keeps the band's low edge clear of the
# downward finite-x bias of the fitted rate
_BAND_P = 3.0

# synthetic lognormal oracle (criterion 10): the distribution window
# reaches into genuinely small probabilities (down to ~1e-43, exact
# normal tail), and the transform window sits as deep as float64 lets
# the transform value go (about e^-700) -- the quadratic coefficient
# converges to 1/2 only logarithmically, so shallow windows miss it
_SYNTH_DELTAS = np.geomspace(1e-6, 0.05, 20)
_SYNTH_XS = np.linspace(22.0, 40.0, 13)
_TRANSFER_UPPER = {"c": 0.5, "C1": 0.52, "eps0": 1.0}
_TRANSFER_LOWER = {"c": 0.55, "C1": 0.18, "eps0": 1.0}

# pinned model parameter sets used by the cross-checks
_P1 = ModelParams(d=1, gamma=1.0, T=0.5)
_P1_G12 = ModelParams(d=1, gamma=1.2, T=0.5)
_P2 = ModelParams(d=2, gamma=1.0, T=1.0)
_P3 = ModelParams(d=3, gamma=1.0, T=math.e / 2.0)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, sd.ExponentFit):
        return obj.to_dict()
    return obj


class _Context:
    """Shared state for one verification run: config-derived scales and
    a cache so several criteria can lean on the same bank."""

    def __init__(self, config: RunConfig, workers):
        self.config = config
        self.workers = workers
        self.n = config.mc_n
        self.cpa1 = config.grid_cells_per_axis
        self.cpa2 = max(4, round(self.cpa1 * 1.5))
        self.cpa3 = max(4, round(self.cpa1 * 12.0 / 64.0))
        self.key0 = config.mc_stream_keys[0]
        self.bank0 = config.mc_bank_id
        self.gate = config.tol_se_gate
        self._banks = {}

    def bank(self, params, radius, cpa, n, bank_id, workers=None):
        key = (params.d, params.gamma, params.T, radius, cpa, n, bank_id)
        if key not in self._banks:
            self._banks[key] = create_bank(
                params,
                radius,
                cpa,
                n,
                bank_id,
                workers=self.workers if workers is None else workers,
                repair_gate=self.config.tol_repair_gate,
            )
        return self._banks[key]

    # the banks the criteria share
    def unit1(self):
        return self.bank(_P1, 1.0, self.cpa1, self.n, self.bank0)

    def half1(self):
        return self.bank(_P1, 0.5, self.cpa1, self.n, self.bank0 + 1)

    def unit1_fine(self):
        return self.bank(_P1, 1.0, 2 * self.cpa1, self.n, self.bank0 + 2)

    def half1_fine(self):
        return self.bank(_P1, 0.5, 2 * self.cpa1, self.n, self.bank0 + 3)

    def unit_g12(self):
        return self.bank(_P1_G12, 1.0, self.cpa1, self.n, self.bank0 + 4)

    def bank_d2(self):
        return self.bank(_P2, 1.0, self.cpa2, self.n, self.bank0 + 5)

    def bank_d3(self):
        return self.bank(_P3, 1.0, self.cpa3, 10 * self.n, self.bank0 + 6)


def _c01_thresholds(ctx):
    t_vals = [pot.pd_threshold(d) for d in range(1, 9)]
    closed_ok = all(
        abs(t - ref) <= 1e-12 * ref for t, ref in zip(t_vals, _T_CLOSED)
    )
    star = {}
    star_ok = True
    for d, (ref, tol) in sorted(_LN_STAR_REFS.items()):
        ln_star = math.log(pot.boundary_threshold(d))
        ok = abs(ln_star - ref) <= tol
        star_ok = star_ok and ok
        star[str(d)] = {"lnTStar": ln_star, "ref": ref, "tol": tol, "ok": ok}
    measured = {"T": t_vals, "closedFormOk": closed_ok, "lnTStar": star}
    return closed_ok and star_ok, measured


def _c02_ordering(ctx):
    dims = range(1, 6)
    t = {d: pot.pd_threshold(d) for d in dims}
    t_star = {d: pot.boundary_threshold(d) for d in dims}
    t_zero = {d: pot.uniform_energy_threshold(d) for d in dims}
    zero_below_star = all(t_zero[d] < t_star[d] for d in dims)
    star_below_t = all(t_star[d] < t[d] for d in (3, 4, 5))
    star_above_t1 = t_star[1] > t[1]
    star_two = abs(t_star[2] - t[2]) <= 1e-4
    measured = {
        "T": [t[d] for d in dims],
        "TStar": [t_star[d] for d in dims],
        "TZero": [t_zero[d] for d in dims],
        "zeroBelowStar": zero_below_star,
        "starBelowT345": star_below_t,
        "starAboveT1": star_above_t1,
        "starTwoGap": abs(t_star[2] - t[2]),
    }
    passed = zero_below_star and star_below_t and star_above_t1 and star_two
    return passed, measured


def _c03_pd_certificates(ctx):
    rep1 = pot.pd_min_eigenvalue(ModelParams(1, 1.0, 0.5), 64)
    rep2 = pot.pd_min_eigenvalue(ModelParams(3, 1.0, 2.0 * pot.pd_threshold(3)), 512)
    rep3 = pot.pd_min_eigenvalue(ModelParams(1, 1.0, 0.2), 64)
    ok1 = rep1.min_eigenvalue >= -1e-8
    ok2 = rep2.min_eigenvalue >= -1e-8
    ok3 = rep3.min_eigenvalue < 0 and rep3.violating_density is not None
    measured = {
        "minEig_d1_T05": rep1.min_eigenvalue,
        "minEig_d3_2T": rep2.min_eigenvalue,
        "minEig_d1_T02": rep3.min_eigenvalue,
        "witnessCells": 0 if rep3.violating_density is None else int(rep3.violating_density.size),
    }
    return ok1 and ok2 and ok3, measured


def _c04_first_moment(ctx):
    legs = []
    passed = True
    for bank in (ctx.unit1(), ctx.bank_d2()):
        gap = abs(bank.mean() - bank.total_volume)
        se = bank.std_error()
        ok = gap <= 5.0 * se
        passed = passed and ok
        legs.append(
            {
                "d": bank.params.d,
                "mean": bank.mean(),
                "gridVolume": bank.total_volume,
                "stdError": se,
                "gapInSE": gap / se if se > 0 else float("inf"),
                "ok": ok,
            }
        )
    return passed, {"banks": legs}


def _c05_scaling_law(ctx):
    n = ctx.n
    allowance = _KS_C99 * math.sqrt(2.0 / n)
    gate = 0.01 + allowance

    scaled = sample_scaled_masses(ctx.unit1(), 0.5, ctx.key0)
    ks_base = float(ks_2samp(scaled, ctx.half1().masses).statistic)

    scaled_f = sample_scaled_masses(ctx.unit1_fine(), 0.5, ctx.key0 + 1)
    ks_fine = float(ks_2samp(scaled_f, ctx.half1_fine().masses).statistic)

    excess_base = max(0.0, ks_base - gate)
    excess_fine = max(0.0, ks_fine - gate)
    # the discretized law is exact, so the distance is pure sampling
    # noise; refinement must not push it past the allowance
    mono_ok = excess_fine <= excess_base + 1e-12
    passed = ks_base <= gate and ks_fine <= gate and mono_ok
    measured = {
        "ksBase": ks_base,
        "ksFine": ks_fine,
        "gate": gate,
        "excessBase": excess_base,
        "excessFine": excess_fine,
    }
    return passed, measured


def _c06_mixture_identity(ctx):
    bank = ctx.unit1()
    pts = []
    passed = True
    for i, t in enumerate(_MIXTURE_TS):
        lhs = lap.estimate_Q(bank, 0.5, math.log(t), stream_key=ctx.key0 + 2)
        rhs = lap.exponential_mixture_estimate(
            bank, _P1, 0.5, t, stream_key=ctx.key0 + 3 + i
        )
        sigma = math.hypot(lhs.std_error, rhs.std_error)
        ok = abs(lhs.estimate - rhs.estimate) <= ctx.gate * sigma
        passed = passed and ok
        pts.append(
            {
                "t": t,
                "direct": lhs.estimate,
                "mixture": rhs.estimate,
                "combinedSE": sigma,
                "gapInSE": abs(lhs.estimate - rhs.estimate) / sigma if sigma > 0 else 0.0,
                "ok": ok,
            }
        )
    return passed, {"points": pts}


def _c07_representations(ctx):
    passed = True

    # forward factor at gamma = 1
    bank = ctx.unit1()
    consts = scaling_constants(_P1, 0.5)
    curve = lap.laplace_curve(bank, 0.5, _KAPPA_XS, stream_key=ctx.key0 + 4)
    fwd = []
    for est, x in zip(curve, _KAPPA_XS):
        pref = consts.Cr * math.exp(-consts.a * x * x + consts.b * x)
        k = lap.heat_factor_mc(
            bank, _P1, 4.0 * consts.a, 4.0 * consts.a * x, stream_key=ctx.key0 + 5
        )
        rhs = pref * k.value
        sigma = math.hypot(est.std_error, pref * k.std_error)
        ok = abs(est.estimate - rhs) <= ctx.gate * sigma
        passed = passed and ok
        fwd.append(
            {"x": float(x), "direct": est.estimate, "factored": rhs, "combinedSE": sigma, "ok": ok}
        )

    # inverse factor at gamma = 1.2 (keeps the needed moments finite)
    bank12 = ctx.unit_g12()
    consts12 = scaling_constants(_P1_G12, 0.5)
    inv_masses = sample_scaled_masses(bank12, 0.5, ctx.key0 + 6)
    inv = []
    for x in _KAPPA2_XS:
        with np.errstate(over="ignore"):
            vals = np.exp(-math.exp(x) / inv_masses)
        lhs = float(vals.mean())
        lhs_se = float(vals.std(ddof=1) / math.sqrt(vals.size))
        k2 = lap.inverse_heat_factor_mc(
            bank12, _P1_G12, 4.0 * consts12.a, 4.0 * consts12.a * x, stream_key=ctx.key0 + 7
        )
        pref = consts12.Cr * math.exp(-consts12.a * x * x - consts12.b * x)
        rhs = pref * k2.value
        sigma = math.hypot(lhs_se, pref * k2.std_error)
        ok = abs(lhs - rhs) <= ctx.gate * sigma
        passed = passed and ok
        inv.append(
            {
                "x": float(x),
                "direct": lhs,
                "factored": rhs,
                "combinedSE": sigma,
                "tailFlag": k2.tail_flag,
                "ok": ok,
            }
        )
    return passed, {"forward": fwd, "inverse": inv}


def _c08_heat_pde(ctx):
    passed = True

    def kappa(s, z):
        return lap.heat_factor_exact(s, z, _STENCIL_B, 1.0, tol=1e-13).value

    def kappa2(s, z):
        return lap.inverse_heat_factor_exact(s, z, _STENCIL_B, 1.0, tol=1e-13).value

    stencils = {}
    for name, fn, pts in (
        ("forward", kappa, _KAPPA_STENCIL),
        ("inverse", kappa2, _KAPPA2_STENCIL),
    ):
        rows = []
        for s, z in pts:
            r = lap.heat_residual(fn, s, z, h=1e-3)
            ok = abs(r["residual"]) <= 1e-5 * abs(r["value"])
            passed = passed and ok
            rows.append(
                {
                    "s": s,
                    "z": z,
                    "value": r["value"],
                    "residual": r["residual"],
                    "residualHalf": r["residual_half"],
                    "ok": ok,
                }
            )
        stencils[name] = rows

    # properties in degenerate mode, at quadrature tolerance
    z0 = 7.0
    v = {s: kappa(s, z0) for s in (0.5, 1.0, 1.5, 25.0, 100.0, 400.0)}
    dec_s = v[1.5] - v[1.0] <= 1e-9
    cvx_s = v[0.5] - 2.0 * v[1.0] + v[1.5] >= -1e-9
    to_zero = v[400.0] < v[100.0] < v[25.0] and v[400.0] <= 0.1
    cvx_z = kappa(1.0, 6.5) - 2.0 * kappa(1.0, 7.0) + kappa(1.0, 7.5) >= -1e-9
    drift = lap.heat_drift_gap(kappa, 1.0, 7.0)
    drift_ok = drift >= -1e-6
    exact_props = {
        "decreasingInS": dec_s,
        "convexInS": cvx_s,
        "tendsToZero": to_zero,
        "convexInZ": cvx_z,
        "driftGap": drift,
    }
    passed = passed and dec_s and cvx_s and to_zero and cvx_z and drift_ok

    # the same properties on the sample bank, with 2 sigma slack; one
    # shared exponential stream makes the comparisons low-noise
    bank = ctx.unit1()
    key = ctx.key0 + 8

    def mc(s, z):
        return lap.heat_factor_mc(bank, _P1, s, z, stream_key=key)

    z = _MC_PROP_Z
    e05, e10, e15, e20 = (mc(s, z) for s in _MC_PROP_S)
    sig2 = 2.0 * math.hypot(e10.std_error, e20.std_error)
    mc_dec = e20.value - e10.value <= sig2
    sig3 = 2.0 * math.sqrt(e05.std_error**2 + 4.0 * e10.std_error**2 + e15.std_error**2)
    mc_cvx_s = e05.value - 2.0 * e10.value + e15.value >= -sig3
    zlo, zmid, zhi = mc(1.0, z - 0.5), e10, mc(1.0, z + 0.5)
    sig4 = 2.0 * math.sqrt(zlo.std_error**2 + 4.0 * zmid.std_error**2 + zhi.std_error**2)
    mc_cvx_z = zlo.value - 2.0 * zmid.value + zhi.value >= -sig4
    h = 0.25
    sp, sm = mc(1.0 + h, z), mc(1.0 - h, z)
    zp, zm = mc(1.0, z + h), mc(1.0, z - h)
    gap = e10.value / 4.0 - (sp.value - sm.value) / (2 * h) - (zp.value - zm.value) / (2 * h)
    sig5 = 2.0 * math.sqrt(
        (e10.std_error / 4.0) ** 2
        + (sp.std_error**2 + sm.std_error**2 + zp.std_error**2 + zm.std_error**2) / (2 * h) ** 2
    )
    mc_drift = gap >= -sig5
    mc_props = {
        "decreasingInS": mc_dec,
        "convexInS": mc_cvx_s,
        "convexInZ": mc_cvx_z,
        "driftGap": gap,
        "driftSlack": sig5,
    }
    passed = passed and mc_dec and mc_cvx_s and mc_cvx_z and mc_drift

    return passed, {
        "stencils": stencils,
        "exactProperties": exact_props,
        "mcProperties": mc_props,
    }


def _c09_envelope_band(ctx):
    bank = ctx.unit1()
    consts = scaling_constants(_P1, 0.5)
    x_min = lap.envelope_valid_from(_P1, 0.5)
    xs = x_min + _ENVELOPE_XS_OFFSET
    curve = lap.laplace_curve(bank, 0.5, xs, stream_key=ctx.key0 + 9)
    chat, chat_se = lap.envelope_constant(bank, _P1, 0.5)

    env_rows = []
    env_ok = True
    for est, x in zip(curve, xs):
        env = lap.laplace_lower_envelope(bank, _P1, 0.5, float(x))
        slack = ctx.gate * (est.std_error + env * (chat_se / chat if chat > 0 else 0.0))
        ok = est.estimate >= env - slack
        env_ok = env_ok and ok
        env_rows.append(
            {"x": float(x), "estimate": est.estimate, "envelope": env, "ok": ok}
        )

    # quadratic decay coefficient of the scaled curve, to sit inside the
    # band built from the unit-ball coefficient c0
    fit = sd.fit_laplace_exponent(
        xs, [e.estimate for e in curve], [e.std_error for e in curve]
    )
    unit_curve = lap.laplace_curve(bank, 1.0, _UNIT_FIT_XS)
    unit_fit = sd.fit_laplace_exponent(
        _UNIT_FIT_XS,
        [e.estimate for e in unit_curve],
        [e.std_error for e in unit_curve],
    )
    c0 = unit_fit.c
    band_ok = False
    band = None
    if c0 > 0:
        lo_coef, up_coef = lap.laplace_band_coefficients(_P1, 0.5, c0, p=_BAND_P)
        lo_rate, up_rate = -up_coef, -lo_coef  # rates of -ln Q
        slack = ctx.gate * fit.c_std_error
        band_ok = (fit.c >= lo_rate - slack) and (fit.c <= up_rate + slack)
        band = {
            "p": _BAND_P,
            "rateLow": lo_rate,
            "rateHigh": up_rate,
            "fitted": fit.c,
            "fittedSE": fit.c_std_error,
        }
    measured = {
        "envelope": env_rows,
        "envelopeConstant": chat,
        "band": band,
        "unitC0": c0,
        "scaledFit": fit,
        "unitFit": unit_fit,
    }
    return env_ok and band_ok, measured


def _c10_synthetic_transfer(ctx):
    law = lap.LognormalLaw(1.0)

    probs = [law.prob_below(d) for d in _SYNTH_DELTAS]
    curve = sd.exact_curve(_SYNTH_DELTAS, probs)
    dist_fit = sd.fit_lognormal_exponent(curve)
    dist_ok = 0.475 <= dist_fit.c <= 0.525

    lvals = [law.laplace(math.exp(x)) for x in _SYNTH_XS]
    lap_fit = sd.fit_laplace_exponent(_SYNTH_XS, lvals, None)
    lap_ok = abs(lap_fit.c - 0.5) <= 0.025

    upper = lap.transfer_check(law, direction="upper", **_TRANSFER_UPPER)
    lower = lap.transfer_check(law, direction="lower", **_TRANSFER_LOWER)
    transfer_ok = upper["ok"] and lower["ok"]

    measured = {
        "distributionFit": dist_fit,
        "laplaceFit": lap_fit,
        "transferUpperOk": upper["ok"],
        "transferLowerOk": lower["ok"],
        "upperPoints": len(upper["upper"]["points"]),
        "lowerPoints": len(lower["lower"]["points"]),
    }
    return dist_ok and lap_ok and transfer_ok, measured


def _c11_bounds_coherence(ctx):
    report = bounds_mod.bounds_report(_P3, 0.5)
    order_ok = (
        report.cbar1_upper is None or report.cbar1_lower <= report.cbar1_upper
    )

    bank = ctx.bank_d3()
    curve = lap.laplace_curve(bank, 0.5, _D3_FIT_XS, stream_key=ctx.key0 + 10)
    fit = sd.fit_laplace_exponent(
        _D3_FIT_XS, [e.estimate for e in curve], [e.std_error for e in curve]
    )
    slack = ctx.gate * fit.c_std_error
    bracket_ok = (fit.c + slack >= report.cr_lower) and (fit.c - slack <= report.cr_upper)
    measured = {
        "report": report.to_dict(),
        "empiricalFit": fit,
        "bracketLow": report.cr_lower,
        "bracketHigh": report.cr_upper,
        "consistent": report.consistent,
    }
    return order_ok and bracket_ok and report.consistent, measured


def _c12_determinism(ctx):
    cpa = min(ctx.cpa1, 16)
    n = min(ctx.n, 2048)
    bank_id = ctx.bank0 + 7
    args = (_P1, 1.0, cpa, n, bank_id)
    one = create_bank(*args, workers=1, repair_gate=ctx.config.tol_repair_gate)
    two = create_bank(*args, workers=2, repair_gate=ctx.config.tol_repair_gate)
    b1, b2 = one.masses.tobytes(), two.masses.tobytes()
    identical = b1 == b2
    measured = {
        "samples": n,
        "identicalAcrossWorkers": identical,
        "sha256": hashlib.sha256(b1).hexdigest(),
    }
    return identical, measured


_CRITERIA = [
    (1, "thresholds", _c01_thresholds),
    (2, "ordering", _c02_ordering),
    (3, "pd-certification", _c03_pd_certificates),
    (4, "first-moment", _c04_first_moment),
    (5, "scaling-law", _c05_scaling_law),
    (6, "mixture-identity", _c06_mixture_identity),
    (7, "representations", _c07_representations),
    (8, "heat-pde", _c08_heat_pde),
    (9, "envelope-band", _c09_envelope_band),
    (10, "synthetic-transfer", _c10_synthetic_transfer),
    (11, "bounds-coherence", _c11_bounds_coherence),
    (12, "determinism", _c12_determinism),
]

CRITERION_NAMES = {cid: name for cid, name, _ in _CRITERIA}


def run_acceptance(
    config: RunConfig | None = None,
    workers: int | None = None,
    only=None,
) -> dict:
    """Evaluate the acceptance criteria and return the report payload.

    only, when given, is an iterable of criterion ids or names
    restricting the run (partial suites still report allPass over the
    selected subset)."""
    if config is None:
        config = RunConfig()
    wanted = None
    if only is not None:
        wanted = {str(x) for x in only}
    ctx = _Context(config, workers)
    criteria = []
    for cid, name, fn in _CRITERIA:
        if wanted is not None and str(cid) not in wanted and name not in wanted:
            continue
        try:
            passed, measured = fn(ctx)
        except Exception as exc:  # a crash is a failing criterion, itemized
            passed, measured = False, {"error": f"{type(exc).__name__}: {exc}"}
        criteria.append(
            {"id": cid, "name": name, "passed": bool(passed), "measured": _jsonable(measured)}
        )
    payload = {
        "formatVersion": 1,
        "config": config.to_flat(),
        "criteria": criteria,
        "allPass": bool(all(c["passed"] for c in criteria)) and len(criteria) > 0,
    }
    return payload


def payload_bytes(payload: dict) -> bytes:
    """Canonical serialization used for byte-identity comparisons."""
    return json.dumps(_jsonable(payload), sort_keys=True).encode("utf-8")
