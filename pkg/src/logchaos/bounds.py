"""Closed-form exponent bounds for lognormal-type small deviations.

For the mass M_r on B(0,r), -ln P(M_r <= delta) grows like
cbar_r (ln delta)^2; the module computes every closed-form bound on
those exponents: the sandwich pinning cbar_r between a harmonic
combination and the scale rate a(r), lower bounds on the unit-ball
exponent cbar_1 by containment/splitting arguments (four cases by the
kernel scale T), an upper bound from the spatial-mean variance (d >= 3),
and the transfer of a small-scale bound back to the unit scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCaseError, ParameterError
from .gmc import scaling_constants
from .params import ModelParams
from .potential import (
    ball_volume,
    boundary_threshold,
    mean_split_exponent,
    spatial_mean_variance,
)

_SPLIT_RHO = (3.0 - 2.0 * math.sqrt(2.0)) / 2.0  # radius in the 2d-ball split


def exponent_sandwich(a: float, cbar1: float) -> tuple[float, float]:
    """Bounds on the radius-r exponent given the unit-ball exponent:
    a cbar1 / (a + cbar1) <= cbar_r <= a."""
    if a <= 0 or cbar1 <= 0:
        raise ParameterError("sandwich needs positive rates")
    return (a * cbar1 / (a + cbar1), a)


def unit_exponent_upper(params: ModelParams, tol: float = 1e-10) -> float:
    """Upper bound on the unit-ball exponent for d >= 3 and T above the
    boundary threshold: Var(spatial mean) / (2 gamma^2 |B|^2
    (ln T - ln T*)^2)."""
    if params.d < 3:
        raise ParameterError("upper bound needs d >= 3")
    ln_t = math.log(params.T)
    ln_star = math.log(boundary_threshold(params.d, tol))
    if ln_t <= ln_star:
        raise DegenerateCaseError(
            f"T={params.T} not above the boundary threshold exp({ln_star:.6f})"
        )
    v = spatial_mean_variance(params, tol)
    vol = ball_volume(params.d)
    return v / (2.0 * params.gamma**2 * vol**2 * (ln_t - ln_star) ** 2)


def _rate(gamma: float, rho: float) -> float:
    # quadratic rate of the scale-change Gaussian at scale rho
    if not 0.0 < rho < 1.0:
        raise DegenerateCaseError(f"rate undefined at scale {rho}")
    return 1.0 / (2.0 * gamma**2 * math.log(1.0 / rho))


def _sup_over_p(p_max: float, f) -> tuple[float, float]:
    # coarse grid then two refinement re-grids around the best point
    lo, hi = 0.0, p_max
    best_v = -math.inf
    best_p = None
    for _ in range(3):
        ps = np.linspace(lo, hi, 1026)[1:-1]
        vals = f(ps)
        j = int(np.argmax(vals))
        if vals[j] > best_v:
            best_v, best_p = float(vals[j]), float(ps[j])
        step = ps[1] - ps[0]
        lo, hi = max(0.0, best_p - step), min(p_max, best_p + step)
    return best_v, best_p


@dataclass
class LowerBoundResult:
    value: float
    case: str
    p_star: float | None
    candidates: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def unit_exponent_lower(params: ModelParams) -> LowerBoundResult:
    """Best available lower bound on the unit-ball exponent.

    Cases by kernel scale:
      T <= 2 : containment in a ball of radius 1/2 - T/4 (degenerate at
               T = 2, where that radius vanishes);
      T <= 1 : containment at radius 1/4, and the 2d-ball split giving
               (2d - 1) times the rate at (3 - 2 sqrt 2)/2;
      T > 1  : the same two arguments combined with a mean shift of the
               field, optimized over the shift fraction p.
    """
    g, d, T = params.gamma, params.d, params.T
    if g == 0:
        raise ParameterError("lower bounds need gamma > 0")
    candidates: dict[str, float] = {}
    p_stars: dict[str, float] = {}
    notes: list[str] = []

    if T <= 2.0:
        try:
            candidates["single-ball shell (T<=2)"] = _rate(g, 0.5 - T / 4.0)
        except DegenerateCaseError:
            notes.append("single-ball shell degenerates at T = 2")
    if T <= 1.0:
        candidates["single-ball quarter scale (T<=1)"] = _rate(g, 0.25)
        candidates["2d-ball split (T<=1)"] = (2 * d - 1) * _rate(g, _SPLIT_RHO)
    if T > 1.0:
        ln_t = math.log(T)
        rate_quarter = _rate(g, 0.25)
        rate_split = _rate(g, _SPLIT_RHO)

        def obj_single(ps):
            return np.minimum(
                (2.0 * (1.0 - ps) ** 2 - 1.0) * rate_quarter,
                ps**2 / (2.0 * g * g * ln_t),
            )

        def obj_split(ps):
            return np.minimum(
                (2.0 * d * (1.0 - ps) ** 2 - 1.0) * rate_split,
                ps**2 / (2.0 * g * g * ln_t),
            )

        v, p = _sup_over_p(1.0 - 1.0 / math.sqrt(2.0), obj_single)
        candidates["single-ball with mean shift (T>1)"] = v
        p_stars["single-ball with mean shift (T>1)"] = p
        v, p = _sup_over_p(1.0 - 1.0 / math.sqrt(2.0 * d), obj_split)
        candidates["2d-ball split with mean shift (T>1)"] = v
        p_stars["2d-ball split with mean shift (T>1)"] = p

    if not candidates:
        raise DegenerateCaseError(f"no lower-bound case applies at T={T}")
    case = max(candidates, key=candidates.get)
    return LowerBoundResult(
        value=candidates[case],
        case=case,
        p_star=p_stars.get(case),
        candidates=candidates,
        notes=notes,
    )


def transfer_to_unit(cbar_r: float, a_r: float, frac: float):
    """Lower bound on the unit-ball exponent from a radius-r exponent
    bound: (4 cbar_r - 2 a_r (frac^2 + 1)) / (1 - frac)^2 when
    cbar_r >= (a_r/2)(frac^2 + 1); otherwise None (empty condition)."""
    if not 0.0 < frac < 1.0:
        raise ParameterError(f"transfer fraction must lie in (0, 1), got {frac}")
    if a_r <= 0:
        raise ParameterError("need a positive scale rate")
    if cbar_r - 0.5 * a_r * (frac**2 + 1.0) < 0.0:
        return None
    return (4.0 * cbar_r - 2.0 * a_r * (frac**2 + 1.0)) / (1.0 - frac) ** 2


@dataclass
class BoundsReport:
    params: ModelParams
    r: float
    a: float
    cbar1_lower: float
    cbar1_lower_case: str
    cbar1_lower_p: float | None
    cbar1_upper: float | None
    cr_lower: float
    cr_upper: float
    transferred_unit_lower: float | None
    transfer_fraction: float | None
    mean_split_c: float | None
    consistent: bool
    notes: dict

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "r": self.r,
            "a": self.a,
            "cbar1Lower": self.cbar1_lower,
            "cbar1LowerCase": self.cbar1_lower_case,
            "cbar1LowerP": self.cbar1_lower_p,
            "cbar1Upper": self.cbar1_upper,
            "crLower": self.cr_lower,
            "crUpper": self.cr_upper,
            "transferredUnitLower": self.transferred_unit_lower,
            "transferFraction": self.transfer_fraction,
            "meanSplitC": self.mean_split_c,
            "consistent": self.consistent,
            "notes": self.notes,
        }


def bounds_report(
    params: ModelParams,
    r: float,
    cbar1_input: float | None = None,
    tol: float = 1e-10,
) -> BoundsReport:
    """All closed-form exponent bounds for (params, r) in one report.

    The sandwich uses cbar1_input when provided, else the best computed
    lower bound.  A crossing cbar1_lower > cbar1_upper is reported as a
    red flag in the notes, never raised."""
    if not 0.0 < r < 1.0:
        raise ParameterError(f"need r in (0, 1), got {r}")
    notes = {}
    a = scaling_constants(params, r).a
    notes["a"] = "scale-change rate at r"
    notes["crUpper"] = "equals the scale-change rate a(r)"

    low = unit_exponent_lower(params)
    notes["cbar1Lower"] = f"best case: {low.case}"
    cbar1 = cbar1_input if cbar1_input is not None else low.value
    cr_lower, cr_upper = exponent_sandwich(a, cbar1)
    notes["crLower"] = "harmonic combination of a(r) and the unit-ball bound"

    upper = None
    if params.d >= 3:
        try:
            upper = unit_exponent_upper(params, tol)
            notes["cbar1Upper"] = "spatial-mean variance over the squared log-gap"
        except DegenerateCaseError as exc:
            notes["cbar1Upper"] = f"unavailable: {exc}"
    else:
        notes["cbar1Upper"] = "unavailable: needs d >= 3"

    mean_c = None
    if params.d >= 3:
        try:
            mean_c = mean_split_exponent(params, tol)
        except (DegenerateCaseError, ParameterError) as exc:
            notes["meanSplitC"] = f"unavailable: {exc}"

    transferred = None
    t_frac = None
    if 2.0 * cr_lower / a - 1.0 > 0.0:

        def obj(qs):
            ok = qs**2 <= 2.0 * cr_lower / a - 1.0
            vals = (4.0 * cr_lower - 2.0 * a * (qs**2 + 1.0)) / (1.0 - qs) ** 2
            return np.where(ok, vals, -np.inf)

        transferred, t_frac = _sup_over_p(1.0, obj)
        notes["transferredUnitLower"] = "radius-r sandwich lower bound carried back to the unit scale"
    else:
        notes["transferredUnitLower"] = "unavailable: admissible fraction set empty"

    consistent = upper is None or low.value <= upper
    if not consistent:
        notes["consistency"] = (
            "red flag: lower bound exceeds upper bound; report, do not trust either"
        )

    return BoundsReport(
        params=params,
        r=r,
        a=a,
        cbar1_lower=low.value,
        cbar1_lower_case=low.case,
        cbar1_lower_p=low.p_star,
        cbar1_upper=upper,
        cr_lower=cr_lower,
        cr_upper=cr_upper,
        transferred_unit_lower=transferred,
        transfer_fraction=t_frac,
        mean_split_c=mean_c,
        consistent=consistent,
        notes=notes,
    )
