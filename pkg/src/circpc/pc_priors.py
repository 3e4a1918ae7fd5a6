"""Complexity-penalizing priors for circular concentration parameters.

Each prior is exponential in the distance scale d(param) of a
(family, base) pair from :mod:`circpc.divergence`:

    pi(param) = lambda * exp(-lambda * d(param)) * |d'(param)| / Z

Two normalization modes are shipped.  ``Truncated`` divides by
Z = 1 - exp(-lambda * d_max), so the density integrates to exactly 1
over the parameter support even when the distance range is finite.
``PaperExact`` reproduces the widely printed closed forms instead: for
the three pairs whose printed forms already normalize (vm/uniform,
cardioid/uniform, wc/uniform) the two modes coincide; for vm/pointmass
and cardioid/curve the printed forms omit the normalizer and the
resulting density integrates to 1 - exp(-lambda * d_max) < 1.

lambda is calibrated from a tail statement P(Q(param) > U) = alpha on a
user-scale transform Q: Q(kappa) = 2*pi/(1+kappa) for von Mises,
Q(ell) = 2*ell for the cardioid, Q(rho) = 2*pi*(1-rho) for the wrapped
Cauchy.  Numeric calibration against the implemented truncated CDF is
authoritative; the literature closed forms are exposed separately as
``calibrate_lambda_paper`` and cross-checked where they agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .distributions import TWO_PI, Family
from .divergence import (
    BaseModel,
    Direction,
    DistanceProfile,
    _deriv_given_d,
    distance,
    distance_deriv,
    inverse_distance,
    profile_for,
)

_BRACKET = (1.0e-8, 1.0e6)
_BRACKET_WIDE = (1.0e-12, 1.0e9)
# largest invertible parameter for the unbounded-d pairs; the von Mises
# cap matches the log-kappa bisection window of inverse_distance
_MAX_PARAM = {
    (Family.VON_MISES, BaseModel.UNIFORM): math.exp(709.0),
    (Family.WRAPPED_CAUCHY, BaseModel.UNIFORM): np.nextafter(1.0, 0.0),
}


class InfeasibleTailError(ValueError):
    """No lambda achieves the requested tail probability.

    Carries the open interval of attainable alpha values for the given
    (family, base, U) in the ``attainable`` attribute.
    """

    def __init__(self, message, attainable):
        super().__init__(message)
        self.attainable = attainable


class UnsupportedModeError(ValueError):
    """Operation requires a normalized CDF and the mode does not have one."""


class Normalization(str, Enum):
    TRUNCATED = "truncated"
    PAPER_EXACT = "paper"


_NORMALIZATION_ALIASES = {
    "truncated": Normalization.TRUNCATED,
    "paper": Normalization.PAPER_EXACT,
    "paperexact": Normalization.PAPER_EXACT,
    "paper_exact": Normalization.PAPER_EXACT,
}


def _coerce_normalization(value):
    if isinstance(value, Normalization):
        return value
    key = str(value).strip().lower()
    if key not in _NORMALIZATION_ALIASES:
        raise ValueError(f"unknown normalization {value!r}")
    return _NORMALIZATION_ALIASES[key]


# pairs whose printed closed forms omit the truncation normalizer
_UNNORMALIZED_PAPER_PAIRS = {
    (Family.VON_MISES, BaseModel.POINT_MASS),
    (Family.CARDIOID, BaseModel.CARDIOID_CURVE),
}


@dataclass(frozen=True)
class PcPrior:
    """A calibrated complexity-penalizing prior for one concentration axis.

    ``lam`` is the rate on the distance scale (serialized under the key
    "lambda").
    """

    family: Family
    base: BaseModel
    lam: float
    normalization: Normalization = Normalization.TRUNCATED

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "base", BaseModel(self.base))
        object.__setattr__(self, "normalization", _coerce_normalization(self.normalization))
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0.0:
            raise ValueError("lambda must be a positive finite real")
        object.__setattr__(self, "lam", lam)
        profile_for(self.family, self.base)  # validates the pair

    @property
    def profile(self) -> DistanceProfile:
        return profile_for(self.family, self.base)

    @property
    def is_normalized(self) -> bool:
        """True when the CDF runs from 0 to 1 over the support."""
        if self.normalization is Normalization.TRUNCATED:
            return True
        return (self.family, self.base) not in _UNNORMALIZED_PAPER_PAIRS

    def to_record(self) -> dict:
        return {
            "family": self.family.value,
            "base": self.base.value,
            "lambda": self.lam,
            "normalization": self.normalization.value,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PcPrior":
        return cls(
            family=record["family"],
            base=record["base"],
            lam=record["lambda"],
            normalization=record.get("normalization", Normalization.TRUNCATED),
        )


@dataclass(frozen=True)
class TailSpec:
    """Tail statement P(Q(param) > U) = alpha used to calibrate lambda."""

    U: float
    alpha: float

    def __post_init__(self):
        u = float(self.U)
        a = float(self.alpha)
        if not math.isfinite(u) or u <= 0.0:
            raise ValueError("U must be a positive finite real")
        if not 0.0 < a < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "alpha", a)

    def validate_for(self, family) -> None:
        fam = Family(family)
        if fam is Family.CARDIOID:
            if not self.U < 1.0:
                raise ValueError("cardioid tail threshold U must lie in (0, 1)")
        elif self.U > TWO_PI:
            raise ValueError("tail threshold U must lie in (0, 2*pi]")


def q_transform(family, param):
    """User-scale transform Q whose tail P(Q > U) = alpha calibrates lambda."""
    fam = Family(family)
    arr = np.asarray(param, dtype=float)
    if fam is Family.VON_MISES:
        out = TWO_PI / (1.0 + arr)
    elif fam is Family.CARDIOID:
        out = 2.0 * arr
    elif fam is Family.WRAPPED_CAUCHY:
        out = TWO_PI * (1.0 - arr)
    else:
        raise ValueError("no Q transform for the uniform family")
    return float(out) if np.ndim(param) == 0 else out


def _threshold_param(family, U):
    """Parameter value at which Q(param) crosses U."""
    fam = Family(family)
    if fam is Family.VON_MISES:
        return TWO_PI / U - 1.0
    if fam is Family.CARDIOID:
        return U / 2.0
    return 1.0 - U / TWO_PI


def _normalizer(prior: PcPrior) -> float:
    """Mass of lambda*exp(-lambda*d) over the prior's distance range."""
    if (
        prior.normalization is Normalization.PAPER_EXACT
        and (prior.family, prior.base) in _UNNORMALIZED_PAPER_PAIRS
    ):
        return 1.0
    d_max = prior.profile.d_max
    if math.isinf(d_max):
        return 1.0
    return -math.expm1(-prior.lam * d_max)


def pc_pdf(prior: PcPrior, param):
    """Prior density at param; exponential in the distance scale."""
    prof = prior.profile
    arr = np.asarray(param, dtype=float)
    d = np.asarray(distance(prof, arr))
    g = _deriv_given_d(prof, arr, d)
    out = prior.lam * np.exp(-prior.lam * d) * g / _normalizer(prior)
    return float(out) if np.ndim(param) == 0 else out


def pc_cdf(prior: PcPrior, param):
    """Prior CDF at param.

    Truncated mode runs from exactly 0 at the support minimum to 1 at
    the supremum.  PaperExact mode returns the printed closed forms,
    which for vm/pointmass and cardioid/curve do not reach 0 at the
    support minimum.
    """
    prof = prior.profile
    d = np.asarray(distance(prof, param))
    e = np.exp(-prior.lam * d)
    paper_raw = (
        prior.normalization is Normalization.PAPER_EXACT
        and (prior.family, prior.base) in _UNNORMALIZED_PAPER_PAIRS
    )
    if prof.direction is Direction.INCREASING:
        z = _normalizer(prior)
        out = -np.expm1(-prior.lam * d) / z
    elif paper_raw:
        out = e
    else:
        e_max = math.exp(-prior.lam * prof.d_max)
        out = (e - e_max) / (1.0 - e_max)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(param) == 0 else out


def _quantile_distance(prior: PcPrior, p):
    """Distance value whose CDF equals p, vectorized."""
    lam = prior.lam
    prof = prior.profile
    if prof.direction is Direction.INCREASING:
        z = _normalizer(prior)
        return -np.log1p(-p * z) / lam
    e_max = math.exp(-lam * prof.d_max)
    return -np.log(p + (1.0 - p) * e_max) / lam


def _require_normalized(prior: PcPrior, what: str) -> None:
    if not prior.is_normalized:
        raise UnsupportedModeError(
            f"{what} needs a CDF running from 0 to 1; the printed "
            f"{prior.family.value}/{prior.base.value} form does not normalize. "
            "Use truncated normalization."
        )


def pc_quantile(prior: PcPrior, p):
    """Inverse CDF: the param whose pc_cdf equals p, for p in (0, 1).

    For the unbounded-distance pairs (vm/uniform, wc/uniform) a level
    close enough to 1 can map beyond the largest float64 parameter;
    that is reported as a ValueError rather than returned saturated.
    """
    _require_normalized(prior, "quantile")
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("quantile level must lie strictly between 0 and 1")
    d = _quantile_distance(prior, arr)
    cap = _MAX_PARAM.get((prior.family, prior.base))
    if cap is not None and np.any(np.asarray(d) > distance(prior.profile, cap)):
        raise ValueError(
            "quantile level maps beyond the largest representable parameter "
            f"(reachable up to p = {pc_cdf(prior, cap):.17g})"
        )
    out = inverse_distance(prior.profile, d)
    return float(out) if np.ndim(p) == 0 else np.asarray(out)


def pc_sample(prior: PcPrior, n, seed):
    """n inverse-CDF draws from the prior.

    For the unbounded-distance pairs (vm/uniform, wc/uniform) a draw
    whose distance exceeds what float64 can represent saturates at the
    largest representable parameter; at lambda >= 1 the per-draw odds
    are below 1e-8.
    """
    _require_normalized(prior, "sampling")
    n = int(n)
    if n <= 0:
        raise ValueError("n must be a positive integer")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(n)
    d = _quantile_distance(prior, u)
    cap = _MAX_PARAM.get((prior.family, prior.base))
    if cap is not None:
        d = np.minimum(d, distance(prior.profile, cap))
    return np.asarray(inverse_distance(prior.profile, d))


def tail_probability(prior: PcPrior, tail: TailSpec) -> float:
    """P(Q(param) > U) under the prior's CDF."""
    tail.validate_for(prior.family)
    crossing = _threshold_param(prior.family, tail.U)
    if prior.family is Family.CARDIOID:
        return float(1.0 - pc_cdf(prior, crossing))
    return float(pc_cdf(prior, crossing))


def attainable_alpha_range(family, base, U):
    """Open interval of alpha reachable by some lambda > 0 (truncated CDF).

    The tail probability is monotone in lambda; the interval endpoints
    are its lambda -> 0 and lambda -> infinity limits and are not
    attained.
    """
    prof = profile_for(family, base)
    fam = Family(family)
    TailSpec(U=U, alpha=0.5).validate_for(fam)
    crossing = _threshold_param(fam, U)
    if crossing <= prof.support_lo:
        return (0.0, 0.0)  # tail event has probability 0 for every lambda
    d_star = distance(prof, crossing)
    d_max = prof.d_max
    if prof.direction is Direction.INCREASING:
        if math.isinf(d_max):
            return (0.0, 1.0)
        if fam is Family.CARDIOID:
            # P(param > crossing) falls from 1 - d*/d_max toward 0
            return (0.0, 1.0 - d_star / d_max)
        return (0.0, 1.0)
    if fam is Family.CARDIOID:
        # cardioid/curve: P(param > crossing) rises from d*/d_max toward 1
        return (d_star / d_max, 1.0)
    # vm/pointmass: P(param < crossing) falls from 1 - d* toward 0
    return (0.0, 1.0 - d_star)


def _check_feasible(family, base, tail: TailSpec):
    lo, hi = attainable_alpha_range(family, base, tail.U)
    if not lo < tail.alpha < hi:
        raise InfeasibleTailError(
            f"alpha={tail.alpha:g} is not attainable for "
            f"{Family(family).value}/{BaseModel(base).value} at U={tail.U:g}; "
            f"attainable alpha range is ({lo:.12g}, {hi:.12g})",
            (lo, hi),
        )


def calibrate_lambda(family, base, tail: TailSpec) -> float:
    """lambda such that P(Q(param) > U) = alpha under the truncated CDF.

    Solved by bracketing root search on lambda in [1e-8, 1e6], widened
    once to [1e-12, 1e9] if the root is not bracketed.
    """
    fam, bas = Family(family), BaseModel(base)
    tail.validate_for(fam)
    _check_feasible(fam, bas, tail)

    def residual(lam):
        prior = PcPrior(fam, bas, lam)
        return tail_probability(prior, tail) - tail.alpha

    lo, hi = _BRACKET
    if residual(lo) * residual(hi) > 0.0:
        lo, hi = _BRACKET_WIDE
        if residual(lo) * residual(hi) > 0.0:
            raise InfeasibleTailError(
                f"no lambda in [{lo:g}, {hi:g}] achieves alpha={tail.alpha:g}",
                attainable_alpha_range(fam, bas, tail.U),
            )
    return float(brentq(residual, lo, hi, xtol=1e-300, rtol=1e-12))


def calibrate_lambda_paper(family, base, tail: TailSpec) -> float:
    """Literature closed forms for lambda, exposed for cross-checking.

    vm/uniform, cardioid/uniform, and wc/uniform agree with the
    truncated-CDF calibration.  cardioid/curve matches the printed
    (unnormalized) CDF instead.  The printed vm/pointmass expression
    -log(1-alpha)/d is returned as published even though it is
    consistent with neither CDF: the printed CDF F = exp(-lambda*d)
    would give -log(alpha)/d.  Prefer ``calibrate_lambda``.
    """
    fam, bas = Family(family), BaseModel(base)
    tail.validate_for(fam)
    prof = profile_for(fam, bas)
    crossing = _threshold_param(fam, tail.U)
    alpha = tail.alpha

    if fam is Family.VON_MISES and bas is BaseModel.POINT_MASS:
        return -math.log1p(-alpha) / distance(prof, crossing)

    if fam is Family.CARDIOID and bas is BaseModel.CARDIOID_CURVE:
        # printed CDF: 1 - exp(-lambda*d(U/2)) = alpha
        return -math.log1p(-alpha) / distance(prof, crossing)

    _check_feasible(fam, bas, tail)
    if fam is Family.VON_MISES:
        return -math.log1p(-alpha) / distance(prof, crossing)
    if fam is Family.WRAPPED_CAUCHY:
        radicand = -math.log(tail.U / math.pi - tail.U**2 / (4.0 * math.pi**2))
        return -math.log1p(-alpha) / math.sqrt(radicand)

    # cardioid/uniform: lambda appears on both sides; damped fixed point
    d_star = distance(prof, crossing)
    d_max = prof.d_max

    def step(lam):
        return -math.log(alpha + (1.0 - alpha) * math.exp(-lam * d_max)) / d_star

    lam = -math.log1p(-alpha) / d_star
    for _ in range(200):
        nxt = 0.5 * (lam + step(lam))
        if abs(nxt - lam) <= 1e-12 * max(1.0, abs(nxt)):
            return nxt
        lam = nxt
    return float(brentq(lambda x: x - step(x), *_BRACKET_WIDE, xtol=1e-300, rtol=1e-12))
