"""Kullback-Leibler divergences and distance functions to base models.

For each supported (family, base model) pair this module provides the
closed-form KLD, the distance d(xi) = sqrt(KLD), its derivative, and
the inverse map d -> xi. A trapezoid quadrature KLD doubles as the
oracle for the closed forms.

The algebra is arranged to stay accurate at both ends of every
parameter range: near the base model the raw formulas subtract nearly
equal quantities, so series or rearranged forms take over there.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distributions import TWO_PI, Family, pdf
from .special import (
    _RATIO_TAIL_SWITCH,
    bessel_ratio,
    bessel_ratio_deriv,
    log_bessel_i0,
    one_minus_bessel_ratio,
)

__all__ = [
    "BaseModel",
    "DistanceProfile",
    "Direction",
    "profile_for",
    "supported_pairs",
    "kld_vm",
    "kld_cardioid",
    "kld_wc",
    "kld_numeric",
    "distance",
    "distance_deriv",
    "inverse_distance",
]

# von Mises uniform-base radicand: series below, asymptotic above
_VM_RADICAND_SMALL = 2.0e-2
_VM_RADICAND_LARGE = 1.0e4
# cardioid log1p(s) - s + s^2/2 switches to its power series below this s
_CARD_L3_SERIES = 0.3
# floating-point noise floor clamped to zero before sqrt
_RADICAND_NOISE = 1.0e-14

SQRT_LOG2 = float(np.sqrt(np.log(2.0)))
SQRT_1M_LOG2 = float(np.sqrt(1.0 - np.log(2.0)))


class BaseModel(str, Enum):
    UNIFORM = "uniform"
    POINT_MASS = "pointmass"
    CARDIOID_CURVE = "curve"


class Direction(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class DistanceProfile:
    """The monotone map between a concentration parameter and its distance."""

    family: Family
    base: BaseModel
    d_min: float
    d_max: float
    direction: Direction
    support_lo: float
    support_hi: float


_PROFILES = {
    (Family.VON_MISES, BaseModel.UNIFORM): DistanceProfile(
        Family.VON_MISES, BaseModel.UNIFORM, 0.0, np.inf, Direction.INCREASING, 0.0, np.inf
    ),
    (Family.VON_MISES, BaseModel.POINT_MASS): DistanceProfile(
        Family.VON_MISES, BaseModel.POINT_MASS, 0.0, 1.0, Direction.DECREASING, 0.0, np.inf
    ),
    (Family.CARDIOID, BaseModel.UNIFORM): DistanceProfile(
        Family.CARDIOID, BaseModel.UNIFORM, 0.0, SQRT_1M_LOG2, Direction.INCREASING, 0.0, 0.5
    ),
    (Family.CARDIOID, BaseModel.CARDIOID_CURVE): DistanceProfile(
        Family.CARDIOID, BaseModel.CARDIOID_CURVE, 0.0, SQRT_LOG2, Direction.DECREASING, 0.0, 0.5
    ),
    (Family.WRAPPED_CAUCHY, BaseModel.UNIFORM): DistanceProfile(
        Family.WRAPPED_CAUCHY, BaseModel.UNIFORM, 0.0, np.inf, Direction.INCREASING, 0.0, 1.0
    ),
}


def supported_pairs():
    return tuple(_PROFILES)


def profile_for(family, base):
    """Distance profile for a (family, base model) pair."""
    key = (Family(family), BaseModel(base))
    try:
        return _PROFILES[key]
    except KeyError:
        raise ValueError(
            f"unsupported (family, base) pair: ({key[0].value}, {key[1].value})"
        ) from None


def _check_param(profile, arr):
    hi_ok = arr <= profile.support_hi if np.isfinite(profile.support_hi) else np.isfinite(arr)
    lo_ok = arr >= profile.support_lo
    strict_hi = arr < profile.support_hi if np.isfinite(profile.support_hi) else hi_ok
    if not np.all(lo_ok & strict_hi):
        raise ValueError(
            f"parameter outside the {profile.family.value} support "
            f"[{profile.support_lo}, {profile.support_hi})"
        )


# ---------------------------------------------------------------------------
# closed-form KLDs


def kld_vm(kappa, kappa0):
    """KLD of von Mises(kappa) from von Mises(kappa0), same location.

    log I0(k0) - log I0(k) + (k - k0) I1(k)/I0(k), clamped below at 0.
    """
    k = np.asarray(kappa, dtype=float)
    k0 = np.asarray(kappa0, dtype=float)
    if not (np.all(np.isfinite(k)) and np.all(np.isfinite(k0))):
        raise ValueError("kappa and kappa0 must be finite")
    if np.any(k < 0.0) or np.any(k0 < 0.0):
        raise ValueError("kappa and kappa0 must be nonnegative")
    out = np.maximum(log_bessel_i0(k0) - log_bessel_i0(k) + (k - k0) * bessel_ratio(k), 0.0)
    return float(out) if np.ndim(kappa) == 0 and np.ndim(kappa0) == 0 else out


def _half_sqrt_terms(ell):
    # s = sqrt(1 - 4 ell^2) without cancellation: (1-2l)(1+2l) = 2 eps w
    eps = 0.5 - ell
    w = 1.0 + 2.0 * ell
    s = np.sqrt(2.0 * eps * w)
    return s, eps, w


def kld_cardioid(ell, ell0):
    """KLD of cardioid(ell) from cardioid(ell0), same location.

    ell0 = 0 is rejected: the divergence against the exact uniform is
    the squared uniform-base distance instead.
    """
    l = np.asarray(ell, dtype=float)
    l0 = np.asarray(ell0, dtype=float)
    if np.any(l0 == 0.0):
        raise ValueError("ell0 must be positive; use the uniform-base distance for ell0 = 0")
    if np.any((l < 0.0) | (l >= 0.5)) or np.any((l0 < 0.0) | (l0 >= 0.5)):
        raise ValueError("ell must lie in [0, 0.5) and ell0 in (0, 0.5)")
    s, _, _ = _half_sqrt_terms(l)
    s0, _, _ = _half_sqrt_terms(l0)
    # 1 - s = 4 l^2 / (1 + s) keeps the small-ell cancellation out
    term = 4.0 * l * (l / (1.0 + s) - l0 / (1.0 + s0))
    out = np.maximum(term + np.log((1.0 + s) / (1.0 + s0)), 0.0)
    return float(out) if np.ndim(ell) == 0 and np.ndim(ell0) == 0 else out


def _log1m_rho_sq(rho):
    # log(1 - rho^2), stable across [0, 1)
    out = np.where(
        rho <= 0.5,
        np.log1p(-np.minimum(rho, 0.5) ** 2),
        np.log(np.maximum((1.0 - rho) * (1.0 + rho), np.finfo(float).tiny)),
    )
    return out


def kld_wc(rho):
    """KLD of wrapped Cauchy(rho) from the circular uniform: -log(1 - rho^2)."""
    r = np.asarray(rho, dtype=float)
    if np.any((r < 0.0) | (r >= 1.0)):
        raise ValueError("rho must lie in [0, 1)")
    out = -_log1m_rho_sq(r)
    return float(out) if np.ndim(rho) == 0 else out


def kld_numeric(p_spec, q_spec, nodes=20001):
    """Trapezoid quadrature of the KLD between two circular densities.

    The integrand p log(p/q) is periodic, so the trapezoid rule
    converges spectrally. Serves as the oracle for the closed forms.
    """
    xs = np.linspace(0.0, TWO_PI, int(nodes))
    p = pdf(p_spec, xs)
    q = pdf(q_spec, xs)
    if np.any(q <= 0.0):
        raise ValueError("q vanishes on the grid; KLD is not integrable")
    integrand = np.where(p > 0.0, p * (np.log(np.where(p > 0.0, p, 1.0)) - np.log(q)), 0.0)
    return float(np.trapezoid(integrand, xs))


# ---------------------------------------------------------------------------
# distances


def _vm_uniform_radicand(k):
    out = np.empty_like(k)
    small = k < _VM_RADICAND_SMALL
    large = k >= _VM_RADICAND_LARGE
    mid = ~small & ~large
    q = 0.25 * k[small] ** 2
    out[small] = q * (1.0 - 0.75 * q + (5.0 / 9.0) * q * q)
    km = k[mid]
    out[mid] = km * bessel_ratio(km) - log_bessel_i0(km)
    kl = k[large]
    inv = 1.0 / kl
    out[large] = (
        0.5 * (np.log(TWO_PI) + np.log(kl))
        - 0.5
        - inv * (0.25 + inv * (3.0 / 16.0 + inv * (25.0 / 96.0)))
    )
    return out


def _vm_uniform_radicand_deriv(k):
    # d/dk [k r(k) - log I0(k)] = k r'(k); fold the k into the series for
    # large k so the product does not underflow before the multiply
    out = np.empty_like(k)
    head = k < _RATIO_TAIL_SWITCH
    out[head] = k[head] * bessel_ratio_deriv(k[head])
    kt = k[~head]
    inv = 1.0 / kt
    out[~head] = (0.5 + inv * (0.25 + inv * 0.375)) / kt
    return out


def _card_l3(s):
    # log1p(s) - s + s^2/2 = s^3/3 - s^4/4 + ..., computed by series
    # below s = 0.3 where the direct form cancels
    out = np.empty_like(s)
    direct = s >= _CARD_L3_SERIES
    sd = s[direct]
    out[direct] = np.log1p(sd) - sd + 0.5 * sd * sd
    ss = s[~direct]
    acc = np.zeros_like(ss)
    term = ss * ss * ss
    sign = 1.0
    for k in range(3, 40):
        acc += sign * term / k
        term = term * ss
        sign = -sign
        if np.all(term < 1.0e-20):
            break
    out[~direct] = acc
    return out


def _card_uniform_radicand(l):
    s, _, _ = _half_sqrt_terms(l)
    u = 4.0 * l * l / (1.0 + s)
    return u + np.log1p(-0.5 * u)


def _card_curve_radicand(l):
    s, eps, _ = _half_sqrt_terms(l)
    return 2.0 * eps * eps + _card_l3(s)


def _distance_arr(profile, arr):
    fam, base = profile.family, profile.base
    if fam is Family.VON_MISES and base is BaseModel.UNIFORM:
        return np.sqrt(np.maximum(_vm_uniform_radicand(arr), 0.0))
    if fam is Family.VON_MISES and base is BaseModel.POINT_MASS:
        return np.sqrt(one_minus_bessel_ratio(arr))
    if fam is Family.CARDIOID and base is BaseModel.UNIFORM:
        return np.sqrt(np.maximum(_card_uniform_radicand(arr), 0.0))
    if fam is Family.CARDIOID and base is BaseModel.CARDIOID_CURVE:
        return np.sqrt(np.maximum(_card_curve_radicand(arr), 0.0))
    # wrapped Cauchy, uniform base
    return np.sqrt(-_log1m_rho_sq(arr))


def distance(profile, param):
    """Distance d(param) = sqrt(KLD against the profile's base model)."""
    arr = np.asarray(param, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameter must be finite")
    _check_param(profile, arr)
    out = _distance_arr(profile, arr)
    return float(out) if np.ndim(param) == 0 else out


def _deriv_given_d(profile, arr, d):
    """|d'| when the distances for ``arr`` are already in hand."""
    fam, base = profile.family, profile.base
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam is Family.VON_MISES and base is BaseModel.UNIFORM:
            out = np.where(
                arr > 0.0,
                _vm_uniform_radicand_deriv(arr) / np.where(d > 0.0, 2.0 * d, 1.0),
                0.5,
            )
        elif fam is Family.VON_MISES and base is BaseModel.POINT_MASS:
            out = np.where(arr > 0.0, bessel_ratio_deriv(arr) / (2.0 * d), 0.25)
        elif fam is Family.CARDIOID and base is BaseModel.UNIFORM:
            s, _, _ = _half_sqrt_terms(arr)
            out = np.where(arr > 0.0, 2.0 * arr / ((1.0 + s) * np.where(d > 0.0, d, 1.0)), 1.0)
        elif fam is Family.CARDIOID and base is BaseModel.CARDIOID_CURVE:
            s, eps, _ = _half_sqrt_terms(arr)
            out = (s + 2.0 * eps) / ((1.0 + s) * d)
        else:
            one_m = (1.0 - arr) * (1.0 + arr)
            out = np.where(arr > 0.0, arr / (one_m * np.where(d > 0.0, d, 1.0)), 1.0)
    return out


def distance_deriv(profile, param):
    """|d d(param) / d param|, with exact limits at the support edge."""
    arr = np.asarray(param, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameter must be finite")
    _check_param(profile, arr)
    out = _deriv_given_d(profile, arr, _distance_arr(profile, arr))
    return float(out) if np.ndim(param) == 0 else out


def _bisect_increasing(fn, lo, hi, target, iters):
    lo = np.broadcast_to(np.asarray(lo, float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, float), target.shape).copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


_LOG_KAPPA_LO = -700.0
_LOG_KAPPA_HI = 709.0


def inverse_distance(profile, d):
    """The parameter whose distance equals ``d``.

    Vectorized. Wrapped Cauchy inverts in closed form; the others
    bisect the monotone distance map (in log kappa for von Mises).
    Distances outside the attainable range raise; for the cardioid
    curve base, d = 0 reports the open boundary just below 0.5.
    """
    arr = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("distance must be finite")
    if np.any(arr < profile.d_min) or np.any(arr > profile.d_max):
        raise ValueError(
            f"distance outside [{profile.d_min}, {profile.d_max}] for this profile"
        )
    fam, base = profile.family, profile.base
    work = np.atleast_1d(arr).astype(float)

    if fam is Family.WRAPPED_CAUCHY:
        out = np.sqrt(-np.expm1(-work * work))
        out = np.minimum(out, np.nextafter(1.0, 0.0))
    elif fam is Family.VON_MISES and base is BaseModel.UNIFORM:
        hi_d = _distance_arr(profile, np.asarray([np.exp(_LOG_KAPPA_HI)]))[0]
        if np.any(work > hi_d):
            raise ValueError("distance not attainable within floating-point kappa range")
        t = _bisect_increasing(
            lambda lt: _distance_arr(profile, np.exp(lt)), _LOG_KAPPA_LO, _LOG_KAPPA_HI, work, 90
        )
        out = np.where(work == 0.0, 0.0, np.exp(t))
    elif fam is Family.VON_MISES and base is BaseModel.POINT_MASS:
        # distance decreases in kappa; bisect on its negation
        t = _bisect_increasing(
            lambda lt: -_distance_arr(profile, np.exp(lt)), _LOG_KAPPA_LO, _LOG_KAPPA_HI, -work, 90
        )
        out = np.where(work == 1.0, 0.0, np.exp(t))
        if np.any(work == 0.0):
            raise ValueError("d = 0 is not attained for the point-mass base")
    elif fam is Family.CARDIOID and base is BaseModel.UNIFORM:
        if np.any(work >= profile.d_max):
            raise ValueError("d_max is approached only as ell -> 0.5; not attained")
        ell = _bisect_increasing(
            lambda m: _distance_arr(profile, m), 0.0, np.nextafter(0.5, 0.0), work, 80
        )
        out = np.where(work == 0.0, 0.0, ell)
    else:  # cardioid, curve base: decreasing, d = 0 reports the open boundary
        ell = _bisect_increasing(
            lambda m: -_distance_arr(profile, m), 0.0, np.nextafter(0.5, 0.0), -work, 80
        )
        out = np.where(work == profile.d_max, 0.0, ell)
        out = np.where(work == 0.0, np.nextafter(0.5, 0.0), out)
    return float(out[0]) if np.ndim(d) == 0 else out.reshape(arr.shape)
