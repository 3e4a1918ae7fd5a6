"""Modified Bessel functions of the first kind and related quantities.

Only what the von Mises formulas need: I_a(x) for a in {0, 1, 2}, an
overflow-free log I_0, and the ratio I_1/I_0 that stays stable for
large arguments.
"""

import numpy as np
from scipy import special as _sp

__all__ = ["bessel_i", "log_bessel_i0", "bessel_ratio", "bessel_ratio_deriv"]

# switch to the asymptotic series for 1 - I1/I0 and its derivative;
# both routes agree to ~1e-12 relative here (see tests)
_RATIO_TAIL_SWITCH = 1.0e3


def _validated(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    if np.any(arr < 0.0):
        raise ValueError("argument must be nonnegative")
    return arr


def _maybe_scalar(x, out):
    return float(out) if np.ndim(x) == 0 else out


def bessel_i(order, x, scaled=False):
    """Modified Bessel function of the first kind, order 0, 1 or 2.

    Parameters
    ----------
    order : int
        One of 0, 1, 2.
    x : float or array_like
        Nonnegative, finite argument.
    scaled : bool
        If True, return exp(-x) * I_order(x). The scaled form never
        overflows; the unscaled one overflows to inf near x = 713.

    Returns
    -------
    float or ndarray
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    arr = _validated(x)
    if order == 0:
        val = _sp.i0e(arr)
    elif order == 1:
        val = _sp.i1e(arr)
    else:
        val = _sp.ive(2, arr)
    if not scaled:
        with np.errstate(over="ignore"):
            val = val * np.exp(arr)
    return _maybe_scalar(x, val)


def log_bessel_i0(x):
    """log I_0(x), computed without overflow for any finite x >= 0."""
    arr = _validated(x)
    out = np.log(_sp.i0e(arr)) + arr
    return _maybe_scalar(x, out)


def bessel_ratio(x):
    """The ratio I_1(x) / I_0(x).

    Strictly increasing from 0 at x = 0 toward 1 as x grows. Uses the
    exponentially scaled functions so large arguments neither overflow
    nor lose the ratio.
    """
    arr = _validated(x)
    out = _sp.i1e(arr) / _sp.i0e(arr)
    return _maybe_scalar(x, out)


def one_minus_bessel_ratio(x):
    """1 - I_1(x)/I_0(x), accurate even where the ratio rounds to 1.

    For large x the direct subtraction loses everything (the ratio is
    1 - O(1/x)); an asymptotic tail series takes over there.
    """
    arr = _validated(x)
    out = np.empty_like(arr)
    tail = arr >= _RATIO_TAIL_SWITCH
    head = ~tail
    out[head] = 1.0 - _sp.i1e(arr[head]) / _sp.i0e(arr[head])
    xt = arr[tail]
    with np.errstate(divide="ignore"):
        inv = 1.0 / xt
    out[tail] = inv * (0.5 + inv * (0.125 + inv * (0.125 + inv * (25.0 / 128.0))))
    return _maybe_scalar(x, out)


def bessel_ratio_deriv(x):
    """Derivative of I_1(x)/I_0(x) in x.

    Uses the identity r'(x) = 1 - r/x - r^2, rearranged as
    u(2 - u) - (1 - u)/x with u = 1 - r to dodge cancellation, and an
    asymptotic series 1/(2x^2) + 1/(4x^3) + 3/(8x^4) for large x where
    even that form cancels. r'(0) = 1/2 is the analytic limit.
    """
    arr = _validated(x)
    out = np.empty_like(arr)
    zero = arr == 0.0
    tail = arr >= _RATIO_TAIL_SWITCH
    mid = ~zero & ~tail
    out[zero] = 0.5
    xm = arr[mid]
    r = _sp.i1e(xm) / _sp.i0e(xm)
    u = 1.0 - r
    out[mid] = u * (2.0 - u) - r / xm
    xt = arr[tail]
    inv = 1.0 / xt
    # two divisions, not inv*inv: keeps gradual underflow honest at huge x
    out[tail] = (0.5 + inv * (0.25 + inv * 0.375)) / xt / xt
    return _maybe_scalar(x, out)
