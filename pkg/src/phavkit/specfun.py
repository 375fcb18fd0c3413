"""Double-precision special-function kernels.

Everything here is written against plain numpy so the rest of the package
does not depend on scipy at runtime. Functions accept scalars or arrays;
scalar input gives a Python float back.
"""

import math

import numpy as np

from .exceptions import DomainError

__all__ = [
    "bessel_i0",
    "bessel_i0_scaled",
    "bessel_j0",
    "laguerre",
    "laguerre_table",
    "legendre",
    "legendre_scaled",
    "legendre_scaled_table",
    "hyp1f1_half",
    "hyp1f1_half_scaled",
    "double_factorial_odd",
    "log_double_factorial_odd",
]

# crossover between ascending series and asymptotic expansion of I0
_I0_SWITCH = 20.0
# J0: ascending series below, Miller backward recurrence between, Hankel above
_J0_SERIES_MAX = 8.0
_J0_ASYMPTOTIC_MIN = 25.0


def _as_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _nonneg(x, name="x"):
    arr = _as_array(x, name)
    if np.any(arr < 0):
        raise DomainError(f"{name} must be non-negative, got {x!r}")
    return arr


def _out(arr, scalar):
    return float(arr) if scalar else arr


def bessel_i0_scaled(x):
    """Return ``exp(-x) * I0(x)`` for ``x >= 0``.

    Finite and inside ``(0, 1]`` for any finite argument, so it is the form
    used wherever an ``I0`` is multiplied by a decaying exponential.
    """
    arr = _nonneg(x)
    scalar = arr.ndim == 0
    x = np.atleast_1d(arr)
    out = np.empty_like(x)

    small = x <= _I0_SWITCH
    if np.any(small):
        xs = x[small]
        q = 0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        # all terms positive; 90 terms cover x <= 20 to below 1e-17 relative
        for k in range(1, 90):
            term = term * q / (k * k)
            total = total + term
        out[small] = total * np.exp(-xs)

    big = ~small
    if np.any(big):
        xb = x[big]
        term = np.ones_like(xb)
        total = np.ones_like(xb)
        for k in range(1, 31):
            term = term * (2 * k - 1) ** 2 / (8.0 * k * xb)
            total = total + term
        out[big] = total / np.sqrt(2.0 * np.pi * xb)
    return _out(out.reshape(arr.shape), scalar)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero."""
    arr = _nonneg(x)
    with np.errstate(over="ignore"):
        val = np.exp(arr) * np.asarray(bessel_i0_scaled(arr))
    return _out(val, arr.ndim == 0)


def _j0_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 60):
        term = term * q / (k * k)
        total = total + term
    return total


def _j0_miller(x):
    # backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
    # J0 + 2 * sum_k J_{2k} = 1
    start = int(2 * math.ceil((float(np.max(x)) + 40.0) / 2.0))
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for k in range(start, 0, -1):
        if k % 2 == 0:
            norm = norm + 2.0 * j_cur
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm = norm * scale
    norm = norm + j_cur
    return j_cur / norm


def _j0_asymptotic(x):
    # Hankel expansion; coefficients a_k = ((2k-1)!!)^2 / (k! 8^k)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = 1.0
    for k in range(1, 31):
        a = a * (2 * k - 1) ** 2 / (8.0 * k)
        term = a / x**k
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p = p + sign * term
        else:
            q = q + sign * term
    phase = x - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(phase) + q * np.sin(phase))


def bessel_j0(x):
    """Bessel function of the first kind, order zero, for ``x >= 0``."""
    arr = _nonneg(x)
    scalar = arr.ndim == 0
    x = np.atleast_1d(arr)
    out = np.empty_like(x)

    small = x <= _J0_SERIES_MAX
    big = x >= _J0_ASYMPTOTIC_MIN
    mid = ~(small | big)
    if np.any(small):
        out[small] = _j0_series(x[small])
    if np.any(mid):
        out[mid] = _j0_miller(x[mid])
    if np.any(big):
        out[big] = _j0_asymptotic(x[big])
    return _out(out.reshape(arr.shape), scalar)


def laguerre(n, x):
    """Laguerre polynomial ``L_n(x)`` by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    arr = _as_array(x)
    prev = np.ones_like(arr)
    if n == 0:
        return _out(prev, arr.ndim == 0)
    cur = 1.0 - arr
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - arr) * cur - k * prev) / (k + 1)
    return _out(cur, arr.ndim == 0)


def laguerre_table(nmax, x):
    """Rows ``L_0(x) ... L_nmax(x)``; shape ``(nmax + 1,) + x.shape``."""
    arr = _as_array(x)
    table = np.empty((nmax + 1,) + arr.shape)
    table[0] = 1.0
    if nmax >= 1:
        table[1] = 1.0 - arr
    for k in range(1, nmax):
        table[k + 1] = ((2 * k + 1 - arr) * table[k] - k * table[k - 1]) / (k + 1)
    return table


def legendre(k, x):
    """Legendre polynomial ``P_k(x)`` by Bonnet's recurrence."""
    if k < 0:
        raise DomainError(f"order must be >= 0, got {k}")
    arr = _as_array(x)
    prev = np.ones_like(arr)
    if k == 0:
        return _out(prev, arr.ndim == 0)
    cur = arr.copy()
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1) * arr * cur - j * prev) / (j + 1)
    return _out(cur, arr.ndim == 0)


def legendre_scaled_table(kmax, u):
    """Rows ``u^k P_k(1/u)`` for ``k = 0..kmax``.

    Uses the recurrence multiplied through by ``u^(k+1)``,
    ``(k+1) Q_{k+1} = (2k+1) Q_k - k u^2 Q_{k-1}``, which only involves
    ``u^2``: the result is an even polynomial in ``u`` and stays finite at
    ``u = 0`` where it equals ``(2k-1)!!/k!``.
    """
    arr = _as_array(u, "u")
    u2 = arr * arr
    table = np.empty((kmax + 1,) + arr.shape)
    table[0] = 1.0
    if kmax >= 1:
        table[1] = 1.0
    for k in range(1, kmax):
        table[k + 1] = ((2 * k + 1) * table[k] - k * u2 * table[k - 1]) / (k + 1)
    return table


def legendre_scaled(k, u):
    """``u^k P_k(1/u)`` evaluated as a polynomial in ``u``."""
    if k < 0:
        raise DomainError(f"order must be >= 0, got {k}")
    arr = _as_array(u, "u")
    return _out(legendre_scaled_table(k, arr)[k], arr.ndim == 0)


def _hyp1f1_half_log_terms(n, z):
    # log of the ascending-series terms of 1F1(1/2; n+1; z), j = 0..J
    jmax = int(z + 40.0 * math.sqrt(z) + 60)
    j = np.arange(jmax, dtype=float)
    ratios = (0.5 + j) * z / ((n + 1.0 + j) * (j + 1.0))
    with np.errstate(divide="ignore"):
        logs = np.concatenate(([0.0], np.cumsum(np.log(ratios))))
    return logs


def hyp1f1_half_scaled(n, z):
    """``exp(-z) * 1F1(1/2; n+1; z)`` for integer ``n >= 0`` and ``z >= 0``.

    Summed in log space so it stays finite for large ``z``.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    z = float(_nonneg(z, "z"))
    if z == 0.0:
        return 1.0
    logs = _hyp1f1_half_log_terms(n, z)
    top = logs.max()
    keep = logs > top - 40.0  # drops terms below 1e-17 of the largest
    return math.exp(top - z) * math.fsum(np.exp(logs[keep] - top))


def hyp1f1_half(n, z):
    """Confluent hypergeometric ``1F1(1/2; n+1; z)`` for integer ``n >= 0``, ``z >= 0``.

    Ascending series stopped once a term drops below ``1e-16`` of the sum.
    Overflows to ``inf`` beyond ``z`` of roughly 700.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    z = float(_nonneg(z, "z"))
    if z > 600.0:
        with np.errstate(over="ignore"):
            return float(np.exp(z) * hyp1f1_half_scaled(n, z))
    total = 1.0
    term = 1.0
    j = 0
    while True:
        term *= (0.5 + j) * z / ((n + 1.0 + j) * (j + 1.0))
        total += term
        j += 1
        # the term ratio falls below one once j exceeds about z
        if term < 1e-16 * total and j > z:
            return total


def log_double_factorial_odd(k):
    """Natural log of ``(2k-1)!!``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return math.lgamma(2 * k + 1) - k * math.log(2.0) - math.lgamma(k + 1)


def double_factorial_odd(k):
    """``(2k-1)!! = 1 * 3 * ... * (2k-1)``, with ``(-1)!! = 1``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k <= 100:
        return float(math.prod(range(1, 2 * k, 2)))
    try:
        return math.exp(log_double_factorial_odd(k))
    except OverflowError:
        return math.inf
