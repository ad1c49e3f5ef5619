"""Special functions used by the dispersion-relation formulas.

Everything here is real-valued double precision except the Bernoulli
numbers, which are exact rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (DomainError, MaxTermsExceeded, OrderTooLarge,
                     PoleError, PoleTermError)

BERNOULLI_MAX = 200
TINY = 1e-300


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite sums.

    A sum stops once the next term (times a bound on the remaining tail)
    drops below ``rel_tol`` of the partial sum.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10 ** 6
    divergence_window: int = 16

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if self.divergence_window < 1:
            raise DomainError("divergence_window must be >= 1")


DEFAULT_CONTROL = SeriesControl()


# -- Bernoulli numbers -----------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table():
    B = [Fraction(1)]
    for m in range(1, BERNOULLI_MAX + 1):
        acc = sum(math.comb(m + 1, j) * B[j] for j in range(m))
        B.append(-acc / (m + 1))
    return tuple(B)


def bernoulli(k):
    """Exact Bernoulli number ``B_k`` (``B_1 = -1/2`` convention).

    >>> bernoulli(4)
    Fraction(-1, 30)
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"Bernoulli index must be a nonnegative integer, got {k}")
    if k > BERNOULLI_MAX:
        raise OrderTooLarge(f"Bernoulli index {k} exceeds {BERNOULLI_MAX}")
    return _bernoulli_table()[int(k)]


def bernoulli_float(k):
    return float(bernoulli(k))


def odd_zeta_sum(k):
    """``sum_{p>=0} 2/(2p+1)^(2k+2)`` in closed form through ``B_{2k+2}``."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    s = 2 * k + 2
    if s <= BERNOULLI_MAX:
        coef = (2 ** s - 1) * abs(bernoulli(s)) / math.factorial(s)
        return float(coef) * math.pi ** s
    # beyond the Bernoulli table the series is 2 to double precision
    # after a handful of terms
    return sum(2.0 * float(2 * p + 1) ** -s for p in range(4))


# -- zeta and polylogarithm -------------------------------------------------

def _eta(s, n=40):
    # Cohen, Villegas, Zagier acceleration of sum (-1)^k/(k+1)^s
    d = (3 + math.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b, c, acc = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        acc += c * float(k + 1) ** -s
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    return acc / d


def zeta_int(s):
    """Riemann zeta at an integer ``s >= 2``."""
    if s < 2:
        raise DomainError("zeta_int needs s >= 2")
    if s % 2 == 0 and s <= BERNOULLI_MAX:
        val = abs(bernoulli(s)) * 2 ** (s - 1) / math.factorial(s)
        return float(val) * math.pi ** s
    return _eta(s) / (1 - 2.0 ** (1 - s))


def polylog(s, x, ctl=DEFAULT_CONTROL):
    """``Li_s(x)`` for integer ``s >= 1`` and real ``-1 <= x <= 1``.

    Only the direct power series is used; there is no continuation past
    the unit interval.  Convergence is slow as ``x`` approaches 1.
    """
    if s < 1 or int(s) != s:
        raise DomainError(f"polylog order must be a positive integer, got {s}")
    if not -1 <= x <= 1:
        raise DomainError(f"polylog argument must lie in [-1, 1], got {x}")
    if s == 1:
        if x == 1:
            raise DomainError("Li_1 diverges at x = 1")
        return -math.log1p(-x)
    if x == 0:
        return 0.0
    if x == 1:
        return zeta_int(s)
    if x == -1:
        return -_eta(s)
    ax = abs(x)
    tail_factor = 1.0 / (1.0 - ax)
    total = 0.0
    power = 1.0
    for q in range(1, ctl.max_terms + 1):
        power *= x
        term = power * float(q) ** -s
        total += term
        if abs(term) * tail_factor <= ctl.rel_tol * abs(total) or abs(term) < TINY:
            return total
    raise MaxTermsExceeded(f"Li_{s}({x}) not converged in {ctl.max_terms} terms")


# -- tangent derivative polynomials ----------------------------------------

@lru_cache(maxsize=None)
def tan_deriv_poly(j):
    """Integer coefficients (ascending powers of t) of ``D_j``.

    ``d^j tan(a)/da^j = D_j(tan a)`` with ``D_0 = t`` and
    ``D_{j+1} = (1 + t^2) D_j'``.
    """
    if j < 0:
        raise DomainError("derivative order must be nonnegative")
    if j == 0:
        return (0, 1)
    prev = tan_deriv_poly(j - 1)
    deriv = [i * prev[i] for i in range(1, len(prev))]
    out = [0] * (len(deriv) + 2)
    for i, a in enumerate(deriv):
        out[i] += a
        out[i + 2] += a
    return tuple(out)


def tan_deriv_poly_eval(j, t):
    """``D_j(t)`` by Horner's rule."""
    acc = 0.0
    for a in reversed(tan_deriv_poly(j)):
        acc = acc * t + a
    return acc


def tan_deriv(j, alpha):
    """``d^j/dalpha^j tan(alpha)``."""
    if abs(math.cos(alpha)) < 1e-12:
        raise PoleError(f"tan has a pole at alpha={alpha}")
    return tan_deriv_poly_eval(j, math.tan(alpha))


def tan_half_pi(lam):
    """``tan(pi*lam/2)`` with the argument reduced exactly in ``lam``.

    Near an odd integer ``tan`` is evaluated as ``-cot`` of the small,
    exactly computed offset, so the result keeps full relative accuracy
    however close ``lam`` is to the pole.
    """
    r = lam - 2.0 * round(lam / 2.0)     # exact, in [-1, 1]
    if abs(r) <= 0.5:
        return math.tan(math.pi * r / 2)
    s = r - math.copysign(1.0, r)         # exact offset from the odd integer
    if abs(math.pi * s / 2) < 1e-12:
        raise PoleError(f"tan(pi*lambda/2) has a pole at lambda={lam}")
    return -1.0 / math.tan(math.pi * s / 2)


# -- incomplete gamma ------------------------------------------------------

def upper_gamma_int(kp1, x):
    """``Gamma(kp1, x)`` for a positive integer order: ``(kp1-1)! e^-x sum x^j/j!``."""
    if kp1 < 1 or int(kp1) != kp1:
        raise DomainError("order must be a positive integer")
    if x < 0:
        raise DomainError("argument must be nonnegative")
    term, acc = 1.0, 1.0
    for j in range(1, int(kp1)):
        term *= x / j
        acc += term
    return math.factorial(int(kp1) - 1) * math.exp(-x) * acc


# -- tail sums -------------------------------------------------------------

def _check_ratio(x):
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")


def _s_series(n, lam, x, ctl):
    _check_ratio(x)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if lam <= -1:
        p_pole = round((-lam - 1) / 2)
        if abs(2 * p_pole + 1 + lam) < 1e-12:
            raise PoleTermError(
                f"lambda={lam} hits the pole of the term p={p_pole}")
    inv_x2 = x ** -2
    tail_factor = 1.0 / (1.0 - inv_x2)
    # terms decrease monotonically once the denominators are past the poles
    p_mono = max(0, math.ceil((-lam - 1) / 2) + 1)
    power = 1.0 / x
    total = 0.0
    for p in range(ctl.max_terms):
        term = power / (2 * p + 1 + lam) ** (n + 1)
        total += term
        power *= inv_x2
        if p >= p_mono and (abs(term) * tail_factor <= ctl.rel_tol * abs(total)
                            or abs(term) < TINY):
            break
    else:
        raise MaxTermsExceeded(f"S({n}, {lam}, {x}) not converged")
    return (-1) ** n * 2 * math.factorial(n) / math.pi * total, p + 1


def s_sum(n, lam, x, ctl=DEFAULT_CONTROL):
    """``(-1)^n (2 n!/pi) sum_p x^-(2p+1) / (2p+1+lam)^(n+1)``.

    This is the threshold correction of the two-point relation for one
    term ``x^lam ln(x)^n``.
    """
    return _s_series(n, lam, x, ctl)[0]


def t_sum(n, N, x, ctl=DEFAULT_CONTROL):
    """``(-1)^n n!/(2^n pi) sum_{p != N} x^-(2p+1) / (p-N)^(n+1)`` (direct)."""
    return _t_series(n, N, x, ctl)[0]


def _t_series(n, N, x, ctl):
    _check_ratio(x)
    if n < 0 or N < 0:
        raise DomainError("n and N must be nonnegative")
    inv_x2 = x ** -2
    tail_factor = 1.0 / (1.0 - inv_x2)
    power = 1.0 / x
    total = 0.0
    for p in range(ctl.max_terms):
        if p != N:
            term = power / (p - N) ** (n + 1)
            total += term
            if p > N and (abs(term) * tail_factor <= ctl.rel_tol * abs(total)
                          or abs(term) < TINY):
                break
        power *= inv_x2
    else:
        raise MaxTermsExceeded(f"T({n}, {N}, {x}) not converged")
    return (-1) ** n * math.factorial(n) / (2 ** n * math.pi) * total, p + 1


def t_sum_polylog(n, N, x, ctl=DEFAULT_CONTROL):
    """Same quantity as :func:`t_sum`, written with ``Li_{n+1}(x^-2)``."""
    _check_ratio(x)
    finite = sum(x ** (2 * q) * float(q) ** -(n + 1) for q in range(1, N + 1))
    li = polylog(n + 1, x ** -2, ctl)
    pref = math.factorial(n) / (2 ** n * math.pi) * x ** -(2 * N + 1)
    return pref * (-finite + (-1) ** n * li)


def a_k(k, x, ctl=DEFAULT_CONTROL):
    """Coefficient ``(1/pi)(Li_{k+1}(1/x) - Li_{k+1}(-1/x))``.

    Positive and strictly decreasing in ``k`` for fixed ``x > 1``.
    """
    _check_ratio(x)
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k == 0:
        return 2.0 / math.pi * math.atanh(1.0 / x)
    return (polylog(k + 1, 1.0 / x, ctl) - polylog(k + 1, -1.0 / x, ctl)) / math.pi
