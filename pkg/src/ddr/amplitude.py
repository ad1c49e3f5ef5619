"""Imaginary amplitudes of the form sum_i c_i (E/m)^lambda_i [ln(E/m)]^n_i.

All derivatives are taken with respect to xi = ln(E/m).
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass

from .errors import DomainError, InvalidLogPower, LambdaOutOfRange

DEFAULT_POLE_GUARD = 1e-6


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class ImTerm:
    """One term ``c * x**lam * ln(x)**n`` with ``x = E/m``."""

    c: float
    lam: float
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, numbers.Integral):
            raise InvalidLogPower(f"log power must be an integer, got {self.n!r}")
        if self.n < 0:
            raise InvalidLogPower(f"log power must be >= 0, got {self.n}")
        if not math.isfinite(self.lam) or not math.isfinite(self.c):
            raise DomainError("c and lambda must be finite")
        if self.lam >= 1:
            raise LambdaOutOfRange(
                f"lambda={self.lam} >= 1: the dispersion integral diverges")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "lam", float(self.lam))


def validate_term(c, lam, n):
    """Build a checked :class:`ImTerm`.

    Accepts integral floats for ``n`` (``2.0``) but not ``2.5``.
    """
    if isinstance(n, float):
        if not n.is_integer():
            raise InvalidLogPower(f"log power must be an integer, got {n!r}")
        n = int(n)
    return ImTerm(float(c), float(lam), n)


@dataclass(frozen=True)
class AmplitudeSpec:
    """A list of terms plus crossing parity and mass scale (GeV).

    For even parity the terms describe ``Im F+/E``; for odd parity ``Im F-``.
    """

    terms: tuple
    parity: Parity = Parity.EVEN
    mass_scale: float = 1.0

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise DomainError("an amplitude needs at least one term")
        if not all(isinstance(t, ImTerm) for t in terms):
            raise TypeError("terms must be ImTerm instances")
        if not self.mass_scale > 0:
            raise DomainError(f"mass_scale must be positive, got {self.mass_scale}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "parity", Parity(self.parity))

    def im_value(self, x):
        return sum(im_value(t, x) for t in self.terms)


class LambdaKind(enum.Enum):
    GENERIC = "generic"
    ODD_NEGATIVE = "odd_negative"
    NEAR_POLE = "near_pole"
    REJECTED = "rejected"


@dataclass(frozen=True)
class LambdaClass:
    kind: LambdaKind
    N: int | None = None
    lam: float | None = None
    pole_distance: float = math.inf

    @property
    def pole(self):
        return None if self.N is None else -(2 * self.N + 1)


def classify_lambda(lam, pole_guard=DEFAULT_POLE_GUARD):
    """Place ``lam`` relative to the poles at -(2N+1), N = 0, 1, ...

    Exact hits are decided in integer arithmetic, so ``-3.0`` is odd-negative
    while ``-3.0000001`` is only near the pole.
    """
    if not pole_guard > 0:
        raise DomainError("pole_guard must be positive")
    if lam >= 1:
        return LambdaClass(LambdaKind.REJECTED, lam=lam)
    # nearest odd negative integer
    N = max(0, int(round((-lam - 1) / 2)))
    dist = abs(lam + (2 * N + 1))
    if float(lam).is_integer():
        k = int(lam)
        if k < 0 and k % 2 != 0:
            return LambdaClass(LambdaKind.ODD_NEGATIVE, N=(-k - 1) // 2,
                               lam=lam, pole_distance=0.0)
    if dist < pole_guard:
        return LambdaClass(LambdaKind.NEAR_POLE, N=N, lam=lam, pole_distance=dist)
    return LambdaClass(LambdaKind.GENERIC, N=N, lam=lam, pole_distance=dist)


def im_value(term, x):
    """``c * x**lam * ln(x)**n`` for ``x > 1``."""
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    xi = math.log(x)
    return term.c * math.exp(term.lam * xi) * xi ** term.n


def _log_derivative_xi(term, k, xi):
    lam, n = term.lam, term.n
    total = 0.0
    # Leibniz rule on e^{lam xi} * xi^n
    for j in range(min(k, n) + 1):
        falling = math.perm(n, j)
        total += math.comb(k, j) * lam ** (k - j) * falling * xi ** (n - j)
    return term.c * math.exp(lam * xi) * total


def im_log_derivative(term, k, x):
    """k-th derivative of the term with respect to ``ln(E/m)`` at ``E/m = x``.

    ``x = 1`` is allowed: corrections at the threshold need ``Im G^(k)(m)``.
    """
    if k < 0:
        raise DomainError("derivative order must be nonnegative")
    if not x >= 1:
        raise DomainError(f"energy ratio must be >= 1, got {x}")
    return _log_derivative_xi(term, k, math.log(x))


def im_log_derivative_xi(term, k, xi):
    """Same as :func:`im_log_derivative` but parametrised by ``xi = ln x``."""
    return _log_derivative_xi(term, k, xi)
