"""Principal-value evaluation of the integral dispersion relation.

This is the brute-force reference every derivative representation is
checked against.  With ``xi = ln(E/m)`` the relation reads

    Re G(E) = (2/pi) PV int_0^inf  Im G(m e^s) / (e^(s-xi) - e^(xi-s)) ds

The simple pole at ``s = xi`` is removed by folding ``[xi-h, xi+h]`` onto
``[0, h]``: the kernel is odd about the pole, so the folded integrand
``(g(xi+u) - g(xi-u)) / (2 sinh u)`` is smooth.  The rest of the axis is
integrated with adaptive Gauss-Legendre panels, and the range beyond
``xi + tail_length`` is integrated exactly term by term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .amplitude import AmplitudeSpec, ImTerm, Parity
from .errors import AccuracyNotReached, DomainError, EnergyTooClose, ParityMismatch

MIN_RATIO_OFFSET = 1e-3
MAX_DEPTH = 60


@dataclass(frozen=True)
class QuadOptions:
    rel_tol: float = 1e-10
    tail_length: float = 30.0       # exact integration beyond xi + tail_length
    pv_pairing_points: int = 64     # Gauss-Legendre nodes per panel
    min_ratio: float = MIN_RATIO_OFFSET
    pv_half_width: float | None = None   # default min(0.5, xi)

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.pv_pairing_points < 2:
            raise DomainError("need at least 2 points per panel")
        if not self.tail_length > 0:
            raise DomainError("tail_length must be positive")


DEFAULT_QUAD = QuadOptions()


@lru_cache(maxsize=8)
def _gauss(npts):
    return np.polynomial.legendre.leggauss(npts)


def _panel(f, a, b, nodes, weights):
    half = 0.5 * (b - a)
    return half * np.dot(weights, f(a + half * (nodes + 1.0)))


def adaptive_gauss(f, a, b, abs_tol, npts=64):
    """Integrate vectorised ``f`` on ``[a, b]`` by panel bisection.

    A panel is accepted when its two halves agree with the whole to within
    its share of ``abs_tol``.
    """
    if b <= a:
        return 0.0
    nodes, weights = _gauss(npts)
    total = 0.0
    stack = [(a, b, _panel(f, a, b, nodes, weights), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid, nodes, weights)
        right = _panel(f, mid, hi, nodes, weights)
        local_tol = abs_tol * (hi - lo) / (b - a)
        if abs(left + right - whole) <= max(local_tol, 1e-300):
            total += left + right
        elif depth >= MAX_DEPTH:
            raise AccuracyNotReached(
                f"panel [{lo}, {hi}] unresolved after {MAX_DEPTH} bisections")
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def _weighted(term, xi):
    """Integrand ``Im G(m e^s) / (2 sinh(s - xi))`` away from the pole."""
    lam, n, c = term.lam, term.n, term.c

    def f(s):
        d = s - xi
        ad = np.abs(d)
        # e^{lam s} / (2 sinh d) without overflow
        k = np.sign(d) * np.exp(lam * s - ad) / (-np.expm1(-2.0 * ad))
        return c * k * s ** n
    return f


def _folded(term, xi):
    lam, n, c = term.lam, term.n, term.c

    def g(s):
        return c * np.exp(lam * s) * s ** n

    def f(u):
        return (g(xi + u) - g(xi - u)) / (2.0 * np.sinh(u))
    return f


def _tail(term, xi, cut):
    """Exact ``int_cut^inf`` via the geometric expansion of the kernel."""
    lam, n, c = term.lam, term.n, term.c
    total = 0.0
    for p in range(1000):
        a = 2 * p + 1 - lam
        z = a * cut
        poly, t = 1.0, 1.0
        for j in range(1, n + 1):
            t *= z / j
            poly += t
        # e^{(2p+1) xi} Gamma(n+1, a cut) / a^{n+1}
        term_p = math.factorial(n) * math.exp((2 * p + 1) * xi - z) * poly / a ** (n + 1)
        total += term_p
        if abs(term_p) <= 1e-17 * abs(total):
            break
    return c * total


def _term_integral(term, xi, opt):
    h = opt.pv_half_width
    h = min(0.5, xi) if h is None else min(h, xi)
    cut = xi + max(opt.tail_length, h)
    npts = opt.pv_pairing_points
    left_f = _weighted(term, xi)
    fold_f = _folded(term, xi)
    nodes, weights = _gauss(npts)

    # rough magnitudes set the absolute tolerance for every piece
    pieces = [
        _panel(fold_f, 0.0, h, nodes, weights),
        _panel(left_f, 0.0, xi - h, nodes, weights) if xi - h > 0 else 0.0,
        _panel(left_f, xi + h, cut, nodes, weights),
        _tail(term, xi, cut),
    ]
    scale = max(abs(v) for v in pieces) or abs(term.c) or 1.0
    tol = 0.1 * opt.rel_tol * scale
    total = adaptive_gauss(fold_f, 0.0, h, tol, npts)
    total += adaptive_gauss(left_f, 0.0, xi - h, tol, npts)
    total += adaptive_gauss(left_f, xi + h, cut, tol, npts)
    total += pieces[3]
    return 2.0 / math.pi * total


def pv_integral(spec, x, opt=DEFAULT_QUAD):
    """``Re G`` at ``E/m = x`` by direct principal-value quadrature.

    ``spec`` may be an :class:`AmplitudeSpec` or a single :class:`ImTerm`.
    Terms are integrated separately and summed.
    """
    if not x > 1 + opt.min_ratio:
        raise EnergyTooClose(
            f"E/m={x} must exceed {1 + opt.min_ratio}; Re G diverges as E -> m")
    terms = (spec,) if isinstance(spec, ImTerm) else spec.terms
    xi = math.log(x)
    return math.fsum(_term_integral(t, xi, opt) for t in terms)


def _check_energy(spec, E):
    m = spec.mass_scale
    if not E > m * (1 + MIN_RATIO_OFFSET):
        raise EnergyTooClose(f"E={E} must exceed m*(1+{MIN_RATIO_OFFSET})={m * (1 + MIN_RATIO_OFFSET)}")
    return E / m


def re_f_plus(spec, E, re_g=None):
    """``Re F+(E) = E Re G(E)`` for an even amplitude.

    ``re_g`` is an optional callable ``(spec, x) -> Re G``; the quadrature
    oracle is used when it is omitted.
    """
    if spec.parity is not Parity.EVEN:
        raise ParityMismatch("re_f_plus needs an even-parity amplitude")
    x = _check_energy(spec, E)
    value = (re_g or pv_integral)(spec, x)
    return E * value


def re_f_minus(spec, E, re_g=None):
    """``Re F-(E) = Re G(E)`` for an odd amplitude."""
    if spec.parity is not Parity.ODD:
        raise ParityMismatch("re_f_minus needs an odd-parity amplitude")
    x = _check_energy(spec, E)
    return (re_g or pv_integral)(spec, x)
