"""Derivative dispersion relations for ``Im G = c x^lam ln(x)^n``, ``x = E/m``.

Backends
--------
oracle       principal-value quadrature of the integral relation
standard     tangent series of odd log-derivatives at E, plus the
             threshold correction as a single sum
double-sum   the two-point double series: odd derivatives at E and all
             derivatives at the threshold E = m
closed       tan-derivative closed form plus the S-sum; exact limit
             formulas at lam = -(2N+1)
avila-menon  tangent series plus the incomplete-gamma correction series
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import special
from .amplitude import (DEFAULT_POLE_GUARD, LambdaKind, Parity,
                        classify_lambda, im_log_derivative, im_log_derivative_xi,
                        im_value)
from .errors import (DDRError, DomainError, NotConverged, TermError,
                     UnsupportedLogPower)
from .idr import DEFAULT_QUAD, pv_integral
from .special import DEFAULT_CONTROL, SeriesControl

MAX_CLOSED_LOG_POWER = 3


class Backend(enum.Enum):
    ORACLE = "oracle"
    STANDARD = "standard"
    DOUBLE_SUM = "double-sum"
    CLOSED = "closed"
    AVILA_MENON = "avila-menon"


@dataclass(frozen=True)
class EvalResult:
    backend: Backend
    value: float
    terms_used: int = 0
    converged: bool = True
    diagnostics: dict | None = None

    def __post_init__(self):
        if not self.converged and self.diagnostics is None:
            raise ValueError("a non-converged result must carry diagnostics")


@dataclass(frozen=True)
class TruncationSpec:
    """Caps for the derivative order k and the geometric index p."""

    k_max: int = 4000
    p_max: int = 100_000
    ctl: SeriesControl = field(default_factory=SeriesControl)

    def __post_init__(self):
        if self.k_max < 0 or self.p_max < 0:
            raise DomainError("k_max and p_max must be nonnegative")


DEFAULT_TRUNCATION = TruncationSpec()


class NearPoleWarning(RuntimeWarning):
    pass


# -- series summation with a divergence verdict ----------------------------

@dataclass
class SeriesOutcome:
    total: float
    terms: int
    converged: bool
    trace: list          # |term| for every term summed

    @property
    def reason(self):
        return "converged" if self.converged else "non-decaying terms"


def sum_series(term_fn, k_max, ctl=DEFAULT_CONTROL, patience=8):
    """Sum ``term_fn(k)`` for ``k = 0, 1, ...`` until the tail is negligible.

    Converged when the largest term in the last ``ctl.divergence_window``
    terms is below ``ctl.rel_tol`` times the partial sum.  Gives up early
    when the window maximum has failed to fall for ``patience`` successive
    windows, or when a term overflows.
    """
    W = ctl.divergence_window
    total = 0.0
    trace = []
    stalled = 0
    for k in range(k_max + 1):
        t = term_fn(k)
        if not math.isfinite(t):
            trace.append(abs(t))
            return SeriesOutcome(total, k + 1, False, trace)
        total += t
        trace.append(abs(t))
        if k + 1 >= W and max(trace[-W:]) <= ctl.rel_tol * abs(total):
            return SeriesOutcome(total, k + 1, True, trace)
        if (k + 1) % W == 0 and k + 1 >= 2 * W:
            if max(trace[-W:]) >= max(trace[-2 * W:-W]):
                stalled += 1
                if stalled >= patience:
                    return SeriesOutcome(total, k + 1, False, trace)
            else:
                stalled = 0
    return SeriesOutcome(total, k_max + 1, False, trace)


def _not_converged(backend, diag):
    return EvalResult(backend, math.nan, diag.get("terms", 0), False, diag)


# -- closed forms ----------------------------------------------------------

def standard_ddr_closed(term, x):
    """Formal sum of the tangent series: ``c x^lam sum_j C(n,j) xi^(n-j) d^j/dlam^j tan(pi lam/2)``."""
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    t = special.tan_half_pi(term.lam)
    xi = math.log(x)
    n = term.n
    acc = 0.0
    for j in range(n + 1):
        acc += (math.comb(n, j) * xi ** (n - j) * (math.pi / 2) ** j
                * special.tan_deriv_poly_eval(j, t))
    return term.c * x ** term.lam * acc


def correction_single_sum(term, x, ctl=DEFAULT_CONTROL):
    """Threshold correction ``c S(n, lam, x)``."""
    return term.c * special.s_sum(term.n, term.lam, x, ctl)


def generic_closed(term, x, ctl=DEFAULT_CONTROL):
    """Closed form valid off the poles, with no pole dispatch.

    Near ``lam = -(2N+1)`` the two pieces are large and of opposite sign;
    use :func:`closed_form` unless the cancellation is what you want to see.
    """
    return standard_ddr_closed(term, x) + correction_single_sum(term, x, ctl)


# polynomial in xi multiplying x^-(2N+1) in the odd-negative limit
_ODD_POLY = {
    0: lambda xi: -2.0 / math.pi * xi,
    1: lambda xi: math.pi / 6 - xi ** 2 / math.pi,
    2: lambda xi: xi / 3 * (math.pi - 2.0 / math.pi * xi ** 2),
    3: lambda xi: math.pi ** 3 / 60 + math.pi / 2 * xi ** 2 - xi ** 4 / (2 * math.pi),
}


def odd_negative_closed(term, N, x, ctl=DEFAULT_CONTROL):
    """Limit value at ``lam = -(2N+1)`` (``term.lam`` itself is ignored)."""
    n = term.n
    if n > MAX_CLOSED_LOG_POWER:
        raise UnsupportedLogPower(f"no odd-negative limit formula for n={n} > 3")
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    xi = math.log(x)
    tail = special.t_sum(n, N, x, ctl)
    return term.c * (_ODD_POLY[n](xi) * x ** -(2 * N + 1) + tail)


def log_power_bernoulli(n, x, ctl=DEFAULT_CONTROL):
    """``Re G`` for ``Im G = ln(x)^n`` written with Bernoulli numbers."""
    xi = math.log(x)
    acc = 0.0
    for k in range((n - 1) // 2 + 1 if n >= 1 else 0):
        s = 2 * k + 2
        coef = (2 ** s - 1) * abs(special.bernoulli(s))
        acc += (float(coef) * math.pi ** s / (math.factorial(s) * math.factorial(n - 2 * k - 1))
                * xi ** (n - 2 * k - 1))
    # threshold piece through the polylog coefficients, not the S-sum
    tail = (-1) ** n * math.factorial(n) * special.a_k(n, x, ctl)
    return 2 * math.factorial(n) / math.pi * acc + tail


def closed_form(term, x, ctl=DEFAULT_CONTROL, pole_guard=DEFAULT_POLE_GUARD):
    """Closed-form ``Re G`` for one term, ``n <= 3``."""
    if term.n > MAX_CLOSED_LOG_POWER:
        raise UnsupportedLogPower(
            f"closed forms cover log powers up to {MAX_CLOSED_LOG_POWER}, got {term.n}")
    cls = classify_lambda(term.lam, pole_guard)
    if cls.kind is LambdaKind.GENERIC:
        _, used = special._s_series(term.n, term.lam, x, ctl)
        value = generic_closed(term, x, ctl)
        return EvalResult(Backend.CLOSED, value, used, True)
    if cls.kind is LambdaKind.NEAR_POLE:
        warnings.warn(
            f"lambda={term.lam} lies within {pole_guard} of the pole {cls.pole}; "
            f"using the exact limit formula there", NearPoleWarning, stacklevel=2)
    _, used = special._t_series(term.n, cls.N, x, ctl)
    value = odd_negative_closed(term, cls.N, x, ctl)
    return EvalResult(Backend.CLOSED, value, used, True,
                      {"lambda_class": cls.kind.value, "pole": cls.pole})


# -- series backends -------------------------------------------------------

def _tangent_terms(term, x):
    xi = math.log(x)

    def t(k):
        return 2.0 / math.pi * special.odd_zeta_sum(k) * im_log_derivative_xi(term, 2 * k + 1, xi)
    return t


def tangent_series(term, x, k_max=DEFAULT_TRUNCATION.k_max, ctl=DEFAULT_CONTROL):
    """Truncated standard relation summed term by term over odd derivatives."""
    return sum_series(_tangent_terms(term, x), k_max, ctl)


def correction_avila_menon(term, x, trunc=DEFAULT_TRUNCATION):
    """Threshold correction as the incomplete-gamma double series.

    Raises :class:`NotConverged` when the series over the derivative order
    does not settle within ``trunc``; this happens for ``lam <= -1``.
    """
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    xi = math.log(x)
    first = -math.log(abs((1 - x) / (1 + x))) / math.pi * im_log_derivative(term, 0, 1.0)

    # p grid: beyond a_max every k-term is below double precision
    a_max = int(min(2 * trunc.p_max + 1, (50.0 + xi) / xi + 3))
    a = np.arange(1, a_max + 1, 2, dtype=float)
    z = a * xi
    log_z = np.log(z)
    log_a = np.log(a)
    # Gamma(k+1, z)/k! accumulated incrementally in k
    q = np.zeros_like(a)
    state = {"k": -1}

    def inner(k):
        # advance q to order k
        while state["k"] < k:
            j = state["k"] + 1
            q[:] += np.exp(-z + j * log_z - math.lgamma(j + 1))
            state["k"] = j
        return float(np.sum(np.exp(np.log(q) - (k + 2) * log_a)))


    def t(k):
        return 2.0 / math.pi * (-1) ** (k + 1) * inner(k) * im_log_derivative_xi(term, k + 1, xi)

    with np.errstate(divide="ignore"):
        out = sum_series(t, trunc.k_max, trunc.ctl)
    if not out.converged:
        raise NotConverged(
            f"incomplete-gamma correction does not converge for lambda={term.lam}",
            trace=out.trace)
    return first + out.total


def double_sum_ddr(term, x, trunc=DEFAULT_TRUNCATION):
    """Two-point double series; the p-sums are done in closed form first.

    Non-convergence is reported through ``converged=False``.
    """
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    at_E = tangent_series(term, x, trunc.k_max, trunc.ctl)
    at_m_derivs = []

    def t_m(k):
        d = im_log_derivative_xi(term, k, 0.0)
        at_m_derivs.append(d)
        if d == 0.0:
            return 0.0
        return (-1) ** k * special.a_k(k, x, trunc.ctl) * d

    at_m = sum_series(t_m, trunc.k_max, trunc.ctl)
    diag = {
        "terms": at_E.terms + at_m.terms,
        "energy_piece": at_E.total,
        "threshold_piece": at_m.total,
        "energy_converged": at_E.converged,
        "threshold_converged": at_m.converged,
        "energy_trace": at_E.trace,
        "threshold_trace": at_m.trace,
        "energy_derivatives": [abs(im_log_derivative_xi(term, 2 * k + 1, math.log(x)))
                               for k in range(min(at_E.terms, 64))],
        "threshold_derivatives": [abs(d) for d in at_m_derivs[:64]],
    }
    if not (at_E.converged and at_m.converged):
        return _not_converged(Backend.DOUBLE_SUM, diag)
    return EvalResult(Backend.DOUBLE_SUM, at_E.total + at_m.total, diag["terms"], True, diag)


def standard_backend(term, x, trunc=DEFAULT_TRUNCATION):
    """Tangent series at E plus the single-sum threshold correction."""
    series = tangent_series(term, x, trunc.k_max, trunc.ctl)
    diag = {"terms": series.terms, "tangent_series": series.total,
            "trace": series.trace}
    if not series.converged:
        return _not_converged(Backend.STANDARD, diag)
    corr = correction_single_sum(term, x, trunc.ctl)
    diag["correction"] = corr
    return EvalResult(Backend.STANDARD, series.total + corr, series.terms, True, diag)


def avila_menon_backend(term, x, trunc=DEFAULT_TRUNCATION):
    series = tangent_series(term, x, trunc.k_max, trunc.ctl)
    diag = {"terms": series.terms, "tangent_series": series.total,
            "trace": series.trace}
    if not series.converged:
        return _not_converged(Backend.AVILA_MENON, diag)
    try:
        corr = correction_avila_menon(term, x, trunc)
    except NotConverged as exc:
        diag["correction_trace"] = exc.trace
        return _not_converged(Backend.AVILA_MENON, diag)
    diag["correction"] = corr
    return EvalResult(Backend.AVILA_MENON, series.total + corr, series.terms, True, diag)


# -- divergence probe ------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    """Odd log-derivatives at E, which decide whether the tangent series converges."""

    entries: tuple
    decaying: bool
    ratio: float | None            # asymptotic |entry_{k+1}/entry_k|
    terminates_at: int | None      # last nonzero entry when the series is finite

    @property
    def verdict(self):
        if self.terminates_at is not None or not any(self.entries):
            return "terminates"
        return "decaying" if self.decaying else "non-decaying"

    def describe(self):
        if self.verdict == "terminates":
            if self.terminates_at is None:
                return "TERMINATES (all odd derivatives vanish)"
            return f"TERMINATES at k={self.terminates_at}"
        if self.decaying:
            return f"DECAYING (geometric ratio {self.ratio:.6g})"
        return f"NON-DECAYING (ratio {self.ratio:.6g})"


def tangent_series_probe(term, x, k_max=20):
    """Odd derivatives ``Im G^(2k+1)(E)``, ``k = 0..k_max``, and a verdict.

    The series of these derivatives converges exactly when the tangent
    series does.  For ``c x^lam ln(x)^n`` the Leibniz expansion is led by
    ``lam^(2k+1)``, so consecutive entries shrink by ``lam^2`` asymptotically;
    for ``lam = 0`` the derivatives vanish past order ``n``.
    """
    if not x > 1:
        raise DomainError(f"energy ratio must exceed 1, got {x}")
    xi = math.log(x)
    entries = tuple(im_log_derivative_xi(term, 2 * k + 1, xi) for k in range(k_max + 1))
    if term.lam == 0.0 or term.c == 0.0:
        nz = [k for k, e in enumerate(entries) if e != 0.0]
        return ProbeResult(entries, True, 0.0, nz[-1] if nz else None)
    ratio = term.lam ** 2
    return ProbeResult(entries, ratio < 1.0, ratio, None)


# -- top level -------------------------------------------------------------

def _one_term(term, x, backend, ctl, trunc, quad, pole_guard):
    if backend is Backend.ORACLE:
        return EvalResult(Backend.ORACLE, pv_integral(term, x, quad), 0, True)
    if backend is Backend.CLOSED:
        return closed_form(term, x, ctl, pole_guard)
    if backend is Backend.STANDARD:
        return standard_backend(term, x, trunc)
    if backend is Backend.DOUBLE_SUM:
        return double_sum_ddr(term, x, trunc)
    if backend is Backend.AVILA_MENON:
        return avila_menon_backend(term, x, trunc)
    raise ValueError(f"unknown backend {backend!r}")


def evaluate(spec, x, backend=Backend.CLOSED, *, ctl=DEFAULT_CONTROL,
             trunc=DEFAULT_TRUNCATION, quad=DEFAULT_QUAD,
             pole_guard=DEFAULT_POLE_GUARD, amplitude=False):
    """``Re G`` at ``E/m = x`` for every term of ``spec``, summed.

    With ``amplitude=True`` the parity wrapper is applied: ``Re F+ = E Re G``
    for even amplitudes, ``Re F- = Re G`` for odd ones.  Errors raised by a
    single term are re-raised as :class:`TermError` carrying its index.
    """
    backend = Backend(backend)
    parts = []
    for i, term in enumerate(spec.terms):
        try:
            parts.append(_one_term(term, x, backend, ctl, trunc, quad, pole_guard))
        except DDRError as exc:
            raise TermError(i, exc) from exc
    converged = all(r.converged for r in parts)
    value = math.fsum(r.value for r in parts) if converged else math.nan
    diagnostics = None
    if any(r.diagnostics is not None for r in parts):
        diagnostics = {"per_term": [dict(r.diagnostics or {}, converged=r.converged)
                                    for r in parts]}
    if amplitude and spec.parity is Parity.EVEN:
        value *= x * spec.mass_scale
    return EvalResult(backend, value, sum(r.terms_used for r in parts), converged,
                      diagnostics)


def evaluate_grid(spec, xs, backend=Backend.CLOSED, **kwargs):
    return [evaluate(spec, x, backend, **kwargs) for x in xs]


def im_total(spec, x):
    return math.fsum(im_value(t, x) for t in spec.terms)
