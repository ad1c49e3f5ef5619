"""Shared numerical helpers for the test modules."""
import math

import numpy as np

from ddr.engine import generic_closed, odd_negative_closed
from ddr import ImTerm
from ddr.special import SeriesControl

TIGHT = SeriesControl(rel_tol=1e-18)
LADDER = (0.08, 0.04, 0.02, 0.01)


def pole_limit_extrapolated(n, N, x, ladder=LADDER):
    """Generic closed form at -(2N+1) +/- eps, extrapolated to eps = 0.

    The symmetric average is even in eps, so a polynomial in eps^2 through
    the ladder points is evaluated at zero (Richardson in eps^2).
    """
    P = -(2 * N + 1)
    eps = np.array(ladder)
    avg = [0.5 * (generic_closed(ImTerm(1.0, P + e, n), x, TIGHT)
                  + generic_closed(ImTerm(1.0, P - e, n), x, TIGHT)) for e in ladder]
    coef = np.polyfit(eps ** 2, avg, len(ladder) - 1)
    return float(coef[-1])


def pole_limit_exact(n, N, x):
    return odd_negative_closed(ImTerm(1.0, -(2 * N + 1), n), N, x, TIGHT)


def odd_power_sum(s, P=10 ** 6):
    """``sum_p 2/(2p+1)^s`` by a direct sum over ``p <= P`` plus an
    Euler-Maclaurin estimate of the remainder."""
    p = np.arange(P + 1, dtype=float)[::-1]
    head = np.sum(2.0 * (2 * p + 1) ** -s)
    u = 2 * P + 3.0
    tail = u ** (1 - s) / (s - 1) + u ** -s + s * u ** (-s - 1) / 3.0
    return head + tail


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(b))


def config_doc(terms=((1.0, 0.5, 0),), backends=("oracle", "closed"), start=2.0, stop=100.0,
               points=10, spacing="log", parity="even", **extra):
    """Build a configuration dictionary in the documented schema."""
    doc = {
        "mass_scale": 1.0,
        "parity": parity,
        "terms": [{"c": c, "lambda": lam, "n": n} for c, lam, n in terms],
        "grid": {"start": start, "stop": stop, "points": points, "spacing": spacing},
        "backends": list(backends) if not isinstance(backends, str) else backends,
    }
    doc.update(extra)
    return doc
