"""Real parts of forward scattering amplitudes from their imaginary parts.

Four routes are provided and cross-check each other: principal-value
quadrature of the integral dispersion relation, the tangent series of the
standard derivative relation with its threshold correction, the two-point
double series, and closed forms (including the limits at odd negative
exponents).
"""
from .amplitude import (AmplitudeSpec, ImTerm, LambdaClass, LambdaKind, Parity,
                        classify_lambda, im_log_derivative, im_value, validate_term)
from .engine import (Backend, EvalResult, ProbeResult, TruncationSpec, closed_form,
                     correction_avila_menon, correction_single_sum, double_sum_ddr,
                     evaluate, evaluate_grid, generic_closed, odd_negative_closed,
                     standard_ddr_closed, tangent_series_probe)
from .errors import *  # noqa: F401,F403
from .idr import QuadOptions, pv_integral, re_f_minus, re_f_plus
from .special import (SeriesControl, a_k, bernoulli, odd_zeta_sum, polylog, s_sum,
                      t_sum, t_sum_polylog, tan_deriv, upper_gamma_int)

__version__ = "0.1.0"
