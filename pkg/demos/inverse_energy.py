"""
Im G = m/E: a finite real part from a divergent series
=======================================================

The tangent series of odd log-derivatives needs those derivatives to fall
off.  For Im G = m/E every odd derivative equals -m/E, so the series never
settles, yet the dispersion integral is perfectly finite.
"""

import math

from ddr import ImTerm, closed_form, pv_integral, tangent_series_probe
from ddr.engine import double_sum_ddr

term = ImTerm(1.0, -1.0, 0)

# the quadrature and the limit formula agree with the analytic answer
print(f"{'E/m':>7} {'quadrature':>20} {'closed form':>20} {'analytic':>20}")
for x in (1.5, 2.0, 5.0, 10.0, 100.0):
    exact = -(1 / math.pi) / x * math.log(x * x - 1)
    print(f"{x:7g} {pv_integral(term, x):20.15f} {closed_form(term, x).value:20.15f} {exact:20.15f}")

# the probe shows why the derivative route fails
probe = tangent_series_probe(term, 2.0, 6)
print("\nodd derivatives at E = 2m:", probe.entries)
print("verdict:", probe.describe())

# the two-point double sum reports the same thing instead of raising
res = double_sum_ddr(term, 2.0)
print("\ndouble sum converged:", res.converged)
print("first |Im G^(2k+1)(E)|:", res.diagnostics["energy_derivatives"][:6])
print("first |Im G^(k)(m)|   :", res.diagnostics["threshold_derivatives"][:6])
