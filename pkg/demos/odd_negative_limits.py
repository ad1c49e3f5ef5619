"""
Approaching lambda = -(2N+1)
============================

At odd negative exponents the tangent and the threshold sum each blow up.
Their sum stays finite, and the limit formulas give it directly.  Watch the
two pieces grow while their total converges.
"""

from ddr import ImTerm, closed_form
from ddr.engine import correction_single_sum, generic_closed, standard_ddr_closed
from ddr.special import SeriesControl

tight = SeriesControl(rel_tol=1e-18)
x = 2.0

for N in (0, 1):
    pole = -(2 * N + 1)
    limit = closed_form(ImTerm(1.0, pole, 1), x).value
    print(f"pole lambda = {pole}, n = 1, limit value {limit:.12f}")
    print(f"{'eps':>8} {'tangent part':>18} {'threshold sum':>18} {'total':>16}")
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        t = ImTerm(1.0, pole + eps, 1)
        a = standard_ddr_closed(t, x)
        b = correction_single_sum(t, x, tight)
        print(f"{eps:8.0e} {a:18.6f} {b:18.6f} {generic_closed(t, x, tight):16.12f}")
    print()

# within the pole guard the limit formula is used, with a warning
import warnings
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    r = closed_form(ImTerm(1.0, -3 + 1e-9, 2), x)
print("near-pole value:", r.value, "| warning:", caught[0].message if caught else None)
