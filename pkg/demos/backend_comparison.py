"""
Five routes to the same real part
=================================

For exponents inside (-1, 1) every backend converges.  Here a two-term
amplitude, a rising power with a log and a falling power, is evaluated on
a log grid by all of them and compared with the quadrature.
"""

import numpy as np

from ddr import AmplitudeSpec, Backend, ImTerm, evaluate

spec = AmplitudeSpec((ImTerm(1.3, 0.08, 1), ImTerm(0.6, -0.45, 0)))
xs = np.geomspace(1.2, 1e3, 8)

names = [b for b in Backend]
print("E/m      " + " ".join(f"{b.value:>16}" for b in names))
for x in xs:
    vals = [evaluate(spec, x, b).value for b in names]
    print(f"{x:<8.4g} " + " ".join(f"{v:16.12f}" for v in vals))

# worst disagreement with the quadrature, per backend
print()
for b in names[1:]:
    dev = max(abs(evaluate(spec, x, b).value - evaluate(spec, x, Backend.ORACLE).value)
              for x in xs)
    print(f"{b.value:>12}: max |diff| vs quadrature = {dev:.2e}")

# Re F+ = E Re G for an even amplitude with m = 0.938
even = AmplitudeSpec(spec.terms, "even", 0.938)
print("\nRe F+ at E/m = 10:", evaluate(even, 10.0, amplitude=True).value)
