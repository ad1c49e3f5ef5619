"""
When does the tangent series converge?
======================================

For c x^lam ln(x)^n the odd log-derivatives shrink by lam^2 per step, so
the series converges for |lam| < 1, terminates for lam = 0, and diverges
otherwise.  The CLI exposes the same check through ``ddr probe``.
"""

import json
import subprocess
import sys
import tempfile

from ddr import ImTerm, tangent_series_probe

for lam, n in [(0.5, 0), (0.9, 2), (0.0, 3), (-0.7, 1), (-1.0, 0), (-2.5, 1)]:
    p = tangent_series_probe(ImTerm(1.0, lam, n), 3.0, 12)
    head = ", ".join(f"{abs(e):.3g}" for e in p.entries[:5])
    print(f"lam={lam:5g} n={n}: {p.describe():32s} |entries| {head}, ...")

# same thing from the command line
cfg = {
    "mass_scale": 1.0, "parity": "even",
    "terms": [{"c": 1.0, "lambda": -1.0, "n": 0}, {"c": 1.0, "lambda": 0.5, "n": 0}],
    "grid": {"start": 2.0, "stop": 50.0, "points": 5, "spacing": "log"},
    "backends": ["oracle", "standard"],
}
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(cfg, fh)
out = subprocess.run([sys.executable, "-m", "ddr", "probe", "--config", fh.name, "--kmax", "4"],
                     capture_output=True, text=True)
print("\n" + out.stdout)

# a run that hits the divergent term exits with status 2
out = subprocess.run([sys.executable, "-m", "ddr", "run", "--config", fh.name],
                     capture_output=True, text=True)
print("exit status:", out.returncode)
print(out.stderr.splitlines()[0])
