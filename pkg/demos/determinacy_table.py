"""Determinacy of exp(-|x|^alpha) on the line and on the half-line.

Krein's log-integral settles the small exponents (indeterminate); the
factorial growth bound settles the large ones (determinate).
"""
from momentkit.determinacy import (carleman_report, exp_abs_alpha_density,
                                   exp_abs_alpha_moments, krein_report,
                                   lognormal_density, lognormal_moments)

print(f"{'alpha':>6} {'line: krein':>14} {'line: growth':>14} {'half: krein':>14} {'half: growth':>14}")
for alpha in (0.3, 0.5, 0.7, 1.0, 1.5, 2.0):
    f = exp_abs_alpha_density(alpha)
    row = [krein_report(f).verdict,
           carleman_report(exp_abs_alpha_moments(alpha), 30).verdict,
           krein_report(f, "stieltjes").verdict,
           carleman_report(exp_abs_alpha_moments(alpha, "stieltjes"), 30, "stieltjes").verdict]
    print(f"{alpha:>6} " + " ".join(f"{v:>14}" for v in row))

ln = carleman_report(lognormal_moments(), 30)
print("log-normal Carleman partial sum:", ln.evidence["partial_sums"][-1], "|", ln.verdict)
print("log-normal Krein (half-line):", krein_report(lognormal_density, "stieltjes").verdict)
