"""Lower and upper principal measures of Lebesgue measure on [0, 1].

Both reproduce s_0..s_m with index m + 1; their atoms interlace.
"""
from momentkit.existence1d import (boundary_classify, canonical_measure,
                                   measure_index, principal_measures)

for m in (2, 3, 4, 5):
    s = [1.0 / (k + 1) for k in range(m + 1)]
    print(f"m = {m}: {boundary_classify(s, 0, 1).verdict}")
    lo, hi = principal_measures(s, 0, 1)
    for name, mu in (("mu-", lo), ("mu+", hi)):
        mu = mu.sorted()
        print(f"  {name} index {measure_index(mu, 0, 1)}: "
              + ", ".join(f"{w:.4f}@{t:.4f}" for t, w in zip(mu.points[:, 0], mu.weights)))

mu = canonical_measure([1, 0.5, 1 / 3], 0, 1, 0.5).sorted()
print("canonical through 1/2:", mu)
