"""Bell's three-setting inequality: local models respect it, the singlet does not."""

import numpy as np

from localflow.bell import (
    audit_hv_bound,
    bell_slack,
    coplanar_correlation,
    coplanar_setting,
    correlation_sigma,
    hv_correlation,
    sample_singlet,
    sign_model,
)

# every deterministic strategy with perfect anticorrelation, then random mixtures
for s, l in ((3, 1), (3, 4)):
    rep = audit_hv_bound(s, l)
    print(f"exhaustive {s} settings x {l} lambdas: {rep.n_models} strategies, min slack {rep.min_slack}")
rep = audit_hv_bound(3, 4, trials=10_000, seed=1, max_exhaustive=0)
print(f"random models: {rep.n_models}, min slack {rep.min_slack:.2e}")

# dropping the anticorrelation premise breaks the bound by construction
free = audit_hv_bound(3, 1, anticorrelated=False)
print(f"without B = -A: min slack {free.min_slack}")

print("\nquantum slack at (0, 60, 120) degrees:", bell_slack(coplanar_correlation, 0, 60, 120))

n = 100_000
P = {}
for i, (x, y) in enumerate(((0, 60), (0, 120), (60, 120))):
    P[(x, y)] = sample_singlet(coplanar_setting(x), coplanar_setting(y), n, seed=i).correlation
sampled = 1 + P[(60, 120)] - abs(P[(0, 60)] - P[(0, 120)])
sigma = np.sqrt(3) * correlation_sigma(0.5, n)
print(f"sampled from {n} singlets per pair: {sampled:.4f} +- {sigma:.4f}")

angles = [0.0, 60.0, 120.0]
hv = sign_model(angles)
print(
    "local sign model at the same angles:",
    round(bell_slack(lambda a, b: hv_correlation(hv, angles.index(a), angles.index(b)), 0.0, 60.0, 120.0), 6) + 0.0,
)
