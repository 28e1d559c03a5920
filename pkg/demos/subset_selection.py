"""Brute-force regression simulation: full subset search vs one test.

Builds a small fixed design, then estimates the coverage of the naive
interval in two regimes for each true coefficient vector on a grid:

* ``full``  -- the selection rule searches every deletion subset of the
  free columns before the interval is computed;
* ``pair``  -- the rule only chooses between keeping and dropping the
  last column.

The grid sweeps the last true coefficient through the region where
selection does the most damage.  The minimum of the full-family curve
stays below every pair-family value: searching more models can only
lower the worst-case coverage, which is why the scalar keep-or-drop
analysis yields a valid upper bound for the general case.
"""

import math

import numpy as np

from covbound import SelectionMethod, SimDesign, empirical_min_coverage

rng = np.random.default_rng(314159)
X = rng.standard_normal((15, 3))
sigma = 1.3
design = SimDesign(X=X, a=np.array([1.0, 0.5, -0.7]), q=1,
                   beta=np.array([1.0, -0.5, 0.0]), sigma=sigma)

# scale the last coefficient in units of its estimator's standard error
C = np.linalg.inv(X.T @ X)
scale = sigma * math.sqrt(C[2, 2])
gammas = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
grid = [(1.0, -0.5, g * scale) for g in gammas]

print(f"design: n = {design.n}, p = {design.p}, q = {design.q} protected")
print(f"selection by Mallows' Cp, nominal level 0.95, 100000 replications")
print()

rows = empirical_min_coverage(design, SelectionMethod("cp"), 0.05, grid,
                              reps=100_000, seed=8675309)

print(f"{'gamma':>6} {'full-family':>12} {'pair-family':>12}")
for g, row in zip(gammas, rows):
    print(f"{g:>6.1f} {row.coverage_full:>12.4f} {row.coverage_pair:>12.4f}")

worst = min(rows, key=lambda r: r.coverage_full)
print()
print(f"worst full-family coverage : {worst.coverage_full:.4f} "
      f"(+- {worst.std_err_full:.4f})")
print(f"worst pair-family coverage : "
      f"{min(r.coverage_pair for r in rows):.4f}")
print()
print("The same simulation from the command line (design file format:")
print("'n p q', then the X entries row by row, the target weights a,")
print("the true beta, and sigma, all whitespace-separated):")
print("  covbound simulate --design design.txt --method cp \\")
print("      --beta-last 0,0.15,0.3 --reps 100000")
