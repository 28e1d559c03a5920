"""Quickstart: how low can the coverage of a naive interval go?

A 95% confidence interval built after choosing between a full regression
model and a submodel (dropping the last coefficient) is only honest if
the selection step is taken into account.  This script computes the
coverage probability of the naive interval as a function of the scaled
last coefficient gamma, minimizes it, and prints the resulting upper
bound on the minimum coverage.
"""

import numpy as np

from covbound import (BoundProblem, SelectionMethod, coverage_bound,
                      coverage_probability)

ALPHA = 0.05     # nominal 95% interval
M = 20           # error degrees of freedom (n - p)
RHO = 0.8        # correlation between the target estimate and the
                 # estimate of the coefficient being tested

problem = BoundProblem.from_m(ALPHA, 2, M, RHO)
method = SelectionMethod("cp")

print(f"nominal level      : {1 - ALPHA:.2f}")
print(f"selection by       : Mallows' Cp (threshold sqrt(2))")
print(f"degrees of freedom : m = {M}")
print(f"correlation        : rho = {RHO}")
print()

print("coverage of the naive interval as the true scaled coefficient varies:")
for gamma in np.arange(0.0, 4.5, 0.5):
    res = coverage_probability(problem, method, float(gamma))
    bar = "#" * int(round(60 * res.value))
    print(f"  gamma = {gamma:4.1f}   coverage = {res.value:.4f}  {bar}")
print()

bound = coverage_bound(problem, method)
print(f"minimum over gamma : {bound.bound:.4f} at gamma = {bound.gamma_star:.3f}")
print(f"coverage shortfall : {(1 - ALPHA) - bound.bound:.4f} below nominal")
print()
print("The same number from the command line:")
print(f"  covbound bound --method cp --m {M} --rho {RHO}")
